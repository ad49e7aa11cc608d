"""Level sweeps, decay-order fits and the semiclassical battery."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import os

import numpy as np
from scipy.optimize import minimize

from .geometry import laplacian, manifold, poisson_bracket, standard_function
from .hilbert import as_homogeneous, build_section_space
from .operators import commutator, multiply, operator_norm, toeplitz, tuynman_residual
from . import _kernels

DEFAULT_M_RANGE = tuple(range(4, 61, 2))
GRID_SIZE = 200
INEQUALITY_TOL = 1e-10


class InequalityViolation(AssertionError):
    pass


def default_workers():
    env = os.environ.get("BTQ_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_levels(fn, m_range, workers):
    workers = workers or default_workers()
    if workers <= 1 or len(m_range) == 1:
        return [fn(m) for m in m_range]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, m_range))


def fit_slope(ms, values, fraction=0.5):
    """Least-squares slope of ``log value`` vs ``log m`` over the top ``fraction``.

    Returns ``(slope, intercept, (m_lo, m_hi), r2)``; the slope is ``None``
    when any fitted value is not strictly positive.
    """
    ms = np.asarray(ms, dtype=float)
    values = np.asarray(values, dtype=float)
    count = max(2, int(np.ceil(fraction * len(ms))))
    sel = slice(len(ms) - count, None)
    x, y = ms[sel], values[sel]
    if len(x) < 2 or np.any(y <= 0):
        return None, None, (x[0], x[-1]) if len(x) else (None, None), None
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = np.sum((ly - pred) ** 2)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), (int(x[0]), int(x[-1])), float(r2)


@dataclass
class ConvergenceTable:
    label: str
    ms: np.ndarray
    values: np.ndarray
    slope: float = None
    intercept: float = None
    fit_range: tuple = None
    r2: float = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ms = np.asarray(self.ms, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.ms) <= 0):
            raise ValueError("levels must be strictly increasing")
        if self.slope is None:
            self.slope, self.intercept, self.fit_range, self.r2 = fit_slope(self.ms, self.values)

    @property
    def rows(self):
        return list(zip(self.ms.tolist(), self.values.tolist()))

    def refit(self, fraction):
        return fit_slope(self.ms, self.values, fraction)[0]

    def as_records(self):
        return [{"m": int(m), "value": float(v)} for m, v in self.rows]


def _space(model, m):
    return build_section_space(model, m)


# ---------------------------------------------------------------------------
# sup norms

def sample_grid(model=None, size=GRID_SIZE):
    """Cell-centred ``size x size`` grid in ``(u, phi)``, returned as chart-0 points."""
    u = (np.arange(size) + 0.5) / size
    phi = 2 * np.pi * np.arange(size) / size
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    z = np.sqrt(uu / (1 - uu)) * np.exp(1j * pp)
    z = z.ravel()
    if model is not None and model.complex_dimension == 2:
        raise ValueError("sample_grid covers CP^1 only")
    return z


def estimate_sup_norm(f, size=GRID_SIZE):
    """``max |f|`` on the grid, refined by a local bounded search from the best node."""
    if f.sup_norm is not None:
        return float(f.sup_norm)
    if f.n != 1:
        raise ValueError("numerical sup norm only implemented on CP^1")
    z = sample_grid(size=size)
    vals = np.abs(f(z))
    best = float(vals.max())
    i = int(np.argmax(vals))
    u0 = np.abs(z[i]) ** 2 / (1 + np.abs(z[i]) ** 2)
    p0 = np.angle(z[i])

    def neg(p):
        u = np.clip(p[0], 0.0, 1 - 1e-12)
        zz = np.sqrt(u / (1 - u)) * np.exp(1j * p[1])
        return -float(np.abs(f(np.array([zz])))[0])

    res = minimize(neg, [u0, p0], method="L-BFGS-B",
                   bounds=[(0.0, 1 - 1e-12), (p0 - np.pi, p0 + np.pi)])
    return max(best, -float(res.fun))


# ---------------------------------------------------------------------------
# sweeps

def sweep_norm_limit(f, m_range=DEFAULT_M_RANGE, model=None, workers=None):
    """``|f|_inf - ||T_f^(m)||`` per level."""
    model = model or manifold("cp1")
    sup = estimate_sup_norm(f)

    def one(m):
        return sup - operator_norm(toeplitz(_space(model, m), f))

    vals = _map_levels(one, list(m_range), workers)
    return ConvergenceTable(f"norm_gap[{f.name}]", list(m_range), vals)


def sweep_dirac(f, g, m_range=DEFAULT_M_RANGE, model=None, workers=None):
    """``|| m i [T_f, T_g] - T_{f,g} ||`` per level."""
    model = model or manifold("cp1")
    bracket = poisson_bracket(f, g)

    def one(m):
        sp = _space(model, m)
        lhs = (1j * m) * commutator(toeplitz(sp, f), toeplitz(sp, g))
        return operator_norm(lhs - toeplitz(sp, bracket))

    vals = _map_levels(one, list(m_range), workers)
    return ConvergenceTable(f"dirac[{f.name},{g.name}]", list(m_range), vals)


def sweep_product(f, g, m_range=DEFAULT_M_RANGE, model=None, workers=None):
    """``|| T_f T_g - T_{fg} ||`` per level."""
    model = model or manifold("cp1")
    fg = f * g

    def one(m):
        sp = _space(model, m)
        return operator_norm(multiply(toeplitz(sp, f), toeplitz(sp, g)) - toeplitz(sp, fg))

    vals = _map_levels(one, list(m_range), workers)
    return ConvergenceTable(f"product[{f.name},{g.name}]", list(m_range), vals)


def _berezin_on(space, f, z):
    hom, _ = as_homogeneous(space, z)
    return _kernels.expectation(space.section_values(hom), toeplitz(space, f).entries)


def sweep_berezin(f, m_range=DEFAULT_M_RANGE, model=None, grid=None, workers=None):
    """``sup_grid |B^(m) f - f|`` per level."""
    model = model or manifold("cp1")
    z = sample_grid() if grid is None else np.asarray(grid)
    fz = f(z)

    def one(m):
        return float(np.max(np.abs(_berezin_on(_space(model, m), f, z) - fz)))

    vals = _map_levels(one, list(m_range), workers)
    return ConvergenceTable(f"berezin[{f.name}]", list(m_range), vals)


@dataclass
class A1Estimate:
    points: np.ndarray
    values: np.ndarray
    laplacian_ratio: float
    misfit: float
    fit_levels: tuple


def estimate_A1(f, m_range=DEFAULT_M_RANGE, points=None, model=None, fraction=0.5,
                workers=None):
    """First Berezin-transform coefficient from ``m (B^(m) f - f)``.

    Fits ``A1 + c1/m + c2/m^2`` pointwise over the upper ``fraction`` of the
    levels, then the constant ``kappa`` with ``A1 ~ kappa * Lap f``.
    """
    model = model or manifold("cp1")
    z = np.asarray(points if points is not None else sample_grid(size=20))
    ms = np.asarray(list(m_range))
    count = max(3, int(np.ceil(fraction * len(ms))))
    ms = ms[len(ms) - count:]
    fz = f(z)
    rows = _map_levels(lambda m: m * (_berezin_on(_space(model, m), f, z) - fz), list(ms),
                       workers)
    design = np.vander(1.0 / ms, 3, increasing=True)
    coef, *_ = np.linalg.lstsq(design, np.array(rows), rcond=None)
    a1 = coef[0]
    lap = laplacian(f)(z)
    denom = np.vdot(lap, lap).real
    if denom == 0:
        kappa, misfit = float("nan"), float(np.linalg.norm(a1))
    else:
        kappa = complex(np.vdot(lap, a1) / denom)
        kappa = kappa.real
        misfit = float(np.linalg.norm(a1 - kappa * lap) / max(np.linalg.norm(a1), 1e-300))
    return A1Estimate(z, a1, kappa, misfit, (int(ms[0]), int(ms[-1])))


def tuynman_table(functions=None, m_range=range(2, 41), model=None, workers=None):
    """Frobenius residual of the Tuynman relation, worst case over ``functions``."""
    model = model or manifold("cp1")
    functions = functions or [standard_function(s) for s in ("x1", "x2", "x3")]

    def one(m):
        sp = _space(model, m)
        return max(tuynman_residual(sp, f) for f in functions)

    vals = _map_levels(one, list(m_range), workers)
    return ConvergenceTable("tuynman", list(m_range), vals, slope=float("nan"))


# ---------------------------------------------------------------------------
# inequality chain

def inequality_battery(m_range=DEFAULT_M_RANGE, functions=None, model=None, grid_size=GRID_SIZE,
                       tol=INEQUALITY_TOL, raise_on_violation=True, workers=None):
    """Check ``|B f|_inf <= ||T_f|| <= |f|_inf`` for every level and function.

    Returns a list of dicts with the three numbers and both slacks.
    """
    from .geometry import function_library

    model = model or manifold("cp1")
    functions = functions or function_library(model)
    z = sample_grid(size=grid_size)
    sups = {f.name: estimate_sup_norm(f) for f in functions}

    def one(m):
        sp = _space(model, m)
        hom, _ = as_homogeneous(sp, z)
        phi = sp.section_values(hom)
        out = []
        for f in functions:
            t = toeplitz(sp, f)
            b_sup = float(np.max(np.abs(_kernels.expectation(phi, t.entries))))
            t_norm = operator_norm(t)
            out.append({"m": m, "function": f.name, "berezin_sup": b_sup,
                        "operator_norm": t_norm, "sup_norm": sups[f.name],
                        "slack_lower": t_norm - b_sup, "slack_upper": sups[f.name] - t_norm})
        return out

    report = [row for rows in _map_levels(one, list(m_range), workers) for row in rows]
    bad = [r for r in report if r["slack_lower"] < -tol or r["slack_upper"] < -tol]
    if bad and raise_on_violation:
        r = bad[0]
        raise InequalityViolation(
            f"inequality chain violated for {r['function']} at m={r['m']}: {r}")
    return report
