"""Berezin symbols, the modified measure, and the Berezin transform."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import ChartPoint, SmoothFunction, lift, monomial, random_points
from .hilbert import as_homogeneous, epsilon_function
from .operators import OperatorMatrix, LevelMismatchError, operator_norm, toeplitz

SPAN_TOL = 1e-8


class ToeplitzSpanError(RuntimeError):
    pass


def _check_level(a, space):
    if a.level != space.level or a.dim != space.dimension:
        raise LevelMismatchError(f"operator level {a.level} does not match space level {space.level}")


@dataclass(frozen=True, eq=False)
class SymbolFunction:
    """Covariant symbol ``x -> <e_x, A e_x> / <e_x, e_x>`` of an operator."""
    level: object
    operator: OperatorMatrix
    space: object

    def __call__(self, x):
        hom, scalar = as_homogeneous(self.space, x)
        vals = _kernels.expectation(self.space.section_values(hom), self.operator.entries)
        return complex(vals[0]) if scalar else vals

    def at_nodes(self):
        return _kernels.expectation(self.space.phi_nodes, self.operator.entries)


def covariant_symbol(a, space):
    _check_level(a, space)
    return SymbolFunction(space.level, a, space)


def _values(f, nodes):
    return f(nodes) if callable(f) else np.asarray(f)


def modified_measure_integrate(space, f):
    """Quadrature of ``f`` against ``Omega_eps = eps Omega``."""
    rule = space.rule
    eps = epsilon_function(space, rule.nodes)
    return complex(np.dot(rule.weights * eps, _values(f, rule.nodes)))


def eps_inner(space, f, g):
    """``<f, g>_eps``, conjugate-linear in the first slot."""
    rule = space.rule
    eps = epsilon_function(space, rule.nodes)
    return complex(np.dot(rule.weights * eps,
                          np.conj(_values(f, rule.nodes)) * _values(g, rule.nodes)))


def contravariant_reconstruct(space, f):
    """``int f(x) P_x Omega_eps(x)`` assembled from explicit coherent projectors."""
    rule = space.rule
    phi = space.phi_nodes
    eps = np.einsum("nj,nj->n", phi, phi.conj()).real
    unit = phi / np.sqrt(eps)[:, None]
    # P_x = e e^H / |e|^2 with e = conj(phi): (P_x)_jk = conj(unit_j) unit_k
    w = rule.weights * eps * _values(f, rule.nodes)
    return OperatorMatrix(space.level, _kernels.cross_gram(unit, w, unit))


# ---------------------------------------------------------------------------
# surjectivity of the Toeplitz map

def monomial_family(space):
    """``monomial(j,k)`` with ``j, k <= m`` (tensor products on CP^1 x CP^1)."""
    if space.n == 1:
        m = space.level
        return [monomial(j, k) for j in range(m + 1) for k in range(m + 1)]
    fams = [[(j, k) for j in range(mi + 1) for k in range(mi + 1)] for mi in space.levels]
    out = []
    for j1, k1 in fams[0]:
        for j2, k2 in fams[1]:
            out.append(lift(monomial(j1, k1), 0) * lift(monomial(j2, k2), 1))
    return out


def toeplitz_map_matrix(space, functions=None):
    """Columns ``vec(T_f)`` for ``f`` in the monomial family, shape ``(d^2, F)``."""
    functions = functions or monomial_family(space)
    band = max(f.band for f in functions)
    work = space if min(space.rule.level_capacity) - max(space.levels) >= band \
        else space.with_band(band)
    rule = work.rule
    phi = work.phi_nodes
    vals = np.stack([f(rule.nodes) for f in functions], axis=1) * rule.weights[:, None]
    mats = np.einsum("ni,nf,nj->ijf", phi.conj(), vals, phi, optimize=True)
    return mats.reshape(work.dimension ** 2, len(functions)), functions


@dataclass(frozen=True)
class ContravariantSolution:
    coefficients: np.ndarray
    functions: list
    residual: float
    rank: int
    singular_values: np.ndarray

    def as_function(self):
        total = None
        for c, f in zip(self.coefficients, self.functions):
            if c == 0:
                continue
            term = complex(c) * f
            total = term if total is None else total + term
        return total


def contravariant_solve(a, space, tol=SPAN_TOL):
    """Minimal-norm least-squares ``sum_jk c_jk T_{monomial(j,k)} = A``."""
    _check_level(a, space)
    mat, fns = toeplitz_map_matrix(space)
    # unit columns: same solution set, far better conditioned for high-degree monomials
    scale = np.linalg.norm(mat, axis=0)
    coef, _, rank, sv = np.linalg.lstsq(mat / scale, a.entries.ravel(), rcond=None)
    coef = coef / scale
    resid = float(np.linalg.norm(mat @ coef - a.entries.ravel()))
    a_norm = operator_norm(a)
    if resid > tol * max(a_norm, np.finfo(float).tiny):
        raise ToeplitzSpanError(
            f"Toeplitz span deficient: residual {resid:.3e} for operator norm {a_norm:.3e}")
    return ContravariantSolution(coef, fns, resid, int(rank), sv)


def symbol_sampling_rank(space, n_points, rng=None):
    """Rank of ``A -> sigma(A)`` sampled at ``n_points`` generic points."""
    rng = np.random.default_rng(rng)
    z = random_points(space.model, n_points, rng)
    hom, _ = as_homogeneous(space, z)
    phi = space.section_values(hom)
    eps = np.einsum("nj,nj->n", phi, phi.conj()).real
    # sigma(E_jk)(x) = phi_j conj(phi_k) / eps
    cols = np.einsum("nj,nk->njk", phi, phi.conj()) / eps[:, None, None]
    mat = cols.reshape(n_points, -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > 1e-10 * sv[0])), sv


# ---------------------------------------------------------------------------
# adjointness and the Berezin transform

def adjointness_check(a, f, space):
    """``|<A, T_f>_HS - <sigma(A), f>_eps|`` with both sides computed independently."""
    _check_level(a, space)
    lhs = complex(np.vdot(a.entries, toeplitz(space, f).entries))
    sigma = covariant_symbol(a, space).at_nodes()
    rhs = eps_inner(space, sigma, f)
    return abs(lhs - rhs)


def berezin_transform(space, f, x, method="coherent"):
    """``B^(m) f (x) = sigma(T_f)(x)``.

    ``method="kernel"`` evaluates ``int f(y) K(x, y) Omega_eps(y)`` by
    quadrature instead of going through the Toeplitz matrix.
    """
    hom, scalar = as_homogeneous(space, x)
    if method == "coherent":
        vals = _kernels.expectation(space.section_values(hom), toeplitz(space, f).entries)
    elif method == "kernel":
        rule = space.rule
        phi_x = space.section_values(hom)
        kmat = _kernels.overlap(phi_x, space.phi_nodes)
        eps = np.einsum("nj,nj->n", space.phi_nodes, space.phi_nodes.conj()).real
        vals = kmat @ (rule.weights * eps * f(rule.nodes))
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(vals[0]) if scalar else vals


def berezin_function(space, f):
    """``B^(m) f`` as a :class:`SmoothFunction`-compatible evaluator (values only)."""
    t = toeplitz(space, f)
    sym = covariant_symbol(t, space)
    def chart1(w):
        w = np.atleast_1d(w)
        if space.n == 1:
            pts = [ChartPoint(1, v) for v in w.ravel()]
        else:
            pts = [ChartPoint((1,) * space.n, tuple(v)) for v in w.reshape(-1, space.n)]
        return sym(pts)

    return SmoothFunction(name=f"B({f.name})", n=space.n, value=lambda z: sym(z),
                          value_chart1=chart1, is_real=f.is_real)
