"""Kähler geometry of CP^1 and CP^1 x CP^1 in the affine chart.

Normalization: on CP^1 the Kähler form is ``i (1+|z|^2)^-2 dz ^ dzbar``, so
the volume density against ``dx dy`` is ``2 (1+|z|^2)^-2`` and the total
volume is ``2 pi``.  The bundle metric in the frame ``s0 = 1`` is
``hhat = (1+|z|^2)^-1``; level ``m`` uses ``hhat**m``.

Point arrays in chart 0 have shape ``(...,)`` on CP^1 and ``(..., 2)`` on the
product.  Derivative fields of a :class:`SmoothFunction` have the shape of
the point array (one column per factor on the product).
"""
from dataclasses import dataclass, replace
import re

import numpy as np

from . import conventions

CP1 = "CP1"
CP1xCP1 = "CP1xCP1"

FD_STEP = 1e-5


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True)
class ChartPoint:
    """A point in chart 0 (affine ``z``) or chart 1 (``w = 1/z``).

    On the product manifold ``chart`` and ``z`` are pairs, one per factor.
    """
    chart: object
    z: object

    def __post_init__(self):
        charts = self.chart if isinstance(self.chart, tuple) else (self.chart,)
        coords = self.z if isinstance(self.z, tuple) else (self.z,)
        if len(charts) != len(coords):
            raise ValueError("chart and coordinate tuples differ in length")
        for c, z in zip(charts, coords):
            if c not in (0, 1):
                raise ValueError(f"chart id must be 0 or 1, got {c}")
            if not np.isfinite(complex(z)):
                raise ValueError("chart coordinate must be finite")

    @property
    def charts(self):
        return self.chart if isinstance(self.chart, tuple) else (self.chart,)

    @property
    def coords(self):
        c = self.z if isinstance(self.z, tuple) else (self.z,)
        return tuple(complex(v) for v in c)

    def _pack(self, charts, coords):
        if isinstance(self.chart, tuple):
            return ChartPoint(tuple(charts), tuple(coords))
        return ChartPoint(charts[0], coords[0])

    def to_chart(self, chart):
        """Transition map ``w = 1/z``; raises if the point is at the chart's infinity."""
        targets = chart if isinstance(chart, tuple) else (chart,) * len(self.charts)
        coords = []
        for c, z, t in zip(self.charts, self.coords, targets):
            if c == t:
                coords.append(z)
            elif z == 0:
                raise ValueError("point lies at infinity of the target chart")
            else:
                coords.append(1.0 / z)
        return self._pack(targets, coords)

    def homogeneous(self):
        """Unit homogeneous coordinates ``(a, b)`` per factor, shape ``(n, 2)``."""
        out = np.empty((len(self.charts), 2), dtype=complex)
        for i, (c, z) in enumerate(zip(self.charts, self.coords)):
            s = np.sqrt(1.0 + abs(z) ** 2)
            out[i] = (z / s, 1.0 / s) if c == 0 else (1.0 / s, z / s)
        return out


def homogeneous_from_chart0(z, n):
    """Unit homogeneous coordinates for chart-0 arrays; returns ``(N, n, 2)``."""
    z = np.asarray(z, dtype=complex)
    z = z.reshape(-1, n)
    s = np.sqrt(1.0 + np.abs(z) ** 2)
    return np.stack([z / s, 1.0 / s], axis=-1)


# ---------------------------------------------------------------------------
# manifold model

@dataclass(frozen=True)
class ManifoldModel:
    kind: str
    complex_dimension: int

    @property
    def total_volume(self):
        return (2 * np.pi) ** self.complex_dimension

    def levels(self, m):
        """Normalize a level to a per-factor tuple of ints."""
        if np.ndim(m) == 0:
            ms = (int(m),) * self.complex_dimension
        else:
            ms = tuple(int(v) for v in m)
        if len(ms) != self.complex_dimension:
            raise ValueError(f"{self.kind} expects {self.complex_dimension} level(s), got {m!r}")
        if min(ms) < 1:
            raise ValueError(f"level must be >= 1, got {m!r}")
        return ms

    def _cols(self, z):
        z = np.asarray(z, dtype=complex)
        if self.complex_dimension == 1:
            return [z]
        return [z[..., i] for i in range(self.complex_dimension)]

    def log_bundle_metric(self, z, m=1):
        ms = self.levels(m)
        return sum(-mi * np.log1p(np.abs(zi) ** 2) for mi, zi in zip(ms, self._cols(z)))

    def bundle_metric_density(self, z, m=1):
        """``hhat**m`` in the chart-0 frame."""
        return np.exp(self.log_bundle_metric(z, m))

    def factor_volume_densities(self, z):
        return [2.0 / (1.0 + np.abs(zi) ** 2) ** 2 for zi in self._cols(z)]

    def volume_density(self, z):
        """Density of the Liouville volume ``omega^n / n!`` against chart Lebesgue measure."""
        return np.prod(self.factor_volume_densities(z), axis=0)


def manifold(kind):
    key = {"cp1": CP1, "cp1xcp1": CP1xCP1}.get(str(kind).lower())
    if key is None:
        raise ValueError(f"unknown manifold kind {kind!r}; expected cp1 or cp1xcp1")
    return ManifoldModel(key, 1 if key == CP1 else 2)


def kaehler_potential(model, m, x):
    """``K = -log h^m(s0, s0)`` relative to the chart-0 frame ``s0 = 1``."""
    if not isinstance(x, ChartPoint):
        x = ChartPoint(*((0, x) if model.complex_dimension == 1
                         else ((0,) * model.complex_dimension, tuple(x))))
    if any(c != 0 for c in x.charts):
        raise ValueError("potential defined relative to chart-0 frame")
    z = np.array(x.coords) if model.complex_dimension > 1 else x.coords[0]
    return float(-model.log_bundle_metric(z, m))


def _complex_hessian_fd(func, z, n, h):
    """Matrix ``d^2 func / dz_i dzbar_j`` of a real function by central differences."""
    z = np.asarray(z, dtype=complex).reshape(-1, n)
    steps = []
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = h
        steps.append(e)
        e = np.zeros(n, dtype=complex)
        e[i] = 1j * h
        steps.append(e)

    def second(p, q):
        fpp = func(z + p + q)
        fpm = func(z + p - q)
        fmp = func(z - p + q)
        fmm = func(z - p - q)
        return (fpp - fpm - fmp + fmm) / (4 * h * h)

    hess = np.empty((z.shape[0], n, n), dtype=complex)
    for i in range(n):
        xi, yi = steps[2 * i], steps[2 * i + 1]
        for j in range(n):
            xj, yj = steps[2 * j], steps[2 * j + 1]
            hxx = second(xi, xj)
            hyy = second(yi, yj)
            hxy = second(xi, yj)
            hyx = second(yi, xj)
            # d_i dbar_j = 1/4 (dx_i - i dy_i)(dx_j + i dy_j)
            hess[:, i, j] = 0.25 * (hxx + hyy + 1j * (hxy - hyx))
    return hess


def verify_quantization_condition(model, sample_points, h=1e-4):
    """Max deviation of ``-d dbar log hhat`` (finite differences) from the metric.

    The metric coefficient of ``omega = i g dz ^ dzbar`` is half the per-factor
    volume density; off-diagonal entries must vanish on the product.
    """
    n = model.complex_dimension
    z = np.asarray(sample_points, dtype=complex).reshape(-1, n)
    if np.any(np.abs(z) >= 10):
        raise ValueError("sample points must satisfy |z| < 10")

    def log_h(pts):
        return model.log_bundle_metric(pts if n > 1 else pts[:, 0])

    g_fd = -_complex_hessian_fd(log_h, z, n, h)
    dens = model.factor_volume_densities(z if n > 1 else z[:, 0])
    target = np.zeros_like(g_fd)
    for i in range(n):
        target[:, i, i] = dens[i] / 2
    return float(np.max(np.abs(g_fd - target)))


# ---------------------------------------------------------------------------
# smooth functions

def _expand(v, n):
    return v if n == 1 else v[..., None]


def _zero(z):
    return np.zeros(np.shape(z), dtype=complex)


@dataclass(frozen=True)
class SmoothFunction:
    """A classical observable with chart-0 derivative data.

    ``band`` is the largest angular/radial degree of the function in the
    monomial family (``None`` if unknown).  ``fd_backed`` marks derivative
    fields that come from finite differences rather than formulas.
    """
    name: str
    n: int
    value: object
    d_z: object = None
    d_zbar: object = None
    d_z_zbar: object = None
    value_chart1: object = None
    sup_norm: float = None
    is_real: bool = False
    band: int = None
    fd_backed: bool = False

    def __call__(self, z):
        return np.asarray(self.value(np.asarray(z, dtype=complex)), dtype=complex)

    def at(self, x):
        """Evaluate at a :class:`ChartPoint`, using the chart-1 formula near infinity."""
        n = self.n
        try:
            p = x.to_chart(0 if n == 1 else (0,) * n)
            z = p.coords[0] if n == 1 else np.array(p.coords)
            return complex(self(z))
        except ValueError:
            if self.value_chart1 is None:
                raise
        p = x.to_chart(1 if n == 1 else (1,) * n)
        w = p.coords[0] if n == 1 else np.array(p.coords)
        return complex(np.ravel(self.value_chart1(np.asarray(w, dtype=complex)))[0])

    def _require(self, *fields):
        for name in fields:
            if getattr(self, name) is None:
                raise ValueError(f"function {self.name!r} is missing derivative data ({name})")

    # --- arithmetic with analytic product rule -----------------------------
    def _lift(self, other):
        if isinstance(other, SmoothFunction):
            if other.n != self.n:
                raise ValueError("functions live on different manifolds")
            return other
        return constant(other, self.n)

    def __add__(self, other):
        g = self._lift(other)
        return _combine(self, g, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * self._lift(other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        g = self._lift(other)
        if not isinstance(other, SmoothFunction):
            return _scale(self, complex(other))
        return _combine(self, g, "*")

    def __rmul__(self, other):
        return self.__mul__(other)

    def named(self, name, sup_norm=None):
        kw = {"name": name}
        if sup_norm is not None:
            kw["sup_norm"] = float(sup_norm)
        return replace(self, **kw)


def _maybe(fn, z):
    return _zero(z) if fn is None else fn(z)


def _scale(f, c):
    real_c = c.imag == 0

    def opt(fn):
        return None if fn is None else (lambda z: c * fn(z))

    return SmoothFunction(
        name=f"{c.real if real_c else c}*{f.name}", n=f.n,
        value=lambda z: c * f.value(z), d_z=opt(f.d_z), d_zbar=opt(f.d_zbar),
        d_z_zbar=opt(f.d_z_zbar),
        value_chart1=None if f.value_chart1 is None else (lambda w: c * f.value_chart1(w)),
        sup_norm=None if f.sup_norm is None else abs(c) * f.sup_norm,
        is_real=f.is_real and real_c, band=f.band, fd_backed=f.fd_backed)


def _combine(f, g, op):
    n = f.n
    has1 = all(x is not None for x in (f.d_z, f.d_zbar, g.d_z, g.d_zbar))
    has2 = has1 and f.d_z_zbar is not None and g.d_z_zbar is not None
    c1 = None
    if f.value_chart1 is not None and g.value_chart1 is not None:
        if op == "+":
            c1 = lambda w: f.value_chart1(w) + g.value_chart1(w)  # noqa: E731
        else:
            c1 = lambda w: f.value_chart1(w) * g.value_chart1(w)  # noqa: E731
    band = None if f.band is None or g.band is None else (
        max(f.band, g.band) if op == "+" else f.band + g.band)
    if op == "+":
        return SmoothFunction(
            name=f"({f.name}+{g.name})", n=n,
            value=lambda z: f.value(z) + g.value(z),
            d_z=(lambda z: f.d_z(z) + g.d_z(z)) if has1 else None,
            d_zbar=(lambda z: f.d_zbar(z) + g.d_zbar(z)) if has1 else None,
            d_z_zbar=(lambda z: f.d_z_zbar(z) + g.d_z_zbar(z)) if has2 else None,
            value_chart1=c1, is_real=f.is_real and g.is_real, band=band,
            fd_backed=f.fd_backed or g.fd_backed)

    def dz(z):
        return _expand(f.value(z), n) * g.d_z(z) + f.d_z(z) * _expand(g.value(z), n)

    def dzb(z):
        return _expand(f.value(z), n) * g.d_zbar(z) + f.d_zbar(z) * _expand(g.value(z), n)

    def dzzb(z):
        fv, gv = _expand(f.value(z), n), _expand(g.value(z), n)
        return (f.d_z_zbar(z) * gv + fv * g.d_z_zbar(z)
                + f.d_z(z) * g.d_zbar(z) + f.d_zbar(z) * g.d_z(z))

    return SmoothFunction(
        name=f"{f.name}*{g.name}", n=n, value=lambda z: f.value(z) * g.value(z),
        d_z=dz if has1 else None, d_zbar=dzb if has1 else None,
        d_z_zbar=dzzb if has2 else None, value_chart1=c1,
        is_real=f.is_real and g.is_real, band=band, fd_backed=f.fd_backed or g.fd_backed)


def constant(c, n=1):
    c = complex(c)
    return SmoothFunction(
        name="one" if c == 1 else repr(c.real if c.imag == 0 else c), n=n,
        value=lambda z: np.full(np.shape(z)[:-1] if n > 1 else np.shape(z), c, dtype=complex),
        d_z=_zero, d_zbar=_zero, d_z_zbar=_zero,
        value_chart1=lambda w: np.full(np.shape(w)[:-1] if n > 1 else np.shape(w), c,
                                       dtype=complex),
        sup_norm=abs(c), is_real=c.imag == 0, band=0)


def _term(coef, z, a, b, c):
    """``coef * z^a zbar^b (1+|z|^2)^-c``; zero whenever ``coef`` is zero."""
    if coef == 0:
        return _zero(z)
    zc = np.conj(z)
    return coef * z ** a * zc ** b / (1.0 + (z * zc).real) ** c


def monomial(j, k):
    """``z^j zbar^k (1+|z|^2)^-max(j,k)``, smooth on all of CP^1."""
    j, k = int(j), int(k)
    if j < 0 or k < 0:
        raise ValueError("monomial exponents must be nonnegative")
    big = max(j, k)
    if j == k:
        sup = 1.0
    else:
        s = (j + k) / 2
        sup = float(s ** s * (big - s) ** (big - s) / big ** big)
    return SmoothFunction(
        name=f"monomial({j},{k})", n=1,
        value=lambda z: _term(1, z, j, k, big),
        d_z=lambda z: _term(j, z, j - 1, k, big) + _term(-big, z, j, k + 1, big + 1),
        d_zbar=lambda z: _term(k, z, j, k - 1, big) + _term(-big, z, j + 1, k, big + 1),
        d_z_zbar=lambda z: (_term(j * k, z, j - 1, k - 1, big)
                            + _term(-j * big, z, j, k, big + 1)
                            + _term(-big * (k + 1), z, j, k, big + 1)
                            + _term(big * (big + 1), z, j + 1, k + 1, big + 2)),
        value_chart1=lambda w: _term(1, w, big - j, big - k, big),
        sup_norm=sup, is_real=j == k, band=big)


def _x1():
    return SmoothFunction(
        name="x1", n=1,
        value=lambda z: 2 * z.real / (1 + np.abs(z) ** 2) + 0j,
        d_z=lambda z: (1 - np.conj(z) ** 2) / (1 + np.abs(z) ** 2) ** 2,
        d_zbar=lambda z: (1 - z ** 2) / (1 + np.abs(z) ** 2) ** 2,
        d_z_zbar=lambda z: -4 * z.real / (1 + np.abs(z) ** 2) ** 3 + 0j,
        value_chart1=lambda w: 2 * np.real(w) / (1 + np.abs(w) ** 2) + 0j,
        sup_norm=1.0, is_real=True, band=1)


def _x2():
    return SmoothFunction(
        name="x2", n=1,
        value=lambda z: 2 * z.imag / (1 + np.abs(z) ** 2) + 0j,
        d_z=lambda z: -1j * (1 + np.conj(z) ** 2) / (1 + np.abs(z) ** 2) ** 2,
        d_zbar=lambda z: 1j * (1 + z ** 2) / (1 + np.abs(z) ** 2) ** 2,
        d_z_zbar=lambda z: -4 * z.imag / (1 + np.abs(z) ** 2) ** 3 + 0j,
        value_chart1=lambda w: -2 * np.imag(w) / (1 + np.abs(w) ** 2) + 0j,
        sup_norm=1.0, is_real=True, band=1)


def _x3():
    return SmoothFunction(
        name="x3", n=1,
        value=lambda z: (np.abs(z) ** 2 - 1) / (np.abs(z) ** 2 + 1) + 0j,
        d_z=lambda z: 2 * np.conj(z) / (1 + np.abs(z) ** 2) ** 2,
        d_zbar=lambda z: 2 * z / (1 + np.abs(z) ** 2) ** 2,
        d_z_zbar=lambda z: 2 * (1 - np.abs(z) ** 2) / (1 + np.abs(z) ** 2) ** 3 + 0j,
        value_chart1=lambda w: (1 - np.abs(w) ** 2) / (1 + np.abs(w) ** 2) + 0j,
        sup_norm=1.0, is_real=True, band=1)


_MONO = re.compile(r"^monomial\((\d+),(\d+)\)$")
_FACTOR = re.compile(r"^(.*)@(\d+)$")


def standard_function(name):
    """Library function on CP^1: ``one``, ``x1``, ``x2``, ``x3``, ``monomial(j,k)``."""
    key = name.replace(" ", "")
    if key == "one":
        return constant(1.0)
    if key in ("x1", "x2", "x3"):
        return {"x1": _x1, "x2": _x2, "x3": _x3}[key]()
    mt = _MONO.match(key)
    if mt:
        return monomial(int(mt.group(1)), int(mt.group(2)))
    raise ValueError(f"unknown function name {name!r}")


def lift(f, factor, n=2):
    """Pull a CP^1 function back to factor ``factor`` of the product."""
    if f.n != 1:
        raise ValueError("only CP^1 functions can be lifted")

    def col(z):
        return z[..., factor]

    def deriv(fn):
        if fn is None:
            return None

        def d(z):
            out = np.zeros(np.shape(z), dtype=complex)
            out[..., factor] = fn(col(z))
            return out
        return d

    return SmoothFunction(
        name=f"{f.name}@{factor}", n=n, value=lambda z: f.value(col(z)),
        d_z=deriv(f.d_z), d_zbar=deriv(f.d_zbar), d_z_zbar=deriv(f.d_z_zbar),
        value_chart1=(None if f.value_chart1 is None
                      else (lambda w: f.value_chart1(w[..., factor]))),
        sup_norm=f.sup_norm, is_real=f.is_real, band=f.band, fd_backed=f.fd_backed)


def parse_function(expr, model=None):
    """Parse sums of products of library names, e.g. ``x1+x3`` or ``x1@0*x2@1``.

    Names suffixed ``@i`` refer to factor ``i`` of the product manifold.
    """
    n = 1 if model is None else model.complex_dimension
    expr = expr.replace(" ", "")
    if not expr:
        raise ValueError("empty function expression")
    total = None
    for term in re.split(r"\+(?![^(]*\))", expr):
        prod = None
        for atom in term.split("*"):
            mt = _FACTOR.match(atom)
            if mt:
                base, factor = standard_function(mt.group(1)), int(mt.group(2))
                if factor >= n:
                    raise ValueError(f"factor index {factor} out of range in {atom!r}")
                g = lift(base, factor, n)
            elif n == 1:
                g = standard_function(atom)
            elif atom == "one":
                g = constant(1.0, n)
            else:
                raise ValueError(f"product-manifold functions need a factor suffix: {atom!r}")
            prod = g if prod is None else prod * g
        total = prod if total is None else total + prod
    return total.named(expr) if (total.name != expr) else total


def function_library(model):
    """The battery of library functions used by the verification suites."""
    if model.complex_dimension == 1:
        names = ["one", "x1", "x2", "x3", "monomial(1,0)", "monomial(0,1)",
                 "monomial(1,1)", "monomial(2,1)", "monomial(2,2)"]
        fns = [standard_function(s) for s in names]
        fns.append((standard_function("x1") + standard_function("x3")).named(
            "x1+x3", sup_norm=np.sqrt(2.0)))
        fns.append((standard_function("x1") * standard_function("x2")).named(
            "x1*x2", sup_norm=0.5))
        fns.append((standard_function("x3") * standard_function("x3")).named(
            "x3*x3", sup_norm=1.0))
        return fns
    x = {(nm, i): lift(standard_function(nm), i) for nm in ("x1", "x2", "x3") for i in (0, 1)}
    out = [constant(1.0, 2)] + list(x.values())
    out.append((x["x1", 0] * x["x2", 1]).named("x1@0*x2@1", sup_norm=1.0))
    out.append((x["x3", 0] + x["x3", 1]).named("x3@0+x3@1", sup_norm=2.0))
    out.append(lift(monomial(1, 0), 0).named("monomial(1,0)@0"))
    return out


# ---------------------------------------------------------------------------
# finite-difference derivative fields

def _fd_fields(value, n, h=FD_STEP, h2=1e-4):
    def axis_step(z, i, delta):
        if n == 1:
            return z + delta
        zs = np.array(z, dtype=complex, copy=True)
        zs[..., i] += delta
        return zs

    def partials(z):
        z = np.asarray(z, dtype=complex)
        cols_x, cols_y = [], []
        for i in range(n):
            cols_x.append((value(axis_step(z, i, h)) - value(axis_step(z, i, -h))) / (2 * h))
            cols_y.append((value(axis_step(z, i, 1j * h)) - value(axis_step(z, i, -1j * h)))
                          / (2 * h))
        return cols_x, cols_y

    def pack(cols):
        return cols[0] if n == 1 else np.stack(cols, axis=-1)

    def dz(z):
        fx, fy = partials(z)
        return pack([(a - 1j * b) / 2 for a, b in zip(fx, fy)])

    def dzb(z):
        fx, fy = partials(z)
        return pack([(a + 1j * b) / 2 for a, b in zip(fx, fy)])

    def dzzb(z):
        z = np.asarray(z, dtype=complex)
        f0 = value(z)
        cols = []
        for i in range(n):
            lap = (value(axis_step(z, i, h2)) + value(axis_step(z, i, -h2))
                   + value(axis_step(z, i, 1j * h2)) + value(axis_step(z, i, -1j * h2))
                   - 4 * f0) / (h2 * h2)
            cols.append(lap / 4)
        return pack(cols)

    return dz, dzb, dzzb


def _metric_factor(z, n):
    """``(1+|z_i|^2)^2`` per factor, the inverse metric coefficient."""
    return (1 + np.abs(z) ** 2) ** 2


def poisson_bracket(f, g):
    """``{f, g} = omega(X_f, X_g)`` with ``omega(X_f, .) = df``.

    Chart formula: ``i (1+|z|^2)^2 (f_zbar g_z - f_z g_zbar)``, summed over
    factors on the product.  Derivatives of the result are finite differences.
    """
    if f.n != g.n:
        raise ValueError("functions live on different manifolds")
    f._require("d_z", "d_zbar")
    g._require("d_z", "d_zbar")
    n = f.n

    def value(z):
        z = np.asarray(z, dtype=complex)
        terms = 1j * _metric_factor(z, n) * (f.d_zbar(z) * g.d_z(z) - f.d_z(z) * g.d_zbar(z))
        return terms if n == 1 else terms.sum(axis=-1)

    dz, dzb, dzzb = _fd_fields(value, n)
    band = None if f.band is None or g.band is None else f.band + g.band
    return SmoothFunction(
        name=f"{{{f.name},{g.name}}}", n=n, value=value, d_z=dz, d_zbar=dzb,
        d_z_zbar=dzzb, is_real=f.is_real and g.is_real, band=band, fd_backed=True)


def laplacian(f, scale=None):
    """``c * (1+|z|^2)^2 d^2 f / dz dzbar`` summed over factors.

    ``scale`` defaults to the pinned constant in :mod:`btq.conventions`.
    """
    f._require("d_z_zbar")
    c = conventions.LAPLACIAN_SCALE if scale is None else scale
    n = f.n

    def value(z):
        z = np.asarray(z, dtype=complex)
        terms = c * _metric_factor(z, n) * f.d_z_zbar(z)
        return terms if n == 1 else terms.sum(axis=-1)

    dz, dzb, dzzb = _fd_fields(value, n)
    return SmoothFunction(
        name=f"Lap({f.name})", n=n, value=value, d_z=dz, d_zbar=dzb, d_z_zbar=dzzb,
        is_real=f.is_real and np.isreal(c), band=f.band, fd_backed=True)


def hamiltonian_vector_field(f, z):
    """Holomorphic component ``X_f^z = -i (1+|z|^2)^2 f_zbar``."""
    f._require("d_zbar")
    z = np.asarray(z, dtype=complex)
    return -1j * _metric_factor(z, f.n) * f.d_zbar(z)


def random_points(model, count, rng=None):
    """Uniform points (w.r.t. Liouville measure) in chart 0."""
    rng = np.random.default_rng(rng)
    n = model.complex_dimension
    u = rng.uniform(0.0, 1.0, size=(count, n))
    u = np.minimum(u, 1 - 1e-9)
    phi = rng.uniform(0.0, 2 * np.pi, size=(count, n))
    z = np.sqrt(u / (1 - u)) * np.exp(1j * phi)
    return z[:, 0] if n == 1 else z
