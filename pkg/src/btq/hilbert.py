"""Holomorphic section spaces, coherent vectors, epsilon function, two-point kernel.

Sections of ``L^m`` are represented in chart 0 by polynomials in ``z``
(degree ``<= m`` per factor).  ``SectionSpace`` orthonormalizes the monomials
by a Cholesky factorization of their Gram matrix; all operators are written in
that orthonormal basis.

Evaluating a section against the *unit* fiber vector gives
``h^(m/2) shat(x)``, which is bounded on the whole manifold; this is what
``section_values`` returns and what every kernel consumes.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.linalg import solve_triangular

from . import _kernels
from .geometry import ChartPoint, homogeneous_from_chart0
from .operators import OperatorMatrix
from .quadrature import DEFAULT_EXTRA_BAND, build_rule


class GramError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class SectionSpace:
    model: object
    levels: tuple
    exponents: np.ndarray
    gram: np.ndarray
    basis_transform: np.ndarray
    rule: object
    phi_nodes: np.ndarray = field(repr=False)

    @property
    def level(self):
        return self.levels[0] if len(self.levels) == 1 else self.levels

    @property
    def dimension(self):
        return self.exponents.shape[0]

    @property
    def n(self):
        return self.model.complex_dimension

    def section_values(self, hom):
        """Orthonormal sections against the unit fiber vector, ``(N, d)``."""
        mono = _kernels.weighted_monomials(hom, self.exponents, self.levels)
        return mono @ self.basis_transform

    def derivative_values(self, hom, factor):
        """``h^(m/2) d shat_k / dz_factor`` at unit-normalized points."""
        exps = self.exponents.copy()
        coef = exps[:, factor].astype(float)
        exps[:, factor] = np.maximum(exps[:, factor] - 1, 0)
        # z^(a-1) h^(m/2) = A^(a-1) B^(m-a+1): the b exponent rises automatically
        mono = _kernels.weighted_monomials(hom, exps, self.levels) * coef
        return mono @ self.basis_transform

    def with_band(self, extra_band):
        """Same level, quadrature resolving observables up to ``extra_band``."""
        return build_section_space(self.model, self.level, extra_band)


def _exponents(levels):
    return np.array(list(product(*[range(m + 1) for m in levels])), dtype=np.int64)


@lru_cache(maxsize=64)
def _build(model, levels, extra_band):
    rule = build_rule(model, levels, extra_band)
    exps = _exponents(levels)
    mono = _kernels.weighted_monomials(rule.hom, exps, levels)
    gram = _kernels.cross_gram(mono, rule.weights.astype(complex), mono)
    gram = 0.5 * (gram + gram.conj().T)
    try:
        lower = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise GramError("Gram matrix is not positive definite; quadrature under-resolved") from exc
    s = solve_triangular(lower.conj().T, np.eye(len(exps)), lower=False)
    return SectionSpace(model, levels, exps, gram, s, rule, mono @ s)


def build_section_space(model, m, extra_band=DEFAULT_EXTRA_BAND):
    """Level-``m`` space of holomorphic sections with an orthonormal basis."""
    return _build(model, model.levels(m), int(extra_band))


# ---------------------------------------------------------------------------
# points -> homogeneous coordinates

def as_homogeneous(space, x):
    """Return ``(hom, scalar)`` for a ChartPoint, a list of them, or a chart-0 array."""
    if isinstance(x, ChartPoint):
        return x.homogeneous()[None], True
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], ChartPoint):
        return np.stack([p.homogeneous() for p in x]), False
    arr = np.asarray(x, dtype=complex)
    scalar = arr.ndim == (0 if space.n == 1 else 1)
    return homogeneous_from_chart0(arr, space.n), scalar


def _frame_hom(x):
    """Homogeneous coordinates of the chart frame representative (``qhat = 1``)."""
    out = np.empty((len(x.charts), 2), dtype=complex)
    for i, (c, z) in enumerate(zip(x.charts, x.coords)):
        out[i] = (z, 1.0) if c == 0 else (1.0, z)
    return out[None]


# ---------------------------------------------------------------------------
# coherent vectors and derived objects

@dataclass(frozen=True)
class CoherentVector:
    level: object
    base_point: ChartPoint
    coefficients: np.ndarray
    fiber_scale: complex = 1.0

    @property
    def norm_sq(self):
        return float(np.vdot(self.coefficients, self.coefficients).real)


def coherent_vector(space, x, fiber_scale=1.0):
    """``e_q`` for ``q = fiber_scale * frame(x)`` in the orthonormal basis.

    ``<e_q, s> = shat(x)`` for every section ``s``; a chart-1 point uses the
    chart-1 frame, which is the chart-0 frame rescaled through the transition.
    """
    if not isinstance(x, ChartPoint):
        x = ChartPoint(0, complex(x)) if space.n == 1 else ChartPoint(
            (0,) * space.n, tuple(complex(v) for v in x))
    mono = _kernels.weighted_monomials(_frame_hom(x), space.exponents, space.levels)
    shat = (mono @ space.basis_transform)[0]
    return CoherentVector(space.level, x, np.conj(shat) / np.conj(fiber_scale), fiber_scale)


def epsilon_function(space, x):
    """Rawnsley's ``epsilon = |q|^2 <e_q, e_q>``, independent of the fiber vector."""
    hom, scalar = as_homogeneous(space, x)
    phi = space.section_values(hom)
    eps = np.einsum("nj,nj->n", phi, phi.conj()).real
    return float(eps[0]) if scalar else eps


def coherent_projector(space, x, fiber_scale=1.0):
    """Rank-one projector ``|e_q><e_q| / <e_q, e_q>``."""
    e = coherent_vector(space, x, fiber_scale).coefficients
    return OperatorMatrix(space.level, np.outer(e, e.conj()) / np.vdot(e, e).real)


def coherent_embedding(space, x):
    """Unit projective representative of the coherent state at ``x``."""
    e = coherent_vector(space, x).coefficients
    e = e / np.linalg.norm(e)
    lead = np.flatnonzero(np.abs(e) > 1e-14 * np.abs(e).max())[0]
    return e * (abs(e[lead]) / e[lead])


@dataclass(frozen=True, eq=False)
class TwoPointKernel:
    """``K(x, y) = |<e_x, e_y>|^2 / (<e_x, e_x> <e_y, e_y>)``."""
    space: SectionSpace

    @property
    def level(self):
        return self.space.level

    def __call__(self, x, y):
        hx, sx = as_homogeneous(self.space, x)
        hy, sy = as_homogeneous(self.space, y)
        px, py = self.space.section_values(hx), self.space.section_values(hy)
        inner = np.einsum("nj,nj->n", px, py.conj())
        nx = np.einsum("nj,nj->n", px, px.conj()).real
        ny = np.einsum("nj,nj->n", py, py.conj()).real
        k = np.abs(inner) ** 2 / (nx * ny)
        return float(k[0]) if (sx and sy) else k

    def matrix(self, x, y):
        """Pairwise kernel values, ``(len(x), len(y))``."""
        hx, _ = as_homogeneous(self.space, x)
        hy, _ = as_homogeneous(self.space, y)
        return _kernels.overlap(self.space.section_values(hx), self.space.section_values(hy))


def two_point_kernel(space):
    return TwoPointKernel(space)
