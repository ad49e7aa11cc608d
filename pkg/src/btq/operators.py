"""Operators on level-m section spaces, in the orthonormal basis.

Working in the orthonormal basis of holomorphic sections makes the
orthogonal projection implicit: the matrix of ``Pi (f .)`` is just the
matrix of inner products ``<s_j, f s_k>``.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np

from . import _kernels, conventions

HERMITIAN_TOL = 1e-12


class LevelMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    level: object
    entries: np.ndarray
    diagnostics: tuple = field(default=())

    @property
    def dim(self):
        return self.entries.shape[0]

    def dagger(self):
        return OperatorMatrix(self.level, self.entries.conj().T, self.diagnostics)

    def _check(self, other):
        if not isinstance(other, OperatorMatrix):
            raise TypeError("expected an OperatorMatrix")
        if other.level != self.level or other.dim != self.dim:
            raise LevelMismatchError(f"level mismatch: {self.level} vs {other.level}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return OperatorMatrix(self.level, self.entries + other.entries)

    def __sub__(self, other):
        other = self._check(other)
        return OperatorMatrix(self.level, self.entries - other.entries)

    def __mul__(self, c):
        return OperatorMatrix(self.level, c * self.entries)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return multiply(self, other)

    def is_hermitian(self, tol=HERMITIAN_TOL):
        scale = max(1.0, np.linalg.norm(self.entries))
        return np.linalg.norm(self.entries - self.entries.conj().T) <= tol * scale


def identity(space):
    return OperatorMatrix(space.level, np.eye(space.dimension, dtype=complex))


def _band_diagnostics(space, f):
    cap = min(space.rule.level_capacity) - max(space.levels)
    if f.band is None:
        return ("band unknown; quadrature error not bounded",)
    if f.band > cap:
        msg = (f"band overflow: {f.name} has band {f.band} but the rule resolves "
               f"{cap}; results carry quadrature error")
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        return (msg,)
    return ()


def toeplitz(space, f):
    """``T_f = Pi (f .)`` with entries ``<s_j, f s_k>`` by exact quadrature."""
    diag = _band_diagnostics(space, f)
    rule = space.rule
    fv = f(rule.nodes)
    a = _kernels.cross_gram(space.phi_nodes, rule.weights * fv, space.phi_nodes)
    if f.is_real:
        a = 0.5 * (a + a.conj().T)
    return OperatorMatrix(space.level, a, diag)


def operator_norm(a):
    """Largest singular value; Hermitian input goes through an eigensolve."""
    m = a.entries if isinstance(a, OperatorMatrix) else np.asarray(a)
    if np.allclose(m, m.conj().T, rtol=0, atol=HERMITIAN_TOL * max(1.0, np.abs(m).max())):
        return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))))
    return float(np.linalg.norm(m, 2))


def hs_inner(a, c):
    """Hilbert-Schmidt pairing ``Tr(A^dagger C)``."""
    a._check(c)
    return complex(np.vdot(a.entries, c.entries))


def commutator(a, c):
    a._check(c)
    return OperatorMatrix(a.level, a.entries @ c.entries - c.entries @ a.entries)


def multiply(a, c):
    a._check(c)
    return OperatorMatrix(a.level, a.entries @ c.entries)


def geometric_quantization_operator(space, f, convention=None):
    """Compressed prequantum operator ``Pi (s (i/m) nabla_{X_f} + f) Pi``.

    On chart-0 coefficient functions ``nabla = d + m (d log hhat) + dbar`` and
    ``X_f^z = -i (1+|z|^2)^2 f_zbar``; the sign ``s`` comes from
    ``conventions.PREQUANTUM_SIGNS``.  On the product each factor contributes
    with its own level.
    """
    f._require("d_zbar")
    sign = conventions.PREQUANTUM_SIGNS[convention or conventions.PREQUANTUM_CONVENTION]
    rule = space.rule
    z = rule.nodes
    hom = rule.hom
    n = space.n
    fz_bar = f.d_zbar(z)
    fz_bar = fz_bar.reshape(-1, n)
    zz = z.reshape(-1, n)
    out = f(z)[:, None] * space.phi_nodes
    for i, m_i in enumerate(space.levels):
        t = np.abs(zz[:, i]) ** 2
        # (i/m) X^z = (1/m) (1+t)^2 f_zbar ;  m d log hhat = -m zbar / (1+t)
        xz = (1 + t) ** 2 * fz_bar[:, i]
        dphi = space.derivative_values(hom, i)
        shift = -m_i * np.conj(zz[:, i]) / (1 + t)
        out = out + sign * (xz / m_i)[:, None] * (dphi + shift[:, None] * space.phi_nodes)
    a = _kernels.cross_gram(space.phi_nodes, rule.weights.astype(complex), out)
    return OperatorMatrix(space.level, a, _band_diagnostics(space, f))


def tuynman_residual(space, f, scale=None, convention=None):
    """Frobenius norm of ``Q(f) - T(f - Lap f / (2m))`` on CP^1."""
    from .geometry import laplacian

    m = space.level
    q = geometric_quantization_operator(space, f, convention)
    g = f - (1.0 / (2 * m)) * laplacian(f, scale)
    return float(np.linalg.norm((q - toeplitz(space, g)).entries))


def pin_laplacian_scale(build_space, functions, m=None, m_check=range(2, 41), tol=1e-8):
    """Fit the Laplacian constant at one level and validate it across levels.

    For each candidate convention in ``conventions.PREQUANTUM_SIGNS`` the
    constant ``c`` solving ``Q(f) = T(f) - (c / 2m) T(L f)`` in least squares
    (``L`` the unscaled operator ``(1+|z|^2)^2 d dbar``) is computed at level
    ``m``.  The two sign conventions differ by flipping the sign of ``c``, so
    both can reproduce every level; among the conventions whose constant holds
    across ``m_check`` (residual below ``tol``) the first one with ``c > 0``
    wins, configured convention first.

    Returns
    -------
    dict with keys ``convention``, ``scale``, ``max_residual`` and
    ``table`` (per-convention outcome).
    """
    from .geometry import laplacian

    m = m or conventions.PINNING_LEVEL
    table = {}
    for name in conventions.PREQUANTUM_SIGNS:
        space = build_space(m)
        lhs, rhs = [], []
        for f in functions:
            q = geometric_quantization_operator(space, f, name).entries
            t = toeplitz(space, f).entries
            lap = toeplitz(space, laplacian(f, 1.0)).entries
            lhs.append((-lap / (2 * m)).ravel())
            rhs.append((q - t).ravel())
        lhs, rhs = np.concatenate(lhs), np.concatenate(rhs)
        c = complex(np.vdot(lhs, rhs) / np.vdot(lhs, lhs))
        worst = 0.0
        for mm in m_check:
            sp = build_space(mm)
            for f in functions:
                worst = max(worst, tuynman_residual(sp, f, c.real, name))
        table[name] = {"scale": c.real, "imag": c.imag, "max_residual": worst}
    order = [conventions.PREQUANTUM_CONVENTION] + [
        k for k in table if k != conventions.PREQUANTUM_CONVENTION]
    valid = [k for k in order if table[k]["max_residual"] < tol and table[k]["scale"] > 0]
    best = valid[0] if valid else min(table, key=lambda k: table[k]["max_residual"])
    return {"convention": best, "scale": table[best]["scale"],
            "max_residual": table[best]["max_residual"], "table": table}
