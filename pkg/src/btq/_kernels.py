"""Hot numeric kernels, each with a numba and a numpy implementation.

Conventions shared by every kernel:

* ``hom`` is an ``(N, n, 2)`` complex array of unit homogeneous coordinates
  ``(a, b)`` per factor, with ``z = a / b`` in chart 0.
* ``Phi`` is an ``(N, d)`` array of orthonormal section values multiplied by
  ``h^(m/2)``, i.e. sections evaluated against the unit fiber vector.

The public wrappers dispatch on :func:`btq._backend.get_backend`.
"""
import numpy as np

from ._backend import HAS_NUMBA, get_backend

if HAS_NUMBA:
    from numba import njit
else:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# ---------------------------------------------------------------------------
# numpy versions

def _weighted_monomials_np(hom, exps, levels):
    n_pts = hom.shape[0]
    out = np.ones((n_pts, exps.shape[0]), dtype=np.complex128)
    for i in range(hom.shape[1]):
        powers = np.arange(levels[i] + 1)
        pa = hom[:, i, 0][:, None] ** powers
        pb = hom[:, i, 1][:, None] ** powers
        out *= pa[:, exps[:, i]] * pb[:, levels[i] - exps[:, i]]
    return out


def _cross_gram_np(left, w, right):
    return (left.conj().T * w) @ right


def _expectation_np(phi, a):
    num = np.einsum("nj,nj->n", phi @ a, phi.conj())
    return num / np.einsum("nj,nj->n", phi, phi.conj()).real


def _overlap_np(phi_x, phi_y):
    inner = phi_x @ phi_y.conj().T
    nx = np.einsum("nj,nj->n", phi_x, phi_x.conj()).real
    ny = np.einsum("nj,nj->n", phi_y, phi_y.conj()).real
    return np.abs(inner) ** 2 / np.outer(nx, ny)


# ---------------------------------------------------------------------------
# numba versions

@njit(cache=True)
def _weighted_monomials_nb(hom, exps, levels):
    n_pts = hom.shape[0]
    n_fac = hom.shape[1]
    dim = exps.shape[0]
    out = np.ones((n_pts, dim), dtype=np.complex128)
    for i in range(n_fac):
        m = levels[i]
        pa = np.empty(m + 1, dtype=np.complex128)
        pb = np.empty(m + 1, dtype=np.complex128)
        for p in range(n_pts):
            a = hom[p, i, 0]
            b = hom[p, i, 1]
            pa[0] = 1.0
            pb[0] = 1.0
            for k in range(1, m + 1):
                pa[k] = pa[k - 1] * a
                pb[k] = pb[k - 1] * b
            for k in range(dim):
                e = exps[k, i]
                out[p, k] *= pa[e] * pb[m - e]
    return out


@njit(cache=True)
def _cross_gram_nb(left, w, right):
    n_pts, d1 = left.shape
    scaled = np.empty((d1, n_pts), dtype=np.complex128)
    for p in range(n_pts):
        wp = w[p]
        for i in range(d1):
            scaled[i, p] = np.conj(left[p, i]) * wp
    return np.dot(scaled, right)


@njit(cache=True)
def _row_norms_sq(phi):
    n_pts, d = phi.shape
    out = np.empty(n_pts)
    for p in range(n_pts):
        s = 0.0
        for k in range(d):
            s += phi[p, k].real ** 2 + phi[p, k].imag ** 2
        out[p] = s
    return out


@njit(cache=True)
def _expectation_nb(phi, a):
    n_pts, d = phi.shape
    rows = np.dot(phi, a)
    den = _row_norms_sq(phi)
    out = np.empty(n_pts, dtype=np.complex128)
    for p in range(n_pts):
        num = 0j
        for k in range(d):
            num += rows[p, k] * np.conj(phi[p, k])
        out[p] = num / den[p]
    return out


@njit(cache=True)
def _overlap_nb(phi_x, phi_y):
    inner = np.dot(phi_x, np.ascontiguousarray(np.conj(phi_y).T))
    nx = _row_norms_sq(phi_x)
    ny = _row_norms_sq(phi_y)
    out = np.empty(inner.shape)
    for p in range(inner.shape[0]):
        for q in range(inner.shape[1]):
            v = inner[p, q]
            out[p, q] = (v.real * v.real + v.imag * v.imag) / (nx[p] * ny[q])
    return out


# ---------------------------------------------------------------------------
# dispatch

def _c(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def weighted_monomials(hom, exps, levels):
    """Monomials ``prod_i a_i^e_i b_i^(m_i - e_i)`` at every point, ``(N, d)``."""
    hom = _c(hom)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    levels = np.ascontiguousarray(levels, dtype=np.int64)
    if get_backend() == "numba":
        return _weighted_monomials_nb(hom, exps, levels)
    return _weighted_monomials_np(hom, exps, levels)


def cross_gram(left, w, right):
    """``left^H diag(w) right`` -- quadrature of matrix elements."""
    if get_backend() == "numba":
        return _cross_gram_nb(_c(left), _c(w), _c(right))
    return _cross_gram_np(left, w, right)


def expectation(phi, a):
    """Normalized coherent expectation ``<e_x, A e_x> / <e_x, e_x>`` per point."""
    if get_backend() == "numba":
        return _expectation_nb(_c(phi), _c(a))
    return _expectation_np(phi, a)


def overlap(phi_x, phi_y):
    """Pairwise normalized squared overlaps, shape ``(len(phi_x), len(phi_y))``."""
    if get_backend() == "numba":
        return _overlap_nb(_c(phi_x), _c(phi_y))
    return _overlap_np(phi_x, phi_y)
