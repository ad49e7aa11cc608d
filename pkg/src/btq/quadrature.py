"""Exact product quadrature on CP^1 and CP^1 x CP^1.

With ``u = |z|^2 / (1+|z|^2)`` the Liouville measure of CP^1 is exactly
``du dphi`` on ``[0,1] x [0, 2pi)``, and every matrix-element integrand
``zbar^j z^k f (1+|z|^2)^-m`` with ``f`` in the monomial family of band
``B`` becomes a polynomial in ``u`` of degree ``<= m + B`` times a
trigonometric polynomial of degree ``<= m + B`` in ``phi``.  Gauss-Legendre
in ``u`` and the trapezoid rule in ``phi`` integrate those exactly.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

DEFAULT_EXTRA_BAND = 8
MAX_NODES = 2_000_000


class QuadratureResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights; ``weights`` already include the volume density.

    ``hom`` holds the unit homogeneous coordinates of the nodes, computed
    from ``(u, phi)`` directly so that nodes close to infinity stay accurate.
    """
    nodes: np.ndarray
    weights: np.ndarray
    hom: np.ndarray
    radial_order: int
    angular_order: int
    level_capacity: tuple

    @property
    def size(self):
        return self.weights.shape[0]


def _sphere_rule(capacity, radial_order=None, angular_order=None):
    n_r = radial_order or capacity // 2 + 3
    n_phi = angular_order or 2 * capacity + 1
    x, wx = roots_legendre(n_r)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * wx
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    w = np.outer(wu, np.full(n_phi, 2 * np.pi / n_phi)).ravel()
    uu, pp = uu.ravel(), pp.ravel()
    phase = np.exp(1j * pp)
    z = np.sqrt(uu / (1.0 - uu)) * phase
    hom = np.stack([np.sqrt(uu) * phase, np.sqrt(1.0 - uu) + 0j], axis=-1)
    return z, w, hom, n_r, n_phi


def build_rule(model, m, extra_band=DEFAULT_EXTRA_BAND, radial_order=None,
               angular_order=None, max_nodes=MAX_NODES):
    """Quadrature exact for level-``m`` matrix elements of band ``<= extra_band``.

    Parameters
    ----------
    model : ManifoldModel
    m : int or tuple of int
        Level (per factor on the product manifold).
    extra_band : int
        Band of the observables the rule must resolve on top of the level.
    radial_order, angular_order : int, optional
        Override the automatically chosen orders (used for stability checks).
    """
    if extra_band < 0:
        raise ValueError("extra_band must be >= 0")
    ms = model.levels(m)
    caps = tuple(mi + extra_band for mi in ms)
    count = 1
    for cap in caps:
        n_r = radial_order or cap // 2 + 3
        n_phi = angular_order or 2 * cap + 1
        count *= n_r * n_phi
    if count > max_nodes:
        raise QuadratureResourceError(
            f"rule would need {count} nodes, above the cap of {max_nodes}")
    parts = [_sphere_rule(cap, radial_order, angular_order) for cap in caps]
    if len(parts) == 1:
        z, w, hom, n_r, n_phi = parts[0]
        return QuadratureRule(z, w, hom[:, None, :], n_r, n_phi, caps)
    (z1, w1, h1, n_r, n_phi), (z2, w2, h2, _, _) = parts
    i1, i2 = np.meshgrid(np.arange(z1.size), np.arange(z2.size), indexing="ij")
    i1, i2 = i1.ravel(), i2.ravel()
    nodes = np.stack([z1[i1], z2[i2]], axis=-1)
    hom = np.stack([h1[i1], h2[i2]], axis=1)
    return QuadratureRule(nodes, w1[i1] * w2[i2], hom, n_r, n_phi, caps)


def integrate(f, rule, workers=1):
    """``sum_i w_i f(x_i)``; ``f`` is a callable on the node array or precomputed values."""
    values = f(rule.nodes) if callable(f) else f
    values = np.asarray(values)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"integrand is not finite at node {i} (z={rule.nodes[i]})")
    if workers <= 1:
        return complex(np.dot(rule.weights, values))
    chunks = np.array_split(np.arange(rule.size), workers)
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(lambda idx: np.dot(rule.weights[idx], values[idx]), chunks)
    return complex(sum(parts))
