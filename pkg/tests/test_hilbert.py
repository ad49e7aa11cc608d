import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from btq.geometry import ChartPoint, random_points
from btq.hilbert import (build_section_space, coherent_embedding, coherent_projector,
                         coherent_vector, epsilon_function, two_point_kernel)


def gram_oracle(m):
    return np.diag([float(2 * mpmath.pi * mpmath.beta(k + 1, m - k + 1)) for k in range(m + 1)])


@pytest.mark.parametrize("m", [1, 2, 9, 30, 60])
def test_gram_matches_beta(cp1, m):
    sp = build_section_space(cp1, m)
    assert np.allclose(sp.gram, gram_oracle(m), rtol=0, atol=1e-12 * gram_oracle(m).max())


def test_gram_m1_is_pi(cp1):
    assert np.allclose(np.diag(build_section_space(cp1, 1).gram), np.pi)


def test_orthonormal_basis(cp1, cp1xcp1):
    for sp in (build_section_space(cp1, 12), build_section_space(cp1xcp1, (2, 3))):
        s = sp.basis_transform
        assert np.allclose(s.conj().T @ sp.gram @ s, np.eye(sp.dimension), atol=1e-12)


def test_product_gram_is_tensor_product(cp1, cp1xcp1):
    sp = build_section_space(cp1xcp1, (2, 3))
    assert np.allclose(sp.gram, np.kron(gram_oracle(2), gram_oracle(3)), atol=1e-12)


@pytest.mark.parametrize("m", [1, 4, 17])
def test_coherent_norm_is_bergman_density(cp1, m):
    """<e_q, e_q> = (m+1)/(2 pi) (1+|z|^2)^m for the chart-0 frame."""
    sp = build_section_space(cp1, m)
    for z in (0.0, 0.7 - 0.2j, 2.5j):
        e = coherent_vector(sp, z)
        assert e.norm_sq == pytest.approx((m + 1) / (2 * np.pi) * (1 + abs(z) ** 2) ** m, rel=1e-12)


def test_reproducing_property_by_quadrature(cp1, rng):
    """<e_x, s> computed as an L^2 integral equals the frame value of s at x."""
    m = 5
    sp = build_section_space(cp1, m)
    c = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    poly = sp.basis_transform @ c  # monomial coefficients of s
    z0 = 0.3 + 0.8j
    e = coherent_vector(sp, z0).coefficients
    rule = sp.rule
    t = np.abs(rule.nodes) ** 2
    # sections as chart polynomials times the metric h^m = (1+|z|^2)^-m
    ex = np.polyval((sp.basis_transform @ e)[::-1], rule.nodes)
    s = np.polyval(poly[::-1], rule.nodes)
    inner = np.sum(rule.weights * np.conj(ex) * s / (1 + t) ** m)
    assert inner == pytest.approx(np.polyval(poly[::-1], z0), rel=1e-12)


def test_fiber_scale(cp1):
    sp = build_section_space(cp1, 3)
    e1 = coherent_vector(sp, 0.5)
    e2 = coherent_vector(sp, 0.5, fiber_scale=2j)
    assert np.allclose(e2.coefficients, e1.coefficients / np.conj(2j))


def test_projector_independent_of_chart(cp1):
    sp = build_section_space(cp1, 6)
    p0 = coherent_projector(sp, ChartPoint(0, 0.5 + 0.5j))
    p1 = coherent_projector(sp, ChartPoint(0, 0.5 + 0.5j).to_chart(1))
    assert np.allclose(p0.entries, p1.entries, atol=1e-13)
    north = coherent_projector(sp, ChartPoint(1, 0.0))
    assert north.entries[-1, -1] == pytest.approx(1.0)


@pytest.mark.parametrize("m", [1, 5, 40])
def test_epsilon_constant(cp1, m, rng):
    sp = build_section_space(cp1, m)
    eps = epsilon_function(sp, random_points(cp1, 500, rng))
    assert np.allclose(eps, (m + 1) / (2 * np.pi), rtol=1e-12, atol=0)
    assert epsilon_function(sp, ChartPoint(1, 0.0)) == pytest.approx((m + 1) / (2 * np.pi))


def test_epsilon_product(cp1xcp1, rng):
    sp = build_section_space(cp1xcp1, (3, 4))
    eps = epsilon_function(sp, random_points(cp1xcp1, 100, rng))
    assert np.allclose(eps, 20 / (2 * np.pi) ** 2, rtol=1e-12)


def test_coherent_embedding_normalized(cp1):
    sp = build_section_space(cp1, 4)
    v = coherent_embedding(sp, 1.3 - 0.4j)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    lead = np.flatnonzero(np.abs(v) > 1e-12)[0]
    assert abs(v[lead].imag) < 1e-15 and v[lead].real > 0
    w = coherent_embedding(sp, ChartPoint(0, 1.3 - 0.4j).to_chart(1))
    assert np.allclose(v, w, atol=1e-13)


def kernel_oracle(z, w, m):
    return (np.abs(1 + np.conj(z) * w) ** 2 / ((1 + np.abs(z) ** 2) * (1 + np.abs(w) ** 2))) ** m


@pytest.mark.parametrize("m", [1, 7, 40])
def test_kernel_closed_form(cp1, m, rng):
    k = two_point_kernel(build_section_space(cp1, m))
    z, w = random_points(cp1, 300, rng), random_points(cp1, 300, rng)
    assert np.allclose(k(z, w), kernel_oracle(z, w, m), atol=1e-12)
    assert np.allclose(k(z, z), 1.0, atol=1e-13)
    assert np.allclose(k.matrix(z[:5], w[:7]), kernel_oracle(z[:5, None], w[None, :7], m), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5),
       st.integers(1, 15))
def test_kernel_symmetric_and_bounded(z, w, m):
    from btq.geometry import manifold
    k = two_point_kernel(build_section_space(manifold("cp1"), m))
    a, b = k(z, w), k(w, z)
    assert a == pytest.approx(b, abs=1e-13)
    assert -1e-14 <= a <= 1 + 1e-14


def test_kernel_decays_with_level(cp1):
    vals = [two_point_kernel(build_section_space(cp1, m))(0.0, 1.0) for m in (1, 2, 4, 8)]
    assert np.allclose(vals, [0.5 ** m for m in (1, 2, 4, 8)])
