import mpmath
import numpy as np
import pytest

from btq.quadrature import QuadratureResourceError, build_rule, integrate


def beta_moment(a, b):
    """int u^a (1-u)^b over CP^1 with u = |z|^2/(1+|z|^2): 2 pi B(a+1, b+1)."""
    return float(2 * mpmath.pi * mpmath.beta(a + 1, b + 1))


def test_total_volume(cp1, cp1xcp1):
    assert integrate(lambda z: np.ones(len(z)), build_rule(cp1, 5)) == pytest.approx(2 * np.pi)
    rule = build_rule(cp1xcp1, (2, 3))
    assert integrate(np.ones(rule.size), rule) == pytest.approx(4 * np.pi ** 2)


@pytest.mark.parametrize("m", [1, 7, 20])
def test_radial_moments_exact(cp1, m):
    rule = build_rule(cp1, m)
    cap = rule.level_capacity[0]
    for a in range(0, cap + 1, 3):
        for b in range(0, cap - a + 1, 4):
            def f(z, a=a, b=b):
                t = np.abs(z) ** 2
                return t ** a / (1 + t) ** (a + b)
            assert integrate(f, rule).real == pytest.approx(beta_moment(a, b), rel=1e-12)


def test_angular_orthogonality(cp1):
    rule = build_rule(cp1, 4)
    cap = rule.level_capacity[0]
    for j in range(cap + 1):
        for k in range(cap + 1):
            if j == k:
                continue
            val = integrate(lambda z: z ** j * np.conj(z) ** k / (1 + np.abs(z) ** 2) ** max(j, k), rule)
            assert abs(val) < 1e-13


def test_product_rule_is_tensor_product(cp1xcp1):
    rule = build_rule(cp1xcp1, (1, 2), extra_band=2)
    val = integrate(lambda z: (np.abs(z[:, 0]) ** 2 / (1 + np.abs(z[:, 0]) ** 2))
                    * (1 / (1 + np.abs(z[:, 1]) ** 2) ** 2), rule)
    assert val.real == pytest.approx(beta_moment(1, 0) * beta_moment(0, 2), rel=1e-12)


def test_workers_agree(cp1):
    rule = build_rule(cp1, 12)
    f = lambda z: np.cos(z.real) + 1j * np.sin(z.imag)
    assert integrate(f, rule, workers=4) == pytest.approx(integrate(f, rule), rel=1e-14)


def test_errors(cp1):
    rule = build_rule(cp1, 2)
    vals = np.ones(rule.size)
    vals[3] = np.inf
    with pytest.raises(ValueError, match="node 3"):
        integrate(vals, rule)
    with pytest.raises(QuadratureResourceError):
        build_rule(cp1, 5000)
    with pytest.raises(ValueError):
        build_rule(cp1, 3, extra_band=-1)
