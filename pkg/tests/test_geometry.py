import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from btq.geometry import (ChartPoint, constant, manifold, function_library, hamiltonian_vector_field,
                          kaehler_potential, laplacian, lift, monomial, parse_function,
                          poisson_bracket, random_points, standard_function,
                          verify_quantization_condition)

ANALYTIC = ["x1", "x2", "x3", "monomial(1,0)", "monomial(0,1)", "monomial(1,1)",
            "monomial(2,1)", "monomial(3,1)", "monomial(2,2)"]


def fd_wirtinger(f, z, h=1e-5):
    """Central differences for f_z, f_zbar from the real partials."""
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def rel_err(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-12)


@pytest.mark.parametrize("name", ANALYTIC)
def test_supplied_derivatives_match_finite_differences(name, rng):
    f = standard_function(name)
    z = random_points(manifold("cp1"), 50, rng)
    fz, fzb = fd_wirtinger(f, z)
    assert rel_err(f.d_z(z), fz) < 1e-6
    assert rel_err(f.d_zbar(z), fzb) < 1e-6
    mixed_z, _ = fd_wirtinger(f.d_zbar, z)
    assert rel_err(f.d_z_zbar(z), mixed_z) < 1e-6


def test_coordinates_lie_on_unit_sphere(cp1, rng):
    z = random_points(cp1, 200, rng)
    x = [standard_function(n)(z).real for n in ("x1", "x2", "x3")]
    assert np.allclose(x[0] ** 2 + x[1] ** 2 + x[2] ** 2, 1.0, atol=1e-14)


@pytest.mark.parametrize("name", ANALYTIC)
def test_chart1_formula_agrees_on_overlap(name, rng):
    f = standard_function(name)
    z = 0.3 + rng.normal(size=20) + 1j * rng.normal(size=20)
    assert np.allclose(f.value_chart1(1 / z), f(z), atol=1e-13)


def test_chart_point_at_infinity():
    north = ChartPoint(1, 0.0)
    with pytest.raises(ValueError):
        north.to_chart(0)
    assert standard_function("x3").at(north) == pytest.approx(1.0)
    assert standard_function("monomial(2,1)").at(north) == pytest.approx(0.0)


def test_chart_point_validation():
    with pytest.raises(ValueError):
        ChartPoint(2, 0.0)
    with pytest.raises(ValueError):
        ChartPoint(0, complex("nan"))
    with pytest.raises(ValueError):
        ChartPoint((0, 1), (0.1,))


def test_homogeneous_coordinates_are_chart_independent():
    p = ChartPoint(0, 0.4 - 1.1j)
    q = p.to_chart(1)
    hp, hq = p.homogeneous()[0], q.homogeneous()[0]
    # same projective point: equal up to a unit phase
    ratio = hp / hq
    assert np.allclose(ratio, ratio[0]) and abs(abs(ratio[0]) - 1) < 1e-14


def test_kaehler_potential(cp1):
    assert kaehler_potential(cp1, 3, 1.0) == pytest.approx(3 * np.log(2.0))
    with pytest.raises(ValueError, match="chart-0 frame"):
        kaehler_potential(cp1, 1, ChartPoint(1, 0.5))


def test_levels_validation(cp1, cp1xcp1):
    assert cp1xcp1.levels(3) == (3, 3)
    assert cp1xcp1.levels((3, 4)) == (3, 4)
    with pytest.raises(ValueError):
        cp1.levels(0)
    with pytest.raises(ValueError):
        cp1xcp1.levels((1, 2, 3))


@pytest.mark.parametrize("kind", ["cp1", "cp1xcp1"])
def test_quantization_condition(kind, rng):
    model = manifold(kind)
    n = model.complex_dimension
    z = np.sqrt(rng.uniform(0, 25, (100, n))) * np.exp(2j * np.pi * rng.uniform(size=(100, n)))
    assert verify_quantization_condition(model, z[:, 0] if n == 1 else z) < 1e-6


def test_quantization_condition_rejects_far_points(cp1):
    with pytest.raises(ValueError):
        verify_quantization_condition(cp1, np.array([20.0]))


def _sympy_laplacian(expr, x, y):
    # (1+|z|^2)^2 d_z d_zbar = (1+r^2)^2 (f_xx + f_yy) / 4, times the pinned 2
    return sp.simplify(2 * (1 + x ** 2 + y ** 2) ** 2 * (sp.diff(expr, x, 2) + sp.diff(expr, y, 2)) / 4)


@pytest.mark.parametrize("name", ["x1", "x2", "x3"])
def test_laplacian_eigenfunctions_against_sympy(name, rng):
    x, y = sp.symbols("x y", real=True)
    r2 = x ** 2 + y ** 2
    exprs = {"x1": 2 * x / (1 + r2), "x2": 2 * y / (1 + r2), "x3": (r2 - 1) / (r2 + 1)}
    lap = _sympy_laplacian(exprs[name], x, y)
    assert sp.simplify(lap + 4 * exprs[name]) == 0
    f = standard_function(name)
    z = rng.normal(size=30) + 1j * rng.normal(size=30)
    num = sp.lambdify((x, y), lap)(z.real, z.imag)
    assert np.allclose(laplacian(f)(z), num, atol=1e-12)


def test_laplacian_of_monomial_against_sympy(rng):
    x, y = sp.symbols("x y", real=True)
    zz = x + sp.I * y
    expr = zz ** 2 * sp.conjugate(zz) / (1 + x ** 2 + y ** 2) ** 2
    lap = sp.lambdify((x, y), _sympy_laplacian(expr, x, y))
    z = rng.normal(size=30) + 1j * rng.normal(size=30)
    assert np.allclose(laplacian(monomial(2, 1))(z), lap(z.real, z.imag), atol=1e-12)


def test_poisson_bracket_of_coordinates():
    z = np.array([0.0, 0.3 + 0.2j, -1.5j, 2.0])
    x1, x2, x3 = (standard_function(n) for n in ("x1", "x2", "x3"))
    assert np.allclose(poisson_bracket(x1, x2)(z), -2 * x3(z), atol=1e-13)
    assert np.allclose(poisson_bracket(x2, x3)(z), -2 * x1(z), atol=1e-13)
    assert np.allclose(poisson_bracket(x3, x1)(z), -2 * x2(z), atol=1e-13)
    assert poisson_bracket(x1, x2).fd_backed


def test_hamiltonian_flow_fixes_bracket_sign_and_scale():
    """Flow of x1 rotates about the x1-axis; d g / dt along it equals -{x1, g}."""
    x1, x2, x3 = (standard_function(n) for n in ("x1", "x2", "x3"))

    def rhs(t, y):
        z = np.array([y[0] + 1j * y[1]])
        v = hamiltonian_vector_field(x1, z)[0]
        return [v.real, v.imag]

    z0 = 0.4 + 0.1j
    ts = np.linspace(0, 0.5, 11)
    sol = solve_ivp(rhs, (0, 0.5), [z0.real, z0.imag], t_eval=ts, rtol=1e-12, atol=1e-12)
    zt = sol.y[0] + 1j * sol.y[1]
    assert np.allclose(x1(zt), x1(z0), atol=1e-9)
    # rotation in the (x2, x3) plane at constant angular speed
    ang = np.unwrap(np.angle(x2(zt).real + 1j * x3(zt).real))
    speed = np.diff(ang) / np.diff(ts)
    assert np.allclose(speed, speed[0], atol=1e-7)
    # short symmetric step around t = 0.25 along the computed trajectory
    dt = 1e-4
    ends = solve_ivp(rhs, (0, 0.25 + dt), [z0.real, z0.imag], t_eval=[0.25 - dt, 0.25 + dt],
                     rtol=1e-13, atol=1e-13)
    ze = ends.y[0] + 1j * ends.y[1]
    dx2 = (x2(ze[1]) - x2(ze[0])).real / (2 * dt)
    assert dx2 == pytest.approx(-poisson_bracket(x1, x2)(zt[5]).real, rel=1e-6)
    assert abs(speed[0]) == pytest.approx(2.0, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_poisson_bracket_antisymmetric_and_leibniz(a, b):
    z = np.array([complex(a, b)])
    f, g, h = standard_function("x1"), standard_function("monomial(2,1)"), standard_function("x3")
    assert np.allclose(poisson_bracket(f, g)(z), -poisson_bracket(g, f)(z), atol=1e-12)
    left = poisson_bracket(f, g * h)(z)
    right = (poisson_bracket(f, g) * h + g * poisson_bracket(f, h))(z)
    assert np.allclose(left, right, atol=1e-6)


def test_arithmetic_uses_product_rule(rng):
    f = standard_function("x1") * standard_function("monomial(2,1)") + 3.0
    z = rng.normal(size=20) + 1j * rng.normal(size=20)
    fz, fzb = fd_wirtinger(f, z)
    assert rel_err(f.d_z(z), fz) < 1e-6 and rel_err(f.d_zbar(z), fzb) < 1e-6


def test_parse_function_and_library(cp1, cp1xcp1):
    f = parse_function("x1+x3", cp1)
    assert f(np.array([1.0]))[0] == pytest.approx(1.0)
    g = parse_function("x1@0*x2@1", cp1xcp1)
    assert g(np.array([[1.0, 1j]]))[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        parse_function("x1", cp1xcp1)
    with pytest.raises(ValueError):
        parse_function("x1@2", cp1xcp1)
    with pytest.raises(ValueError):
        parse_function("sin", cp1)
    assert {f.name for f in function_library(cp1)} >= {"one", "x1", "x2", "x3", "x1+x3"}
    assert len(function_library(cp1xcp1)) == 10


def test_lift_and_constant(rng):
    f = lift(standard_function("x3"), 1)
    z = rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))
    assert np.allclose(f(z), standard_function("x3")(z[:, 1]))
    d = f.d_z(z)
    assert np.allclose(d[:, 0], 0) and np.allclose(d[:, 1], standard_function("x3").d_z(z[:, 1]))
    assert np.allclose(constant(2.5)(z[:, 0]), 2.5)


def test_monomial_sup_norm_formula():
    for j, k in [(1, 0), (2, 1), (3, 1), (2, 2)]:
        f = monomial(j, k)
        u = np.linspace(0, 1 - 1e-9, 200001)
        num = np.max(np.abs(f(np.sqrt(u / (1 - u)))))
        assert f.sup_norm == pytest.approx(num, rel=1e-8)
