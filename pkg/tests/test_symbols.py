import numpy as np
import pytest

from btq import symbols
from btq.geometry import ChartPoint, constant, function_library, random_points, standard_function
from btq.hilbert import build_section_space, coherent_projector
from btq.operators import OperatorMatrix, identity, operator_norm, toeplitz
from btq.symbols import (ToeplitzSpanError, adjointness_check, berezin_function,
                         berezin_transform, contravariant_reconstruct, contravariant_solve,
                         covariant_symbol, eps_inner, modified_measure_integrate,
                         symbol_sampling_rank)


def rand_op(level, d, rng):
    return OperatorMatrix(level, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))


def test_symbol_is_trace_against_projector(cp1, rng):
    sp = build_section_space(cp1, 5)
    a = rand_op(5, 6, rng)
    for x in (ChartPoint(0, 0.3 - 1j), ChartPoint(1, 0.0)):
        p = coherent_projector(sp, x)
        assert covariant_symbol(a, sp)(x) == pytest.approx(np.trace(a.entries @ p.entries))


def test_symbol_of_identity(cp1, cp1xcp1, rng):
    for sp in (build_section_space(cp1, 8), build_section_space(cp1xcp1, (3, 4))):
        z = random_points(sp.model, 50, rng)
        assert np.allclose(covariant_symbol(identity(sp), sp)(z), 1.0, atol=1e-13)


def test_modified_measure_total_mass(cp1):
    for m in (1, 6, 30):
        sp = build_section_space(cp1, m)
        assert modified_measure_integrate(sp, lambda z: np.ones(len(z))) == pytest.approx(m + 1)


def test_resolution_of_identity(cp1xcp1):
    sp = build_section_space(cp1xcp1, (2, 3))
    r = contravariant_reconstruct(sp, constant(1.0, 2))
    assert np.allclose(r.entries, np.eye(sp.dimension), atol=1e-13)


def test_contravariant_reconstruction_equals_toeplitz(cp1):
    sp = build_section_space(cp1, 9)
    for f in function_library(cp1):
        assert np.linalg.norm((contravariant_reconstruct(sp, f) - toeplitz(sp, f)).entries) < 1e-12


@pytest.mark.parametrize("m", [5, 10])
def test_adjointness(cp1, m, rng):
    sp = build_section_space(cp1, m)
    for f in function_library(cp1):
        a = rand_op(m, m + 1, rng)
        assert adjointness_check(a, f, sp) < 1e-10 * (1 + operator_norm(a))


def test_eps_inner_is_sesquilinear(cp1):
    sp = build_section_space(cp1, 3)
    f, g = standard_function("monomial(1,0)"), standard_function("x3")
    assert eps_inner(sp, 2j * f, g) == pytest.approx(-2j * eps_inner(sp, f, g))


def test_sampling_rank_full(cp1):
    for m in (1, 3, 6):
        rank, _ = symbol_sampling_rank(build_section_space(cp1, m), 4 * (m + 1) ** 2, rng=0)
        assert rank == (m + 1) ** 2


@pytest.mark.parametrize("m", [1, 3, 6])
def test_contravariant_solve_round_trip(cp1, m, rng):
    sp = build_section_space(cp1, m)
    a = rand_op(m, m + 1, rng)
    sol = contravariant_solve(a, sp)
    f = sol.as_function()
    back = toeplitz(sp.with_band(2 * m), f)
    assert np.linalg.norm(back.entries - a.entries) < 1e-9 * operator_norm(a)


def test_span_deficiency_raises(cp1, rng, monkeypatch):
    monkeypatch.setattr(symbols, "monomial_family", lambda space: [constant(1.0)])
    with pytest.raises(ToeplitzSpanError, match="span deficient"):
        contravariant_solve(rand_op(2, 3, rng), build_section_space(cp1, 2))


@pytest.mark.parametrize("m", [2, 10, 40])
def test_berezin_x3_closed_form(cp1, m, rng):
    sp = build_section_space(cp1, m)
    z = random_points(cp1, 100, rng)
    x3 = standard_function("x3")
    assert np.allclose(berezin_transform(sp, x3, z), m / (m + 2) * x3(z), atol=1e-12)


def test_berezin_methods_agree(cp1, rng):
    sp = build_section_space(cp1, 7)
    z = random_points(cp1, 20, rng)
    for f in function_library(cp1):
        a = berezin_transform(sp, f, z, "coherent")
        b = berezin_transform(sp, f, z, "kernel")
        assert np.allclose(a, b, atol=1e-12)
    with pytest.raises(ValueError):
        berezin_transform(sp, f, z, "magic")


def test_berezin_function_scalar(cp1):
    sp = build_section_space(cp1, 4)
    b = berezin_function(sp, standard_function("x3"))
    assert b.at(ChartPoint(1, 0.0)) == pytest.approx(4 / 6)
