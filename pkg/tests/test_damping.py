import numpy as np
import pytest

from damped_eb import damping, mesh
from damped_eb.damping import (
    constant_law,
    law_from_spec,
    linear_law,
    q_coefficient,
    simpson_1d,
    simpson_2d,
    sqrt_law,
    validate_law,
)

from oracles import random_gridfn_1d, random_gridfn_2d


def test_simpson_1d_exact_for_quadratic():
    g = mesh.Grid1D(2)
    v = g.nodes**2
    assert simpson_1d(v, g.h) == pytest.approx(1.0 / 3.0, abs=1e-16)


def test_simpson_1d_constants():
    assert simpson_1d(np.zeros(5), 0.25) == 0.0
    assert simpson_1d(np.ones(5), 0.25) == pytest.approx(1.0, abs=1e-15)


def test_simpson_1d_rejects_even_length():
    with pytest.raises(ValueError):
        simpson_1d(np.zeros(6), 0.1)


def test_simpson_matches_weighted_norm_1d():
    rng = np.random.default_rng(30)
    for _ in range(200):
        J = int(rng.integers(2, 33))
        g = mesh.grid1d(J)
        v = random_gridfn_1d(rng, J)
        quad = simpson_1d(v * v, g.h)
        nb2 = mesh.norm(g, v, "b") ** 2
        assert abs(quad - nb2) <= 1e-13 * max(1.0, abs(nb2))


def test_simpson_2d_zero_and_unit():
    g = mesh.Grid2D(3, 4)
    assert simpson_2d(np.zeros(g.shape), g.h1, g.h2) == 0.0
    ones = np.ones(g.shape)
    assert simpson_2d(ones, g.h1, g.h2, reduced=False) == pytest.approx(1.0, abs=1e-14)


def test_simpson_2d_parity_check():
    with pytest.raises(ValueError):
        simpson_2d(np.zeros((6, 5)), 0.1, 0.1)
    with pytest.raises(ValueError):
        simpson_2d(np.zeros((5, 4)), 0.1, 0.1)


def test_simpson_2d_nine_point_exact_for_biquadratic():
    g = mesh.Grid2D(2, 2)
    X, Y = np.meshgrid(g.xs, g.ys, indexing="ij")
    v = X**2 * Y**2
    assert simpson_2d(v, g.h1, g.h2, reduced=False) == pytest.approx(
        1.0 / 9.0, abs=1e-15
    )


def test_simpson_2d_matches_weighted_norm():
    rng = np.random.default_rng(31)
    for _ in range(200):
        J1 = int(rng.integers(2, 9))
        J2 = int(rng.integers(2, 9))
        g = mesh.grid2d(J1, J2)
        w = random_gridfn_2d(rng, J1, J2)
        quad = simpson_2d(w * w, g.h1, g.h2)
        nf2 = mesh.norm(g, w, "f") ** 2
        assert abs(quad - nf2) <= 1e-13 * max(1.0, abs(nf2))


def test_simpson_2d_reduced_equals_nine_point_for_vanishing_integrand():
    g = mesh.Grid2D(2, 2)
    X, Y = np.meshgrid(g.xs, g.ys, indexing="ij")
    v = X * (1 - X) * Y * (1 - Y)
    full = simpson_2d(v, g.h1, g.h2, reduced=False)
    red = simpson_2d(v, g.h1, g.h2, reduced=True)
    assert full == pytest.approx(red, abs=1e-16)
    # and for random boundary-vanishing fields
    rng = np.random.default_rng(32)
    w = random_gridfn_2d(rng, 3, 5)
    g2 = mesh.Grid2D(3, 5)
    assert simpson_2d(w, g2.h1, g2.h2, reduced=False) == pytest.approx(
        simpson_2d(w, g2.h1, g2.h2), rel=1e-13, abs=1e-15
    )


def test_q_coefficient_examples():
    V = np.zeros(5)
    assert q_coefficient(V, linear_law()) == 1.0
    assert q_coefficient(V, sqrt_law()) == 1.0
    V = np.array([0.0, 2.0, 1.0, 2.0, 0.0])
    assert q_coefficient(V, linear_law()) == pytest.approx(1.0 + 17.0 / 6.0, abs=1e-13)


def test_q_coefficient_2d_uses_f_norm():
    rng = np.random.default_rng(33)
    g = mesh.Grid2D(3, 3)
    V = random_gridfn_2d(rng, 3, 3)
    expected = 1.0 + mesh.norm(g, V, "f") ** 2
    assert q_coefficient(V, linear_law()) == pytest.approx(expected, rel=1e-14)


def test_q_coefficient_respects_lower_bound():
    rng = np.random.default_rng(34)
    for law in (constant_law(0.5), linear_law(), sqrt_law()):
        for _ in range(50):
            J = int(rng.integers(2, 17))
            V = random_gridfn_1d(rng, J)
            assert q_coefficient(V, law) >= law.p0


def test_validate_law_clean_laws():
    assert validate_law(linear_law(), 100.0).ok
    assert validate_law(sqrt_law(), 100.0).ok
    assert validate_law(constant_law(2.0), 10.0).ok


def test_validate_law_flags_lower_bound_violation():
    bad = damping.DampingLaw("bad", lambda z: z, p0=0.5)
    report = validate_law(bad, 10.0, samples=11)
    assert not report.ok
    assert report.lower_bound_violations[0][0] == 0.0


def test_validate_law_flags_monotonicity():
    wavy = damping.DampingLaw("wavy", lambda z: 2.0 + np.sin(z), p0=0.5)
    report = validate_law(wavy, 10.0, samples=100)
    assert report.monotonicity_violations


def test_validate_law_flags_lipschitz():
    steep = damping.DampingLaw("steep", lambda z: z * z, p0=None, lipschitz=1.0)
    report = validate_law(steep, 10.0, samples=100)
    assert report.lipschitz_violations


def test_validate_law_rejects_bad_zmax():
    with pytest.raises(ValueError):
        validate_law(linear_law(), 0.0)


def test_law_from_spec_names():
    assert law_from_spec("linear").name == "linear"
    assert law_from_spec("sqrt")(3.0) == 2.0
    assert law_from_spec("constant")(5.0) == 1.0
    assert law_from_spec("constant:2.5")(0.0) == 2.5


def test_law_from_spec_expression_in_z():
    law = law_from_spec("1 + 2*z")
    assert law(1.5) == 4.0
    law2 = law_from_spec("sqrt(1+z)", p0=1.0)
    assert law2(3.0) == 2.0
    assert law2.p0 == 1.0
