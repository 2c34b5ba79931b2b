import numpy as np
import pytest

from errors import EmptyInput, Escaped, UsageError
from meander_core import Permutation, is_dissipative, is_meander, morse_vector
from shooting import (
    Nonlinearity,
    constant,
    cubic,
    find_equilibria,
    linear,
    make_nonlinearity,
    polynomial,
    scan_shots,
    shoot,
    shooting_curve,
    sturm_permutation_numeric,
    transversality,
)

GRID = 512
TOL = 1e-9


@pytest.fixture(scope="module")
def cubic15_roots():
    return find_equilibria(cubic(15.0), (-2.0, 2.0), grid=GRID, tol=TOL)


def test_nonlinearity_families():
    f = cubic(15.0)
    assert f(0.5) == pytest.approx(15 * (0.5 - 0.125))
    assert f.derivative(0.0) == pytest.approx(15.0)
    assert linear(1.0)(3.0) == pytest.approx(-2.0)
    assert constant(2.0)(7.0) == pytest.approx(2.0)
    assert polynomial([0, 1, 0, -1])(2.0) == pytest.approx(-6.0)
    assert make_nonlinearity("cubic", ["15"]) == f
    with pytest.raises(UsageError):
        make_nonlinearity("quartic", ["1"])
    with pytest.raises(UsageError):
        make_nonlinearity("linear", ["1", "2"])
    with pytest.raises(UsageError):
        Nonlinearity("empty")


def test_callable_nonlinearity():
    f = Nonlinearity("negation", func=lambda v: -v)
    assert not f.has_derivative
    assert f.derivative(1.0) is None
    # finite differences without f', the variational equation with it
    assert transversality(f, 0.0) == pytest.approx(np.sinh(1.0), rel=1e-3)
    assert transversality(linear(0.0), 0.0) == pytest.approx(np.sinh(1.0), rel=1e-8)


def test_shoot_zero_nonlinearity():
    out = shoot(constant(0.0), 0.7)
    assert out.v1 == pytest.approx(0.7)
    assert out.w1 == pytest.approx(0.0, abs=1e-12)


def test_shoot_linear_closed_form():
    out = shoot(linear(0.0), 1.0)
    assert out.v1 == pytest.approx(np.cosh(1.0), rel=1e-8)
    assert out.w1 == pytest.approx(np.sinh(1.0), rel=1e-8)


def test_shoot_constant_equilibrium():
    out = shoot(cubic(15.0), 1.0)
    assert out.v1 == pytest.approx(1.0)
    assert out.w1 == pytest.approx(0.0, abs=1e-10)


def test_shoot_errors():
    with pytest.raises(UsageError):
        shoot(cubic(15.0), 0.5, tol=0.0)
    with pytest.raises(Escaped) as info:
        shoot(cubic(15.0), 5.0)
    assert info.value.x is not None and 0 < info.value.x < 1


def test_scan_marks_escaped_shots():
    frame = scan_shots(cubic(15.0), [0.5, 5.0])
    assert list(frame.columns) == ["a", "v1", "w1", "escaped"]
    assert list(frame["escaped"]) == [False, True]
    assert np.isnan(frame["v1"].iloc[1])


def test_cubic_equilibria(cubic15_roots):
    roots = cubic15_roots
    assert len(roots) == 5
    assert roots == sorted(roots)
    assert roots[0] == pytest.approx(-1.0, abs=1e-8)
    assert roots[2] == pytest.approx(0.0, abs=1e-8)
    assert roots[4] == pytest.approx(1.0, abs=1e-8)
    assert 0 < roots[3] < 1
    assert roots[1] == pytest.approx(-roots[3], abs=1e-6)


def test_equilibria_other_families():
    assert find_equilibria(constant(1.0), (-1.0, 1.0), grid=64) == []
    roots = find_equilibria(linear(0.0), (-2.0, 2.0), grid=64)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(0.0, abs=1e-9)


def test_find_equilibria_grid_too_small():
    with pytest.raises(UsageError):
        find_equilibria(cubic(15.0), grid=1)


def test_cubic_sturm_permutation():
    sigma = sturm_permutation_numeric(cubic(15.0), (-2.0, 2.0), grid=GRID, tol=TOL)
    assert sigma == Permutation((1, 4, 3, 2, 5))
    assert is_meander(sigma) and is_dissipative(sigma)
    assert morse_vector(sigma).indices == (0, 1, 2, 1, 0)


def test_cubic_sturm_permutation_stable_under_tolerance_halving():
    coarse = sturm_permutation_numeric(cubic(15.0), grid=256, tol=1e-8)
    fine = sturm_permutation_numeric(cubic(15.0), grid=256, tol=5e-9)
    assert coarse == fine


def test_single_equilibrium_gives_identity():
    assert sturm_permutation_numeric(linear(1.0), (-2.0, 2.0), grid=64) == Permutation((1,))


def test_no_equilibria_is_empty_input():
    with pytest.raises(EmptyInput):
        sturm_permutation_numeric(constant(1.0), (-1.0, 1.0), grid=64)


def test_shooting_curves():
    grid = np.linspace(-1.0, 1.0, 21)
    flat = shooting_curve(constant(0.0), grid)
    assert np.allclose(flat["w1"], 0.0, atol=1e-12)

    line = shooting_curve(linear(0.0), grid)
    nonzero = np.abs(line["v1"]) > 1e-9
    assert np.allclose(line["w1"][nonzero] / line["v1"][nonzero], np.tanh(1.0), rtol=1e-7)


def test_cubic_curve_axis_crossings(cubic15_roots):
    frame = shooting_curve(cubic(15.0), np.linspace(-2.0, 2.0, GRID), tol=TOL)
    w = frame.loc[~frame["escaped"], "w1"].to_numpy()
    assert int(np.sum(np.sign(w[1:]) * np.sign(w[:-1]) < 0)) == len(cubic15_roots)
