import json

import numpy as np
import pytest

from bianchi_ode import (
    BianchiState,
    FluidParameter,
    IntegratorConfig,
    classify_type,
    derived,
    ensemble,
    in_cap,
    integrate,
    kasner_angle,
    kasner_epochs,
    kasner_state,
    mixmaster_integrals,
    rhs,
    sign_changes,
    taub_line_state,
    vacuum_state,
)
from errors import UsageError
from kasner_maps import CORNER_CURVATURE, EmanationConfig, kasner_images

TYPE_IX = vacuum_state((0.1, 0.2, 0.15), 0.1)
TIGHT = IntegratorConfig(rtol=1e-10, atol=1e-12, max_step=0.1)


def test_state_parse():
    s = BianchiState.parse("0.1,0.2,0.15,-1,0.1")
    assert s == BianchiState(0.1, 0.2, 0.15, -1.0, 0.1)
    assert BianchiState.from_array(s.as_array()) == s
    for bad in ("1,2,3", "a,b,c,d,e", "1,2,3,4,nan"):
        with pytest.raises(UsageError):
            BianchiState.parse(bad)


def test_fluid_parameter_range():
    FluidParameter(0.0)
    with pytest.raises(UsageError):
        FluidParameter(2.0)
    with pytest.raises(UsageError):
        FluidParameter(-0.1)


def test_derived_examples():
    d = derived(kasner_state(0.0), gamma=1.0)
    assert (d.K, d.S_plus, d.S_minus, d.Omega, d.q) == pytest.approx((0, 0, 0, 0, 2))

    d = derived(taub_line_state(0.3))
    assert (d.K, d.S_plus, d.S_minus, d.Omega, d.q) == pytest.approx((0, 0, 0, 0, 2))

    d = derived(BianchiState(0, 0, 0, 0, 0), gamma=4 / 3)
    assert d.Omega == pytest.approx(1.0)
    assert d.q == pytest.approx(1.0)


def test_vacuum_state():
    assert TYPE_IX.Sp == pytest.approx(-np.sqrt(1.033125))
    assert derived(TYPE_IX).K == pytest.approx(-0.043125)
    assert abs(derived(TYPE_IX).Omega) < 1e-14
    with pytest.raises(UsageError):
        vacuum_state((0.0, 0.0, 0.0), 1.5)


def test_rhs_vanishes_on_equilibria():
    for theta in np.linspace(0, 2 * np.pi, 360, endpoint=False):
        assert np.max(np.abs(rhs(kasner_state(theta)))) <= 1e-12
    for n in np.linspace(-2, 2, 100):
        assert np.max(np.abs(rhs(taub_line_state(n)))) <= 1e-12
    assert np.max(np.abs(rhs(BianchiState(0, 0, 0, 0, 0), gamma=4 / 3))) == 0.0


def test_classify_type():
    assert classify_type(BianchiState(0, 0, 0, 0.5, 0)) == "I"
    assert classify_type(BianchiState(0.1, 0, 0, 0.5, 0)) == "II"
    assert classify_type(taub_line_state(0.2)) == "VII0"
    assert classify_type(BianchiState(0, 0.1, -0.1, 0, 0)) == "VI0"
    assert classify_type(BianchiState(-0.1, 0.1, 0.1, 0, 0)) == "VIII"
    assert classify_type(TYPE_IX) == "IX"


def test_kasner_angle():
    assert kasner_angle(kasner_state(0.0)) == pytest.approx((0.0, 0.0))
    theta, dist = kasner_angle(BianchiState(0, 0, 0, -1.0, 0.0))
    assert theta == pytest.approx(np.pi)
    assert dist == pytest.approx(0.0)
    assert kasner_angle(BianchiState(0, 0, 0, 0, 0))[1] == pytest.approx(1.0)


def test_in_cap():
    s = BianchiState(0.2, 0.0, 0.0, -np.sqrt(1 - 0.03), 0.0)
    assert in_cap(s, 1)
    assert not in_cap(s, 2)
    assert not in_cap(TYPE_IX, 1)
    with pytest.raises(UsageError):
        in_cap(s, 4)


def test_integrator_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rtol": 1e-8, "max_step": 0.05}))
    cfg = IntegratorConfig.from_json(path)
    assert cfg.rtol == 1e-8 and cfg.max_step == 0.05 and cfg.method == "RK45"
    assert cfg.halved().rtol == 5e-9

    path.write_text(json.dumps({"rtol": 1e-8, "order": 5}))
    with pytest.raises(UsageError):
        IntegratorConfig.from_json(path)
    with pytest.raises(UsageError):
        IntegratorConfig.from_json(tmp_path / "missing.json")
    with pytest.raises(UsageError):
        IntegratorConfig(rtol=0.0)


def test_integrate_argument_errors():
    with pytest.raises(UsageError):
        integrate(TYPE_IX, direction="sideways")
    with pytest.raises(UsageError):
        integrate(TYPE_IX, t_span=0.0)
    with pytest.raises(UsageError):
        integrate(TYPE_IX, gamma=2.5)


def test_kasner_point_is_stationary():
    s0 = kasner_state(np.radians(100.0))
    traj = integrate(s0, t_span=50.0, cfg=TIGHT)
    assert np.max(np.abs(traj.y - s0.as_array()[:, None])) <= 1e-10


def test_time_is_monotone():
    back = integrate(TYPE_IX, direction="backward", t_span=10.0, cfg=TIGHT)
    fwd = integrate(TYPE_IX, direction="forward", t_span=2.0, cfg=TIGHT)
    assert np.all(np.diff(back.t) < 0)
    assert np.all(np.diff(fwd.t) > 0)
    assert back.t[-1] == pytest.approx(-10.0)


def test_vacuum_boundary_is_invariant():
    traj = integrate(TYPE_IX, direction="backward", t_span=50.0, cfg=TIGHT)
    assert np.max(np.abs(traj.derived_arrays()["Omega"])) <= 1e-6


def test_single_cap_trajectory():
    eps = 0.2
    s0 = BianchiState(eps, 0.0, 0.0, -np.sqrt(1 - 0.75 * eps ** 2 - 0.09), 0.3)
    traj = integrate(s0, t_span=20.0, cfg=TIGHT)
    assert np.all(traj.y[1] == 0.0) and np.all(traj.y[2] == 0.0)
    assert all(in_cap(s, 1, tol=1e-6) for _, s, _ in traj.samples)
    I, J = mixmaster_integrals(traj)
    assert I[-1] == 0.0 and J[-1] == 0.0


def test_kasner_trajectory_has_zero_integrals():
    traj = integrate(kasner_state(1.0), t_span=10.0, cfg=TIGHT)
    I, J = mixmaster_integrals(traj)
    assert np.all(I == 0.0) and np.all(J == 0.0)


def test_taub_line_integral_grows_linearly():
    n = 0.3
    traj = integrate(taub_line_state(n), direction="backward", t_span=10.0, cfg=TIGHT)
    I, J = mixmaster_integrals(traj)
    elapsed = np.abs(traj.t - traj.t[0])
    assert np.allclose(I, n * elapsed, rtol=1e-8, atol=1e-12)
    assert np.allclose(J, n * n * elapsed, rtol=1e-8, atol=1e-12)


def random_vacuum_states(count, seed):
    rng = np.random.default_rng(seed)
    states = []
    for k in range(count):
        N = rng.uniform(0.02, 0.3, size=3)
        if k % 4 == 3:
            N[0] = -N[0]    # type VIII
        states.append(vacuum_state(N, float(rng.uniform(-0.4, 0.4))))
    return states


def test_sign_invariance_on_ensemble():
    states = random_vacuum_states(20, seed=5)
    trajectories = ensemble(states, direction="backward", t_span=30.0, cfg=TIGHT, jobs=2)
    assert len(trajectories) == 20
    for s0, traj in zip(states, trajectories):
        assert sign_changes(traj) == 0
        assert {classify_type(traj.state(k)) for k in range(0, len(traj), 10)} == {classify_type(s0)}
        assert np.all(np.sign(traj.y[:3]) == np.sign(s0.as_array()[:3])[:, None])


def test_ensemble_preserves_order():
    states = random_vacuum_states(4, seed=1)
    serial = ensemble(states, t_span=5.0, cfg=TIGHT)
    parallel = ensemble(states, t_span=5.0, cfg=TIGHT, jobs=2)
    for a, b in zip(serial, parallel):
        assert np.array_equal(a.t, b.t) and np.array_equal(a.y, b.y)


def test_integrals_converge_under_tolerance_halving():
    coarse = integrate(TYPE_IX, t_span=20.0, cfg=IntegratorConfig(rtol=1e-9, atol=1e-12))
    fine = integrate(TYPE_IX, t_span=20.0, cfg=IntegratorConfig(rtol=1e-9, atol=1e-12).halved())
    for a, b in zip(mixmaster_integrals(coarse), mixmaster_integrals(fine)):
        assert abs(a[-1] - b[-1]) <= 0.01 * abs(b[-1])


def test_j_integral_is_monotone_with_shrinking_increments():
    traj = integrate(TYPE_IX, direction="backward", t_span=50.0, cfg=TIGHT)
    _, J = mixmaster_integrals(traj)
    assert np.all(np.diff(J) >= 0)
    tenth = len(J) // 10
    assert J[-1] - J[-tenth] < J[tenth] - J[0]


def test_trajectory_frame_columns():
    traj = integrate(TYPE_IX, t_span=1.0, cfg=TIGHT)
    frame = traj.to_frame()
    assert list(frame.columns) == ["t", "N1", "N2", "N3", "Sp", "Sm", "Omega", "q", "I_partial", "J_partial"]
    assert len(frame) == len(traj)
    assert frame["I_partial"].iloc[0] == 0.0


def test_backward_run_shadows_kasner_map():
    """Near-Kasner plateaus of a backward type IX run follow the chord map."""
    theta0 = np.radians(100.0)
    s0 = vacuum_state((1e-5, 1e-5, 1e-5), float(np.sin(theta0)), sp_sign=np.cos(theta0))
    cfg = IntegratorConfig(rtol=1e-10, atol=1e-100, max_step=0.1)
    traj = integrate(s0, direction="backward", t_span=300.0, cfg=cfg)
    epochs = kasner_epochs(traj)
    assert len(epochs) >= 4
    assert np.degrees(epochs[0]["theta"]) == pytest.approx(100.0, abs=0.01)

    gr = EmanationConfig(2.0)
    names = ["N1", "N2", "N3"]
    for k in range(3):
        images = kasner_images(epochs[k]["theta"], gr)
        assert len(images) == 1
        predicted, corner = images[0]
        observed = epochs[k + 1]["theta"]
        gap = abs((np.degrees(predicted - observed) + 180.0) % 360.0 - 180.0)
        assert gap < 5.0

        # the curvature variable that grows between plateaus belongs to the corner
        window = traj.y[:3, epochs[k]["end"]:epochs[k + 1]["start"] + 1]
        grown = names[int(np.argmax(np.max(np.abs(window), axis=1)))]
        assert grown == CORNER_CURVATURE[corner]

    assert [round(np.degrees(e["theta"])) for e in epochs[1:4]] == pytest.approx([356, 193, 165], abs=3)


def test_trajectory_record():
    traj = integrate(kasner_state(1.0), t_span=1.0, cfg=TIGHT)
    assert sorted(vars(traj)) == ["direction", "gamma", "message", "nfev", "t", "y"]
    assert traj.direction == "backward" and traj.nfev > 0
