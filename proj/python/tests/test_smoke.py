import numpy as np
import pytest

sbd = pytest.importorskip("sbd")


def small_problem(m=2, seed=3):
    hp = sbd.HyperParams()
    hp.blur = sbd.CorrelationSpec(2.0, 1.5)
    data = sbd.simulate(nv_obs=6, nh_obs=2, k=4, gen_factor=4, hp=hp, seed=seed)
    rows = sbd.central_rows(6, m)
    col = data["exact_column"]
    positions = [(r, col) for r in rows]
    values = np.array([data["c_window"][r, col] for r in rows])
    lat = sbd.LatticeSpec(6, 2, 2, 1, 4)
    return sbd.Model(lat, hp, data["d_obs"], positions, values), data


def test_lattice_and_model_shapes():
    model, data = small_problem()
    assert model.lattice.nv == 8 and model.lattice.nh == 3
    assert model.m == 2
    assert data["d_obs"].shape == (6, 2)
    state = sbd.initial_state(model)
    assert state.c.shape == (8, 3)
    assert np.isfinite(sbd.log_posterior(state, model))


def test_gibbs_holds_known_pixels():
    model, data = small_problem()
    state = sbd.prior_state(model, seed=5)
    sbd.gibbs_sweeps(state, model, sweeps=20, seed=7)
    off = model.lattice.row_offset
    col = data["exact_column"]
    for r in sbd.central_rows(6, 2):
        assert state.c[r + off, col] == pytest.approx(data["c_window"][r, col], abs=1e-10)


def test_chain_is_reproducible():
    model, _ = small_problem()
    state = sbd.prior_state(model, seed=5)
    hmc = sbd.HmcConfig()
    hmc.steps = 5
    a = sbd.run_chain(model, state, alpha=0.5, iterations=60, seed=9, hmc=hmc)
    b = sbd.run_chain(model, state, alpha=0.5, iterations=60, seed=9, hmc=hmc)
    assert a["omega"].shape == (40, 4)
    np.testing.assert_array_equal(a["omega"], b["omega"])
    assert all(v > 0 for v in a["sigma_c2"])


def test_gradient_matches_differences():
    model, _ = small_problem()
    state = sbd.prior_state(model, seed=5)
    om = np.array(state.omega)
    g = sbd.grad_potential(model, state, om)
    h = 1e-5
    for i in range(om.size):
        e = np.zeros_like(om)
        e[i] = h
        fd = (sbd.potential(model, state, om + e) - sbd.potential(model, state, om - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-4, abs=1e-8)


def test_diagnostics():
    rng = np.random.default_rng(0)
    x = rng.normal(size=20000)
    assert 0.7 < sbd.ess(x, 200) / x.size < 1.3
    assert sbd.msjd([0.0, 1.0, 0.0]) == pytest.approx(2.0 / 3.0)
    assert sbd.rmse([1.0, 3.0], 2.0) == pytest.approx(1.0)
    assert sbd.sign_changes([1.0, -1.0, 0.0, 2.0]) == 2


def test_errors_are_raised():
    with pytest.raises(sbd.SbdError):
        sbd.LatticeSpec(5, 2, 0, 0, 2)
