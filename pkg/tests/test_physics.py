import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elastodg.physics import (
    LEFT,
    RIGHT,
    ExternalBoundary,
    Frictionless,
    HatSolveError,
    LinearShearResistance,
    Locked,
    RateDependent,
    SlipWeakening,
    boundary_hat,
    characteristics,
    effective_alpha,
    fluctuation,
    friction_power,
    interface_hat,
    solve_slip_rate,
    stress_transfer,
    verify_boundary_identities,
    verify_interface_identities,
)

TABLE = SlipWeakening(f_s=0.677, f_d=0.525, d_c=0.4, sigma_n=120e6)
ETA_TABLE = 2670.0 * 3464.0 / 2.0

traces = st.floats(-1e3, 1e3, allow_nan=False)
impedances = st.floats(1e-2, 1e2)
reflections = st.floats(-1.0, 1.0)


def all_laws():
    return [
        Locked(),
        Frictionless(),
        LinearShearResistance(0.0),
        LinearShearResistance(0.37),
        LinearShearResistance(25.0),
        SlipWeakening(0.6, 0.4, 0.5, 10.0),
        RateDependent(lambda V: 0.3 + 0.1 * V / (V + 1.0), 20.0),
    ]


# --- characteristics ----------------------------------------------------------


def test_characteristics_example():
    c = characteristics(3.0, 4.0, 2.0)
    assert (c.p, c.q) == (5.0, 1.0)
    assert characteristics(0.0, 0.0, 7.0) == (0.0, 0.0)


@given(traces, traces, impedances)
def test_characteristics_reconstruct_fields(v, s, Z):
    p, q = characteristics(v, s, Z)
    scale = max(1.0, abs(Z * v), abs(s))
    assert abs(p + q - Z * v) <= 1e-13 * scale
    assert abs(p - q - s) <= 1e-13 * scale


def test_characteristics_rejects_nonpositive_impedance():
    with pytest.raises(ValueError):
        characteristics(1.0, 1.0, 0.0)


# --- boundaries ------------------------------------------------------------------


@pytest.mark.parametrize(
    "r, v_hat, s_hat", [(1.0, 5.0, 0.0), (-1.0, 0.0, 10.0), (0.0, 2.5, 5.0)]
)
def test_left_boundary_examples(r, v_hat, s_hat):
    hat = boundary_hat(5.0, 2.0, r, LEFT)
    assert hat.v_plus == pytest.approx(v_hat)
    assert hat.sigma_plus == pytest.approx(s_hat)


def test_right_boundary_mirrors_left():
    hat = boundary_hat(5.0, 2.0, 0.0, RIGHT)
    assert hat.v_minus == pytest.approx(2.5)
    assert hat.sigma_minus == pytest.approx(-5.0)


def test_boundary_rejects_ill_posed_reflection():
    with pytest.raises(ValueError):
        boundary_hat(1.0, 1.0, 1.5, LEFT)
    with pytest.raises(ValueError):
        ExternalBoundary(-1.01)


@given(traces, impedances, reflections)
def test_boundary_identities(out, Z, r):
    for side in (LEFT, RIGHT):
        hat = boundary_hat(out, Z, r, side)
        d = verify_boundary_identities(out, Z, r, side, hat)
        assert d["characteristics"] <= 1e-13
        assert d["power"] <= 1e-12
        assert d["work"] <= 1e-12
        assert d["signed_work"] >= 0.0


@given(traces, impedances, reflections, traces, traces)
def test_boundary_data_is_reproduced(out, Z, r, vd, sd):
    # when the outgoing wave is that of the data state, the hat equals the data
    p_data = 0.5 * (Z * vd + sd)
    hat = boundary_hat(p_data, Z, r, LEFT, vd, sd)
    scale = max(1.0, abs(vd), abs(sd))
    assert abs(hat.v_plus - vd) <= 1e-12 * scale * max(1.0, 1.0 / Z) * max(1.0, Z)
    assert abs(hat.sigma_plus - sd) <= 1e-12 * scale * max(1.0, Z)


# --- stress transfer and friction -------------------------------------------


def test_stress_transfer_examples():
    assert stress_transfer(1.0, 3.0, 2.0, 2.0) == pytest.approx((2.0, 1.0))
    assert stress_transfer(0.0, 0.0, 3.0, 5.0).phi == 0.0
    phi, eta = stress_transfer(3.0, 3.0, 1.0, 3.0)
    assert eta == pytest.approx(0.75)
    assert phi == pytest.approx(-3.0)


def test_slip_weakening_onset_rate():
    V, tau = solve_slip_rate(81.6e6, ETA_TABLE, TABLE, 0.0)
    assert V == pytest.approx((81.6e6 - 81.24e6) / 4.6244e6, rel=1e-4)
    assert V == pytest.approx(0.07785, abs=5e-5)
    assert tau == pytest.approx(81.24e6)


def test_slip_weakening_residual_rate():
    V, tau = solve_slip_rate(81.6e6, ETA_TABLE, TABLE, 0.4)
    assert tau == pytest.approx(63e6)
    assert V == pytest.approx(4.02, abs=5e-3)


@pytest.mark.parametrize("law", all_laws()[4:])
def test_below_strength_is_locked(law):
    phi = 0.5 * (law.peak_strength if isinstance(law, SlipWeakening) else 5.0)
    V, tau = solve_slip_rate(phi, 1.0, law if isinstance(law, SlipWeakening) else TABLE, 0.0)
    assert V == 0.0
    assert tau == phi


def test_table_law_below_peak_is_locked():
    V, tau = solve_slip_rate(80e6, ETA_TABLE, TABLE, 0.0)
    assert (V, tau) == (0.0, 80e6)


@given(st.floats(0.0, 200.0), st.floats(0.0, 200.0), st.floats(0.0, 1.0), st.floats(0.1, 10.0))
def test_slip_weakening_monotone(phi1, phi2, s1, eta):
    law = SlipWeakening(0.6, 0.4, 0.5, 100.0)
    lo, hi = sorted((phi1, phi2))
    V_lo, _ = solve_slip_rate(lo, eta, law, s1)
    V_hi, _ = solve_slip_rate(hi, eta, law, s1)
    assert V_hi >= V_lo
    # weaker face (more slip) slides at least as fast
    V_weak, _ = solve_slip_rate(hi, eta, law, s1 + 0.2)
    assert V_weak >= V_hi


def test_rate_dependent_solves_its_equation():
    law = RateDependent(lambda V: 0.3 + 0.1 * V / (V + 1.0), 20.0)
    phi = np.array([-30.0, 7.0, 100.0, 1e4])
    eta = np.array([0.5, 1.0, 2.0, 3.0])
    V, tau = solve_slip_rate(phi, eta, law)
    resid = law.sigma_n * law.f(V) + eta * V - np.abs(phi)
    active = np.abs(phi) > law.sigma_n * law.f(0.0)
    assert np.all(np.abs(resid[active]) <= 1e-10 * np.abs(phi[active]))
    assert np.all(V[~active] <= 1e-12)
    np.testing.assert_array_equal(np.sign(tau), np.sign(phi))


def test_rate_dependent_rejects_negative_friction():
    law = RateDependent(lambda V: -1.0 + 0.0 * V, 10.0)
    with pytest.raises(HatSolveError):
        solve_slip_rate(5.0, 1.0, law)


def test_friction_parameter_validation():
    with pytest.raises(ValueError):
        SlipWeakening(0.4, 0.6, 0.4, 1.0)
    with pytest.raises(ValueError):
        SlipWeakening(0.6, 0.4, 0.0, 1.0)
    with pytest.raises(ValueError):
        SlipWeakening(0.6, 0.4, 0.4, -1.0)
    with pytest.raises(ValueError):
        LinearShearResistance(-1.0)
    with pytest.raises(ValueError):
        solve_slip_rate(1.0, 0.0, Locked())


# --- interface hats ---------------------------------------------------------------


def test_interface_linear_example():
    hat = interface_hat(1.0, 3.0, 2.0, 2.0, LinearShearResistance(1.0))
    assert hat.sigma_plus == pytest.approx(1.0)
    assert hat.jump == pytest.approx(1.0)
    assert hat.v_minus == pytest.approx(1.5)
    assert hat.v_plus == pytest.approx(2.5)
    # outgoing characteristics preserved
    assert (2.0 * hat.v_minus - hat.sigma_minus) / 2.0 == pytest.approx(1.0)
    assert (2.0 * hat.v_plus + hat.sigma_plus) / 2.0 == pytest.approx(3.0)
    d = verify_interface_identities(1.0, 3.0, 2.0, 2.0, hat, 1.0 / 4.0 * 4.0)
    assert max(v for k, v in d.items() if k != "min_work") <= 1e-13


def test_interface_locked_example():
    hat = interface_hat(1.0, 3.0, 2.0, 2.0, Locked())
    assert hat.sigma_plus == pytest.approx(2.0)
    assert hat.jump == 0.0
    assert hat.v_minus == pytest.approx(2.0) and hat.v_plus == pytest.approx(2.0)


def test_interface_frictionless_example():
    hat = interface_hat(1.0, 3.0, 2.0, 2.0, Frictionless())
    assert hat.sigma_plus == 0.0
    assert hat.jump == pytest.approx(2.0)
    assert hat.v_minus == pytest.approx(1.0) and hat.v_plus == pytest.approx(3.0)


def expected_power(phi, eta, law, slip=0.0):
    # independent of friction_power: sigma_hat * [[v]] from the branch formulas
    if isinstance(law, Locked):
        return np.zeros_like(phi)
    if isinstance(law, LinearShearResistance):
        return law.alpha * phi**2 / (eta + law.alpha) ** 2
    if isinstance(law, Frictionless):
        return np.zeros_like(phi)
    V, tau = solve_slip_rate(phi, eta, law, slip)
    return np.abs(tau) * V


@pytest.mark.parametrize("law", all_laws(), ids=lambda l: type(l).__name__)
def test_interface_identities_random(law):
    rng = np.random.default_rng(7)
    n = 20000
    q = rng.normal(scale=30.0, size=n)
    p = rng.normal(scale=30.0, size=n)
    Zm = rng.uniform(0.05, 20.0, n)
    Zp = rng.uniform(0.05, 20.0, n)
    slip = rng.uniform(0.0, 1.0, n)
    hat = interface_hat(q, p, Zm, Zp, law, slip)
    d = verify_interface_identities(q, p, Zm, Zp, hat, expected_power(hat.phi, hat.eta, law, slip))
    for key, val in d.items():
        if key != "min_work":
            assert val <= 1e-12, key
    assert d["min_work"] >= 0.0
    np.testing.assert_allclose(
        friction_power(hat.phi, hat.eta, law, slip), hat.sigma_plus * hat.jump,
        rtol=1e-12, atol=1e-12 * np.max(np.abs(hat.phi)) ** 2,
    )


def test_locked_work_is_exactly_zero():
    rng = np.random.default_rng(3)
    n = 10**5
    hat = interface_hat(rng.normal(size=n), rng.normal(size=n), rng.uniform(0.1, 5, n),
                        rng.uniform(0.1, 5, n), Locked())
    assert np.all(hat.sigma_plus * hat.jump == 0.0)


@given(traces, traces, impedances, impedances)
def test_limit_consistency(q, p, Zm, Zp):
    locked = interface_hat(q, p, Zm, Zp, Locked())
    stiff = interface_hat(q, p, Zm, Zp, LinearShearResistance(1e16))
    scale = max(1.0, abs(q), abs(p))
    assert abs(stiff.sigma_plus - locked.sigma_plus) <= 1e-10 * scale
    assert abs(stiff.v_plus - locked.v_plus) <= 1e-10 * scale / min(Zm, Zp)
    free = interface_hat(q, p, Zm, Zp, Frictionless())
    zero = interface_hat(q, p, Zm, Zp, LinearShearResistance(0.0))
    assert zero.sigma_plus == free.sigma_plus
    assert zero.v_plus == free.v_plus and zero.v_minus == free.v_minus


def test_effective_alpha():
    assert np.isinf(effective_alpha(3.0, 1.0, Locked()))
    assert effective_alpha(3.0, 1.0, Frictionless()) == 0.0
    assert effective_alpha(3.0, 1.0, LinearShearResistance(2.5)) == 2.5
    law = SlipWeakening(0.6, 0.4, 0.5, 10.0)
    # sliding: alpha = tau_s / V
    assert effective_alpha(8.0, 1.0, law) == pytest.approx(6.0 / 2.0)


# --- fluctuations -------------------------------------------------------------------


def test_fluctuation_consistency():
    assert fluctuation(1.2, -0.4, 3.0, 1.2, -0.4, LEFT) == 0.0
    assert fluctuation(1.2, -0.4, 3.0, 1.2, -0.4, RIGHT) == 0.0


def test_fluctuation_free_surface_example():
    hat = boundary_hat(5.0, 2.0, 1.0, LEFT)
    F = fluctuation(3.0, 4.0, 2.0, hat.v_plus, hat.sigma_plus, LEFT)
    q = characteristics(3.0, 4.0, 2.0).q
    q_hat = characteristics(hat.v_plus, hat.sigma_plus, 2.0).q
    assert F == pytest.approx(-4.0)
    assert F == pytest.approx(q - q_hat)


def test_fluctuation_vanishes_for_continuous_locked_fields():
    v, s, Z = 0.7, -2.0, 1.5
    q_m = characteristics(v, s, Z).q
    p_p = characteristics(v, s, Z).p
    hat = interface_hat(q_m, p_p, Z, Z, Locked())
    assert fluctuation(v, s, Z, hat.v_minus, hat.sigma_minus, RIGHT) == pytest.approx(0.0, abs=1e-15)
    assert fluctuation(v, s, Z, hat.v_plus, hat.sigma_plus, LEFT) == pytest.approx(0.0, abs=1e-15)


def test_fluctuation_rejects_bad_face():
    with pytest.raises(ValueError):
        fluctuation(1.0, 1.0, 1.0, 1.0, 1.0, "middle")
