from __future__ import annotations

import numpy as np
import pytest

from nhsw.analytic import (
    BUMP_FLOW,
    DIP_FLOW,
    SolitonParams,
    SolitonSampler,
    StationarySampler,
    StationarySpec,
    ThackerParams,
    ThackerSampler,
    generate_stationary,
    integrate_f,
    rk4_march,
    solution_residual,
    soliton_state,
    stationary_ode_residual,
    thacker_depth_averaged,
    thacker_fields,
    thacker_pressure,
)
from nhsw.errors import (
    ContractError,
    IntegrationError,
    OutOfDomainError,
    PositivityError,
    TranscriticalError,
)

G = 9.81


# ----------------------------------------------------------------- rk4

def test_rk4_exponential_is_fourth_order():
    errs = []
    for n in (10, 20, 40):
        ts = np.linspace(0, 1, n + 1)
        ys = rk4_march(lambda t, y: -y, ts, np.array([1.0]))
        errs.append(abs(ys[-1, 0] - np.exp(-1)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(16, rel=0.1)


# ------------------------------------------------------------- thacker

def test_flat_bowl_keeps_constant_velocity():
    p = ThackerParams(b2=0.0, f0=0.7, t0=1.0)
    traj = integrate_f(p, 3.0, 0.01)
    assert np.allclose(traj.f, 0.7)
    assert np.allclose(traj.F, 0.7 * (traj.t - 1.0))


def test_small_amplitude_matches_harmonic_oracle():
    b2, f0 = 0.5, 1e-3
    omega = np.sqrt(b2 * G)
    traj = integrate_f(ThackerParams(b2=b2, f0=f0), 2 * np.pi / omega, 1e-3)
    oracle = f0 * np.cos(omega * traj.t)
    assert np.max(np.abs(traj.f - oracle)) <= 1e-3 * f0


def test_trajectory_is_fourth_order_in_dt():
    p = ThackerParams()
    ref = integrate_f(p, 1.0, 0.05 / 8).f[-1]
    e1 = abs(integrate_f(p, 1.0, 0.05).f[-1] - ref)
    e2 = abs(integrate_f(p, 1.0, 0.025).f[-1] - ref)
    assert e1 / e2 == pytest.approx(16, rel=0.25)


def test_trajectory_pair_is_consistent():
    traj = integrate_f(ThackerParams(), 2.0, 1e-3)
    dF = (traj.F[2:] - traj.F[:-2]) / (2e-3)
    assert np.max(np.abs(dF - traj.f[1:-1])) < 1e-5


def test_trajectory_errors():
    with pytest.raises(ContractError):
        integrate_f(ThackerParams(), 1.0, 0.0)
    with pytest.raises(ContractError):
        integrate_f(ThackerParams(t0=2.0), 1.0, 0.1)
    with pytest.raises(IntegrationError):
        integrate_f(ThackerParams(f0=1e200), 1.0, 1e-3)
    traj = integrate_f(ThackerParams(), 1.0, 1e-2)
    with pytest.raises(OutOfDomainError):
        traj.at(1.5)


def test_zero_velocity_is_equilibrium():
    traj = integrate_f(ThackerParams(f0=0.0), 10.0, 1e-2)
    assert np.all(traj.f == 0.0) and np.all(traj.F == 0.0)


def test_initial_depth_and_wet_region():
    p = ThackerParams(H0=1.0, b2=0.5)
    traj = integrate_f(p, 1.0, 1e-3)
    x = np.array([-2.5, -1.99, 0.0, 1.99, 2.5])
    H, u, w, pb, s = thacker_fields(x, 0.0, p, traj)
    assert H[2] == 1.0
    assert np.all(H[1:4] > 0) and H[0] == 0 and H[-1] == 0


def test_free_surface_is_affine_on_wet_set():
    p = ThackerParams()
    traj = integrate_f(p, 2.0, 1e-4)
    x = np.linspace(-3, 3, 601)
    for t in (0.3, 0.9, 1.7):
        H, *_ = thacker_fields(x, t, p, traj)
        wet = H > 0
        eta = (H + p.bathymetry.eval(x)[0])[wet]
        assert np.max(np.abs(np.diff(eta, 2))) < 1e-12


def test_dry_points_are_quiescent():
    p = ThackerParams()
    traj = integrate_f(p, 1.0, 1e-3)
    H, u, w, pb, _ = thacker_fields(np.array([-2.9, 2.9]), 0.5, p, traj)
    assert np.all(H == 0) and np.all(u == 0) and np.all(w == 0) and np.all(pb == 0)
    assert np.all(thacker_pressure(np.array([2.9]), np.array([5.0]), 0.5, p, traj) == 0)


def test_depth_averaged_pressure_from_column_integral():
    p = ThackerParams()
    traj = integrate_f(p, 1.0, 1e-4)
    t = 0.37
    x = np.array([-1.2, 0.1, 0.8])
    fields = thacker_depth_averaged(x, t, p, traj)
    zb = p.bathymetry.eval(x)[0]
    for i in range(x.size):
        z = np.linspace(zb[i], zb[i] + fields.H[i], 2001)
        col = thacker_pressure(np.full(z.size, x[i]), z, t, p, traj)
        pbar = np.trapezoid(col, z) / fields.H[i]
        assert pbar - G * fields.H[i] / 2 == pytest.approx(fields.pnh[i], rel=1e-6)


def test_hydrostatic_instant():
    p = ThackerParams(f0=0.0)
    traj = integrate_f(p, 1.0, 1e-3)
    fl = thacker_depth_averaged(np.linspace(-1, 1, 5), 0.5, p, traj)
    assert np.all(fl.pnh == 0) and np.all(fl.w == 0)


def test_sampler_exposes_forcing():
    smp = ThackerSampler(t_eval=0.5)
    fl = smp(np.array([0.5]), 0.5)
    F, f, df = smp.traj.at(0.5)
    assert fl.s[0] == pytest.approx(0.5 * 0.5 * df)


# ------------------------------------------------------------- soliton

def test_soliton_constants():
    p = SolitonParams(d=1.0, l=2.0, H0=1.0, g=G)
    assert p.c0 == pytest.approx(2 * np.sqrt(G / 3), rel=1e-14)
    assert p.c0 == pytest.approx(3.61663, abs=5e-6)
    assert p.a == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_soliton_crest():
    p = SolitonParams()
    fl = soliton_state(np.array([0.0]), 0.0, p)
    assert fl.w[0] == 0.0
    assert fl.H[0] == pytest.approx(1 + 1 / 3)


def test_soliton_far_field():
    p = SolitonParams()
    fl = soliton_state(np.array([-1e4, 1e4]), 0.0, p)
    assert np.allclose(fl.H, 1.0) and np.allclose(fl.u, p.c0 * (1 - p.d / p.H0))
    assert np.allclose(fl.w, 0.0) and np.allclose(fl.pnh, 0.0)


def test_soliton_translates():
    p = SolitonParams()
    x = np.linspace(-5, 5, 11)
    a = soliton_state(x, 0.0, p)
    b = soliton_state(x + p.c0 * 1.3, 1.3, p)
    assert np.allclose(a.H, b.H) and np.allclose(a.pnh, b.pnh)


@pytest.mark.parametrize("kw", [dict(l=1.0, H0=1.0), dict(l=0.5, H0=1.0), dict(H0=0.0), dict(d=0.0)])
def test_soliton_invalid(kw):
    with pytest.raises(ContractError):
        SolitonParams(**kw)


def test_soliton_sampler_domain_is_twenty_widths():
    smp = SolitonSampler()
    lo, hi = smp.x_range
    assert hi - lo == pytest.approx(20 * smp.params.l)


# ---------------------------------------------------------- stationary

def test_no_forcing_gives_uniform_flow():
    sol = generate_stationary(StationarySpec(c=0.0, n=200))
    assert np.allclose(sol.H, 1.0) and np.allclose(sol.zb, 0.0)
    assert np.allclose(sol.u, 1.8) and np.all(sol.pnh == 0)
    res = stationary_ode_residual(sol.x, sol.H, sol.zb, sol.u, sol.w, sol.pnh, 1.8)
    assert max(res.values()) < 1e-12


@pytest.mark.parametrize("spec", [BUMP_FLOW, DIP_FLOW])
def test_parameter_sets_generate(spec):
    sol = generate_stationary(spec)
    assert np.all(sol.H > 0)
    assert max(solution_residual(sol).values()) <= 1e-6
    assert sol.energy_flux_deviation() <= 1e-6
    assert sol.zb[-1] == 0.0


def test_first_set_profile_shape():
    sol = generate_stationary(BUMP_FLOW)
    i5 = np.argmin(np.abs(sol.x - 5.0))
    # pnh = Q0 f'(a) / 2 = Q0 c at the center of f
    assert BUMP_FLOW.Q0 * BUMP_FLOW.df(5.0) / 2 == pytest.approx(2.7)
    assert sol.pnh[i5] == pytest.approx(2.7, abs=1e-3)
    assert abs(sol.x[np.argmin(sol.eta)] - 5.0) < 0.5
    # far from the center the flow is uniform
    assert sol.H[-1] == 1.0 and sol.H[0] == pytest.approx(1.0, abs=1e-6)


def test_perturbed_pressure_shows_in_w_equation():
    sol = generate_stationary(BUMP_FLOW)
    delta = 1e-3
    base = solution_residual(sol)["dw"]
    res = stationary_ode_residual(sol.x, sol.H, sol.zb, sol.u, sol.w, sol.pnh + delta, BUMP_FLOW.Q0)
    assert res["dw"] == pytest.approx(2 * delta / BUMP_FLOW.Q0, abs=2 * base)


def test_stationary_profiles_are_continuous():
    for n in (500, 1000, 2000):
        sol = generate_stationary(StationarySpec(n=n))
        dx = sol.x[1] - sol.x[0]
        for v in (sol.H, sol.w, sol.pnh):
            assert np.max(np.abs(np.diff(v))) <= 20 * dx


def test_transcritical_guard():
    Hc = (2 * BUMP_FLOW.Q0 ** 2 / G) ** (1 / 3)
    with pytest.raises(TranscriticalError):
        generate_stationary(StationarySpec(H_exit=Hc))


def test_positivity_failure():
    with pytest.raises(PositivityError):
        generate_stationary(StationarySpec(H_exit=0.5, c=-5.0))


@pytest.mark.parametrize("kw", [dict(Q0=0.0), dict(H_exit=0.0), dict(L=-1.0), dict(n=3)])
def test_stationary_invalid(kw):
    with pytest.raises(ContractError):
        StationarySpec(**kw)


def test_stationary_sampler_matches_generator():
    spec = StationarySpec(n=1001)
    ref = generate_stationary(spec)
    x = ref.x[::50]
    fl = StationarySampler(spec)(x, 0.0)
    assert np.allclose(fl.H, ref.H[::50], atol=1e-10)
    assert np.allclose(fl.zb, ref.zb[::50], atol=1e-10)
