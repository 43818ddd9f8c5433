"""Bonded layer between rigid plates: fields, force, apparent moduli."""

import math

import mpmath
import numpy as np
import pytest

from layerlab.kernels import integrate
from layerlab.plate import (
    apparent_modulus,
    compressible_superposition,
    field,
    force,
    force_factor,
    radial_profile,
    solve_plate,
    stefan_fluid_fields,
)

XI_GRID = [1e-4, 1e-3, 1e-2, 1e-1]
CHI_GRID = [1e-3, 0.3, 0.7, 1.0, 1.4]


# ---------------------------------------------------------------------------
# Radial profile A(R)
# ---------------------------------------------------------------------------

def test_profile_incompressible_closed_form():
    # chi = 0: A(R) = (1 - R^2)/(8 xi^2) exactly
    for xi in (1e-3, 1e-2):
        prof = radial_profile(xi, 0.0)
        rr = np.linspace(0.0, 1.0, 101)
        want = (1.0 - rr * rr) / (8.0 * xi * xi)
        got = prof.eval(rr)[0]
        sup = np.max(np.abs(want))
        assert float(np.max(np.abs(got - want))) < 1e-12 * sup


def test_profile_against_mpmath_bessel():
    # A(R) = (1/(2 chi^2)) [1 - c_b I0(kappa R)/I0(kappa)] with
    # kappa = chi/xi and c_b = 3(3-2chi^2)/((3-chi^2)(3 - 2 xi chi t)),
    # t = I1(kappa)/I0(kappa); checked against 30-digit Bessel values
    mpmath.mp.dps = 30
    xi, chi = 1e-2, 0.7
    kappa = chi / xi
    t = mpmath.besseli(1, kappa) / mpmath.besseli(0, kappa)
    c_b = 3 * (3 - 2 * chi**2) / ((3 - chi**2) * (3 - 2 * xi * chi * t))
    prof = radial_profile(xi, chi)
    for r in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0]:
        ratio = mpmath.besseli(0, kappa * r) / mpmath.besseli(0, kappa)
        want = float((1 - c_b * ratio) / (2 * chi**2))
        got = float(prof.eval(r)[0])
        assert abs(got - want) < 1e-12 * abs(want or 1.0), r


def test_profile_continuity_at_small_chi():
    # the chi -> 0 branch and the Bessel branch agree through the switch.
    # The profile bracket 1 - c_b I0(kappa R)/I0(kappa) shrinks like
    # (chi/xi)^2, so evaluating it in doubles leaves ~1e-16 (xi/chi)^2
    # relative noise on A near the switch; the force path is assembled
    # cancellation-free and stays exact (checked separately below)
    xi = 1e-3
    rr = np.linspace(0.0, 1.0, 41)
    a0 = radial_profile(xi, 0.0).eval(rr)[0]
    a1 = radial_profile(xi, 1e-9).eval(rr)[0]
    sup = float(np.max(np.abs(a0)))
    assert float(np.max(np.abs(a0 - a1))) < 5e-3 * sup
    # further from the switch the noise shrinks quadratically ...
    a2 = radial_profile(xi, 1e-7).eval(rr)[0]
    assert float(np.max(np.abs(a0 - a2))) < 1e-6 * sup
    # ... until the genuine O(kappa^2) material dependence takes over
    a3 = radial_profile(xi, 1e-5).eval(rr)[0]
    assert float(np.max(np.abs(a0 - a3))) < 0.5 * (1e-5 / xi) ** 2 * sup
    # force-side continuity across the branch switch is tight
    assert abs(force_factor(xi, 1e-9) - force_factor(xi, 0.0)) < 1e-10


# ---------------------------------------------------------------------------
# Displacement and stress fields
# ---------------------------------------------------------------------------

def test_dirichlet_data_on_plates():
    # bonded conditions: u_z = +/-U and u_r = 0 on Z = +/-1
    for xi in (1e-3, 1e-1):
        for chi in (1e-3, 0.7, 1.4):
            sol = solve_plate(xi, chi=chi, U=0.7)
            rr = np.linspace(0.0, 1.0, 41)
            top = field(sol, rr, np.ones_like(rr))
            bot = field(sol, rr, -np.ones_like(rr))
            assert float(np.max(np.abs(top.u_z - 0.7))) < 1e-12
            assert float(np.max(np.abs(bot.u_z + 0.7))) < 1e-12
            assert float(np.max(np.abs(top.u_r))) < 1e-12
            assert float(np.max(np.abs(bot.u_r))) < 1e-12


def test_field_symmetry_in_z():
    sol = solve_plate(1e-2, chi=0.9)
    rr = np.full(9, 0.6)
    zz = np.linspace(-1.0, 1.0, 9)
    up = field(sol, rr, zz)
    dn = field(sol, rr, -zz)
    # u_r even, u_z odd, direct stresses even, shear odd
    assert np.allclose(up.u_r, dn.u_r, rtol=0, atol=1e-15)
    assert np.allclose(up.u_z, -dn.u_z, rtol=0, atol=1e-15)
    assert np.allclose(up.s_zz, dn.s_zz, rtol=0, atol=1e-9)
    assert np.allclose(up.s_rz, -dn.s_rz, rtol=0, atol=1e-9)


def test_field_validation():
    sol = solve_plate(1e-2, chi=0.5)
    with pytest.raises(ValueError):
        field(sol, 1.5, 0.0)
    with pytest.raises(ValueError):
        field(sol, 0.5, 1.5)


def test_edge_resultants_vanish():
    # the side-wall tractions carry no net load: integrals of s_rr and
    # s_rz across the edge are at rounding level relative to the
    # through-thickness maximum of the edge tractions
    worst = 0.0
    for xi in XI_GRID:
        for chi in CHI_GRID:
            sol = solve_plate(xi, chi=chi)
            zg = np.linspace(-1.0, 1.0, 33)
            fe = field(sol, np.ones_like(zg), zg)
            sup = max(float(np.max(np.abs(fe.s_rr))),
                      float(np.max(np.abs(fe.s_rz))))
            q_rr = integrate(lambda z: float(field(sol, 1.0, z).s_rr),
                             -1.0, 1.0, tol=1e-11 * sup)
            q_rz = integrate(lambda z: float(field(sol, 1.0, z).s_rz),
                             -1.0, 1.0, tol=1e-11 * sup)
            rel = max(abs(q_rr.value), abs(q_rz.value)) / (2.0 * sup)
            worst = max(worst, rel)
    assert worst < 1e-8, worst


# ---------------------------------------------------------------------------
# Force
# ---------------------------------------------------------------------------

def test_force_from_fields_identity():
    # 2 pi a^2 int s_zz(R, 1) R dR reproduces the closed-form force
    sol = solve_plate(1e-3, chi=0.7, mu=2.0, a=1.5, U=0.7)
    q = integrate(lambda r: float(field(sol, r, 1.0).s_zz) * r,
                  0.0, 1.0, tol=1e-12)
    f_fields = 2.0 * math.pi * sol.cfg.a**2 * q.value
    f_formula = force(sol)
    assert abs(f_fields / f_formula - 1.0) < 1e-8


def test_force_factor_incompressible_limit():
    # kappa -> 0 collapses the Bessel expression to the squeeze-film
    # value G = 1 (F = 3 pi mu a U / (8 xi^3))
    for xi in (1e-3, 1e-2):
        assert abs(force_factor(xi, 1e-9) - 1.0) < 1e-6
        assert abs(force_factor(xi, 0.0) - 1.0) < 1e-15


def test_force_scaling_in_mu_a_u():
    base = force(solve_plate(1e-2, chi=0.5))
    scaled = force(solve_plate(1e-2, chi=0.5, mu=3.0, a=2.0, U=0.25))
    assert abs(scaled / (base * 3.0 * 2.0 * 0.25) - 1.0) < 1e-14


def test_force_monotone_in_chi():
    # more compressible material (larger chi) relieves the squeeze
    # pressure: G decreases in chi at fixed xi
    xi = 1e-2
    gs = [force_factor(xi, c) for c in np.linspace(0.0, 1.4, 30)]
    assert all(a > b for a, b in zip(gs, gs[1:]))


def test_stefan_reference_flow():
    # the viscous analogue on the same geometry: parabolic radial
    # profile, no-slip at the walls, and the classical total load
    # 3 pi mu V a / (8 xi^3) ... checked via the velocity field shape
    a, h, mu, V = 2.0, 0.02, 3.0, 0.5
    r = np.full(5, 1.0)
    z = np.linspace(-h, h, 5)
    v_r, v_z, p = stefan_fluid_fields(r, z, a, h, mu, V)
    assert abs(float(v_r[0])) < 1e-14 and abs(float(v_r[-1])) < 1e-14
    assert float(v_z[-1]) == pytest.approx(-V, abs=1e-14)
    assert float(v_z[0]) == pytest.approx(V, abs=1e-14)
    # pressure is largest at the center
    p_c = stefan_fluid_fields(np.zeros(1), np.zeros(1), a, h, mu, V)[2]
    assert float(p_c[0]) > float(p[2])


# ---------------------------------------------------------------------------
# Apparent moduli
# ---------------------------------------------------------------------------

def test_apparent_modulus_plateaus():
    # compressible plateau: E_hat -> E_hat_c as zeta -> 0 at fixed chi
    am = apparent_modulus(1e-5, 1.0)
    assert abs(am.e_hat / am.e_hat_c - 1.0) < 1e-3
    # incompressible plateau: E_hat -> E_hat_i as chi -> 0 at fixed xi
    am2 = apparent_modulus(1e-2, 1e-8)
    assert abs(am2.e_hat / am2.e_hat_i - 1.0) < 1e-6


def test_apparent_modulus_closed_forms():
    xi, chi = 1e-3, 0.8
    am = apparent_modulus(xi, chi)
    assert abs(am.e_hat_i - 1.0 / (8.0 * xi * xi)) < 1e-12 / (8 * xi * xi)
    want_c = 3.0 * (3.0 - chi**2) / (chi**2 * (9.0 - 4.0 * chi**2))
    assert abs(am.e_hat_c - want_c) < 1e-14 * want_c


def test_apparent_modulus_force_consistency():
    # E_hat is the force expression renormalized: check the exact link
    # E_hat = 3 (3 - chi^2) G / (8 xi^2 (9 - 4 chi^2))
    for xi, chi in [(1e-3, 0.5), (1e-2, 1.0), (1e-1, 1.4)]:
        am = apparent_modulus(xi, chi)
        g = force_factor(xi, chi)
        want = 3.0 * (3.0 - chi**2) * g / (8.0 * xi**2 * (9.0 - 4.0 * chi**2))
        assert abs(am.e_hat - want) < 1e-13 * want


def test_apparent_modulus_rejects_singular_material():
    with pytest.raises(ValueError):
        apparent_modulus(1e-3, 1.5)


def test_bonded_vs_lubricated_comparison_values():
    # the bonded-plate modulus and its slip-free competitor agree to
    # O(xi): pinned regression values at (xi, chi) = (1e-3, 1)
    am = apparent_modulus(1e-3, 1.0)
    diff_rel = (am.e_hat_l - am.e_hat) / am.e_hat
    assert abs(diff_rel - 0.0007786859524224131) < 1e-12
    # small-chi closed-form estimate of the same gap: magnitudes agree
    # to ~0.1% here though the printed estimate's sign is opposite
    est = -2.0 * 1.0 * (4.0 - 24.0 + 27.0) * 1e-3 / (9.0 * 2.0)
    assert abs(abs(diff_rel / est) - 1.0) < 2e-3


def test_compressible_superposition_state():
    # thin compressible layer: uniaxial strain state plus an edge load;
    # the interior stress ratio s_rr/s_zz is lam/(lam + 2 mu)
    st = compressible_superposition(1e-3, 1.0, mu=2.0)
    lam = 2.0 * (3.0 - 2.0) / 1.0  # mu (3 - 2 chi^2)/chi^2 at chi = 1
    assert abs(st.s_rr / st.s_zz - lam / (lam + 2 * 2.0)) < 1e-12
