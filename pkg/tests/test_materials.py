"""Material-parameter algebra: chi <-> nu maps, zeta groupings, configs."""

import math

import numpy as np
import pytest

from layerlab.materials import (
    CHI_MAX,
    LayerConfig,
    MaterialParams,
    chi_from_nu,
    nu_from_chi,
    resolve_chi,
    zeta_family,
)


def test_chi_from_nu_reference_value():
    # chi(0.499905) pinned to full double precision; the leading digits
    # 0.0238724 are the published 6-digit value
    chi = chi_from_nu(0.499905)
    assert abs(chi - 0.023872405001866936) < 1e-15
    assert abs(chi - 0.0238724) < 5e-8


def test_chi_nu_round_trip():
    for nu in np.linspace(-0.999, 0.5, 401):
        chi = chi_from_nu(float(nu))
        back = nu_from_chi(chi)
        assert abs(back - nu) < 5e-13, (nu, back)


def test_chi_endpoints():
    assert chi_from_nu(0.5) == 0.0
    # nu = -1 itself is outside the open physical range; approaching it
    # drives chi toward 3/2
    assert abs(chi_from_nu(-1.0 + 1e-12) - 1.5) < 1e-12
    with pytest.raises(ValueError):
        chi_from_nu(-1.0)
    assert nu_from_chi(0.0) == 0.5
    assert abs(nu_from_chi(1.5) - (-1.0)) < 1e-15
    assert CHI_MAX == 1.5


def test_chi_monotone_decreasing_in_nu():
    nus = np.linspace(-0.9999, 0.5, 200)
    chis = [chi_from_nu(float(n)) for n in nus]
    assert all(a > b for a, b in zip(chis, chis[1:]))


def test_chi_from_nu_rejects_out_of_range():
    with pytest.raises(ValueError):
        chi_from_nu(0.51)
    with pytest.raises(ValueError):
        chi_from_nu(-1.01)
    with pytest.raises(ValueError):
        nu_from_chi(1.6)
    with pytest.raises(ValueError):
        nu_from_chi(-0.1)


def test_resolve_chi_accepts_either_parameter():
    assert resolve_chi(chi=0.7) == 0.7
    assert abs(resolve_chi(nu=0.25) - chi_from_nu(0.25)) < 1e-15


def test_resolve_chi_consistency_gate():
    nu = 0.3
    chi = chi_from_nu(nu)
    # consistent pair passes
    assert resolve_chi(chi=chi, nu=nu) == chi
    # inconsistent pair is refused
    with pytest.raises(ValueError):
        resolve_chi(chi=chi * (1.0 + 1e-6), nu=nu)
    # neither given is refused
    with pytest.raises(ValueError):
        resolve_chi()


def test_zeta_family_values():
    fam = zeta_family(1e-2, 0.5)
    assert abs(fam.zeta - 0.02) < 1e-17
    assert abs(fam.zeta_bar - 0.2) < 1e-16
    assert abs(fam.zeta_tilde - (1e-2) ** 0.25 / 0.5) < 1e-16
    assert not fam.infinite

    fam2 = zeta_family(1e-5, 1e-2)
    assert abs(fam2.zeta_bar - 1.0 / math.sqrt(10.0)) < 1e-15

    fam3 = zeta_family(1e-4, 1.0)
    assert abs(fam3.zeta_tilde - 0.1) < 1e-16


def test_zeta_family_incompressible_flag():
    fam = zeta_family(1e-3, 0.0)
    assert fam.infinite
    assert fam.zeta == math.inf
    assert fam.zeta_bar == math.inf
    assert fam.zeta_tilde == math.inf


def test_material_params_consistency():
    mp = MaterialParams.from_nu(0.3, mu=2.0)
    assert abs(mp.lam - 2.0 * 2.0 * 0.3 / 0.4) < 1e-14
    assert abs(mp.youngs - 2.0 * 2.0 * 1.3) < 1e-14
    # the chi-route gives the same constants
    mp2 = MaterialParams.from_chi(mp.chi, mu=2.0)
    assert abs(mp2.lam - mp.lam) < 1e-12 * abs(mp.lam)
    assert abs(mp2.youngs - mp.youngs) < 1e-12 * abs(mp.youngs)


def test_material_params_limits():
    assert MaterialParams.from_nu(0.5).lam == math.inf
    assert MaterialParams.from_nu(0.5).incompressible
    near = MaterialParams.from_chi(1.5)
    assert near.youngs_singular
    assert abs(near.youngs) < 1e-14


def test_layer_config_make_and_validation():
    cfg = LayerConfig.make("plate", 1e-3, a=2.0, U=0.5, mu=3.0)
    assert cfg.h == 2e-3 and cfg.xi == 1e-3
    with pytest.raises(ValueError):
        LayerConfig.make("cube", 1e-3)
    with pytest.raises(ValueError):
        LayerConfig.make("plate", 0.0)
    with pytest.raises(ValueError):
        LayerConfig(kind="plate", a=1.0, h=0.5, xi=0.4, U=1.0, mu=1.0)
