"""Closed-form solution for a thin elastic layer bonded between two rigid
circular plates that are displaced apart along their common axis.

Geometry and scalings: layer radius a, half-thickness h = xi*a with
xi = h/a << 1, dimensionless coordinates R = r/a in [0, 1], Z = z/h in
[-1, 1].  The plates move to +-U along the axis (U > 0 pulls them apart;
U < 0 squeezes).  Compressibility enters through
chi = sqrt(3(1-2nu)/(2(1-nu))) in [0, 3/2].

Every leading-order field derives from one radial potential A(R) solving

    A'' + A'/R - (chi/xi)^2 A = -1/(2 xi^2),
    A'(0) = 0,
    A(1) - (2 xi^2 / 3) A'(1) = 1/(2 (3 - chi^2)),

where the edge condition states that the radial-stress resultant
integral_{-1}^{1} sigma_rr(1, Z) dZ vanishes.  The solution is

    A(R)  = 1/(2 chi^2) * [1 - c_b * I_0(kappa R)/I_0(kappa)],
    kappa = chi/xi,
    c_b   = 3 (3 - 2 chi^2) / ((3 - chi^2) (3 - 2 xi chi t)),  t = I_1/I_0 (kappa),

kept entirely in scaled-Bessel form so nothing overflows for any kappa.
Below chi = 1e-10 the incompressible-limit family A = (1 - R^2)/(8 xi^2)
takes over (the 1/chi^2 factors above are indeterminate there although the
combined fields stay finite).

Fields, with B(R) = chi^2 A - 1/2 evaluated as the pure product
-c_b I_0-ratio / 2 (never by subtraction):

    u_r = (3 - chi^2) xi U A'(R) (1 - Z^2)
    u_z = U [Z + B(R) Z (Z^2 - 1)]
    sigma_zz * (a xi / mu U) = (9 - 2 chi^2) B (Z^2 - 1) + 6 A
    sigma_rr * (a xi / mu U) = (3 - 2 chi^2)[B (Z^2 - 1) + 2 A]
                               - 2 (3 - chi^2) xi^2 A'' (Z^2 - 1)
    sigma_tt                 : same with A'/R in place of A''
    sigma_rz * (a / mu U)    = A' (chi^2 Z^2 + chi^2 - 6) Z

so u_z(R, +-1) = +-U and u_r(R, +-1) = 0 hold exactly, including in
floating point.  The resultant force on either plate and the apparent
moduli are closed forms in the edge Bessel values; see force and
apparent_modulus.  The solution omits the O(xi) boundary-layer corrector
at the bonded edge corner (R, Z) = (1, +-1) and is not valid there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .kernels import BesselRatioEval, NumericsError, RadialSolution, bessel_ratio
from .materials import CHI_MAX, LayerConfig, MaterialParams, resolve_chi

__all__ = [
    "CHI_INCOMPRESSIBLE",
    "FieldSample",
    "PlateSolution",
    "ApparentModuli",
    "UniaxialState",
    "stefan_fluid_fields",
    "radial_profile",
    "solve_plate",
    "field",
    "force",
    "force_factor",
    "apparent_modulus",
    "compressible_superposition",
]

# The incompressible closed-form family takes over below this chi.  The
# general expressions have finite chi -> 0 limits, but their 1/chi^2
# factors make direct evaluation indeterminate at chi = 0.
CHI_INCOMPRESSIBLE = 1e-10


@dataclass(frozen=True)
class FieldSample:
    """Displacements and stresses at scaled sample points (R, Z).

    R, Z are dimensionless (plate: 0 <= R <= 1, |Z| <= 1; the sphere
    solver reuses this container with |Z| up to the local gap half-width).
    u_r, u_z carry length units through U; the stresses carry the dominant
    normal-stress scale mu*U/(a*xi).  Fields are floats for scalar input,
    arrays (of the broadcast shape) for array input.
    """

    R: object
    Z: object
    u_r: object
    u_z: object
    s_rr: object
    s_tt: object
    s_zz: object
    s_rz: object


# ---------------------------------------------------------------------------
# Classical squeeze-film reference fields
# ---------------------------------------------------------------------------

def stefan_fluid_fields(r, z, a, h, mu, V):
    """Viscous squeeze-film fields between rigid disks of radius a at
    z = +-h approaching at speed V (V > 0 closes the gap):

        v_r = 3 r V (h^2 - z^2) / (4 h^3)
        v_z = V z (z^2 - 3 h^2) / (2 h^3)
        p   = mu V (3 a^2 + 2 h^2 - 3 r^2 + 6 z^2) / (4 h^3)

    so v_z(+-h) = -+V and the pressure peaks at the center:
    p(0, 0) = mu V (3 a^2 + 2 h^2)/(4 h^3).  The incompressible-limit
    elastic displacements coincide with (v_r, v_z) under V -> -U.
    Accepts scalars or arrays; requires 0 <= r <= a and |z| <= h.
    """
    if a <= 0.0 or h <= 0.0:
        raise ValueError("a and h must be positive")
    r = np.asarray(r, dtype=float) + 0.0
    z = np.asarray(z, dtype=float) + 0.0
    if np.any(r < 0.0) or np.any(r > a):
        raise ValueError("r out of range [0, a]")
    if np.any(np.abs(z) > h):
        raise ValueError("|z| out of range [0, h]")
    h3 = h * h * h
    v_r = 3.0 * r * V * (h * h - z * z) / (4.0 * h3)
    v_z = V * z * (z * z - 3.0 * h * h) / (2.0 * h3)
    p = mu * V * (3.0 * a * a + 2.0 * h * h - 3.0 * r * r + 6.0 * z * z) / (4.0 * h3)
    if np.ndim(v_r) == 0:
        return float(v_r), float(v_z), float(p)
    return v_r, v_z, p


# ---------------------------------------------------------------------------
# Radial potential
# ---------------------------------------------------------------------------

def _w_series(x: float) -> float:
    """e^{-x} (I_1 - I_0/x + 2 I_1/x^2) for small x, where the direct form
    cancels catastrophically: the expansion is x(3/8 + 5x^2/96 + 7x^4/3072
    + ...), good to ~1e-14 relative below x = 0.02."""
    x2 = x * x
    return math.exp(-x) * x * (0.375 + x2 * (5.0 / 96.0 + x2 * (7.0 / 3072.0)))


def radial_profile(xi: float, chi: float) -> RadialSolution:
    """Closed-form radial potential A(R) on [0, 1].

    eval(R) -> (A, A', A'', A''') for scalar or array R, all assembled
    from ratios against I_0(chi/xi) so arbitrarily large chi/xi cannot
    overflow.  chi below 1e-10 switches to the incompressible family
    A = (1 - R^2)/(8 xi^2).  The factor (3 - chi^2) in c_b vanishes only
    at chi = sqrt(3) ~ 1.732, outside the admissible [0, 3/2] (the range
    check rejects it), so it is not special-cased.  A cheap residual
    self-check at R = 0.5 and R = 1 guards the assembled evaluator.
    """
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if not (0.0 <= chi <= CHI_MAX):
        raise ValueError(f"chi must lie in [0, 3/2], got {chi}")

    if chi < CHI_INCOMPRESSIBLE:
        inv = 1.0 / (8.0 * xi * xi)

        def evaluator(r):
            r_arr = np.asarray(r, dtype=float)
            flat = np.atleast_1d(r_arr).astype(float)
            av = (1.0 - flat * flat) * inv
            a1 = -2.0 * inv * flat
            a2 = np.full_like(flat, -2.0 * inv)
            a3 = np.zeros_like(flat)
            if np.ndim(r_arr) == 0:
                return float(av[0]), float(a1[0]), float(a2[0]), float(a3[0])
            return av, a1, a2, a3

        meta = {"method": "closed-form", "branch": "incompressible",
                "xi": xi, "chi": chi}
        return RadialSolution(r_lo=0.0, r_hi=1.0, eval=evaluator, meta=meta)

    kappa = chi / xi
    edge = bessel_ratio(kappa)
    c2 = chi * chi
    dt = 3.0 - 2.0 * xi * chi * edge.t          # (3 I_0 - 2 xi chi I_1)/I_0
    c_b = 3.0 * (3.0 - 2.0 * c2) / ((3.0 - c2) * dt)
    ck = -0.5 * c_b / c2                        # C I_0(kappa) in A = 1/(2chi^2) + C I_0(kappa R)

    def evaluator(r):
        r_arr = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r_arr).ravel().astype(float)
        n = flat.size
        av = np.empty(n)
        a1 = np.empty(n)
        a2 = np.empty(n)
        a3 = np.empty(n)
        for i in range(n):
            x = kappa * float(flat[i])
            if x == 0.0:
                si0, si1, si1x = 1.0, 0.0, 0.5
            else:
                ev = bessel_ratio(x)
                si0, si1 = ev.scaled_i0, ev.scaled_i1
                si1x = si1 / x
            base = math.exp(x - kappa) / edge.scaled_i0
            ratio0 = base * si0                 # I_0(kappa R)/I_0(kappa)
            ratio1 = base * si1
            ratio1x = base * si1x               # I_1(kappa R)/(kappa R I_0(kappa))
            b = -0.5 * c_b * ratio0             # chi^2 A - 1/2, pure product
            av[i] = (0.5 + b) / c2
            a1[i] = ck * kappa * ratio1
            a2[i] = ck * kappa * kappa * (ratio0 - ratio1x)
            if x < 0.02:
                w = _w_series(x)
            else:
                w = si1 - si0 / x + 2.0 * si1x / x
            a3[i] = ck * kappa ** 3 * base * w
        if np.ndim(r_arr) == 0:
            return float(av[0]), float(a1[0]), float(a2[0]), float(a3[0])
        shape = np.atleast_1d(r_arr).shape
        return (av.reshape(shape), a1.reshape(shape),
                a2.reshape(shape), a3.reshape(shape))

    meta = {"method": "closed-form", "branch": "bessel", "xi": xi,
            "chi": chi, "kappa": kappa, "t_edge": edge.t, "c_b": c_b}
    sol = RadialSolution(r_lo=0.0, r_hi=1.0, eval=evaluator, meta=meta)

    # residual self-check at two interior/edge spots
    forcing = 1.0 / (2.0 * xi * xi)
    for r_spot in (0.5, 1.0):
        a0, a1s, a2s, _ = sol.eval(r_spot)
        res = a2s + a1s / r_spot - kappa * kappa * a0 + forcing
        scale = max(forcing, kappa * kappa * abs(a0), abs(a2s))
        if abs(res) > 1e-12 * scale:
            raise NumericsError(
                f"radial profile residual {res:.3e} exceeds 1e-12*{scale:.3e} "
                f"at R = {r_spot} (xi = {xi}, chi = {chi})"
            )
    return sol


# ---------------------------------------------------------------------------
# Solution bundle and field evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlateSolution:
    """Everything needed to evaluate the plate solution: geometry/loading
    (cfg), material constants (mat), the edge Bessel evaluation at
    x = chi/xi (None on the incompressible branch, where kappa would be
    infinite), and the radial potential.  Immutable; field evaluation is
    reentrant."""

    cfg: LayerConfig
    mat: MaterialParams
    bessel_edge: Optional[BesselRatioEval]
    radial: RadialSolution

    @property
    def xi(self) -> float:
        return self.cfg.xi

    @property
    def chi(self) -> float:
        return self.mat.chi


def solve_plate(xi: float, chi: Optional[float] = None,
                nu: Optional[float] = None, mu: float = 1.0, a: float = 1.0,
                U: float = 1.0) -> PlateSolution:
    """Build a PlateSolution for thickness ratio xi and material given by
    chi, nu, or both (cross-checked to 1e-10 if both; see resolve_chi)."""
    chi = resolve_chi(chi=chi, nu=nu)
    cfg = LayerConfig.make("plate", xi, a=a, U=U, mu=mu)
    mat = MaterialParams.from_chi(chi, mu=mu)
    radial = radial_profile(xi, chi)
    edge = bessel_ratio(chi / xi) if chi >= CHI_INCOMPRESSIBLE else None
    return PlateSolution(cfg=cfg, mat=mat, bessel_edge=edge, radial=radial)


def field(sol: PlateSolution, R, Z) -> FieldSample:
    """Sample displacements and stresses at scaled (R, Z); R and Z
    broadcast against each other.  The radial potential is evaluated once
    per distinct R, so dense (R, Z) product grids cost only their R lines.

    Not valid within O(xi) of the bonded-edge corner (R, Z) = (1, +-1),
    where the underlying expansion omits a boundary-layer corrector.
    """
    Rb, Zb = np.broadcast_arrays(np.asarray(R, dtype=float),
                                 np.asarray(Z, dtype=float))
    if np.any(Rb < 0.0) or np.any(Rb > 1.0):
        raise ValueError("R out of range [0, 1]")
    if np.any(np.abs(Zb) > 1.0):
        raise ValueError("|Z| out of range [0, 1]")
    scalar = np.ndim(Rb) == 0
    shape = Rb.shape

    r_unique, inverse = np.unique(np.atleast_1d(Rb).ravel(),
                                  return_inverse=True)
    av, a1, a2, _ = sol.radial.eval(r_unique)
    av = np.atleast_1d(av)
    a1 = np.atleast_1d(a1)
    a2 = np.atleast_1d(a2)
    # A'/R with its axis limit A''(0) (A' is odd, so A'/R -> A'' at R = 0)
    safe_r = np.where(r_unique > 0.0, r_unique, 1.0)
    a1r = np.where(r_unique > 0.0, a1 / safe_r, a2)

    A = av[inverse].reshape(shape)
    A1 = a1[inverse].reshape(shape)
    A2 = a2[inverse].reshape(shape)
    A1R = a1r[inverse].reshape(shape)

    cfg = sol.cfg
    c2 = sol.chi * sol.chi
    xi, U, mu, a = cfg.xi, cfg.U, cfg.mu, cfg.a

    B = c2 * A - 0.5
    zm = Zb * Zb - 1.0
    u_r = (3.0 - c2) * xi * U * A1 * (-zm)
    u_z = U * (Zb + B * Zb * zm)
    s_scale = mu * U / (a * xi)
    s_zz = s_scale * ((9.0 - 2.0 * c2) * B * zm + 6.0 * A)
    s_rr = s_scale * ((3.0 - 2.0 * c2) * (B * zm + 2.0 * A)
                      - 2.0 * (3.0 - c2) * xi * xi * A2 * zm)
    s_tt = s_scale * ((3.0 - 2.0 * c2) * (B * zm + 2.0 * A)
                      - 2.0 * (3.0 - c2) * xi * xi * A1R * zm)
    s_rz = (mu * U / a) * A1 * (c2 * Zb * Zb + c2 - 6.0) * Zb

    if scalar:
        return FieldSample(float(Rb), float(Zb), float(u_r), float(u_z),
                           float(s_rr), float(s_tt), float(s_zz), float(s_rz))
    return FieldSample(Rb, Zb, u_r, u_z, s_rr, s_tt, s_zz, s_rz)


# ---------------------------------------------------------------------------
# Force and apparent moduli
# ---------------------------------------------------------------------------

def _p_cancel_free(x: float) -> float:
    """P(x) = x I_0(x) - 2 I_1(x) by its power series

        P = sum_{m>=1} m x^{2m+1} / (4^m (m!)^2 (m+1)) = x^3/8 + x^5/96 + ...

    Every coefficient is positive, so the ~x^2/8 relative cancellation of
    the defining difference at small x never appears.  Used for x < 2."""
    term = x ** 3 / 8.0
    s = term
    x2 = x * x
    for m in range(1, 60):
        term *= x2 / (4.0 * m * (m + 2.0))
        s += term
        if term < 1e-17 * s:
            break
    return s


def force_factor(xi: float, chi: float) -> float:
    """Dimensionless factor G(chi, xi) in F = (3 pi mu a U / 8 xi^3) G.

    G -> 1 as chi -> 0 (incompressible) and G -> 8 xi^2/chi^2 as
    chi/xi -> infinity (uniaxial straining).  With x = chi/xi:

        G = 8 [3 (3 - chi^2) P(x) + 2 chi^4 I_1] /
            [x^3 (3 - chi^2) (3 I_0 - 2 xi chi I_1)],

    from the series P for x < 2 and the same expression divided through by
    I_0 (so only t = I_1/I_0 appears) for x >= 2.  Both forms are sums of
    positive terms up to the single benign difference x - 2t ~ 0.6 at
    x = 2, so G is cancellation-free over the whole parameter range.
    """
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if not (0.0 <= chi <= CHI_MAX):
        raise ValueError(f"chi must lie in [0, 3/2], got {chi}")
    if chi < CHI_INCOMPRESSIBLE:
        return 1.0
    c2 = chi * chi
    three = 3.0 - c2
    x = chi / xi
    ev = bessel_ratio(x)
    if x < 2.0:
        i0 = math.exp(x) * ev.scaled_i0
        i1 = math.exp(x) * ev.scaled_i1
        num = 3.0 * three * _p_cancel_free(x) + 2.0 * c2 * c2 * i1
        den = x ** 3 * three * (3.0 * i0 - 2.0 * xi * chi * i1)
    else:
        t = ev.t
        num = 3.0 * three * (x - 2.0 * t) + 2.0 * c2 * c2 * t
        den = x ** 3 * three * (3.0 - 2.0 * xi * chi * t)
    return 8.0 * num / den


def force(sol: PlateSolution) -> float:
    """Resultant normal force on either plate,

        F = (3 pi mu a U / 8 xi^3) G(chi, xi),

    positive for U > 0 (plates pulled apart).  Identical to the surface
    integral 2 pi a^2 integral_0^1 sigma_zz(R, 1) R dR of the field
    stresses (the two are the same closed form rearranged)."""
    cfg = sol.cfg
    pref = 3.0 * math.pi * cfg.mu * cfg.a * cfg.U / (8.0 * cfg.xi ** 3)
    return pref * force_factor(cfg.xi, sol.chi)


class ApparentModuli(NamedTuple):
    """Apparent-modulus bundle: the exact normalized modulus e_hat, the
    incompressible extreme e_hat_i = 1/(8 xi^2), the compressible extreme
    e_hat_c = 3(3-chi^2)/(chi^2 (9-4chi^2)), and the classical thin-layer
    approximation e_hat_l that shares e_hat's denominator."""

    e_hat: float
    e_hat_i: float
    e_hat_c: float
    e_hat_l: float


def apparent_modulus(xi: float, chi: float) -> ApparentModuli:
    """Apparent compression modulus of the bonded layer, normalized by the
    unconstrained-column stiffness pi a^2 E U / h, together with its two
    extremes and the classical thin-layer approximation:

        e_hat   = 3 (3 - chi^2) G(chi, xi) / (8 xi^2 (9 - 4 chi^2))
        e_hat_i = 1/(8 xi^2)                        (chi -> 0)
        e_hat_c = 3 (3 - chi^2)/(chi^2 (9 - 4 chi^2))  (chi/xi -> inf;
                  equals (lambda + 2 mu)/E)
        e_hat_l = (3-chi^2) [9 P + 2 chi^2 (9-4chi^2) I_1] /
                  [xi^2 x^3 (9-4chi^2) (3 I_0 - 2 xi chi I_1)]

    (x = chi/xi; ratio form used for x >= 2).  chi = 0 returns the
    incompressible limit with e_hat_c = +inf; chi = 3/2 is rejected
    because E = 0 there makes every E-normalized modulus singular.
    """
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if not (0.0 <= chi < CHI_MAX):
        raise ValueError(
            f"chi must lie in [0, 3/2); the modulus normalization is "
            f"singular at chi = 3/2 (E = 0), got {chi}"
        )
    e_i = 1.0 / (8.0 * xi * xi)
    if chi < CHI_INCOMPRESSIBLE:
        return ApparentModuli(e_i, e_i, math.inf, e_i)
    c2 = chi * chi
    three = 3.0 - c2
    nine4 = 9.0 - 4.0 * c2
    e_c = 3.0 * three / (c2 * nine4)
    e_hat = 3.0 * three * force_factor(xi, chi) / (8.0 * xi * xi * nine4)
    x = chi / xi
    ev = bessel_ratio(x)
    if x < 2.0:
        i0 = math.exp(x) * ev.scaled_i0
        i1 = math.exp(x) * ev.scaled_i1
        num = 9.0 * _p_cancel_free(x) + 2.0 * c2 * nine4 * i1
        den = x ** 3 * nine4 * (3.0 * i0 - 2.0 * xi * chi * i1)
    else:
        t = ev.t
        num = 9.0 * (x - 2.0 * t) + 2.0 * c2 * nine4 * t
        den = x ** 3 * nine4 * (3.0 - 2.0 * xi * chi * t)
    e_l = three * num / (xi * xi * den)
    return ApparentModuli(e_hat, e_i, e_c, e_l)


# ---------------------------------------------------------------------------
# Thin compressible limit: uniaxial state + edge load
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniaxialState:
    """Uniform stress state of the thin compressible limit (uniaxial
    straining u_z = U z/h, u_r = 0) plus the edge load -s_rr carried by
    the edge-zone corrector problem."""

    s_rr: float
    s_tt: float
    s_zz: float
    s_rz: float
    edge_load: float


def compressible_superposition(xi: float, chi: float, mu: float = 1.0,
                               a: float = 1.0, U: float = 1.0) -> UniaxialState:
    """Stress state of the thin compressible limit and its edge corrector
    load.  Uniaxial straining u_z = U z/h, u_r = 0 gives the constant state

        s_zz = (lambda + 2 mu) U/h = 3 mu U/(a xi chi^2),
        s_rr = s_tt = lambda U/h = (3 - 2 chi^2) mu U/(a xi chi^2),
        s_rz = 0,

    (s_zz/s_rr = 3 at chi = 1; s_rr vanishes at chi = sqrt(3/2), where the
    state is pure uniaxial stress).  The interface shear vanishes
    identically, so the exact solution differs from this state only by an
    edge-zone corrector driven by the load -s_rr on the free edge R = 1,
    returned here for external consumption.  Requires chi > 0.
    """
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if not (0.0 < chi <= CHI_MAX):
        raise ValueError(f"chi must be positive (and <= 3/2), got {chi}")
    base = mu * U / (a * xi * chi * chi)
    s_rr = (3.0 - 2.0 * chi * chi) * base
    s_zz = 3.0 * base
    return UniaxialState(s_rr=s_rr, s_tt=s_rr, s_zz=s_zz, s_rz=0.0,
                         edge_load=-s_rr)
