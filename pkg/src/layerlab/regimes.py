"""Compressibility-regime classification for thin bonded layers.

A bonded layer that is both geometrically thin (xi = h/a small) and made
of a nearly incompressible material (chi small) sits between two
competing limits, and which one wins depends only on how xi and chi
compare -- not on either alone.

For plate layers the apparent-modulus estimates from the two limits are
the incompressible plateau ``E_i = 1/(8 xi**2)`` and the compressible
plateau ``E_c = 3 (3 - chi**2) / (chi**2 (9 - 4 chi**2))``.  In the
joint limit ``xi, chi -> 0`` with ``zeta = xi/chi`` fixed, each
estimate's inflation over the true modulus collapses onto a universal
curve in zeta alone:

    ratio_c(zeta) = E_c / E = 1 / (1 - 2 t(y) / y),      y = 1/zeta,
    ratio_i(zeta) = E_i / E = ratio_c(zeta) / (8 zeta**2),

with ``t = I1/I0`` the modified-Bessel ratio.  ``ratio_c -> 1`` as
``zeta -> 0`` (compressible side) and ``ratio_i -> 1`` as
``zeta -> infinity`` (incompressible side), each inflating without
bound outside its own regime.  A tolerance ``tau`` therefore defines
two transition points,

    ratio_c(zeta_c) = 1 + tau        (compressible for zeta <= zeta_c),
    ratio_i(zeta_i) = 1 + tau        (incompressible for zeta >= zeta_i),

with an intermediate window between them; at ``tau = 0.10`` these sit
at ``zeta_c = 0.0465`` and ``zeta_i = 1.29``.

For sphere-sphere layers the gap grows quadratically, so the governing
groups are ``zeta_bar = sqrt(xi)/chi`` (incompressible for
``zeta_bar >= 1``) and ``zeta_tilde = xi**0.25 / chi`` (compressible
for ``sqrt(10) zeta_tilde <= 1``).  The window between them closes only
logarithmically in xi, so the sphere thresholds are fixed constants and
the tolerance argument does not apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

from .kernels import bessel_ratio, find_root
from .materials import ZetaFamily, nu_from_chi, resolve_chi, zeta_family

__all__ = [
    "PlateTransitions",
    "RegimeReport",
    "plate_ratio_compressible",
    "plate_ratio_incompressible",
    "plate_transitions",
    "nu_intermediate_window",
    "classify",
]

SPHERE_ZETA_BAR_INCOMPRESSIBLE = 1.0
SPHERE_ZETA_TILDE_COMPRESSIBLE = 1.0 / math.sqrt(10.0)
_TIE_EPS = 1e-12


def _one_minus_2t_over_y(y: float) -> float:
    """1 - 2 t(y)/y without cancellation; series (y**2/8)(1 - y**2/6)
    below y = 0.01, direct Bessel ratio above."""
    if y < 1e-2:
        return 0.125 * y * y * (1.0 - y * y / 6.0)
    return 1.0 - 2.0 * bessel_ratio(y).t / y


def plate_ratio_compressible(zeta: float) -> float:
    """Inflation E_c / E of the compressible plateau estimate over the
    true plate modulus, in the joint thin/incompressible limit."""
    zeta = float(zeta)
    if not (zeta > 0.0 and math.isfinite(zeta)):
        raise ValueError(f"zeta must be positive and finite, got {zeta}")
    return 1.0 / _one_minus_2t_over_y(1.0 / zeta)


def plate_ratio_incompressible(zeta: float) -> float:
    """Inflation E_i / E of the incompressible plateau estimate over the
    true plate modulus, in the joint thin/incompressible limit."""
    zeta = float(zeta)
    if not (zeta > 0.0 and math.isfinite(zeta)):
        raise ValueError(f"zeta must be positive and finite, got {zeta}")
    return plate_ratio_compressible(zeta) / (8.0 * zeta * zeta)


class PlateTransitions(NamedTuple):
    """Regime boundaries in zeta = xi/chi at a given inflation tolerance."""

    zeta_compressible: float
    zeta_incompressible: float


@lru_cache(maxsize=32)
def plate_transitions(tolerance: float = 0.10) -> PlateTransitions:
    """Solve ratio_c(zeta_c) = ratio_i(zeta_i) = 1 + tolerance.

    ratio_c is increasing and ratio_i decreasing in zeta, so each root
    is unique; at the default tolerance 0.10 the boundaries are
    (0.0465, 1.290).
    """
    tolerance = float(tolerance)
    if not (1e-9 < tolerance < 100.0):
        raise ValueError(f"tolerance out of range (1e-9, 100): {tolerance}")
    target = 1.0 + tolerance
    zc = find_root(lambda z: plate_ratio_compressible(z) - target,
                   (1e-9, 1e3), tol=1e-13)
    zi = find_root(lambda z: plate_ratio_incompressible(z) - target,
                   (1e-6, 1e6), tol=1e-13)
    return PlateTransitions(zeta_compressible=zc, zeta_incompressible=zi)


def nu_intermediate_window(xi: float, tolerance: float = 0.10) -> tuple[float, float]:
    """Poisson-ratio window (nu_lo, nu_hi) where a plate layer of
    thickness ratio xi is in neither extreme regime.

    The window maps the zeta interval (zeta_c, zeta_i) through
    chi = xi/zeta; for thin layers it pins nu against 1/2 (e.g. at
    xi = 1e-2 it is roughly (0.492, 0.49999)).
    """
    xi = float(xi)
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    zc, zi = plate_transitions(tolerance)
    chi_hi = min(xi / zc, 1.5)
    chi_lo = xi / zi
    return nu_from_chi(chi_hi), nu_from_chi(chi_lo)


@dataclass(frozen=True)
class RegimeReport:
    """Classification of a layer's compressibility regime.

    ``label`` is one of "incompressible", "compressible",
    "intermediate".  For plates, ``zeta_c``/``zeta_i`` are the
    tolerance-dependent boundaries the decision used; for spheres they
    are None (the fixed zeta_bar / zeta_tilde thresholds apply instead)
    and ``tolerance`` is None because it does not enter the decision.
    """

    geometry: str
    tolerance: Optional[float]
    zeta_family: ZetaFamily
    zeta_c: Optional[float]
    zeta_i: Optional[float]
    label: str

    @property
    def regime(self) -> str:
        return self.label

    @property
    def xi(self) -> float:
        return self.zeta_family.xi

    @property
    def chi(self) -> float:
        return self.zeta_family.chi

    @property
    def zeta(self) -> float:
        return self.zeta_family.zeta

    @property
    def zeta_bar(self) -> float:
        return self.zeta_family.zeta_bar

    @property
    def zeta_tilde(self) -> float:
        return self.zeta_family.zeta_tilde


def classify(geometry: str, xi: float, chi: Optional[float] = None,
             nu: Optional[float] = None,
             tolerance: float = 0.10) -> RegimeReport:
    """Classify a layer as compressible / incompressible / intermediate.

    geometry is "plate" or "sphere".  Exactly one of chi or nu is
    required (both are accepted if consistent).  chi = 0 is always
    incompressible.  For spheres the boundaries are the fixed constants
    zeta_bar >= 1 (incompressible) and sqrt(10) zeta_tilde <= 1
    (compressible, with the boundary itself counted as compressible),
    and ``tolerance`` is ignored.
    """
    if geometry not in ("plate", "sphere"):
        raise ValueError(f"geometry must be 'plate' or 'sphere', got {geometry!r}")
    chi = resolve_chi(chi, nu)
    xi = float(xi)
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    fam = zeta_family(xi, chi)

    if geometry == "plate":
        zc, zi = plate_transitions(tolerance)
        if fam.infinite or fam.zeta >= zi:
            label = "incompressible"
        elif fam.zeta <= zc:
            label = "compressible"
        else:
            label = "intermediate"
        return RegimeReport(geometry=geometry, tolerance=float(tolerance),
                            zeta_family=fam, zeta_c=zc, zeta_i=zi,
                            label=label)

    if fam.infinite or fam.zeta_bar >= SPHERE_ZETA_BAR_INCOMPRESSIBLE:
        label = "incompressible"
    elif fam.zeta_tilde * math.sqrt(10.0) <= 1.0 + _TIE_EPS:
        label = "compressible"
    else:
        label = "intermediate"
    return RegimeReport(geometry=geometry, tolerance=None, zeta_family=fam,
                        zeta_c=None, zeta_i=None, label=label)
