"""Asymptotics of thin linear-elastic layers bonded between rigid plates or
rigid spheres: displacement/stress fields, transmitted forces, apparent
compression moduli, and compressibility-regime classification."""

__version__ = "0.1.0"

from .materials import MaterialParams, chi_from_nu, nu_from_chi, zeta_family
from .plate import apparent_modulus, force, solve_plate
from .plate import field as plate_field
from .regimes import classify, nu_intermediate_window, plate_transitions
from .sphere import solve_sphere, sphere_field, sphere_force

__all__ = [
    "MaterialParams",
    "apparent_modulus",
    "chi_from_nu",
    "classify",
    "force",
    "nu_from_chi",
    "nu_intermediate_window",
    "plate_field",
    "plate_transitions",
    "solve_plate",
    "solve_sphere",
    "sphere_field",
    "sphere_force",
    "zeta_family",
]
