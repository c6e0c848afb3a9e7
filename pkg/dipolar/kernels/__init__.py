"""Kernels, radial potentials and elliptic integrals."""

from dipolar.kernels.params import KernelParams, LayerSeparation, parse_ell
from dipolar.kernels.functions import (
    g_cutoff,
    phi_delta,
    phi_delta_prime,
    kernel_K,
    phi_delta_l,
    kernel_total_mass,
    kernel_mass_within,
    kernel_is_repulsive,
)
from dipolar.kernels.elliptic import elliptic_K, elliptic_E, elliptic_K_m1, elliptic_E_m1

__all__ = [
    "KernelParams",
    "LayerSeparation",
    "parse_ell",
    "g_cutoff",
    "phi_delta",
    "phi_delta_prime",
    "kernel_K",
    "phi_delta_l",
    "kernel_total_mass",
    "kernel_mass_within",
    "kernel_is_repulsive",
    "elliptic_K",
    "elliptic_E",
    "elliptic_K_m1",
    "elliptic_E_m1",
]
