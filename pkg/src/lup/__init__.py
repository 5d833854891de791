"""Laguerre unitary process: sampling, densities, extended kernels and numerical checks."""

__version__ = "0.1.0"

from .kernels import (  # noqa: E402
    FAMILIES,
    KernelError,
    KernelSpec,
    SpaceTimePoint,
    correlation_det,
    kernel_airy,
    kernel_hermite,
    kernel_laguerre,
    kernel_laguerre_cd,
    kernel_matrix,
    kernel_sine,
    kernel_value,
)
from .matrixcore import HermitianMatrix, eigenvalues_hermitian, jacobi_eigh, sample_ginibre, sample_lue  # noqa: E402
from .polybasis import LogValue, WeightParams, hermite_monic, kappa, laguerre_monic, laguerre_norm, weight_gamma  # noqa: E402
from .process import Trajectory, characteristic_function_lue, sample_sum_pair, simulate_lup  # noqa: E402
from .densities import eig_jpdf, spatiotemporal_jpdf, transition_density  # noqa: E402
from .rng import RngStream  # noqa: E402
from .verify import VerificationReport, run_suites  # noqa: E402

__all__ = [
    "__version__",
    "FAMILIES",
    "KernelError",
    "KernelSpec",
    "SpaceTimePoint",
    "correlation_det",
    "kernel_airy",
    "kernel_hermite",
    "kernel_laguerre",
    "kernel_laguerre_cd",
    "kernel_matrix",
    "kernel_sine",
    "kernel_value",
    "HermitianMatrix",
    "eigenvalues_hermitian",
    "jacobi_eigh",
    "sample_ginibre",
    "sample_lue",
    "LogValue",
    "WeightParams",
    "hermite_monic",
    "kappa",
    "laguerre_monic",
    "laguerre_norm",
    "weight_gamma",
    "Trajectory",
    "characteristic_function_lue",
    "sample_sum_pair",
    "simulate_lup",
    "eig_jpdf",
    "spatiotemporal_jpdf",
    "transition_density",
    "RngStream",
    "VerificationReport",
    "run_suites",
]
