"""Quantum Fisher information for non-Hermitian quantum systems."""
from .errors import NhqfiError, PreconditionError
from .hilbert import MixedState, ParameterizedFamily, decompose, spectral_decompose
from .qfi import (
    GeneratorContext,
    QfiReport,
    cramer_rao_bound,
    qfi_generator_hermitian,
    qfi_generator_nonhermitian,
    qfi_mixed_generator,
    qfi_mixed_nonhermitian,
    qfi_pure_hermitian,
    qfi_pure_nonhermitian,
)

__version__ = "0.1.0"

__all__ = [
    "GeneratorContext",
    "MixedState",
    "NhqfiError",
    "ParameterizedFamily",
    "PreconditionError",
    "QfiReport",
    "cramer_rao_bound",
    "decompose",
    "qfi_generator_hermitian",
    "qfi_generator_nonhermitian",
    "qfi_mixed_generator",
    "qfi_mixed_nonhermitian",
    "qfi_pure_hermitian",
    "qfi_pure_nonhermitian",
    "spectral_decompose",
]
