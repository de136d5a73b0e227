"""State carriers and the norm/phase split of non-normalized states.

Vectors and operators are plain complex ``numpy`` arrays (1-D for kets, 2-D
square for operators); the helpers below validate them.  A raw state
``Psi`` evolving under a non-Hermitian Hamiltonian is written as
``exp(alpha + i*beta) * psi`` with ``psi`` normalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateState, NotAState, PreconditionError

#: Magnitude above which a component of ``psi`` may carry the phase gauge.
GAUGE_THRESHOLD = 1e-8
#: Default numerical rank cut for mixed states.
RANK_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    """Return ``v`` as a finite 1-D complex array."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise PreconditionError(f"expected a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("vector has non-finite entries")
    return arr


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
        raise PreconditionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("matrix has non-finite entries")
    return arr


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(m))))
    return bool(np.max(np.abs(m - dag(m))) <= tol * scale)


def require_unit(v: np.ndarray, tol: float = 1e-10, name: str = "state") -> None:
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise PreconditionError(f"{name} must be normalized (norm = {norm!r})")


def expect(op: np.ndarray, v: np.ndarray) -> complex:
    """``<v|op|v>`` for a normalized ``v``."""
    return complex(np.vdot(v, op @ v))


def align_phase(v: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Rotate ``v`` by a global phase so that ``<ref|v>`` is real and positive."""
    ov = np.vdot(ref, v)
    if abs(ov) == 0.0:
        return v
    return v * (abs(ov) / ov)


@dataclass(frozen=True)
class ProjectiveDecomposition:
    alpha: float
    beta: float
    psi: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.exp(self.alpha + 1j * self.beta) * self.psi


def decompose(Psi) -> ProjectiveDecomposition:
    """Split ``Psi`` into log-amplitude ``alpha``, phase ``beta`` and unit ``psi``.

    The global phase is fixed by making the first component of ``psi`` whose
    magnitude exceeds :data:`GAUGE_THRESHOLD` real and positive, so the result
    is deterministic.

    >>> d = decompose([1j, 1j])
    >>> round(d.beta, 12) == round(math.pi / 2, 12)
    True
    """
    Psi = as_vector(Psi)
    norm = float(np.linalg.norm(Psi))
    if norm == 0.0:
        raise DegenerateState("cannot decompose the zero vector")
    alpha = math.log(norm)
    unit = Psi / norm
    lead = np.flatnonzero(np.abs(unit) > GAUGE_THRESHOLD)[0]
    beta = float(np.angle(unit[lead]))
    if beta <= -math.pi:
        beta += 2 * math.pi
    psi = unit * np.exp(-1j * beta)
    # the lead component is real by construction; drop rounding residue
    psi[lead] = abs(psi[lead])
    return ProjectiveDecomposition(alpha, beta, psi)


def inner_product_factor(psi0, U) -> float:
    """Squared norm ``<psi0|U^dag U|psi0>`` of the evolved state."""
    psi0 = as_vector(psi0)
    U = as_matrix(U)
    require_unit(psi0, name="psi0")
    out = U @ psi0
    return float(np.vdot(out, out).real)


def alpha_beta_rates(psi, H, dpsi_dt) -> tuple[float, float]:
    """Rates of change of the log-amplitude and the global phase.

    ``alpha_dot = -(i/2) <psi|H - H^dag|psi>`` and
    ``beta_dot = -(1/2) <psi|H + H^dag|psi> + i <psi|psi_dot>``.
    Both are real for a normalized ``psi``; the real parts are returned.
    """
    psi = as_vector(psi)
    H = as_matrix(H)
    dpsi_dt = as_vector(dpsi_dt)
    if H.shape[0] != psi.size or dpsi_dt.size != psi.size:
        raise PreconditionError("psi and dpsi_dt must match the dimension of H")
    require_unit(psi, name="psi")
    alpha_dot = -0.5j * expect(H - dag(H), psi)
    beta_dot = -0.5 * expect(H + dag(H), psi) + 1j * np.vdot(psi, dpsi_dt)
    return float(alpha_dot.real), float(beta_dot.real)


@dataclass(frozen=True)
class MixedState:
    """Spectral data of ``rho = exp(2 alpha) * sum_k p_k |k><k|``.

    ``basis`` holds the orthonormal vectors ``|k>`` as columns.
    """

    probs: np.ndarray
    basis: np.ndarray
    alpha: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis[:, None]
        if probs.ndim != 1 or basis.shape[1] != probs.size:
            raise PreconditionError("probs and basis columns disagree")
        if np.any(probs <= 0):
            raise PreconditionError("probabilities must be positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise PreconditionError(f"probabilities sum to {probs.sum()!r}, not 1")
        gram = dag(basis) @ basis
        if np.max(np.abs(gram - np.eye(probs.size))) > 1e-10:
            raise PreconditionError("basis vectors are not orthonormal")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "basis", basis)

    @property
    def rank(self) -> int:
        return self.probs.size

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    def density(self) -> np.ndarray:
        weighted = self.basis * self.probs
        return math.exp(2 * self.alpha) * (weighted @ dag(self.basis))


def spectral_decompose(rho, rank_tol: float = RANK_TOL) -> MixedState:
    """Eigen-decompose a (possibly non-normalized) density matrix.

    Eigenvalues are divided by the trace before the rank cut and the
    negativity check, so both tolerances are relative to ``tr(rho)``.
    Eigenpairs are ordered by decreasing probability.
    """
    rho = as_matrix(rho)
    if not is_hermitian(rho, 1e-10):
        raise NotAState("density matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(0.5 * (rho + dag(rho)))
    trace = float(vals.sum())
    if not trace > 0:
        raise NotAState(f"density matrix has non-positive trace {trace!r}")
    p = vals / trace
    if p.min() < -1e-8:
        raise NotAState(f"negative eigenvalue {vals.min()!r}")
    keep = np.flatnonzero(p > rank_tol)[::-1]
    probs = p[keep]
    return MixedState(probs / probs.sum(), vecs[:, keep], 0.5 * math.log(trace))


@dataclass(frozen=True)
class ParameterizedFamily:
    """A smooth map ``theta -> state`` (vector) or ``theta -> operator`` (matrix)."""

    fn: Callable[[float], object]
    derivative: Callable[[float], object] | None = None
    domain: tuple[float, float] = field(default=(-math.inf, math.inf))

    def __call__(self, theta: float) -> np.ndarray:
        lo, hi = self.domain
        if not lo <= theta <= hi:
            raise PreconditionError(f"theta={theta!r} outside the domain {self.domain}")
        out = np.asarray(self.fn(theta), dtype=complex)
        if not np.all(np.isfinite(out)):
            raise PreconditionError(f"family is not finite at theta={theta!r}")
        return out

    def d(self, theta: float) -> np.ndarray:
        if self.derivative is None:
            raise AttributeError("family has no analytic derivative")
        return np.asarray(self.derivative(theta), dtype=complex)

    @property
    def has_derivative(self) -> bool:
        return self.derivative is not None

    def density_family(self) -> "ParameterizedFamily":
        """The family ``theta -> |Psi><Psi|`` built from a ket family."""
        def rho(theta):
            v = self(theta)
            return np.outer(v, v.conj())
        return ParameterizedFamily(rho, domain=self.domain)
