"""Pseudo-Hermitian qubit sensor and its two-qubit Naimark dilation.

The sensed field ``lam`` enters through the dimensionless parameter
``x = lam / (epsilon * omega)``; every derivative below is taken with respect
to ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateState, PreconditionError, SingularDelta
from .hilbert import ParameterizedFamily, dag
from .qfi import qfi_pure_hermitian, qfi_pure_nonhermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

NORMALIZED = "normalized"


@dataclass(frozen=True)
class PseudoQubitParams:
    """Sensor parameters.

    ``n_mode`` is either a constant biorthogonal scale ``n`` or the string
    ``"normalized"``, which picks ``n = 1/sqrt(1 + delta^2)`` so that the
    right eigenstate has unit norm.
    """

    epsilon: float
    omega: float
    lam: float = 0.0
    n_mode: float | str = NORMALIZED

    def __post_init__(self):
        if not self.epsilon > 0 or not self.omega > 0:
            raise PreconditionError("epsilon and omega must be positive")
        if isinstance(self.n_mode, str) and self.n_mode != NORMALIZED:
            raise PreconditionError(f"unknown n_mode {self.n_mode!r}")

    @property
    def scale(self) -> float:
        """``epsilon * omega``, the conversion factor between ``lam`` and ``x``."""
        return self.epsilon * self.omega

    @property
    def x(self) -> float:
        return self.lam / self.scale

    def at_x(self, x: float) -> "PseudoQubitParams":
        return replace(self, lam=x * self.scale)

    @property
    def b(self) -> float:
        e, w = self.epsilon, self.omega
        return 4 * w * e * (1 + e) / (1 + 2 * e)

    @property
    def c(self) -> float:
        e, w = self.epsilon, self.omega
        return 2 * w * math.sqrt(e * (1 + e)) / (1 + 2 * e)

    @property
    def eps_lam(self) -> float:
        return math.hypot(self.b + self.lam, self.c)

    @property
    def delta(self) -> float:
        return (self.lam + 2 * self.epsilon * self.omega) / self.eps_lam

    @property
    def g(self) -> float:
        """``d delta / d x``."""
        el = self.eps_lam
        return self.scale / el - self.scale * self.delta * (self.b + self.lam) / el ** 2

    @property
    def normalized(self) -> bool:
        return isinstance(self.n_mode, str)

    def n(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.delta ** 2) if self.normalized else float(self.n_mode)

    def dn_dx(self) -> float:
        if not self.normalized:
            return 0.0
        d = self.delta
        return -d * self.g / (1.0 + d * d) ** 1.5


def reduced_hamiltonian(p: PseudoQubitParams) -> np.ndarray:
    """``eps_lam * [[0, 1/delta], [delta, 0]]``."""
    d = p.delta
    if abs(d) < 1e-14:
        raise SingularDelta(f"delta vanishes at lam={p.lam!r}")
    return p.eps_lam * np.array([[0, 1 / d], [d, 0]], dtype=complex)


def unperturbed_dilated_hamiltonian(p: PseudoQubitParams) -> np.ndarray:
    return p.b * np.kron(IDENTITY2, SIGMA_X) - p.c * np.kron(SIGMA_Y, SIGMA_Y)


def dilated_hamiltonian(p: PseudoQubitParams) -> np.ndarray:
    """Two-qubit Hermitian Hamiltonian, ancilla first: ``(b + lam) I x sx - c sy x sy``."""
    return unperturbed_dilated_hamiltonian(p) + p.lam * np.kron(IDENTITY2, SIGMA_X)


def right_left_eigenstates(p: PseudoQubitParams, n: float) -> tuple[np.ndarray, np.ndarray]:
    """Biorthonormal right/left eigenvectors for the eigenvalue ``+eps_lam``."""
    d = p.delta
    if n == 0 or abs(d) < 1e-14:
        raise DegenerateState("need n != 0 and delta != 0")
    R = n * np.array([1.0, d], dtype=complex)
    L = np.array([1.0, 1.0 / d], dtype=complex) / (2 * n)
    return R, L


def metric_operator(p: PseudoQubitParams) -> np.ndarray:
    """Positive ``eta`` with ``(eta^2 + I) H = H^dag (eta^2 + I)``.

    The Hermitian solutions ``S`` of ``S H = H^dag S`` are found from the null
    space of the linear map; the positive one is scaled so that its smallest
    eigenvalue is 2, and ``eta = sqrt(S - I)``.
    """
    H = reduced_hamiltonian(p)
    n = H.shape[0]
    eye = np.eye(n)
    # vec(S H - H^dag S) = (H^T kron I - I kron H^dag) vec(S), column-major vec
    op = np.kron(H.T, eye) - np.kron(eye, dag(H))
    _, sv, vh = np.linalg.svd(op)
    null = vh[np.abs(sv) < 1e-10 * max(1.0, sv.max())]
    best = None
    for row in null.conj():
        S = row.reshape(n, n, order="F")
        phase = np.trace(S)
        S = S / (phase / abs(phase)) if abs(phase) > 0 else S
        S = 0.5 * (S + dag(S))
        w = np.linalg.eigvalsh(S)
        if w.min() > 0 and (best is None or w.min() / w.max() > best[0]):
            best = (w.min() / w.max(), S)
    if best is None:
        raise PreconditionError("no positive metric found")
    S = best[1]
    S = S * (2.0 / np.linalg.eigvalsh(S).min())
    w, v = np.linalg.eigh(S - eye)
    return (v * np.sqrt(np.clip(w, 0, None))) @ dag(v)


def right_state_family(p: PseudoQubitParams) -> ParameterizedFamily:
    """``x -> |R_n(x)> = n (1, delta(x))``."""
    def R(x):
        q = p.at_x(x)
        return q.n() * np.array([1.0, q.delta], dtype=complex)
    return ParameterizedFamily(R)


def dilated_eigenstate(p: PseudoQubitParams) -> np.ndarray:
    """The dilated state ``(0, 1, c/eps_lam, (b+lam)/eps_lam) / sqrt(2)``.

    In the ancilla-first basis of :func:`dilated_hamiltonian` the
    ``+eps_lam`` eigenvector is this vector with components reordered as
    ``(1, 3, 0, 2)``; the QFI is unaffected by the fixed reordering.
    """
    el = p.eps_lam
    return np.array([0.0, 1.0, p.c / el, (p.b + p.lam) / el], dtype=complex) / math.sqrt(2)


def dilated_family(p: PseudoQubitParams) -> ParameterizedFamily:
    return ParameterizedFamily(lambda x: dilated_eigenstate(p.at_x(x)))


def qfi_Fx(p: PseudoQubitParams, x: float | None = None) -> float:
    """Closed-form QFI of ``|R_n(x)>``.

    ``4 n^2 g^2 (4 d^2 + 1)/(d^2 + 1) + 32 n g d n' + 16 (1 + d^2) n'^2`` with
    ``n' = dn/dx``; in normalized mode this collapses to ``4 g^2 / (1 + d^2)^2``.
    """
    q = p if x is None else p.at_x(x)
    d, g = q.delta, q.g
    if q.normalized:
        return 4 * g * g / (1 + d * d) ** 2
    n, dn = q.n(), q.dn_dx()
    return 4 * n * n * g * g * (4 * d * d + 1) / (d * d + 1) + 32 * n * g * d * dn + 16 * (1 + d * d) * dn * dn


def qfi_Fx_general(p: PseudoQubitParams, x: float | None = None) -> float:
    """The three-term expression evaluated with the analytic ``dn/dx`` in every mode."""
    q = p if x is None else p.at_x(x)
    d, g, n, dn = q.delta, q.g, q.n(), q.dn_dx()
    return 4 * n * n * g * g * (4 * d * d + 1) / (d * d + 1) + 32 * n * g * d * dn + 16 * (1 + d * d) * dn * dn


def qfi_Fxd(p: PseudoQubitParams, x: float | None = None, verify: bool = False) -> float:
    """QFI of the dilated eigenstate with respect to ``x``: ``2 (eps omega)^2 c^2 / eps_lam^4``.

    For ``epsilon * omega = 1`` this is ``2 c^2 / eps_lam^4``.  ``verify`` also
    runs the generic Hermitian pipeline on the dilated family and raises if the
    two disagree beyond ``1e-6`` relative.
    """
    q = p if x is None else p.at_x(x)
    value = 2 * q.scale ** 2 * q.c ** 2 / q.eps_lam ** 4
    if verify:
        generic = qfi_pure_hermitian(dilated_family(q), q.x).value
        if abs(generic - value) > 1e-6 * abs(value):
            raise PreconditionError(f"dilated QFI mismatch: closed {value!r}, generic {generic!r}")
    return value


def fx_generic(p: PseudoQubitParams, x: float | None = None) -> float:
    q = p if x is None else p.at_x(x)
    return qfi_pure_nonhermitian(right_state_family(q), q.x).value


def fxd_generic(p: PseudoQubitParams, x: float | None = None) -> float:
    q = p if x is None else p.at_x(x)
    return qfi_pure_hermitian(dilated_family(q), q.x).value


DEFAULT_EPSILONS = (1.0, 1.5, 2.0)
N_VALUES = (("1/2", 0.5), ("sqrt2/2", math.sqrt(2) / 2), ("1", 1.0))


@dataclass(frozen=True)
class PseudoRow:
    epsilon: float
    omega: float
    n_label: str
    x: float
    F_closed_form: float
    F_generic: float | None = None


def curves(epsilon: float, omega: float = 1.0):
    """The five curves of one panel as ``(label, params)`` pairs.

    The dilated curve is labelled ``"dilated"``; its params use the
    normalized mode.
    """
    out = [(label, PseudoQubitParams(epsilon, omega, n_mode=n)) for label, n in N_VALUES]
    out.append((NORMALIZED, PseudoQubitParams(epsilon, omega)))
    out.append(("dilated", PseudoQubitParams(epsilon, omega)))
    return out


def sweep(epsilons=DEFAULT_EPSILONS, omega: float = 1.0, x_range=(0.0, 2.0), points: int = 401,
               generic: bool = False) -> list[PseudoRow]:
    """Rows ``(epsilon, n_label, x, F)`` for every panel and curve.

    With ``generic=True`` each row also carries the generic-pipeline value.
    """
    xs = np.linspace(x_range[0], x_range[1], points)
    rows = []
    for eps in epsilons:
        for label, p in curves(eps, omega):
            for x in xs:
                x = float(x)
                if label == "dilated":
                    closed = qfi_Fxd(p, x)
                    gen = fxd_generic(p, x) if generic else None
                else:
                    closed = qfi_Fx(p, x)
                    gen = fx_generic(p, x) if generic else None
                rows.append(PseudoRow(eps, omega, label, x, closed, gen))
    return rows
