"""PT-symmetric qubit ``H = [[r e^{i w}, s], [s, r e^{-i w}]]``.

QFI values labelled *generic* come from the generator pipeline with a numeric
matrix exponential and are authoritative.  The printed closed forms are
evaluated verbatim next to them so that their differences stay visible.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import (
    AmplitudeOverflow,
    NearExceptionalPoint,
    PreconditionError,
    RegimeError,
    UnsupportedAtEP,
)
from .hilbert import as_vector
from .oracle import expm
from .qfi import GeneratorContext, QfiReport, qfi_generator_nonhermitian

REGIME_TOL = 1e-12
#: ``e^{4 kappa theta}`` above this raises AmplitudeOverflow.
OVERFLOW_LIMIT = 1e300


class Regime(str, enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "ep"


@dataclass(frozen=True)
class PtParams:
    r: float
    s: float
    omega: float

    def __post_init__(self):
        if not self.r >= 0:
            raise PreconditionError(f"r must be nonnegative, got {self.r!r}")
        if not self.s > 0:
            raise PreconditionError(f"s must be positive, got {self.s!r}")

    @property
    def a(self) -> float:
        """``r sin(omega)``, the non-Hermitian strength."""
        return self.r * math.sin(self.omega)

    @property
    def discriminant(self) -> float:
        return self.s ** 2 - self.a ** 2

    def regime(self) -> Regime:
        return classify(self)

    def hamiltonian(self) -> np.ndarray:
        r, s, w = self.r, self.s, self.omega
        return np.array([[r * np.exp(1j * w), s], [s, r * np.exp(-1j * w)]], dtype=complex)


def classify(p: PtParams) -> Regime:
    d = p.discriminant
    if abs(d) <= REGIME_TOL:
        return Regime.EXCEPTIONAL_POINT
    return Regime.UNBROKEN if d > 0 else Regime.BROKEN


def _require(p: PtParams, regime: Regime) -> None:
    got = classify(p)
    if got != regime:
        raise RegimeError(f"expected the {regime.value} regime, parameters are {got.value}")


@dataclass(frozen=True)
class Eigensystem:
    plus: complex
    minus: complex
    vec_plus: np.ndarray
    vec_minus: np.ndarray
    #: ``sin x`` (unbroken) or ``mu`` (broken): the overlap of the eigenvectors.
    overlap: float
    x: float = math.nan
    kappa: float = math.nan


def eigensystem_unbroken(p: PtParams) -> Eigensystem:
    _require(p, Regime.UNBROKEN)
    x = math.asin(p.a / p.s)
    root = math.sqrt(p.discriminant)
    base = p.r * math.cos(p.omega)
    h = 0.5 * x
    vp = np.array([np.exp(1j * h), np.exp(-1j * h)]) / math.sqrt(2)
    vm = 1j * np.array([np.exp(-1j * h), -np.exp(1j * h)]) / math.sqrt(2)
    return Eigensystem(base + root, base - root, vp, vm, math.sin(x), x=x)


def eigensystem_broken(p: PtParams) -> Eigensystem:
    _require(p, Regime.BROKEN)
    a = p.a
    if not a > 0:
        raise PreconditionError("the broken-regime eigenvectors need r sin(omega) > 0")
    kappa = math.sqrt(-p.discriminant)
    base = p.r * math.cos(p.omega)
    scale = 1.0 / math.sqrt(2 * a)
    vp = scale * np.array([1j * math.sqrt(a + kappa), math.sqrt(a - kappa)])
    vm = scale * np.array([1j * math.sqrt(a - kappa), math.sqrt(a + kappa)])
    return Eigensystem(base + 1j * kappa, base - 1j * kappa, vp, vm, p.s / a, kappa=kappa)


def ep_eigenvector(p: PtParams) -> np.ndarray:
    """The single eigenvector at the exceptional point, ``(1, -i a/s)/sqrt(2)``."""
    _require(p, Regime.EXCEPTIONAL_POINT)
    return np.array([1.0, -1j * p.a / p.s]) / math.sqrt(2)


def eigensystem(p: PtParams) -> Eigensystem:
    return eigensystem_unbroken(p) if classify(p) == Regime.UNBROKEN else eigensystem_broken(p)


@dataclass(frozen=True)
class PtInitialState:
    """``N (|+> + m e^{i phi} |->)`` in the eigenbasis of the current regime."""

    m: float
    phi: float

    def __post_init__(self):
        if not self.m >= 0:
            raise PreconditionError(f"m must be nonnegative, got {self.m!r}")

    def norm_sq(self, overlap: float) -> float:
        """``N^2 = 1 / (1 + m^2 + 2 m overlap cos(phi))``."""
        denom = 1 + self.m ** 2 + 2 * self.m * overlap * math.cos(self.phi)
        if not denom > 0:
            raise PreconditionError("the superposition vanishes")
        return 1.0 / denom

    def vector(self, es: Eigensystem) -> np.ndarray:
        v = es.vec_plus + self.m * np.exp(1j * self.phi) * es.vec_minus
        return v * math.sqrt(self.norm_sq(es.overlap))


def evolution_closed_form(p: PtParams, theta: float) -> np.ndarray:
    """``exp(-i H theta)`` from the trigonometric form.

    The printed matrix omits the scalar ``e^{-i r cos(w) theta}``, which is 1
    for ``w = pi/2``; it is included here so the result is the exact
    exponential for any ``w``.
    """
    es = eigensystem_unbroken(p)
    cx = math.cos(es.x)
    if abs(cx) < 1e-8:
        raise NearExceptionalPoint(f"cos x = {cx!r} is too close to zero")
    t = p.s * theta * cx
    x = es.x
    M = np.array([[math.cos(t - x), -1j * math.sin(t)], [-1j * math.sin(t), math.cos(t + x)]]) / cx
    return np.exp(-1j * p.r * math.cos(p.omega) * theta) * M


def inner_product_factor_closed(p: PtParams, init: PtInitialState, theta: float) -> float:
    """``P = N^2 (1 + m^2 + 2 m sin x cos(phi_bar))`` with ``phi_bar = 2 s cos(x) theta + phi``."""
    es = eigensystem_unbroken(p)
    phibar = 2 * p.s * math.cos(es.x) * theta + init.phi
    m = init.m
    return init.norm_sq(es.overlap) * (1 + m * m + 2 * m * es.overlap * math.cos(phibar))


def _context(p: PtParams, psi0: np.ndarray) -> GeneratorContext:
    H = p.hamiltonian()
    return GeneratorContext(psi0, -H, _Evolution(H))


class _Evolution:
    """``theta -> expm(-i H theta)`` as a family object (picklable, cheap)."""

    def __init__(self, H):
        self.H = H

    def __call__(self, theta):
        return expm(-1j * theta * self.H)


def qfi_generic(p: PtParams, psi0, theta: float, check: bool = False) -> QfiReport:
    """Authoritative QFI of ``expm(-i H theta) psi0`` for any regime and any ``psi0``."""
    psi0 = as_vector(psi0)
    return qfi_generator_nonhermitian(_context(p, psi0), theta, check=check)


@dataclass(frozen=True)
class PtQfi:
    """Generic QFI next to the printed closed form.

    ``projected`` drops the norm channel and the ``e^{2 alpha}`` weight,
    i.e. it is the QFI of the normalized state alone.
    """

    generic: QfiReport
    closed_form: float
    regime: Regime

    @property
    def value(self) -> float:
        return self.generic.value

    @property
    def projected(self) -> float:
        return self.generic.projective_term / self.generic.norm_factor

    @property
    def unweighted(self) -> float:
        return self.generic.unweighted_value

    @property
    def difference(self) -> float:
        return self.closed_form - self.generic.value

    @property
    def residual(self) -> float:
        return abs(self.difference) / max(abs(self.generic.value), 1e-300)


def printed_unbroken_qfi(p: PtParams, init: PtInitialState, theta: float) -> float:
    """The unbroken closed form exactly as printed, reading its ``alpha`` as ``x``."""
    es = eigensystem_unbroken(p)
    x, m, phi = es.x, init.m, init.phi
    N2 = init.norm_sq(es.overlap)
    phibar = 2 * p.s * math.cos(x) * theta + phi
    sx, cx = math.sin(x), math.cos(x)
    first = 64 * N2 * m ** 2 * sx ** 2 * cx ** 2 * math.sin(phibar) ** 2 / (m ** 2 + 2 * m * sx * math.cos(phi) + 1)
    second = 16 * N2 * m ** 2 * p.discriminant ** 2 / (
        p.s + p.s * m ** 2 + 2 * m * p.a * math.cos(phibar)) ** 2
    return first + second


def _growth(kappa: float, theta: float) -> float:
    if 4 * kappa * theta > math.log(OVERFLOW_LIMIT):
        raise AmplitudeOverflow(f"e^(4 kappa theta) exceeds {OVERFLOW_LIMIT:g}", theta=theta)
    return math.exp(2 * kappa * theta)


def printed_broken_qfi(p: PtParams, init: PtInitialState, theta: float) -> float:
    """The broken-regime closed form exactly as printed."""
    es = eigensystem_broken(p)
    k, mu, m, phi, s = es.kappa, es.overlap, init.m, init.phi, p.s
    N2 = init.norm_sq(mu)
    e2 = _growth(k, theta)
    q = m * m / (e2 * e2)  # m^2 e^{-4 kappa theta}
    c = 2 * m * mu * math.cos(phi) / e2
    # both terms divided through by powers of e^{2 kappa theta} to stay finite
    first = 16 * N2 * k ** 2 * e2 * (1 - q) ** 2 / (1 + q + c)
    second = 16 * m ** 2 * mu ** 2 * k ** 4 / (e2 * e2) / (s * (1 + q + c)) ** 2
    return first + second


def qfi_unbroken(p: PtParams, init: PtInitialState, theta: float) -> PtQfi:
    es = eigensystem_unbroken(p)
    generic = qfi_generic(p, init.vector(es), theta)
    return PtQfi(generic, printed_unbroken_qfi(p, init, theta), Regime.UNBROKEN)


def qfi_broken(p: PtParams, init: PtInitialState, theta: float) -> PtQfi:
    es = eigensystem_broken(p)
    closed = printed_broken_qfi(p, init, theta)  # raises on overflow before expm
    generic = qfi_generic(p, init.vector(es), theta)
    return PtQfi(generic, closed, Regime.BROKEN)


def qfi(p: PtParams, init: PtInitialState, theta: float) -> PtQfi:
    regime = classify(p)
    if regime == Regime.UNBROKEN:
        return qfi_unbroken(p, init, theta)
    if regime == Regime.BROKEN:
        return qfi_broken(p, init, theta)
    raise UnsupportedAtEP("use qfi_at_ep at the exceptional point")


def qfi_at_ep(p: PtParams, theta: float, psi0=None) -> float:
    """QFI at the exceptional point for the coalesced eigenstate, which is 0.

    The eigenbasis is incomplete at the EP, so other initial states have no
    eigen-expansion and are rejected.
    """
    v = ep_eigenvector(p)
    if psi0 is not None:
        psi0 = as_vector(psi0)
        if abs(abs(np.vdot(v, psi0)) - np.linalg.norm(psi0)) > 1e-10:
            raise UnsupportedAtEP("only the coalesced eigenstate is supported at the exceptional point")
    return 0.0


# --------------------------------------------------------------------------
# optimal initial state

DEFAULT_M_GRID = (0.0, 3.0, 0.02)
DEFAULT_PHI_GRID = (0.0, 2 * math.pi, 0.02)


@dataclass(frozen=True)
class OptimalState:
    m: float
    phi: float
    F: float
    grid_m: float
    grid_phi: float
    grid_F: float


def _grid(bounds) -> np.ndarray:
    lo, hi, step = bounds
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    return pts[pts < hi] if hi - lo >= 2 * math.pi - 1e-12 else pts


def qfi_grid(p: PtParams, theta: float, ms, phis):
    """``(F, F_projected)`` over an ``(m, phi)`` grid via the kernel backend."""
    return kernels.generator_qfi_grid(*_grid_inputs(p, theta), np.asarray(ms, float), np.asarray(phis, float))


def optimal_initial_state(p: PtParams, theta: float, m_grid=DEFAULT_M_GRID, phi_grid=DEFAULT_PHI_GRID,
                          tol: float = 1e-4) -> OptimalState:
    """Maximize the generic QFI over ``(m, phi)``.

    A kernel-evaluated grid search is followed by alternating bounded
    one-dimensional refinements (generic pipeline) until both coordinates
    move by less than ``tol``.
    """
    if classify(p) == Regime.EXCEPTIONAL_POINT:
        raise UnsupportedAtEP("no eigenbasis to parameterize at the exceptional point")
    ms, phis = _grid(m_grid), _grid(phi_grid)
    if ms.size == 0 or phis.size == 0:
        raise PreconditionError("empty search grid")
    F, _ = qfi_grid(p, theta, ms, phis)
    F = np.where(np.isfinite(F), F, -np.inf)
    i, j = np.unravel_index(int(np.argmax(F)), F.shape)
    gm, gphi, gF = float(ms[i]), float(phis[j]), float(F[i, j])

    es = eigensystem(p)

    def value(m, phi):
        try:
            return qfi_generic(p, PtInitialState(m, phi).vector(es), theta).value
        except PreconditionError:
            return -math.inf

    m_lo, m_hi = float(ms[0]), float(ms[-1])
    dm, dphi = m_grid[2], phi_grid[2]
    m, phi = gm, gphi
    for _ in range(50):
        res = minimize_scalar(lambda t: -value(t, phi), bounds=(max(m_lo, m - dm), min(m_hi, m + dm)),
                              method="bounded", options={"xatol": tol / 10})
        new_m = float(res.x) if -res.fun >= value(m, phi) else m
        res = minimize_scalar(lambda t: -value(new_m, t), bounds=(phi - dphi, phi + dphi),
                              method="bounded", options={"xatol": tol / 10})
        new_phi = float(res.x) if -res.fun >= value(new_m, phi) else phi
        moved = max(abs(new_m - m), abs(new_phi - phi))
        m, phi = new_m, new_phi
        if moved < tol:
            break
    return OptimalState(m, phi % (2 * math.pi), value(m, phi), gm, gphi, gF)


def _grid_inputs(p: PtParams, theta: float):
    es = eigensystem(p)
    if es.kappa == es.kappa:
        _growth(es.kappa, theta)
    H = p.hamiltonian()
    U = expm(-1j * theta * H)
    a, b = U @ es.vec_plus, U @ es.vec_minus
    return es.vec_plus, es.vec_minus, a, b, -H @ a, -H @ b


# --------------------------------------------------------------------------
# demonstration sweeps

UNBROKEN_DEMO = PtParams(r=0.4, s=1.0, omega=math.pi / 2)
DEMO_PHIS = (("pi", math.pi), ("2pi/3", 2 * math.pi / 3), ("pi/2", math.pi / 2),
             ("pi/3", math.pi / 3), ("0", 0.0))
BROKEN_DEMOS = (PtParams(r=0.6, s=0.4, omega=math.pi / 2), PtParams(r=1.0, s=0.1, omega=math.pi / 2))


@dataclass(frozen=True)
class PtRow:
    regime: str
    m: float
    phi: float
    r: float
    s: float
    omega: float
    theta: float
    F_generic: float
    F_closed_form: float
    F_projected: float

    @property
    def residual(self) -> float:
        return abs(self.F_closed_form - self.F_generic) / max(abs(self.F_generic), 1e-300)


def sweep(p: PtParams, init: PtInitialState, thetas) -> list[PtRow]:
    rows = []
    for t in thetas:
        q = qfi(p, init, float(t))
        rows.append(PtRow(q.regime.value, init.m, init.phi, p.r, p.s, p.omega, float(t),
                          q.value, q.closed_form, q.projected))
    return rows


def demo_sweeps(kind: str = "all", unbroken_points: int = 1501, broken_points: int = 601) -> list[PtRow]:
    """Reference sweeps: the unbroken set over ``theta in [0, 15]`` for each phase in
    :data:`DEMO_PHIS` and the two broken sets at ``(m, phi) = (1, pi)`` over ``[0, 6]``."""
    rows: list[PtRow] = []
    if kind in ("unbroken", "all"):
        thetas = np.linspace(0.0, 15.0, unbroken_points)
        for _, phi in DEMO_PHIS:
            rows += sweep(UNBROKEN_DEMO, PtInitialState(1.0, phi), thetas)
    if kind in ("broken", "all"):
        thetas = np.linspace(0.0, 6.0, broken_points)
        for p in BROKEN_DEMOS:
            rows += sweep(p, PtInitialState(1.0, math.pi), thetas)
    if not rows:
        raise PreconditionError(f"unknown sweep kind {kind!r}")
    return rows


def is_eigenvector(H: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    Hv = H @ v
    lam = np.vdot(v, Hv) / np.vdot(v, v)
    return bool(np.linalg.norm(Hv - lam * v) <= tol * max(1.0, np.linalg.norm(Hv)))

