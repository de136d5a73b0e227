"""Independent numerical machinery used to validate the closed forms.

Nothing here depends on the QFI formulas being checked: derivatives come
from finite differences, the evolution operator from a generic matrix
exponential, and the reference QFI from the spectral sum over the
numerically differenced density matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .errors import DegenerateSpectrum, PreconditionError, UnboundedVariance
from .hilbert import (
    RANK_TOL,
    ParameterizedFamily,
    align_phase,
    as_matrix,
    dag,
    decompose,
)

DEFAULT_SEED = 0xC0FFEE

Gauge = Literal["first_component", "overlap_align", "none"]


@dataclass(frozen=True)
class StencilConfig:
    """Central-difference settings.

    ``h=None`` picks ``1e-5 * max(1, |theta|)`` at the evaluation point.
    ``gauge`` only matters for ket families; ``"none"`` differentiates the raw
    components.
    """

    h: float | None = None
    richardson_levels: int = 1
    gauge: Gauge = "first_component"

    def __post_init__(self):
        if self.h is not None and not 1e-9 <= self.h <= 1e-2:
            raise PreconditionError(f"step h={self.h!r} outside [1e-9, 1e-2]")
        if self.richardson_levels < 0:
            raise PreconditionError("richardson_levels must be >= 0")
        if self.gauge not in ("first_component", "overlap_align", "none"):
            raise PreconditionError(f"unknown gauge {self.gauge!r}")

    def step(self, theta: float) -> float:
        return self.h if self.h is not None else 1e-5 * max(1.0, abs(theta))


def default_step(theta: float) -> float:
    return 1e-5 * max(1.0, abs(theta))


def expm(A) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(as_matrix(A))


def _gauge_fix(values: dict[int, np.ndarray], gauge: Gauge) -> dict[int, np.ndarray]:
    if gauge == "none" or values[0].ndim != 1:
        return values
    if gauge == "first_component":
        # keep the norm; only the phase convention of decompose() is applied
        return {j: v * np.exp(-1j * decompose(v).beta) for j, v in values.items()}
    center = values[0]
    return {j: align_phase(v, center) for j, v in values.items()}


def richardson(samples: Callable[[int], object], h: float, levels: int):
    """Richardson-extrapolated central difference.

    ``samples(j)`` must return the carrier at ``theta + j*h``; steps ``h*2**i``
    for ``i = 0..levels`` are combined assuming an even error expansion.
    """
    table = []
    for i in range(levels + 1):
        k = 2 ** i
        table.append((samples(k) - samples(-k)) / (2 * k * h))
    for level in range(1, levels + 1):
        factor = 4.0 ** level
        table = [(factor * table[i] - table[i + 1]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def stencil_offsets(levels: int) -> list[int]:
    out = [0]
    for i in range(levels + 1):
        out += [2 ** i, -(2 ** i)]
    return out


def fd_derivative(family: ParameterizedFamily, theta: float, cfg: StencilConfig | None = None):
    """Finite-difference derivative of a family at ``theta``.

    Ket families are gauge-fixed point by point (``cfg.gauge``) before
    differencing; matrices and scalars are differenced as they are.
    """
    cfg = cfg or StencilConfig()
    h = cfg.step(theta)
    values = {j: np.asarray(family(theta + j * h)) for j in stencil_offsets(cfg.richardson_levels)}
    values = _gauge_fix(values, cfg.gauge)
    return richardson(values.__getitem__, h, cfg.richardson_levels)


def _sld_sum(p: np.ndarray, dmat: np.ndarray, rank_tol: float) -> float:
    """``sum_{k,l} 2 |dmat_kl|^2 / (p_k + p_l)`` over pairs touching the support."""
    p = np.where(p > rank_tol, p, 0.0)
    denom = p[:, None] + p[None, :]
    mask = denom > 1e-12
    return float(np.sum(2.0 * np.abs(dmat[mask]) ** 2 / denom[mask]))


def qfi_oracle(family: ParameterizedFamily, theta: float, cfg: StencilConfig | None = None,
               rank_tol: float = RANK_TOL) -> float:
    """Reference QFI from the numerically differenced density matrix.

    ``family`` may yield kets (turned into ``|Psi><Psi|``) or density
    matrices.  With ``tau = tr(rho)`` the value is
    ``tau * F_sld(rho / tau) + 4 (d tau)^2 / tau``: the standard
    symmetric-logarithmic-derivative spectral sum on the normalized matrix,
    weighted by the norm, plus the norm channel ``16 e^{2 alpha} (d alpha)^2``.
    No eigenvector derivatives are taken.
    """
    cfg = cfg or StencilConfig(gauge="none")
    probe = np.asarray(family(theta))
    rho_family = family.density_family() if probe.ndim == 1 else family
    h = cfg.step(theta)
    offsets = stencil_offsets(cfg.richardson_levels)
    mats = {j: as_matrix(rho_family(theta + j * h)) for j in offsets}

    ranks = set()
    for m in mats.values():
        w = np.linalg.eigvalsh(0.5 * (m + dag(m)))
        ranks.add(int(np.sum(w / w.sum() > rank_tol)))
    if len(ranks) > 1:
        raise DegenerateSpectrum(f"rank changes inside the stencil at theta={theta!r}")

    rho = mats[0]
    drho = richardson(mats.__getitem__, h, cfg.richardson_levels)
    tau = float(np.trace(rho).real)
    dtau = float(np.trace(drho).real)
    rho_n = rho / tau
    drho_n = drho / tau - rho * dtau / tau ** 2
    p, vecs = np.linalg.eigh(0.5 * (rho_n + dag(rho_n)))
    dmat = dag(vecs) @ drho_n @ vecs
    return tau * _sld_sum(p, dmat, rank_tol) + 4.0 * dtau ** 2 / tau


# --------------------------------------------------------------------------
# Monte Carlo check of the Cramer-Rao bound


@dataclass(frozen=True)
class TwoOutcomeModel:
    """Projective two-outcome measurement with analytic outcome probability.

    ``prob(theta)`` is the probability of the "+" outcome; ``bracket`` is the
    interval searched by the maximum-likelihood estimator, on which ``prob``
    must be monotone.
    """

    prob: Callable[[float], float]
    theta0: float
    bracket: tuple[float, float]
    name: str = ""


def qubit_phase_model(theta0: float = 0.0) -> TwoOutcomeModel:
    """``sigma_y`` readout of ``(e^{i theta}, e^{-i theta})/sqrt(2)``; QFI = 4."""
    eps = 1e-9
    return TwoOutcomeModel(
        prob=lambda t: 0.5 * (1.0 - math.sin(2.0 * t)),
        theta0=theta0,
        bracket=(-math.pi / 4 + eps, math.pi / 4 - eps),
        name="qubit_phase",
    )


def biased_coin_model(p: float) -> TwoOutcomeModel:
    """Coin with ``P(+) = theta``; classical Fisher information ``1/(p(1-p))``."""
    return TwoOutcomeModel(prob=lambda t: t, theta0=p, bracket=(1e-12, 1 - 1e-12), name="coin")


@dataclass(frozen=True)
class McReport:
    variance: float
    mean: float
    bound: float
    lower_band: float
    satisfied: bool
    flagged: int
    trials: int
    shots: int


def _mle(model: TwoOutcomeModel, k: int, shots: int) -> float:
    def nll(t):
        q = min(max(model.prob(t), 1e-300), 1 - 1e-16)
        return -(k * math.log(q) + (shots - k) * math.log1p(-q))

    lo, hi = model.bracket
    res = minimize_scalar(nll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def mc_cramer_rao(model: TwoOutcomeModel, F: float, shots: int, trials: int,
                  seed: int = DEFAULT_SEED) -> McReport:
    """Empirical variance of the maximum-likelihood estimator over ``trials``.

    Each trial draws ``shots`` outcomes at ``model.theta0``.  Trials whose
    outcome frequency is 0 or 1 make the likelihood degenerate; they are
    counted in ``flagged`` and left out of the statistics.
    """
    if not F > 0:
        raise UnboundedVariance(f"Fisher information must be positive, got {F!r}")
    if shots < 1 or trials < 2:
        raise PreconditionError("need shots >= 1 and trials >= 2")
    rng = np.random.default_rng(seed)
    counts = rng.binomial(shots, model.prob(model.theta0), size=trials)
    estimates = []
    flagged = 0
    for k in counts:
        if k == 0 or k == shots:
            flagged += 1
            continue
        estimates.append(_mle(model, int(k), shots))
    est = np.asarray(estimates)
    var = float(est.var(ddof=1)) if est.size > 1 else math.nan
    bound = 1.0 / (F * shots)
    lower = bound * (1.0 - 5.0 / math.sqrt(trials))
    return McReport(
        variance=var,
        mean=float(est.mean()) if est.size else math.nan,
        bound=bound,
        lower_band=lower,
        satisfied=bool(var >= lower),
        flagged=flagged,
        trials=trials,
        shots=shots,
    )
