"""Quantum Fisher information for Hermitian and non-Hermitian evolution.

The non-Hermitian formulas split a raw state into its norm ``e^{alpha}`` and
a normalized projective state.  Every routine returns a :class:`QfiReport`
whose ``value`` is the sum of a norm contribution (``alpha_term``) and a
projective contribution (``projective_term``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateSpectrum,
    InconsistentContext,
    NonHermitianGenerator,
    PreconditionError,
    UnboundedVariance,
)
from .hilbert import (
    RANK_TOL,
    MixedState,
    ParameterizedFamily,
    align_phase,
    as_matrix,
    as_vector,
    dag,
    decompose,
    expect,
    is_hermitian,
    require_unit,
    spectral_decompose,
)
from .oracle import StencilConfig, expm, fd_derivative, richardson, stencil_offsets

#: Probabilities closer than this are treated as one degenerate level.
DEGENERACY_TOL = 1e-8


class Method(str, enum.Enum):
    PURE_NH = "pure_nh"
    PURE_HERMITIAN = "pure_hermitian"
    GENERATOR = "generator"
    MIXED_NH = "mixed_nh"
    MIXED_GENERATOR = "mixed_generator"
    ORACLE = "oracle"


@dataclass(frozen=True)
class QfiReport:
    """QFI value with its breakdown.

    ``norm_factor`` is ``e^{2 alpha}`` at the evaluation point.
    ``classical_term`` is the population part already included in
    ``projective_term`` (zero for pure states).
    """

    value: float
    alpha_term: float
    projective_term: float
    method: Method
    norm_factor: float = 1.0
    classical_term: float = 0.0
    residual: float | None = None

    @property
    def unweighted_value(self) -> float:
        """``alpha_term`` plus the projective term without its ``e^{2 alpha}`` weight."""
        return self.alpha_term + self.projective_term / self.norm_factor

    def with_residual(self, reference: float) -> "QfiReport":
        scale = max(abs(reference), 1e-300)
        return replace(self, residual=abs(self.value - reference) / scale)


def _report(alpha_term, projective_term, method, norm_factor=1.0, classical_term=0.0):
    alpha_term = float(alpha_term)
    projective_term = float(projective_term)
    return QfiReport(alpha_term + projective_term, alpha_term, projective_term, Method(method),
                     float(norm_factor), float(classical_term))


def _projective_variance(psi: np.ndarray, dpsi: np.ndarray) -> float:
    """``<dpsi|dpsi> - |<psi|dpsi>|^2`` for a normalized ``psi``."""
    return float(np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2)


def _cfg(h, gauge="none"):
    return StencilConfig(h=h, gauge=gauge)


def qfi_pure_hermitian(family: ParameterizedFamily, theta: float, h: float | None = None) -> QfiReport:
    """QFI ``4(<d psi|d psi> - |<psi|d psi>|^2)`` of a normalized ket family."""
    psi = as_vector(family(theta))
    require_unit(psi, 1e-8, "family(theta)")
    if family.has_derivative:
        dpsi = family.d(theta)
    else:
        step = _cfg(h).step(theta)
        for j in (-1, 1):
            require_unit(as_vector(family(theta + j * step)), 1e-8, "family near theta")
        dpsi = fd_derivative(family, theta, _cfg(h))
    return _report(0.0, 4.0 * _projective_variance(psi, dpsi), Method.PURE_HERMITIAN)


def qfi_pure_nonhermitian(family: ParameterizedFamily, theta: float, h: float | None = None) -> QfiReport:
    """QFI of a raw (non-normalized) ket family.

    ``F = 16 e^{2a} (d a)^2 + 4 e^{2a} (<d psi|d psi> - |<d psi|psi>|^2)`` with
    ``a`` the log-norm and ``psi`` the normalized state.  Without an analytic
    derivative the stencil states are decomposed and phase-aligned to the
    central one before differencing.
    """
    Psi = as_vector(family(theta))
    center = decompose(Psi)
    norm2 = math.exp(2 * center.alpha)
    if family.has_derivative:
        dPsi = as_vector(family.d(theta))
        dalpha = float(np.vdot(Psi, dPsi).real) / norm2
        proj = (float(np.vdot(dPsi, dPsi).real) - abs(np.vdot(Psi, dPsi)) ** 2 / norm2) / norm2
    else:
        cfg = _cfg(h)
        step = cfg.step(theta)
        parts = {j: decompose(family(theta + j * step)) for j in stencil_offsets(cfg.richardson_levels)}
        dalpha = float(richardson(lambda j: parts[j].alpha, step, cfg.richardson_levels))
        psis = {j: align_phase(d.psi, center.psi) for j, d in parts.items()}
        dpsi = richardson(psis.__getitem__, step, cfg.richardson_levels)
        proj = _projective_variance(center.psi, dpsi)
    return _report(16.0 * norm2 * dalpha ** 2, 4.0 * norm2 * proj, Method.PURE_NH, norm2)


@dataclass(frozen=True)
class GeneratorContext:
    """Initial state, generator ``G`` and evolution ``U(theta)``.

    The default evolution is ``U(theta) = expm(i theta G)``.  A Hamiltonian
    evolution ``exp(-i H theta)`` corresponds to ``G = -H``
    (see :meth:`from_hamiltonian`).
    """

    psi0: np.ndarray
    generator: np.ndarray
    evolution: ParameterizedFamily | None = None

    def __post_init__(self):
        psi0 = as_vector(self.psi0)
        gen = as_matrix(self.generator)
        if gen.shape[0] != psi0.size:
            raise PreconditionError("generator and psi0 dimensions differ")
        require_unit(psi0, 1e-10, "psi0")
        object.__setattr__(self, "psi0", psi0)
        object.__setattr__(self, "generator", gen)
        if self.evolution is None:
            object.__setattr__(self, "evolution", ParameterizedFamily(lambda t: expm(1j * t * gen)))

    @classmethod
    def from_hamiltonian(cls, H, psi0) -> "GeneratorContext":
        return cls(psi0, -as_matrix(H))

    def check_consistency(self, theta: float, rtol: float = 1e-4) -> None:
        U = self.evolution(theta)
        dU = fd_derivative(self.evolution, theta, StencilConfig(gauge="none"))
        expected = 1j * self.generator @ U
        err = np.max(np.abs(dU - expected)) / max(1.0, float(np.max(np.abs(expected))))
        if err > rtol:
            raise InconsistentContext(
                f"evolution is not generated by the generator at theta={theta!r} (error {err:.3g})")


def qfi_generator_hermitian(ctx: GeneratorContext) -> QfiReport:
    """``4 (<G^2> - <G>^2)`` on the initial state; independent of theta."""
    G = ctx.generator
    if not is_hermitian(G, 1e-12):
        raise NonHermitianGenerator("generator is not Hermitian; use qfi_generator_nonhermitian")
    mean = expect(G, ctx.psi0).real
    second = expect(G @ G, ctx.psi0).real
    return _report(0.0, 4.0 * (second - mean ** 2), Method.GENERATOR)


def qfi_generator_nonhermitian(ctx: GeneratorContext, theta: float, check: bool = True) -> QfiReport:
    """Generator form of the non-Hermitian pure-state QFI.

    With ``Psi = U(theta) psi0``, ``P = <Psi|Psi> = e^{2a}`` and
    ``psi = Psi / sqrt(P)``:
    ``F = 16 P (d a)^2 + 4 P (<G^dag G>_psi - <G^dag>_psi <G>_psi)``.
    ``d a = dP / (2P)`` uses ``d Psi = i G Psi``, so no numerical derivative
    enters the value; ``check`` only verifies that the evolution family is
    generated by ``G``.
    """
    if check:
        ctx.check_consistency(theta)
    G = ctx.generator
    Psi = ctx.evolution(theta) @ ctx.psi0
    P = float(np.vdot(Psi, Psi).real)
    if not P > 0:
        raise InconsistentContext(f"evolved state vanishes at theta={theta!r}")
    dPsi = 1j * (G @ Psi)
    dalpha = float(np.vdot(Psi, dPsi).real) / P
    psi = Psi / math.sqrt(P)
    Gpsi = G @ psi
    var = float(np.vdot(Gpsi, Gpsi).real - abs(np.vdot(psi, Gpsi)) ** 2)
    return _report(16.0 * P * dalpha ** 2, 4.0 * P * var, Method.GENERATOR, P)


# --------------------------------------------------------------------------
# mixed states


def _mixed_sums(p, dp, dalpha, e2a, overlaps, method, norm_var):
    """Assemble the four mixed-state sums.

    ``overlaps[k, l] = |<d k|l>|^2`` between support vectors and
    ``norm_var[k] = <d k|d k> - |<d k|k>|^2``.
    """
    classical = e2a * float(np.sum(dp ** 2 / p))
    pure_like = 4.0 * e2a * float(np.sum(p * norm_var))
    coherence = 0.0
    M = p.size
    for k in range(M):
        for l in range(M):
            if k != l and p[k] + p[l] >= 1e-12:
                coherence += 8.0 * e2a * p[k] * p[l] / (p[k] + p[l]) * overlaps[k, l]
    alpha_part = float(np.sum(16.0 * p * e2a * dalpha ** 2 + 8.0 * e2a * dp * dalpha))
    return _report(alpha_part, classical + pure_like - coherence, method, e2a, classical)


def _match(center: MixedState, vecs: np.ndarray, vals: np.ndarray, theta: float):
    """Pair each support vector of ``center`` with its best-overlapping eigenvector."""
    ov = np.abs(dag(vecs) @ center.basis) ** 2
    picks = np.argmax(ov, axis=0)
    if len(set(picks.tolist())) != picks.size or np.any(ov[picks, range(picks.size)] < 0.5):
        raise DegenerateSpectrum(f"eigenvectors cannot be tracked across the stencil at theta={theta!r}")
    out = np.empty_like(center.basis)
    for k, j in enumerate(picks):
        out[:, k] = align_phase(vecs[:, j], center.basis[:, k])
    return vals[picks], out


def qfi_mixed_nonhermitian(rho_family: ParameterizedFamily, theta: float, h: float | None = None,
                           rank_tol: float = RANK_TOL) -> QfiReport:
    """Mixed-state QFI of ``rho(theta) = e^{2a} sum_k p_k |k><k|`` by differencing.

    Eigenvectors at the stencil points are matched to the central ones by
    maximal overlap and phase-aligned before differencing.  The population
    term is ``e^{2a} sum_k (d p_k)^2 / p_k``.
    """
    cfg = _cfg(h)
    step = cfg.step(theta)
    center = spectral_decompose(rho_family(theta), rank_tol)
    p = center.probs
    pts = {0: (p, center.basis, center.alpha)}
    for j in stencil_offsets(cfg.richardson_levels)[1:]:
        rho = as_matrix(rho_family(theta + j * step))
        trace = float(np.trace(rho).real)
        if not trace > 0:
            raise DegenerateSpectrum(f"trace vanishes near theta={theta!r}")
        vals, vecs = np.linalg.eigh(0.5 * (rho + dag(rho)) / trace)
        pj, vj = _match(center, vecs, vals, theta)
        pts[j] = (pj, vj, 0.5 * math.log(trace))

    deg = [(k, l) for k in range(p.size) for l in range(k + 1, p.size) if abs(p[k] - p[l]) < DEGENERACY_TOL]
    if deg:
        for j, (_, vj, _) in pts.items():
            if np.min(np.abs(np.sum(vj.conj() * center.basis, axis=0))) < 1 - 1e-6:
                raise DegenerateSpectrum(f"degenerate probabilities move inside the stencil at theta={theta!r}")

    dp = richardson(lambda j: pts[j][0], step, cfg.richardson_levels)
    dvec = richardson(lambda j: pts[j][1], step, cfg.richardson_levels)
    dalpha = float(richardson(lambda j: pts[j][2], step, cfg.richardson_levels))
    gram = dag(dvec) @ center.basis  # [k, l] = <d k|l>
    norm_var = np.sum(np.abs(dvec) ** 2, axis=0) - np.abs(np.diag(gram)) ** 2
    return _mixed_sums(p, dp, dalpha, math.exp(2 * center.alpha), np.abs(gram) ** 2,
                       Method.MIXED_NH, norm_var)


def qfi_mixed_generator(rho0: MixedState | np.ndarray, ctx: GeneratorContext, theta: float,
                        rank_tol: float = RANK_TOL, check: bool = True) -> QfiReport:
    """Generator form of the mixed-state QFI for ``rho = U rho0 U^dag``.

    The evolved matrix is re-diagonalized and its derivative
    ``i G rho - i rho G^dag`` is taken from the generator, so eigenvector
    derivatives follow from first-order perturbation theory,
    ``<l|d k> = <l|d rho_n|k> / (p_k - p_l)``.  For a Hermitian generator the
    populations are conserved, the eigenvectors are ``U|k0>`` and
    ``<l|d k> = i <l|G|k>``, which is the familiar variance/coherence form.
    """
    if not isinstance(rho0, MixedState):
        rho0 = spectral_decompose(rho0, rank_tol)
    if check:
        ctx.check_consistency(theta)
    G = ctx.generator
    U = ctx.evolution(theta)
    rho = U @ rho0.density() @ dag(U)
    drho = 1j * (G @ rho - rho @ dag(G))
    tau = float(np.trace(rho).real)
    dtau = float(np.trace(drho).real)
    rho_n = rho / tau
    drho_n = drho / tau - rho * dtau / tau ** 2
    vals, vecs = np.linalg.eigh(0.5 * (rho_n + dag(rho_n)))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    M = int(np.sum(vals > rank_tol))
    p = vals[:M] / vals[:M].sum()
    D = dag(vecs) @ drho_n @ vecs
    dp = np.real(np.diag(D))[:M]

    N = vals.size
    amp = np.zeros((N, M), dtype=complex)  # amp[l, k] = <l|d k>
    for k in range(M):
        for l in range(N):
            if l == k:
                continue
            gap = p[k] - (p[l] if l < M else 0.0)
            if abs(gap) < DEGENERACY_TOL:
                if abs(D[l, k]) > 1e-10:
                    raise DegenerateSpectrum(f"degenerate populations split at theta={theta!r}")
                continue
            amp[l, k] = D[l, k] / gap
    norm_var = np.sum(np.abs(amp) ** 2, axis=0)
    overlaps = np.abs(amp[:M, :]).T ** 2  # [k, l] = |<l|d k>|^2
    return _mixed_sums(p, dp, dtau / (2 * tau), tau, overlaps, Method.MIXED_GENERATOR, norm_var)


# --------------------------------------------------------------------------
# uncertainty relations


def robertson_schrodinger_slack(A, B, psi) -> float:
    """LHS minus RHS of the Robertson-Schrodinger inequality for non-Hermitian ``A, B``.

    LHS is ``<dA^dag dA><dB^dag dB>``; RHS is the squared symmetric part plus
    the squared modulus of the antisymmetric part of ``<A^dag B>`` minus the
    product of means.
    """
    A, B = as_matrix(A), as_matrix(B)
    psi = as_vector(psi)
    require_unit(psi, 1e-10, "psi")
    a, b = expect(A, psi), expect(B, psi)
    var_a = expect(dag(A) @ A, psi).real - abs(a) ** 2
    var_b = expect(dag(B) @ B, psi).real - abs(b) ** 2
    ab, ba = expect(dag(A) @ B, psi), expect(dag(B) @ A, psi)
    sym = ((ab + ba) / 2 - (np.conj(a) * b + a * np.conj(b)) / 2).real
    anti = (ab - ba) / 2 - (np.conj(a) * b - a * np.conj(b)) / 2
    return float(var_a * var_b - sym ** 2 - abs(anti) ** 2)


def cramer_rao_bound(report: QfiReport | float) -> float:
    """Variance lower bound ``1/F``."""
    F = report.value if isinstance(report, QfiReport) else float(report)
    if not F > 0:
        raise UnboundedVariance(f"QFI {F!r} gives no finite variance bound")
    return 1.0 / F
