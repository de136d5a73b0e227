import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhqfi.errors import InconsistentContext, NonHermitianGenerator, UnboundedVariance
from nhqfi.hilbert import MixedState, ParameterizedFamily, dag
from nhqfi.oracle import expm, qfi_oracle
from nhqfi.qfi import (
    GeneratorContext,
    Method,
    cramer_rao_bound,
    qfi_generator_hermitian,
    qfi_generator_nonhermitian,
    qfi_mixed_generator,
    qfi_mixed_nonhermitian,
    qfi_pure_hermitian,
    qfi_pure_nonhermitian,
    robertson_schrodinger_slack,
)

seeds = st.integers(0, 2 ** 32 - 1)
PT_H = np.array([[0.4j, 1.0], [1.0, -0.4j]])


def rand_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + dag(A)) / 2


def rand_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_phase_qubit_value():
    fam = ParameterizedFamily(lambda t: np.array([np.exp(1j * t), np.exp(-1j * t)]) / math.sqrt(2))
    r = qfi_pure_hermitian(fam, 0.0)
    assert r.value == pytest.approx(4.0, rel=1e-9)
    assert r.method is Method.PURE_HERMITIAN


@given(seeds, st.integers(2, 4))
@settings(max_examples=25, deadline=None)
def test_nonhermitian_reduces_to_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    G, psi0 = rand_hermitian(rng, n), rand_unit(rng, n)
    fam = ParameterizedFamily(lambda t: expm(1j * t * G) @ psi0)
    nh = qfi_pure_nonhermitian(fam, 0.3)
    assert nh.alpha_term == pytest.approx(0.0, abs=1e-8)
    assert nh.value == pytest.approx(qfi_pure_hermitian(fam, 0.3).value, rel=1e-8, abs=1e-10)


@given(seeds, st.integers(2, 4))
@settings(max_examples=25, deadline=None)
def test_generator_hermitian_matches_variance(seed, n):
    rng = np.random.default_rng(seed)
    G, psi0 = rand_hermitian(rng, n), rand_unit(rng, n)
    ctx = GeneratorContext(psi0, G)
    direct = qfi_generator_hermitian(ctx).value
    assert qfi_generator_nonhermitian(ctx, 0.7).value == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_generator_hermitian_rejects_nonhermitian():
    with pytest.raises(NonHermitianGenerator):
        qfi_generator_hermitian(GeneratorContext(np.array([1.0, 0]), PT_H))


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.7])
def test_generator_form_agrees_with_state_form_and_oracle(theta):
    psi0 = np.array([1.0, 0.0])
    ctx = GeneratorContext.from_hamiltonian(PT_H, psi0)
    fam = ParameterizedFamily(lambda t: expm(-1j * t * PT_H) @ psi0)
    gen = qfi_generator_nonhermitian(ctx, theta)
    assert gen.value == pytest.approx(qfi_pure_nonhermitian(fam, theta).value, rel=1e-7)
    assert gen.value == pytest.approx(qfi_oracle(fam, theta), rel=1e-7)
    assert gen.value == pytest.approx(gen.alpha_term + gen.projective_term)


def test_generator_value_at_pt_optimum_candidate():
    # (|e+> - |e->)/norm at theta=0 for s=1, r=0.4: 4 E^2 (1 + sin x)/(1 - sin x) with E^2 = 0.84
    vp = np.array([np.exp(1j * math.asin(0.4) / 2), np.exp(-1j * math.asin(0.4) / 2)]) / math.sqrt(2)
    vm = 1j * np.array([np.exp(-1j * math.asin(0.4) / 2), -np.exp(1j * math.asin(0.4) / 2)]) / math.sqrt(2)
    psi0 = vp - vm
    psi0 /= np.linalg.norm(psi0)
    ctx = GeneratorContext.from_hamiltonian(PT_H, psi0)
    assert qfi_generator_nonhermitian(ctx, 0.0).value == pytest.approx(4 * 0.84 * 1.4 / 0.6, rel=1e-12)


def test_inconsistent_context_detected():
    ctx = GeneratorContext(np.array([1.0, 0.0]), PT_H, ParameterizedFamily(lambda t: expm(2j * t * PT_H)))
    with pytest.raises(InconsistentContext):
        qfi_generator_nonhermitian(ctx, 0.2)


def test_unweighted_value_drops_norm_weight():
    ctx = GeneratorContext.from_hamiltonian(PT_H, np.array([1.0, 0.0]))
    r = qfi_generator_nonhermitian(ctx, 1.0)
    assert r.norm_factor != pytest.approx(1.0)
    assert r.unweighted_value == pytest.approx(r.alpha_term + r.projective_term / r.norm_factor)


def test_mixed_classical_family():
    fam = ParameterizedFamily(lambda t: np.diag([t, 1 - t]))
    r = qfi_mixed_nonhermitian(fam, 0.3)
    assert r.value == pytest.approx(1 / 0.21, rel=1e-8)
    assert r.classical_term == pytest.approx(1 / 0.21, rel=1e-8)


def test_mixed_scaled_classical_family():
    # rho = e^{2a} diag(t, 1-t) with constant a: every term picks up e^{2a}
    fam = ParameterizedFamily(lambda t: 3.0 * np.diag([t, 1 - t]))
    assert qfi_mixed_nonhermitian(fam, 0.3).value == pytest.approx(3 / 0.21, rel=1e-8)
    assert qfi_oracle(fam, 0.3) == pytest.approx(3 / 0.21, rel=1e-8)


@pytest.mark.parametrize("theta", [0.0, 0.5, 1.3])
def test_mixed_rank_one_collapses_to_pure(theta):
    psi0 = np.array([1.0, 0.0])
    ctx = GeneratorContext.from_hamiltonian(PT_H, psi0)
    pure = qfi_generator_nonhermitian(ctx, theta).value
    rho0 = MixedState([1.0], psi0[:, None])
    assert qfi_mixed_generator(rho0, ctx, theta).value == pytest.approx(pure, rel=1e-6)
    fam = ParameterizedFamily(lambda t: np.outer(expm(-1j * t * PT_H) @ psi0, (expm(-1j * t * PT_H) @ psi0).conj()))
    assert qfi_mixed_nonhermitian(fam, theta).value == pytest.approx(pure, rel=1e-6)


@given(seeds, st.floats(0.05, 0.45))
@settings(max_examples=20, deadline=None)
def test_mixed_forms_agree_nonhermitian(seed, p_low):
    rng = np.random.default_rng(seed)
    H = rand_hermitian(rng, 2) + 0.3j * np.diag([1.0, -1.0])
    U0 = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    rho0 = U0 @ np.diag([1 - p_low, p_low]) @ dag(U0)
    ctx = GeneratorContext.from_hamiltonian(H, np.array([1.0, 0.0]))
    fam = ParameterizedFamily(lambda t: expm(-1j * t * H) @ rho0 @ dag(expm(-1j * t * H)))
    t = 0.4
    gen = qfi_mixed_generator(rho0, ctx, t).value
    assert gen == pytest.approx(qfi_mixed_nonhermitian(fam, t).value, rel=1e-6)
    assert gen == pytest.approx(qfi_oracle(fam, t), rel=1e-6)


def test_mixed_hermitian_generator_matches_sld():
    G = np.array([[0.5, 0.2], [0.2, -0.5]], dtype=complex)
    rho0 = np.diag([0.8, 0.2]).astype(complex)
    ctx = GeneratorContext(np.array([1.0, 0.0]), G)
    r = qfi_mixed_generator(rho0, ctx, 0.0)
    # SLD formula for unitary families: 2 sum (p_k - p_l)^2/(p_k + p_l) |G_kl|^2
    sld = 2 * 2 * (0.6 ** 2 / 1.0) * 0.2 ** 2
    assert r.value == pytest.approx(sld, rel=1e-10)
    assert r.alpha_term == pytest.approx(0.0, abs=1e-14)


@given(seeds, st.integers(2, 4))
@settings(max_examples=60)
def test_uncertainty_slack_nonnegative(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert robertson_schrodinger_slack(A, B, rand_unit(rng, n)) >= -1e-10


def test_uncertainty_slack_equal_operators_is_zero():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    psi = rand_unit(rng, 3)
    slack = robertson_schrodinger_slack(A, A, psi)
    assert slack >= -1e-12
    assert slack == pytest.approx(0.0, abs=1e-10)


def test_cramer_rao_bound():
    assert cramer_rao_bound(4.0) == 0.25
    with pytest.raises(UnboundedVariance):
        cramer_rao_bound(0.0)
