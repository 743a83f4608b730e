import math

import numpy as np
import pytest

from qwalk import CoinSpec, FourierSymbol, WalkState, evolve, grover_coefficients, make_initial, rescaled_sum
from qwalk.limit_laws import PAIRS
from qwalk.spectral import (
    band_csv,
    band_decomposition,
    cross_term_magnitude,
    delta_integrals,
    flat_band_vector,
    flat_band_weight,
    k_nodes,
    k_space_propagate,
    plancherel_norm,
    two_state_eigenvalues,
    two_state_eigenvectors,
    two_state_velocity,
    velocity_by_finite_difference,
)

from conftest import SPINOR_2, SPINOR_3, random_spinor

TWO_STATE = [CoinSpec(kind, th) for kind in ("A", "B") for th in (math.pi / 6, math.pi / 4, 2.2, 4.0)]
ALL_COINS = TWO_STATE + [CoinSpec.grover()]
KS = np.linspace(-math.pi, math.pi, 37, endpoint=False)


def coin_id(c):
    return c.kind if c.theta is None else f"{c.kind}-{c.theta:.3f}"


@pytest.mark.parametrize("coin", ALL_COINS, ids=coin_id)
def test_symbol_unitary(coin):
    mats = FourierSymbol(coin).matrix(KS)
    eye = np.eye(coin.dim)
    prod = mats @ np.conj(np.swapaxes(mats, -1, -2))
    assert np.max(np.abs(prod - eye)) <= 1e-13


@pytest.mark.parametrize("coin", ALL_COINS, ids=coin_id)
def test_eigensystem(coin):
    sym = FourierSymbol(coin)
    for k in KS:
        pairs = sym.eigensystem(k)
        assert len(pairs) == coin.dim
        mat = sym.matrix(k)
        vecs = np.array([v for _, v in pairs]).T
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(coin.dim))) <= 1e-12
        for lam, v in pairs:
            assert abs(abs(lam) - 1) <= 1e-13
            assert np.max(np.abs(mat @ v - lam * v)) <= 1e-12


def test_family_a_at_zero(hadamard):
    sym = FourierSymbol(hadamard)
    lams = sym.eigenvalues(0.0)
    np.testing.assert_allclose(sorted(lams.real), [-1, 1], atol=1e-15)
    hs = sorted(sym.velocity(0.0, j) for j in (1, 2))
    np.testing.assert_allclose(hs, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


def test_grover_flat_band():
    sym = FourierSymbol(CoinSpec.grover())
    for k in KS:
        v = flat_band_vector(k)
        assert abs(np.linalg.norm(v) - 1) <= 1e-15
        assert np.max(np.abs(sym.matrix(k) @ v - v)) <= 1e-12
        lam0, v0 = sym.eigensystem(k)[0]
        assert lam0 == 1
        direction = np.array([1, (1 + np.exp(-1j * k)) / 2, np.exp(-1j * k)])
        assert abs(abs(np.vdot(direction / np.linalg.norm(direction), v0)) - 1) <= 1e-14


def test_projectors_are_phase_invariant():
    rng = np.random.default_rng(0)
    for coin in (TWO_STATE[0], CoinSpec.grover()):
        sym = FourierSymbol(coin)
        for k in (0.37, -1.9):
            lams, vecs = np.linalg.eig(sym.matrix(k))
            for lam, v in sym.eigensystem(k):
                i = np.argmin(np.abs(lams - lam))
                w = vecs[:, i] / np.linalg.norm(vecs[:, i]) * np.exp(1j * rng.uniform(0, 2 * math.pi))
                np.testing.assert_allclose(np.outer(v, v.conj()), np.outer(w, w.conj()), atol=1e-12)


@pytest.mark.parametrize("coin", TWO_STATE, ids=coin_id)
def test_two_state_velocity_range(coin):
    ks = k_nodes(1000)
    h = two_state_velocity(coin, ks)
    assert np.all(np.isreal(h))
    assert np.max(np.abs(h)) <= abs(coin.c) + 1e-15


@pytest.mark.parametrize("coin", TWO_STATE, ids=coin_id)
def test_velocity_finite_differences(coin):
    ks = np.arange(-math.pi, math.pi, 1e-4)
    for band in (1, 2):
        fd = velocity_by_finite_difference(coin, ks, band)
        exact = two_state_velocity(coin, ks)[:, band - 1]
        assert np.max(np.abs(fd - exact)) <= 1e-6


@pytest.mark.parametrize("coin", TWO_STATE, ids=coin_id)
def test_kernel_identity(coin):
    # <v_j|J+|v_j> = det(U) (s/c) h_j for both bands
    ks = k_nodes(513)
    vecs = two_state_eigenvectors(coin, ks)
    h = two_state_velocity(coin, ks)
    jplus = 2 * (vecs[:, :, 0].conj() * vecs[:, :, 1]).real
    assert np.max(np.abs(jplus - coin.det * coin.s / coin.c * h)) <= 1e-10


def test_grover_velocity():
    sym = FourierSymbol(CoinSpec.grover())
    for k in (0.2, 0.9, 1.7, 2.6, -0.4, -2.9):
        u = -(2 + math.cos(k)) / 3
        expected = math.sin(k) / (3 * math.sqrt(1 - u * u))
        assert sym.velocity(k, 0) == 0.0
        assert sym.velocity(k, 1) == pytest.approx(expected, abs=1e-7)
        assert sym.velocity(k, 2) == pytest.approx(-expected, abs=1e-7)
        for band in (1, 2):
            assert abs(sym.velocity(k, band)) <= 1 / math.sqrt(3) + 1e-9


def test_k_space_t0_and_t2(hadamard):
    sym = FourierSymbol(hadamard)
    s0 = make_initial(2, 0, [1, 0])
    np.testing.assert_allclose(k_space_propagate(s0, sym, 0).amps, s0.amps, atol=1e-15)
    s2 = k_space_propagate(s0, sym, 2)
    assert s2.t == 2 and s2.offset == -2
    np.testing.assert_allclose(s2.amplitude(-2), [0.5, 0], atol=1e-14)
    np.testing.assert_allclose(s2.amplitude(0), [0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(s2.amplitude(2), [0, -0.5], atol=1e-14)


@pytest.mark.parametrize("coin", ALL_COINS, ids=coin_id)
def test_oracle_equivalence(coin):
    rng = np.random.default_rng(3)
    sym = FourierSymbol(coin)
    d = coin.dim
    spread = WalkState(d, 0, -1, rng.normal(size=(3, d)) + 1j * rng.normal(size=(3, d)))
    for init in (make_initial(d, 0, random_spinor(rng, d)), spread):
        direct = init
        for t in range(33):
            via_k = k_space_propagate(init, sym, t)
            assert via_k.offset == direct.offset
            assert np.max(np.abs(via_k.amps - direct.amps)) <= 1e-8
            direct = evolve(direct, coin, 1)


def test_k_space_refuses_aliasing(hadamard):
    s0 = make_initial(2, 0, SPINOR_2)
    with pytest.raises(ValueError):
        k_space_propagate(s0, FourierSymbol(hadamard), 10, n_nodes=20)


def test_plancherel():
    rng = np.random.default_rng(8)
    for coin in (TWO_STATE[1], CoinSpec.grover()):
        state = evolve(make_initial(coin.dim, 0, random_spinor(rng, coin.dim)), coin, 300)
        assert plancherel_norm(state) == pytest.approx(state.norm_squared(), abs=1e-10)


def test_delta_closed_forms_reference_spinor():
    init = make_initial(3, 0, SPINOR_3)
    k = grover_coefficients(*SPINOR_3)
    for pair in PAIRS:
        assert abs(delta_integrals(init, "R", *pair) - k.delta_r[pair]) <= 1e-8
        assert abs(delta_integrals(init, "I", *pair) - k.delta_i[pair]) <= 1e-8
    assert delta_integrals(init, "I", 0, 1) == pytest.approx(2 - 5 * math.sqrt(6) / 6, abs=1e-8)


def test_delta_identity_form():
    init = make_initial(3, 0, SPINOR_3)
    weight = flat_band_weight(init)
    plain = delta_integrals(init, "R", 0, 2)
    assert delta_integrals(init, "R", 0, 2, identity_form=True) == pytest.approx(plain - weight / 4, abs=1e-12)
    assert delta_integrals(init, "R", 0, 1, identity_form=True) == delta_integrals(init, "R", 0, 1)


def test_delta_real_init():
    init = make_initial(3, 0, [1, 0, 0])
    for pair in PAIRS:
        assert abs(delta_integrals(init, "I", *pair)) <= 1e-12


def test_delta_symmetry_random():
    rng = np.random.default_rng(10)
    for _ in range(10):
        spinor = random_spinor(rng, 3)
        init = make_initial(3, 0, spinor)
        k = grover_coefficients(*spinor)
        for which in ("R", "I"):
            assert abs(delta_integrals(init, which, 0, 1) - delta_integrals(init, which, 1, 2)) <= 1e-10
        for pair in PAIRS:
            assert abs(delta_integrals(init, "R", *pair) - k.delta_r[pair]) <= 1e-8


def test_delta_argument_checks(hadamard):
    with pytest.raises(ValueError):
        delta_integrals(make_initial(2, 0, SPINOR_2), "R", 0, 1)
    init = make_initial(3, 0, SPINOR_3)
    with pytest.raises(ValueError):
        delta_integrals(init, "R", 1, 0)
    with pytest.raises(ValueError):
        delta_integrals(init, "X", 0, 1)


def test_band_split_reassembles_exact_sum(hadamard):
    sym = FourierSymbol(hadamard)
    s0 = make_initial(2, 0, SPINOR_2)
    diag0, mix0 = band_decomposition(s0, sym, 0, 0, 0, 1)
    assert diag0 + mix0 == pytest.approx(rescaled_sum(s0, 0, 0, 1), abs=1e-12)
    assert cross_term_magnitude(s0, sym, 0, 0, 0, 1) == pytest.approx(abs(mix0), abs=1e-15)
    for t in (1, 10, 125, 400):
        diag, mix = band_decomposition(s0, sym, t, 0, 0, 1)
        assert diag == pytest.approx(diag0, abs=1e-12)
        assert diag + mix == pytest.approx(rescaled_sum(evolve(s0, hadamard, t), 0, 0, 1), abs=1e-10)


def test_cross_term_decays(hadamard):
    sym = FourierSymbol(hadamard)
    s0 = make_initial(2, 0, SPINOR_2)
    mags = [cross_term_magnitude(s0, sym, t, 0, 0, 1) for t in (125, 250, 500, 1000)]
    assert all(b <= a for a, b in zip(mags, mags[1:]))
    assert mags[-1] < 1e-4


def test_band_csv():
    lines = band_csv(FourierSymbol(CoinSpec.family_b(1.0)), 8).splitlines()
    assert lines[0] == "k,re_lambda_1,im_lambda_1,h_1,re_lambda_2,im_lambda_2,h_2"
    assert len(lines) == 9
    head = band_csv(FourierSymbol(CoinSpec.grover()), 4).splitlines()[0]
    assert head.startswith("k,re_lambda_0,im_lambda_0,h_0,")
