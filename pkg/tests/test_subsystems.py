import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsubsys.channels import (
    apply,
    channels_equal,
    conjugate_by_unitary,
    dephasing_n,
    dephasing_prime,
    encoding_unitary_u,
    identity_channel,
    kraus_equivalence_isometry,
    pure,
    unitary_channel,
    validate_cptp,
)
from qsubsys.linops import DimensionError, is_unitary, partial_trace, tensor
from qsubsys.qec import rep5_ancilla
from qsubsys.subsystems import (
    SubsystemDecomposition,
    complementary,
    controlled_z_dilation,
    dephasing_privacy_circuit,
    dephasing_privacy_encoding,
    dilation_unitary,
    embed,
    generalized_conjugate,
    mixing_extension,
    run_circuit,
    stinespring,
)

import randomgen as rg

seeds = st.integers(0, 2**32 - 1)

A_DISPLAYED = [
    np.array([[1, 0, 0, 0]] * 4),
    np.array([[0, 1, 0, 0], [0, -1, 0, 0], [0, 1, 0, 0], [0, -1, 0, 0]]),
    np.array([[0, 0, 1, 0], [0, 0, 1, 0], [0, 0, -1, 0], [0, 0, -1, 0]]),
    np.array([[0, 0, 0, 1], [0, 0, 0, -1], [0, 0, 0, -1], [0, 0, 0, 1]]),
]
A_DISPLAYED = [a / 2 for a in A_DISPLAYED]

B_DISPLAYED = [
    np.array([[1 - 1j, 0, 0, 1 - 1j], [1 + 1j, 0, 0, 1 + 1j], [1 - 1j, 0, 0, 1 - 1j], [1 + 1j, 0, 0, 1 + 1j]]),
    np.array([[0, 1 - 1j, 1 - 1j, 0], [0, -1 - 1j, -1 - 1j, 0], [0, -1 + 1j, -1 + 1j, 0], [0, 1 + 1j, 1 + 1j, 0]]),
    np.array([[1 - 1j, 0, 0, -1 + 1j], [-1 - 1j, 0, 0, 1 + 1j], [1 - 1j, 0, 0, -1 + 1j], [-1 - 1j, 0, 0, 1 + 1j]]),
    np.array([[0, -1 + 1j, 1 - 1j, 0], [0, -1 - 1j, 1 + 1j, 0], [0, 1 - 1j, -1 + 1j, 0], [0, 1 + 1j, -1 - 1j, 0]]),
]
B_DISPLAYED = [b / 4 for b in B_DISPLAYED]


def test_decomposition_validation():
    with pytest.raises(DimensionError):
        SubsystemDecomposition(2, 2, np.eye(3))
    with pytest.raises(ValueError):
        SubsystemDecomposition(1, 2, np.ones((3, 2)))
    d = SubsystemDecomposition.computational(1, 2, 3)
    assert d.d_S == 3 and np.allclose(d.projector(), np.diag([1, 1, 0]))


def test_embed_examples(rng):
    sb = rg.density(rng, 2)
    assert np.allclose(embed(SubsystemDecomposition.computational(1, 2), np.ones((1, 1)), sb), sb)
    half = np.eye(2) / 2
    assert np.allclose(embed(SubsystemDecomposition.computational(2, 2), half, sb), np.kron(half, sb))
    sa, sb = rg.density(rng, 3, rank=2), rg.density(rng, 2, rank=1)
    out = embed(rg.decomposition(rng, 3, 2, 7), sa, sb)
    assert np.linalg.matrix_rank(out, tol=1e-9) == 2
    assert np.isclose(np.trace(out), 1)
    with pytest.raises(DimensionError):
        embed(SubsystemDecomposition.computational(2, 2), np.eye(3) / 3, sb)


def test_stinespring_examples():
    v, d_e = stinespring(identity_channel(3))
    assert d_e == 1 and np.allclose(v, np.eye(3))
    u = rg.unitary(np.random.default_rng(1), 2)
    v, d_e = stinespring(unitary_channel(u))
    assert d_e == 1 and np.allclose(v, u)
    v, d_e = stinespring(dephasing_n(2))
    assert d_e == 4 and np.allclose(v.conj().T @ v, np.eye(4))


def test_dilation_matches_circuit(rng):
    # Environment qubits controlling Z on each system qubit, started in |+>,
    # realise the same channel as the Kraus family.
    czu, plus = controlled_z_dilation(2)
    rho = rg.density(rng, 4)
    env = np.outer(plus, plus.conj())
    out = partial_trace(czu @ np.kron(rho, env) @ czu.conj().T, [4, 4], [0])
    assert np.allclose(out, apply(dephasing_n(2), rho))
    v, _ = stinespring(dephasing_n(2))
    assert np.allclose(czu @ np.kron(np.eye(4), plus.reshape(-1, 1)), v)


def test_dilation_unitary(rng):
    ch = rg.channel(rng, 3, n_kraus=2)
    u = dilation_unitary(ch)
    v, d_e = stinespring(ch)
    assert is_unitary(u)
    zero = np.zeros((d_e, 1))
    zero[0] = 1
    assert np.allclose(u @ np.kron(np.eye(3), zero), v)


def test_complementary_of_dephasing_is_displayed_family():
    comp = complementary(dephasing_n(2))
    for a, expected in zip(comp.kraus, A_DISPLAYED):
        assert np.allclose(a, expected)


def test_conjugated_complementary(rng):
    u = encoding_unitary_u()
    comp_p = conjugate_by_unitary(complementary(dephasing_n(2)), u)
    # the first two agree entrywise, the others up to a sign that the
    # Kraus freedom absorbs
    assert np.allclose(comp_p.kraus[0], B_DISPLAYED[0])
    assert np.allclose(comp_p.kraus[1], B_DISPLAYED[1])
    assert kraus_equivalence_isometry(comp_p.kraus, B_DISPLAYED).valid
    for _ in range(10):
        sb = rg.density(rng, 2)
        assert np.allclose(apply(comp_p, np.kron(np.eye(2) / 2, sb)), np.eye(4) / 4)


def test_complementary_of_unitary_is_constant(rng):
    comp = complementary(unitary_channel(rg.unitary(rng, 3)))
    assert comp.dim_out == 1
    assert np.allclose(apply(comp, rg.density(rng, 3)), [[1]])


def test_complementary_rejects_invalid():
    from qsubsys.channels import QuantumChannel

    with pytest.raises(ValueError):
        complementary(QuantumChannel([2 * np.eye(2)]))


def test_mixing_pure():
    psi = np.array([1, 1j]) / np.sqrt(2)
    ext = mixing_extension(pure(psi))
    assert ext.d_M == 1
    assert np.allclose(ext.purified(), psi)


def test_mixing_half_identity():
    ext = mixing_extension(np.eye(2) / 2)
    assert ext.d_M == 2
    assert np.allclose(ext.theta, np.ones(2) / np.sqrt(2))
    assert np.abs(ext.reduced_state() - np.eye(2) / 2).max() < 1e-12


def test_mixing_rep5_ancilla():
    s = rep5_ancilla(0.1)
    ext = mixing_extension(s)
    assert ext.d_M == 5
    assert np.abs(ext.reduced_state() - s).max() < 1e-9
    assert is_unitary(ext.u_ma)


def test_mixing_invalid():
    with pytest.raises(ValueError):
        mixing_extension(np.diag([1.0, -0.5, 0.5]))


def _gc_by_simulation(ch, d, sigma_a, sigma_b):
    """Independent route: full vector simulation on M (x) S (x) K, then trace S."""
    ext = mixing_extension(sigma_a)
    u_phi = dilation_unitary(ch)
    d_k = len(ch)
    zeta = np.zeros(d_k)
    zeta[0] = 1
    state_ma = np.outer(ext.purified(), ext.purified().conj())
    # place A (x) B in S via the embedding, keep M aside
    w = np.kron(np.eye(ext.d_M), d.embed)
    rho = w @ np.kron(state_ma, sigma_b) @ w.conj().T
    full = tensor(np.eye(ext.d_M), u_phi)
    rho = full @ np.kron(rho, np.outer(zeta, zeta)) @ full.conj().T
    return partial_trace(rho, [ext.d_M, ch.dim_out, d_k], [0, 2])


def test_generalized_conjugate_matches_simulation(rng):
    lam = dephasing_n(2)
    d = SubsystemDecomposition(2, 2, encoding_unitary_u().conj().T)
    gc = generalized_conjugate(lam, d, np.eye(2) / 2)
    assert validate_cptp(gc).valid
    for _ in range(5):
        sb = rg.density(rng, 2)
        assert np.abs(apply(gc, sb) - _gc_by_simulation(lam, d, np.eye(2) / 2, sb)).max() < 1e-9


def test_generalized_conjugate_pure_is_restricted_complementary(rng):
    ch = rg.channel(rng, 4, n_kraus=3)
    d = SubsystemDecomposition.computational(2, 2)
    psi = np.array([1, 0])
    gc = generalized_conjugate(ch, d, pure(psi))
    comp = complementary(ch)
    for _ in range(3):
        sb = rg.density(rng, 2)
        assert np.allclose(apply(gc, sb), apply(comp, np.kron(pure(psi), sb)))


def test_fig1_circuit():
    # wires: data, ancilla |0>, mixing |+>, two environment |+>
    u = dephasing_privacy_circuit()
    plus = np.ones((2, 2)) / 2
    zero = np.diag([1.0, 0.0])
    rng = np.random.default_rng(3)
    lam, enc = dephasing_n(2), dephasing_privacy_encoding()
    for _ in range(5):
        sb = rg.density(rng, 2)
        rho = tensor(sb, zero, plus, plus, plus)
        out = run_circuit(u, rho, [2] * 5, [0, 1])
        # encoding with the mixing wire traced, then the channel
        encoded = partial_trace(enc @ sb @ enc.conj().T, [4, 2], [0])
        assert np.allclose(out, apply(lam, encoded))
        assert np.allclose(out, np.eye(4) / 4)


def test_encoding_states():
    enc = dephasing_privacy_encoding()
    zero_l = np.zeros(8, complex)
    one_l = np.zeros(8, complex)
    for idx, c in ((0b000, 1), (0b010, 1j), (0b101, 1), (0b111, 1j)):
        zero_l[idx] = c / 2
    for idx, c in ((0b100, 1), (0b110, -1j), (0b001, 1), (0b011, -1j)):
        one_l[idx] = c / 2
    assert np.allclose(enc[:, 0], zero_l) and np.allclose(enc[:, 1], one_l)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_stinespring_consistency(seed, d_in, d_out):
    r = np.random.default_rng(seed)
    ch = rg.channel(r, d_in, d_out)
    v, d_e = stinespring(ch)
    rho = rg.density(r, d_in)
    big = v @ rho @ v.conj().T
    assert np.abs(partial_trace(big, [d_out, d_e], [0]) - apply(ch, rho)).max() < 1e-10
    assert np.abs(partial_trace(big, [d_out, d_e], [1]) - apply(complementary(ch), rho)).max() < 1e-10


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 8))
def test_mixing_reconstruction(seed, d):
    r = np.random.default_rng(seed)
    s = rg.density(r, d, rank=int(r.integers(1, d + 1)))
    ext = mixing_extension(s)
    assert np.abs(ext.reduced_state() - s).max() < 1e-9
    assert is_unitary(ext.u_ma)
