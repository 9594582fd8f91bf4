"""Subsystem decompositions, dilations and complementary channels.

Ordering conventions used throughout:

* a decomposition embeds ``A (x) B`` into ``S`` with ``A`` the more
  significant factor;
* Stinespring isometries map ``S_in -> S_out (x) E`` with the environment
  last and the environment basis indexed by Kraus position;
* the generalized conjugate channel outputs on ``M (x) K`` (mixing ancilla
  first).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    I2,
    QuantumChannel,
    check_density,
    cnot,
    k_gate,
    validate_cptp,
)
from .linops import (
    TOL,
    DimensionError,
    as_matrix,
    complete_to_unitary,
    dag,
    eig_hermitian,
    is_isometry,
    is_unitary,
    partial_trace,
    tensor,
)

RANK_PRUNE = 1e-10


@dataclass(frozen=True, eq=False)
class SubsystemDecomposition:
    d_A: int
    d_B: int
    embed: np.ndarray

    def __post_init__(self):
        w = as_matrix(self.embed, "embed")
        if w.shape[1] != self.d_A * self.d_B:
            raise DimensionError(f"embed has {w.shape[1]} columns, expected d_A*d_B = {self.d_A * self.d_B}")
        if w.shape[0] < w.shape[1]:
            raise DimensionError("embed must map into a space at least as large as A (x) B")
        if not is_isometry(w):
            raise ValueError("embed is not an isometry")
        w.setflags(write=False)
        object.__setattr__(self, "embed", w)

    @property
    def d_S(self) -> int:
        return self.embed.shape[0]

    @classmethod
    def computational(cls, d_A: int, d_B: int, d_S: int | None = None) -> "SubsystemDecomposition":
        d_S = d_S or d_A * d_B
        w = np.eye(d_S, d_A * d_B, dtype=np.complex128)
        return cls(d_A, d_B, w)

    @classmethod
    def subspace(cls, isometry) -> "SubsystemDecomposition":
        w = as_matrix(isometry, "isometry")
        return cls(1, w.shape[1], w)

    def projector(self, a_projector=None) -> np.ndarray:
        """Projector on ``S`` onto ``W (P_A (x) I_B) W^dagger`` (``P_A = I`` by default)."""
        pa = np.eye(self.d_A) if a_projector is None else as_matrix(a_projector)
        w = self.embed
        return w @ np.kron(pa, np.eye(self.d_B)) @ dag(w)


@dataclass(frozen=True, eq=False)
class MixingExtension:
    """Purification of a mixed ancilla state through a controlled unitary.

    ``u_ma`` acts on ``M (x) A`` as ``sum_i |i><i| (x) U_i`` with
    ``U_i |phi> = |psi_i>``, and ``theta = sum_i sqrt(p_i) |i>``.
    """

    d_M: int
    theta: np.ndarray
    phi: np.ndarray
    u_ma: np.ndarray
    probs: np.ndarray
    states: np.ndarray

    @property
    def d_A(self) -> int:
        return self.phi.shape[0]

    def purified(self) -> np.ndarray:
        """The vector ``U_MA (|theta> (x) |phi>)`` on ``M (x) A``."""
        return self.u_ma @ np.kron(self.theta, self.phi)

    def reduced_state(self) -> np.ndarray:
        v = self.purified().reshape(-1, 1)
        return partial_trace(v @ dag(v), [self.d_M, self.d_A], keep=[1])


def embed(decomp: SubsystemDecomposition, sigma_a, sigma_b) -> np.ndarray:
    """``W (sigma_a (x) sigma_b) W^dagger``; any operators, not only states."""
    a, b = as_matrix(sigma_a, "sigma_a"), as_matrix(sigma_b, "sigma_b")
    if a.shape != (decomp.d_A, decomp.d_A) or b.shape != (decomp.d_B, decomp.d_B):
        raise DimensionError(
            f"operators of shape {a.shape}, {b.shape} do not fit decomposition ({decomp.d_A}, {decomp.d_B})"
        )
    w = decomp.embed
    return w @ np.kron(a, b) @ dag(w)


def _require_valid(ch: QuantumChannel, tol: float) -> None:
    rep = validate_cptp(ch, tol)
    if not rep.valid:
        raise ValueError(f"invalid channel (tp residual {rep.tp_residual:.2e}, min Choi eig {rep.min_choi_eig:.2e})")


def stinespring(ch: QuantumChannel, tol: float = TOL) -> tuple[np.ndarray, int]:
    """Isometry ``V = sum_j K_j (x) |j>_E`` and the environment dimension."""
    _require_valid(ch, tol)
    k = np.stack(ch.kraus)  # (n, out, in)
    n = k.shape[0]
    v = np.transpose(k, (1, 0, 2)).reshape(ch.dim_out * n, ch.dim_in)
    return v, n


def dilation_unitary(ch: QuantumChannel, tol: float = TOL) -> np.ndarray:
    """Unitary on ``S (x) E`` with ``U (|psi> (x) |0>_E) = V |psi>``.

    Only defined for channels with equal input and output dimension.
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionError("dilation_unitary needs dim_in == dim_out")
    v, d_e = stinespring(ch, tol)
    d = ch.dim_in
    full = complete_to_unitary(v)
    u = np.empty_like(full)
    fixed = [i * d_e for i in range(d)]
    rest = [c for c in range(d * d_e) if c not in set(fixed)]
    u[:, fixed] = full[:, :d]
    u[:, rest] = full[:, d:]
    return u


def complementary(ch: QuantumChannel, tol: float = TOL) -> QuantumChannel:
    """Channel ``S_in -> E`` obtained by tracing out the system.

    Kraus operator ``s`` stacks row ``s`` of every ``K_j``:
    ``A_s[j, :] = K_j[s, :]``.
    """
    _require_valid(ch, tol)
    k = np.stack(ch.kraus)
    return QuantumChannel([k[:, s, :] for s in range(ch.dim_out)])


def mixing_extension(sigma_a, tol: float = TOL) -> MixingExtension:
    sigma_a = check_density(sigma_a, "sigma_a", tol)
    spec = eig_hermitian(sigma_a, tol)
    keep = spec.eigenvalues > RANK_PRUNE
    probs = spec.eigenvalues[keep]
    probs = probs / probs.sum()
    states = spec.eigenvectors[:, keep]
    d_a = sigma_a.shape[0]
    n = len(probs)
    phi = np.zeros(d_a, dtype=np.complex128)
    phi[0] = 1.0
    blocks = [complete_to_unitary(states[:, [i]]) for i in range(n)]
    u_ma = np.zeros((n * d_a, n * d_a), dtype=np.complex128)
    for i, ui in enumerate(blocks):
        u_ma[i * d_a:(i + 1) * d_a, i * d_a:(i + 1) * d_a] = ui
    theta = np.sqrt(probs).astype(np.complex128)
    return MixingExtension(n, theta, phi, u_ma, probs, states)


def generalized_conjugate(
    ch: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, tol: float = TOL
) -> QuantumChannel:
    """Channel ``L(B) -> L(M (x) K)`` keeping the mixing ancilla and environment.

    ``sigma_b`` is fed in alongside the purified ancilla
    ``U_MA |theta>|phi>``, embedded into ``S``, dilated with the
    environment starting in its first basis vector, and the system is
    traced out. Kraus operators are indexed by the traced system basis.
    """
    if ch.dim_in != decomp.d_S:
        raise DimensionError(f"channel acts on {ch.dim_in}, decomposition on {decomp.d_S}")
    ext = mixing_extension(sigma_a, tol)
    if ext.d_A != decomp.d_A:
        raise DimensionError(f"sigma_a has dimension {ext.d_A}, decomposition expects {decomp.d_A}")
    v, d_k = stinespring(ch, tol)
    v = v.reshape(ch.dim_out, d_k, ch.dim_in)
    w = decomp.embed.reshape(decomp.d_S, decomp.d_A, decomp.d_B)
    c = ext.purified().reshape(ext.d_M, decomp.d_A)
    t = np.einsum("skr,rab,ma->mskb", v, w, c)
    return QuantumChannel([t[:, s].reshape(ext.d_M * d_k, decomp.d_B) for s in range(ch.dim_out)])


# ---------------------------------------------------------------------------
# circuits for the two-qubit dephasing example


def _single(gate, qubit: int, n: int) -> np.ndarray:
    ops = [I2] * n
    ops[qubit - 1] = gate
    return tensor(*ops)


def controlled_z(control: int, target: int, n: int) -> np.ndarray:
    d = 2 ** n
    diag = np.ones(d, dtype=np.complex128)
    for x in range(d):
        if (x >> (n - control)) & 1 and (x >> (n - target)) & 1:
            diag[x] = -1.0
    return np.diag(diag)


def controlled_z_dilation(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Unitary on ``n`` system qubits plus ``n`` environment qubits realising
    independent dephasing, and the environment input ``|+>^n``.

    Environment qubit ``q`` controls a ``Z`` on system qubit ``q``.
    """
    u = np.eye(4 ** n, dtype=np.complex128)
    for q in range(1, n + 1):
        u = controlled_z(n + q, q, 2 * n) @ u
    plus = np.ones(2, dtype=np.complex128) / np.sqrt(2)
    return u, tensor(*([plus.reshape(-1, 1)] * n)).reshape(-1)


def dephasing_privacy_circuit() -> np.ndarray:
    """Five-qubit unitary: encode, mix and dephase.

    Wires, most significant first: 1 carries ``sigma_B``, 2 the ancilla
    ``A`` (input ``|0>``), 3 the mixing ancilla (input ``|+>``), 4 and 5
    the dephasing environment (inputs ``|+>``). Gate order: CNOT 3->2,
    CNOT 2->1, CNOT 1->2, K on 2, CZ 4-1, CZ 5-2.
    """
    n = 5
    gates = [
        cnot(3, 2, n),
        cnot(2, 1, n),
        cnot(1, 2, n),
        _single(k_gate(), 2, n),
        controlled_z(4, 1, n),
        controlled_z(5, 2, n),
    ]
    u = np.eye(2 ** n, dtype=np.complex128)
    for g in gates:
        u = g @ u
    return u


def dephasing_privacy_encoding() -> np.ndarray:
    """Isometry ``C^2 -> C^8`` (wires 1, 2, 3) produced by the encoding part
    of :func:`dephasing_privacy_circuit` on ``|b>|0>|+>``."""
    n = 3
    u = _single(k_gate(), 2, n) @ cnot(1, 2, n) @ cnot(2, 1, n) @ cnot(3, 2, n)
    plus = np.ones(2) / np.sqrt(2)
    zero = np.array([1.0, 0.0])
    cols = [u @ np.kron(np.kron(np.eye(2)[b], zero), plus) for b in range(2)]
    return np.stack(cols, axis=1).astype(np.complex128)


def run_circuit(u, rho, dims, keep) -> np.ndarray:
    """``partial_trace(u rho u^dagger, dims, keep)``."""
    u = as_matrix(u, "u")
    if not is_unitary(u):
        raise ValueError("run_circuit: u is not unitary")
    return partial_trace(u @ rho @ dag(u), dims, keep)


__all__ = [
    "SubsystemDecomposition",
    "MixingExtension",
    "embed",
    "stinespring",
    "dilation_unitary",
    "complementary",
    "mixing_extension",
    "generalized_conjugate",
    "controlled_z",
    "controlled_z_dilation",
    "dephasing_privacy_circuit",
    "dephasing_privacy_encoding",
    "run_circuit",
]
