"""Error-correction verifiers: Knill-Laflamme conditions, fixed-ancilla
(generalized operator) codes, and the five-qubit repetition example.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import QuantumChannel, X, apply, check_density, cnot
from .linops import (
    TOL,
    DimensionError,
    as_matrix,
    dag,
    eig_hermitian,
    is_projection,
    partial_trace,
    tensor,
    trace_norm,
)
from .privacy import is_private_subsystem
from .subsystems import SubsystemDecomposition, embed, generalized_conjugate

EIG_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class KLCertificate:
    """``c[i, j]`` are the scalars of ``P K_i^dagger K_j P = c_ij P``.

    For the subsystem form ``c`` has shape ``(k, k, r, r)`` and holds the
    ancilla factors ``g_ij`` of ``g_ij (x) I_B``.
    """

    c: np.ndarray
    residual: float
    tol: float = TOL

    @property
    def valid(self) -> bool:
        return self.residual < self.tol


def _kraus_list(kraus) -> list[np.ndarray]:
    if isinstance(kraus, QuantumChannel):
        return list(kraus.kraus)
    mats = [as_matrix(k, "kraus") for k in kraus]
    if not mats:
        raise ValueError("empty Kraus family")
    return mats


def kl_check(kraus, p, tol: float = TOL) -> KLCertificate:
    """Scalar Knill-Laflamme test, residual measured in Frobenius norm."""
    ks = _kraus_list(kraus)
    p = as_matrix(p, "P")
    if not is_projection(p, tol):
        raise ValueError("kl_check: P is not a projection")
    if p.shape[0] != ks[0].shape[1]:
        raise DimensionError(f"P acts on {p.shape[0]}, Kraus operators on {ks[0].shape[1]}")
    rank = np.trace(p).real
    kp = np.stack([k @ p for k in ks])
    blocks = np.einsum("iab,jac->ijbc", kp.conj(), kp)  # P K_i^dag K_j P
    c = np.einsum("ijbb->ij", blocks) / rank
    residual = float(np.max(np.linalg.norm(blocks - c[:, :, None, None] * p, axis=(2, 3))))
    return KLCertificate(c, residual, tol)


def subsystem_kl_check(kraus, decomp: SubsystemDecomposition, a_projector=None, tol: float = TOL) -> KLCertificate:
    """Subsystem form ``P K_i^dagger K_j P = W (g_ij (x) I_B) W^dagger`` on
    the code ``W (P_A (x) I_B) W^dagger``."""
    ks = _kraus_list(kraus)
    pa = np.eye(decomp.d_A) if a_projector is None else as_matrix(a_projector, "a_projector")
    if not is_projection(pa, tol):
        raise ValueError("subsystem_kl_check: ancilla projector is not a projection")
    spec = eig_hermitian(pa, tol)
    basis_a = spec.eigenvectors[:, spec.eigenvalues > 0.5]
    r = basis_a.shape[1]
    w = decomp.embed @ np.kron(basis_a, np.eye(decomp.d_B))
    kw = np.stack([k @ w for k in ks])
    blocks = np.einsum("iab,jac->ijbc", kw.conj(), kw)
    n = len(ks)
    b5 = blocks.reshape(n, n, r, decomp.d_B, r, decomp.d_B)
    g = np.einsum("ijaxbx->ijab", b5) / decomp.d_B
    target = np.einsum("ijab,xy->ijaxby", g, np.eye(decomp.d_B)).reshape(blocks.shape)
    residual = float(np.max(np.linalg.norm(blocks - target, axis=(2, 3))))
    return KLCertificate(g, residual, tol)


def standard_recovery(kraus, p, tol: float = TOL) -> QuantumChannel:
    """Measurement-based recovery for a code passing :func:`kl_check`.

    Diagonalise ``c``, rotate the errors to ``F_k`` with orthogonal
    syndromes, undo each with ``P F_k^dagger / sqrt(d_k)``, and send the
    unreachable part of the output to the first code vector.
    """
    cert = kl_check(kraus, p, tol)
    if not cert.valid:
        raise ValueError(f"code does not satisfy the Knill-Laflamme conditions (residual {cert.residual:.2e})")
    ks = _kraus_list(kraus)
    p = as_matrix(p)
    spec = eig_hermitian(cert.c, tol)
    rec = []
    reach = np.zeros((ks[0].shape[0],) * 2, dtype=np.complex128)
    for d_k, u in zip(spec.eigenvalues, spec.eigenvectors.T):
        if d_k <= EIG_FLOOR:
            continue
        f = sum(ui * k for ui, k in zip(u, ks))
        rec.append(p @ dag(f) / np.sqrt(d_k))
        reach += f @ p @ dag(f) / d_k
    code = eig_hermitian(p, tol)
    c0 = code.eigenvectors[:, [0]]
    rest = eig_hermitian(np.eye(reach.shape[0]) - reach, 1e-6)
    for val, v in zip(rest.eigenvalues, rest.eigenvectors.T):
        if val > 0.5:
            rec.append(c0 @ v.conj().reshape(1, -1))
    return QuantumChannel(rec)


@dataclass(frozen=True, eq=False)
class GenOqecReport:
    sigma_a: np.ndarray
    recovery: QuantumChannel = field(repr=False)
    max_deviation: float
    tau_a: np.ndarray
    unit_deviations: np.ndarray = field(repr=False)
    tol: float = TOL

    @property
    def valid(self) -> bool:
        return self.max_deviation < self.tol


def genoqecc_verify(
    e: QuantumChannel, r: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, tol: float = TOL
) -> GenOqecReport:
    """Check ``R o E (sigma_A (x) E_ij) = tau_A (x) E_ij`` on every matrix unit.

    Both sides live in ``S`` through the decomposition embedding;
    ``tau_A`` is read off from the ``|0><0|_B`` image.
    """
    if e.dim_in != decomp.d_S or r.dim_in != e.dim_out or r.dim_out != decomp.d_S:
        raise DimensionError("E, R and the decomposition do not chain on the same space")
    sigma_a = check_density(sigma_a, "sigma_a", tol)
    if sigma_a.shape[0] != decomp.d_A:
        raise DimensionError("sigma_a does not match the decomposition")
    d_b = decomp.d_B
    w = decomp.embed
    e00 = np.zeros((d_b, d_b))
    e00[0, 0] = 1.0
    out00 = apply(r, apply(e, embed(decomp, sigma_a, e00)))
    tau = partial_trace(dag(w) @ out00 @ w, [decomp.d_A, d_b], [0])
    dev = np.zeros((d_b, d_b))
    for i in range(d_b):
        for j in range(d_b):
            unit = np.zeros((d_b, d_b))
            unit[i, j] = 1.0
            out = apply(r, apply(e, embed(decomp, sigma_a, unit)))
            dev[i, j] = trace_norm(out - embed(decomp, tau, unit))
    return GenOqecReport(sigma_a, r, float(dev.max()), tau, dev, tol)


def theorem3_extract(
    e: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, r: QuantumChannel, tol: float = TOL
) -> list[KLCertificate]:
    """One scalar KL certificate per eigenvector ``|a_k>`` of ``sigma_A``,
    for the subspace code ``|a_k> (x) B``."""
    rep = genoqecc_verify(e, r, decomp, sigma_a, tol)
    if not rep.valid:
        raise ValueError(f"precondition failed: not a fixed-ancilla code (deviation {rep.max_deviation:.2e})")
    spec = eig_hermitian(rep.sigma_a, tol)
    certs = []
    for val, vec in zip(spec.eigenvalues, spec.eigenvectors.T):
        if val <= EIG_FLOOR:
            continue
        pa = np.outer(vec, vec.conj())
        certs.append(kl_check(e, decomp.projector(pa), tol))
    return certs


def generalized_conjugate_correctability(
    ch: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, tol: float = TOL
) -> KLCertificate:
    if not is_private_subsystem(ch, decomp, sigma_a, tol).valid:
        raise ValueError("precondition failed: subsystem is not private for the channel")
    gc = generalized_conjugate(ch, decomp, sigma_a, tol)
    return kl_check(gc, np.eye(decomp.d_B), tol)


# ---------------------------------------------------------------------------
# five-qubit repetition example: four ancilla qubits, then the data qubit

REP5_QUBITS = 5


def _x_on(qubit: int, n: int = REP5_QUBITS) -> np.ndarray:
    ops = [np.eye(2)] * n
    ops[qubit - 1] = X
    return tensor(*ops)


def rep5_encoder() -> np.ndarray:
    """CNOT from the data qubit (wire 5) onto each ancilla wire 1..4."""
    u = np.eye(2 ** REP5_QUBITS, dtype=np.complex128)
    for t in range(1, REP5_QUBITS):
        u = cnot(REP5_QUBITS, t, REP5_QUBITS) @ u
    return u


def rep5_decomposition() -> SubsystemDecomposition:
    return SubsystemDecomposition(16, 2, rep5_encoder())


def rep5_ancilla(p: float) -> np.ndarray:
    """``(1-4p)|0000><0000| + p * sum over weight-one basis states``."""
    if not 0.0 <= p <= 0.25:
        raise ValueError("p must lie in [0, 1/4]")
    diag = np.zeros(16)
    diag[0] = 1 - 4 * p
    for q in range(4):
        diag[1 << q] = p
    return np.diag(diag).astype(np.complex128)


def rep5_error_map(eps: Sequence[float], tol: float = TOL) -> QuantumChannel:
    """Kraus ``sqrt(eps_0) I, sqrt(eps_i) X_i`` for wires ``i = 1..5``."""
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (REP5_QUBITS + 1,):
        raise ValueError("need six error weights")
    if np.any(eps < -tol) or abs(eps.sum() - 1) > tol:
        raise ValueError("error weights must be nonnegative and sum to 1")
    eps = np.clip(eps, 0.0, None)
    ops = [np.eye(32)] + [_x_on(q) for q in range(1, REP5_QUBITS + 1)]
    return QuantumChannel([np.sqrt(w) * o for w, o in zip(eps, ops)])


def rep5_recovery() -> QuantumChannel:
    """Weight check followed by re-encoding with the ancilla reset to ``|0000>``.

    The check distinguishes each string ``y`` of weight at most two from
    its complement ``~y`` and nothing else, so coherence between the two
    branches survives: ``R_y = |00000><y| + |11111><~y|``.
    """
    n = REP5_QUBITS
    full = 2 ** n - 1
    zero = np.zeros((32, 1))
    zero[0] = 1
    ones = np.zeros((32, 1))
    ones[full] = 1
    kraus = []
    for y in range(2 ** n):
        if bin(y).count("1") <= 2:
            bra_y = np.zeros((1, 32))
            bra_y[0, y] = 1
            bra_c = np.zeros((1, 32))
            bra_c[0, full ^ y] = 1
            kraus.append(zero @ bra_y + ones @ bra_c)
    return QuantumChannel(kraus)


def rep5_failure_output(eps: Sequence[float]) -> np.ndarray:
    """The two-branch output for ancilla ``|1100>`` and data ``|0>``:
    errors on wires 0-2 decode to ``|0>``, errors on wires 3-5 to ``|1>``,
    with the ancilla reset in both branches."""
    eps = np.asarray(eps, dtype=float)
    tau = np.zeros((16, 16))
    tau[0, 0] = 1
    good = eps[0] + eps[1] + eps[2]
    bad = eps[3] + eps[4] + eps[5]
    return good * np.kron(tau, np.diag([1.0, 0.0])) + bad * np.kron(tau, np.diag([0.0, 1.0]))


__all__ = [
    "KLCertificate",
    "GenOqecReport",
    "kl_check",
    "subsystem_kl_check",
    "standard_recovery",
    "genoqecc_verify",
    "theorem3_extract",
    "generalized_conjugate_correctability",
    "rep5_encoder",
    "rep5_decomposition",
    "rep5_ancilla",
    "rep5_error_map",
    "rep5_recovery",
    "rep5_failure_output",
]
