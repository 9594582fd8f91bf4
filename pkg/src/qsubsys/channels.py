"""Quantum channels in Kraus form.

A channel is an ordered tuple of Kraus operators. Two channels are equal
when their actions (equivalently their Choi matrices) agree; the Kraus
lists themselves are only one presentation.

Choi convention, unnormalised::

    C = sum_ij |i><j| (x) ch(|i><j|)

so the identity channel on a qubit has Choi eigenvalues {2, 0, 0, 0}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .linops import (
    DIM_CAP,
    TOL,
    DimensionError,
    as_matrix,
    dag,
    eig_hermitian,
    is_hermitian,
    is_unitary,
    tensor,
)

KRAUS_PRUNE = 1e-10

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def pauli(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``pauli("XZ")``."""
    return tensor(*(PAULIS[c] for c in label.upper()))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    kraus: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k, "Kraus operator") for k in self.kraus)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        for k in ops:
            if k.shape != shape:
                raise DimensionError(f"Kraus shapes disagree: {shape} vs {k.shape}")
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self) -> str:
        return f"QuantumChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={len(self)})"


class ValidationReport(NamedTuple):
    tp_residual: float
    min_choi_eig: float
    valid: bool


class IsometryCertificate(NamedTuple):
    """Coefficient matrix relating two operator families, ``X_a = sum_b lam[a, b] Y_b``.

    ``residual`` is the Frobenius misfit of the expansion and
    ``isometry_residual`` the largest entry of ``lam^dagger lam - I``.
    """

    lam: np.ndarray
    residual: float
    isometry_residual: float
    tol: float
    meta: dict | None = None

    @property
    def is_isometry(self) -> bool:
        return self.isometry_residual < self.tol

    @property
    def is_unitary(self) -> bool:
        return self.is_isometry and self.lam.shape[0] == self.lam.shape[1]

    @property
    def valid(self) -> bool:
        return self.residual < self.tol and self.is_isometry


# ---------------------------------------------------------------------------
# states


def density_residuals(rho) -> tuple[float, float, float]:
    """(hermiticity error, most negative eigenvalue, trace error) of ``rho``."""
    rho = np.asarray(rho, dtype=np.complex128)
    herm = float(np.max(np.abs(rho - dag(rho)), initial=0.0))
    w = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))
    return herm, float(w[0]), float(abs(np.trace(rho) - 1.0))


def is_density(rho, tol: float = TOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    herm, low, tr = density_residuals(rho)
    return herm <= tol and low >= -tol and tr <= tol


def check_density(rho, name: str = "rho", tol: float = TOL) -> np.ndarray:
    m = as_matrix(rho, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got {m.shape}")
    if not is_density(m, tol):
        herm, low, tr = density_residuals(m)
        raise ValueError(
            f"{name} is not a density operator (hermiticity {herm:.2e}, min eig {low:.2e}, trace err {tr:.2e})"
        )
    return m


def pure(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1, 1)
    v = v / np.linalg.norm(v)
    return v @ dag(v)


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


# ---------------------------------------------------------------------------
# core operations


def apply(ch: QuantumChannel, rho) -> np.ndarray:
    rho = as_matrix(rho, "rho")
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(f"state of shape {rho.shape} does not fit channel input {ch.dim_in}")
    k = np.stack(ch.kraus)
    return np.einsum("kab,bc,kdc->ad", k, rho, k.conj())


def tp_residual(ch: QuantumChannel) -> float:
    k = np.stack(ch.kraus)
    s = np.einsum("kba,kbc->ac", k.conj(), k)
    return float(np.max(np.abs(s - np.eye(ch.dim_in))))


def choi(ch: QuantumChannel) -> np.ndarray:
    """Unnormalised Choi matrix, input factor first."""
    d_in, d_out = ch.dim_in, ch.dim_out
    if d_in * d_out > DIM_CAP:
        raise DimensionError(f"Choi matrix of dimension {d_in * d_out} exceeds cap {DIM_CAP}")
    # vec(K)[i*d_out + o] = K[o, i]
    vecs = np.stack([k.T.reshape(-1) for k in ch.kraus], axis=1)
    return vecs @ dag(vecs)


def validate_cptp(ch: QuantumChannel, tol: float = TOL) -> ValidationReport:
    tp = tp_residual(ch)
    c = choi(ch)
    low = float(np.linalg.eigvalsh(0.5 * (c + dag(c)))[0])
    return ValidationReport(tp, low, tp <= tol and low >= -tol)


def canonical_kraus(c, dim_in: int, dim_out: int, tol: float = TOL) -> list[np.ndarray]:
    """Kraus operators read off the eigenvectors of a Choi matrix.

    Ordered by descending eigenvalue; eigenvalues below ``KRAUS_PRUNE``
    are dropped.
    """
    c = as_matrix(c, "choi")
    if c.shape != (dim_in * dim_out, dim_in * dim_out):
        raise DimensionError(f"Choi shape {c.shape} does not match dims ({dim_in}, {dim_out})")
    spec = eig_hermitian(c, tol=tol)
    if spec.eigenvalues[-1] < -tol * max(1.0, spec.eigenvalues[0]):
        raise ValueError(f"Choi matrix is not positive semidefinite (min eigenvalue {spec.eigenvalues[-1]:.3e})")
    ops = []
    for lam, v in zip(spec.eigenvalues, spec.eigenvectors.T):
        if lam < KRAUS_PRUNE:
            continue
        ops.append(np.sqrt(lam) * v.reshape(dim_in, dim_out).T)
    return ops


def canonical(ch: QuantumChannel) -> QuantumChannel:
    return QuantumChannel(canonical_kraus(choi(ch), ch.dim_in, ch.dim_out))


def compose(f: QuantumChannel, g: QuantumChannel) -> QuantumChannel:
    """The channel ``f o g`` (apply ``g`` first); Kraus order is ``f`` outer."""
    if g.dim_out != f.dim_in:
        raise DimensionError(f"cannot compose: g outputs {g.dim_out}, f takes {f.dim_in}")
    return QuantumChannel([fk @ gk for fk in f.kraus for gk in g.kraus])


def tensor_channels(f: QuantumChannel, g: QuantumChannel) -> QuantumChannel:
    return QuantumChannel([np.kron(fk, gk) for fk in f.kraus for gk in g.kraus])


def conjugate_by_unitary(ch: QuantumChannel, u, tol: float = TOL) -> QuantumChannel:
    """Kraus ``K -> U K U^dagger``, i.e. ``rho -> U ch(U^dagger rho U) U^dagger``."""
    u = as_matrix(u, "u")
    if not is_unitary(u, tol):
        raise ValueError("conjugate_by_unitary: u is not unitary")
    if u.shape[0] != ch.dim_in or ch.dim_in != ch.dim_out:
        raise DimensionError("conjugate_by_unitary needs a square channel matching u")
    return QuantumChannel([u @ k @ dag(u) for k in ch.kraus])


def channels_equal(f: QuantumChannel, g: QuantumChannel, tol: float = TOL) -> bool:
    if (f.dim_in, f.dim_out) != (g.dim_in, g.dim_out):
        return False
    return bool(np.max(np.abs(choi(f) - choi(g))) < tol)


def kraus_equivalence_isometry(f1: Sequence, f2: Sequence, tol: float = TOL) -> IsometryCertificate:
    """Best unitary ``lam`` with ``f1[a] ~ sum_b lam[a, b] f2[b]``.

    The shorter family is padded with zero operators. Over unitaries the
    problem is an orthogonal Procrustes fit: with ``M[a, b] = <f2[b], f1[a]>``
    the optimum is the unitary polar factor of ``M``.
    """
    xs = [as_matrix(x) for x in f1]
    ys = [as_matrix(y) for y in f2]
    if not xs or not ys:
        raise ValueError("kraus_equivalence_isometry: empty family")
    shape = xs[0].shape
    if any(o.shape != shape for o in xs + ys):
        raise DimensionError("kraus_equivalence_isometry: operator shapes disagree")
    n = max(len(xs), len(ys))
    zero = np.zeros(shape, dtype=np.complex128)
    xm = np.stack([x.reshape(-1) for x in xs] + [zero.reshape(-1)] * (n - len(xs)))
    ym = np.stack([y.reshape(-1) for y in ys] + [zero.reshape(-1)] * (n - len(ys)))
    m = xm @ dag(ym)
    w, _, vh = np.linalg.svd(m)
    lam = w @ vh
    residual = float(np.linalg.norm(xm - lam @ ym))
    iso = float(np.max(np.abs(dag(lam) @ lam - np.eye(n))))
    return IsometryCertificate(lam, residual, iso, tol)


# ---------------------------------------------------------------------------
# named channels and gates


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])


def unitary_channel(u) -> QuantumChannel:
    u = as_matrix(u, "u")
    if not is_unitary(u):
        raise ValueError("unitary_channel: u is not unitary")
    return QuantumChannel([u])


def mixed_unitary(weights: Sequence[float], unitaries: Sequence, tol: float = TOL) -> QuantumChannel:
    w = np.asarray(weights, dtype=float)
    if len(w) != len(unitaries):
        raise ValueError("mixed_unitary: weights and unitaries differ in length")
    if np.any(w < -tol) or abs(w.sum() - 1.0) > tol:
        raise ValueError("mixed_unitary: weights must be nonnegative and sum to 1")
    ops = []
    for p, u in zip(w, unitaries):
        u = as_matrix(u, "unitary")
        if not is_unitary(u, tol):
            raise ValueError("mixed_unitary: member is not unitary")
        ops.append(np.sqrt(max(p, 0.0)) * u)
    return QuantumChannel(ops)


def dephasing_n(n: int) -> QuantumChannel:
    """Independent ``rho -> (rho + Z rho Z)/2`` on each of ``n`` qubits.

    Kraus operators are ``2^(-n/2) Z^b1 (x) ... (x) Z^bn`` with the bit
    string ``b`` in lexicographic order (first qubit most significant).
    """
    if n < 1:
        raise ValueError("dephasing_n: n must be positive")
    single = QuantumChannel([I2 / np.sqrt(2), Z / np.sqrt(2)])
    ch = single
    for _ in range(n - 1):
        ch = tensor_channels(ch, single)
    return ch


def depolarizing(d: int) -> QuantumChannel:
    """Completely depolarizing channel ``rho -> tr(rho) I/d`` via matrix units."""
    units = []
    scale = 1 / np.sqrt(d)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = scale
            units.append(e)
    return QuantumChannel(units)


def pauli_depolarizing(n: int) -> QuantumChannel:
    """Completely depolarizing channel on ``n`` qubits via the Pauli twirl."""
    from itertools import product

    labels = ["".join(p) for p in product("IXYZ", repeat=n)]
    return QuantumChannel([pauli(lbl) / 2 ** n for lbl in labels])


def spontaneous_emission() -> QuantumChannel:
    """The extremal amplitude-damping channel ``rho -> |0><0|``."""
    return QuantumChannel([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])


def k_gate() -> np.ndarray:
    return np.array([[1, 1], [1j, -1j]], dtype=np.complex128) / np.sqrt(2)


def cnot(control: int, target: int, n: int = 2) -> np.ndarray:
    """CNOT on ``n`` qubits, qubits numbered from 1 (most significant)."""
    d = 2 ** n
    u = np.zeros((d, d), dtype=np.complex128)
    for x in range(d):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control - 1]:
            bits[target - 1] ^= 1
        y = int("".join(map(str, bits)), 2)
        u[y, x] = 1.0
    return u


def encoding_unitary_u() -> np.ndarray:
    """``CNOT_12 CNOT_21 (K^dagger (x) I)``; maps the logical two-qubit encoding onto ``I (x) M_2``."""
    return cnot(1, 2) @ cnot(2, 1) @ np.kron(dag(k_gate()), I2)


def dephasing_prime() -> QuantumChannel:
    """Two-qubit dephasing conjugated by ``encoding_unitary_u``, in the Pauli presentation
    ``{II/2, XX/2, ZZ/2, -YY/2}``."""
    return QuantumChannel([pauli("II") / 2, pauli("XX") / 2, pauli("ZZ") / 2, -pauli("YY") / 2])


# ---------------------------------------------------------------------------
# JSON


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("matrix JSON must be a list of rows of [re, im] pairs")
    return as_matrix(a[..., 0] + 1j * a[..., 1])


def channel_to_dict(ch: QuantumChannel) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [matrix_to_json(k) for k in ch.kraus],
    }


def channel_from_dict(obj: dict) -> QuantumChannel:
    try:
        d_in, d_out = int(obj["dim_in"]), int(obj["dim_out"])
        kraus = [matrix_from_json(k) for k in obj["kraus"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed channel JSON: {exc}") from exc
    ch = QuantumChannel(kraus)
    if (ch.dim_in, ch.dim_out) != (d_in, d_out):
        raise DimensionError(
            f"channel JSON declares ({d_in}, {d_out}) but Kraus shapes give ({ch.dim_in}, {ch.dim_out})"
        )
    return ch


def dumps_channel(ch: QuantumChannel) -> str:
    return json.dumps(channel_to_dict(ch))


def loads_channel(text: str) -> QuantumChannel:
    return channel_from_dict(json.loads(text))


__all__ = [
    "QuantumChannel",
    "ValidationReport",
    "IsometryCertificate",
    "apply",
    "compose",
    "tensor_channels",
    "conjugate_by_unitary",
    "choi",
    "canonical_kraus",
    "canonical",
    "validate_cptp",
    "tp_residual",
    "channels_equal",
    "kraus_equivalence_isometry",
    "identity_channel",
    "unitary_channel",
    "mixed_unitary",
    "dephasing_n",
    "depolarizing",
    "pauli_depolarizing",
    "spontaneous_emission",
    "k_gate",
    "cnot",
    "encoding_unitary_u",
    "dephasing_prime",
    "is_density",
    "check_density",
    "pure",
    "maximally_mixed",
    "pauli",
    "is_hermitian",
]
