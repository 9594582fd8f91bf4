"""Verifiers for private subspaces and subsystems.

All privacy checks are complete by linearity: a channel is private on
``(decomposition, sigma_A)`` exactly when every matrix unit ``|i><j|`` of
``L(B)`` is sent to ``delta_ij rho0``. Deviations are measured in trace
norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import (
    IsometryCertificate,
    QuantumChannel,
    apply,
    check_density,
    pure,
)
from .linops import (
    TOL,
    DimensionError,
    as_matrix,
    dag,
    eig_hermitian,
    is_isometry,
    is_projection,
    lstsq_expand,
    operator_basis,
    partial_trace,
    trace_norm,
)
from .subsystems import SubsystemDecomposition, embed

EIG_PRUNE = 1e-10


@dataclass(frozen=True, eq=False)
class PrivacyCertificate:
    kind: str
    sigma_a: Optional[np.ndarray]
    rho0: np.ndarray
    max_deviation: float
    tol: float = TOL

    @property
    def valid(self) -> bool:
        return self.max_deviation < self.tol


def _fits(ch: QuantumChannel, decomp: SubsystemDecomposition) -> None:
    if ch.dim_in != decomp.d_S:
        raise DimensionError(f"channel input {ch.dim_in} != decomposition space {decomp.d_S}")


def _unit_images(ch: QuantumChannel, decomp: SubsystemDecomposition, sigma_a) -> np.ndarray:
    """Images of ``embed(sigma_a, |i><j|)``, shape ``(d_B, d_B, d_out, d_out)``."""
    # Push the fixed part through the Kraus operators once, then contract B.
    w = decomp.embed.reshape(decomp.d_S, decomp.d_A, decomp.d_B)
    k = np.stack(ch.kraus)
    kw = np.einsum("jos,sab->joab", k, w)  # (n, out, A, B)
    return np.einsum("joab,ac,jpcd->bdop", kw, sigma_a, kw.conj())


def is_private_subsystem(
    ch: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, tol: float = TOL
) -> PrivacyCertificate:
    _fits(ch, decomp)
    sigma_a = check_density(sigma_a, "sigma_a", tol)
    if sigma_a.shape[0] != decomp.d_A:
        raise DimensionError(f"sigma_a has dimension {sigma_a.shape[0]}, decomposition expects {decomp.d_A}")
    img = _unit_images(ch, decomp, sigma_a)
    rho0 = img[0, 0]
    dev = 0.0
    for i in range(decomp.d_B):
        for j in range(decomp.d_B):
            target = rho0 if i == j else 0.0
            dev = max(dev, trace_norm(img[i, j] - target))
    kind = "subspace" if decomp.d_A == 1 else "subsystem"
    return PrivacyCertificate(kind, None if kind == "subspace" else sigma_a, rho0, dev, tol)


def is_private_subspace(ch: QuantumChannel, subspace_isometry, tol: float = TOL) -> PrivacyCertificate:
    w = as_matrix(subspace_isometry, "subspace_isometry")
    if not is_isometry(w, tol):
        raise ValueError("is_private_subspace: embedding columns are not orthonormal")
    return is_private_subsystem(ch, SubsystemDecomposition.subspace(w), np.ones((1, 1)), tol)


def spanning_pure_states(d: int) -> list[np.ndarray]:
    """``d*d`` pure states whose projectors span ``L(C^d)``: basis vectors, then
    ``(|a>+|b>)/sqrt2`` and ``(|a>+i|b>)/sqrt2`` for ``a < b``."""
    eye = np.eye(d)
    states = [pure(eye[a]) for a in range(d)]
    for a in range(d):
        for b in range(a + 1, d):
            states.append(pure(eye[a] + eye[b]))
            states.append(pure(eye[a] + 1j * eye[b]))
    return states


@dataclass(frozen=True, eq=False)
class OperatorPrivacyReport:
    valid: bool
    witness: Optional[np.ndarray]
    witness_deviation: float
    product_residual: Optional[float]
    certificates: list = field(repr=False)


def is_operator_private(ch: QuantumChannel, decomp: SubsystemDecomposition, tol: float = TOL) -> OperatorPrivacyReport:
    """Privacy for every ancilla state, checked on a spanning set of pure states.

    ``witness`` is the first spanning state that fails. When the check
    passes and the output space splits as ``A (x) B``, ``product_residual``
    measures how far outputs are from ``tr_B(out) (x) tr_A(out)``.
    """
    _fits(ch, decomp)
    certs = [is_private_subsystem(ch, decomp, s, tol) for s in spanning_pure_states(decomp.d_A)]
    failing = [c for c in certs if not c.valid]
    if failing:
        w = failing[0]
        return OperatorPrivacyReport(False, w.sigma_a, w.max_deviation, None, certs)
    product = None
    if ch.dim_out == decomp.d_A * decomp.d_B:
        dims = [decomp.d_A, decomp.d_B]
        product = 0.0
        for c in certs:
            out = c.rho0
            split = np.kron(partial_trace(out, dims, [0]), partial_trace(out, dims, [1]))
            product = max(product, trace_norm(out - split))
    return OperatorPrivacyReport(True, None, 0.0, product, certs)


def _positive_spectrum(m, tol: float):
    spec = eig_hermitian(m, tol)
    keep = spec.eigenvalues > EIG_PRUNE
    return spec.eigenvalues[keep], spec.eigenvectors[:, keep]


def theorem2_certificate(
    ch: QuantumChannel, decomp: SubsystemDecomposition, sigma_a, tol: float = TOL
) -> IsometryCertificate:
    """Kraus-pairing test for privacy of ``B`` with ancilla ``sigma_a``.

    Left family, index ``a = j * rank(sigma_a) + k``:
    ``sqrt(p_k) V_j W (|psi_k> (x) I_B)``.
    Right family, index ``b = l * d_B + i``: ``sqrt(q_l) |phi_l><i|`` with
    ``(q_l, phi_l)`` the spectrum of ``rho0 = ch(embed(sigma_a, |0><0|))``.
    Each left member is expanded over the right family; privacy holds iff
    every expansion is exact and ``lam^dagger lam = I``.
    """
    _fits(ch, decomp)
    sigma_a = check_density(sigma_a, "sigma_a", tol)
    if sigma_a.shape[0] != decomp.d_A:
        raise DimensionError("sigma_a does not match the decomposition")
    p, psi = _positive_spectrum(sigma_a, tol)
    e00 = np.zeros((decomp.d_B, decomp.d_B))
    e00[0, 0] = 1.0
    rho0 = apply(ch, embed(decomp, sigma_a, e00))
    q, phi = _positive_spectrum(rho0, tol)

    eye_b = np.eye(decomp.d_B)
    left = []
    for v in ch.kraus:
        for pk, vec in zip(p, psi.T):
            left.append(np.sqrt(pk) * v @ decomp.embed @ np.kron(vec.reshape(-1, 1), eye_b))
    right = []
    for ql, vec in zip(q, phi.T):
        for i in range(decomp.d_B):
            right.append(np.sqrt(ql) * vec.reshape(-1, 1) @ eye_b[i].reshape(1, -1))

    lam = np.zeros((len(left), len(right)), dtype=np.complex128)
    sq = 0.0
    for a, x in enumerate(left):
        coeffs, res = lstsq_expand(x, right)
        lam[a] = coeffs
        sq += res ** 2
    iso = float(np.max(np.abs(dag(lam) @ lam - np.eye(len(right)))))
    meta = {"rho0": rho0, "p": p, "q": q, "left": left, "right": right}
    return IsometryCertificate(lam, float(np.sqrt(sq)), iso, tol, meta)


def gram_from_lambda(lam: np.ndarray, q: np.ndarray, n_kraus: int, d_b: int) -> np.ndarray:
    """Blocks ``sum_{i1 i2 l} q_l conj(lam[j1, i1 l]) lam[j2, i2 l] |i1><i2|``
    for a subspace certificate (left index ``j``, right index ``l * d_b + i``)."""
    lam3 = lam.reshape(n_kraus, len(q), d_b)
    return np.einsum("l,ali,blk->abik", q, lam3.conj(), lam3)


@dataclass(frozen=True, eq=False)
class GramReport:
    blocks: np.ndarray
    consistent: bool
    scalar_form: bool
    alpha: np.ndarray
    certificate: IsometryCertificate = field(repr=False)


def _range_basis(p, tol: float) -> np.ndarray:
    p = as_matrix(p, "projector")
    if not is_projection(p, tol):
        raise ValueError("expected an orthogonal projection")
    spec = eig_hermitian(p, tol)
    return spec.eigenvectors[:, spec.eigenvalues > 0.5]


def subspace_gram_condition(ch: QuantumChannel, p_b, tol: float = TOL) -> GramReport:
    """Compressed products ``W^dagger V_j1^dagger V_j2 W`` on the range of ``p_b``.

    ``blocks[j1, j2]`` are expressed in the eigenbasis of ``p_b``. They
    determine the restricted channel up to an output unitary, so privacy
    is decided from them alone: the Gram matrix is factored as
    ``Y^dagger Y`` and the Kraus-pairing test runs on the blocks of ``Y``.
    ``scalar_form`` reports the error-correction analogue
    ``blocks[j1, j2] = alpha[j1, j2] I``.
    """
    w = _range_basis(p_b, tol)
    if w.shape[0] != ch.dim_in:
        raise DimensionError("projector does not act on the channel input")
    kw = np.stack([v @ w for v in ch.kraus])  # (n, out, k)
    n, _, k = kw.shape
    blocks = np.einsum("aoi,bok->abik", kw.conj(), kw)
    gram = blocks.transpose(0, 2, 1, 3).reshape(n * k, n * k)
    mu, vecs = _positive_spectrum(gram, tol)
    y = np.sqrt(mu)[:, None] * dag(vecs)  # (r, n*k)
    ys = [y[:, j * k:(j + 1) * k] for j in range(n)]
    reduced = QuantumChannel(ys)
    cert = theorem2_certificate(reduced, SubsystemDecomposition.computational(1, k), np.ones((1, 1)), tol)
    alpha = np.einsum("abii->ab", blocks) / k
    eye = np.eye(k)
    scalar = float(np.max(np.abs(blocks - alpha[:, :, None, None] * eye), initial=0.0))
    return GramReport(blocks, cert.valid, scalar < tol, alpha, cert)


@dataclass(frozen=True, eq=False)
class ExpansionReport:
    coeffs: np.ndarray
    residual: float
    rho0: np.ndarray
    tol: float = TOL

    @property
    def valid(self) -> bool:
        return self.residual < self.tol


def projection_output_expansion(ch: QuantumChannel, p, q, tol: float = TOL) -> ExpansionReport:
    """Expand ``V_i P`` over ``|psi_k><phi_l| / sqrt(rank Q)``.

    ``rho0 = ch(P) / tr P`` must be proportional to the projection ``Q``;
    ``coeffs[i, k, l]`` are the expansion scalars.
    """
    phi = _range_basis(p, tol)
    psi = _range_basis(q, tol)
    p, q = as_matrix(p), as_matrix(q)
    rho0 = apply(ch, p) / np.trace(p).real
    w = np.linalg.eigvalsh(0.5 * (rho0 + dag(rho0)))
    nz = w[w > EIG_PRUNE]
    rank_q = psi.shape[1]
    if nz.size == 0 or nz.max() - nz.min() > tol:
        raise ValueError("output state is not proportional to a projection")
    if np.max(np.abs(rho0 * rank_q - q)) > np.sqrt(tol):
        raise ValueError("output state is not proportional to the given projection Q")
    basis = [psi[:, [k]] @ dag(phi[:, [l]]) / np.sqrt(rank_q) for k in range(rank_q) for l in range(phi.shape[1])]
    coeffs = []
    worst = 0.0
    for v in ch.kraus:
        target = v @ phi  # V_i P restricted to the range of P
        c, res = lstsq_expand(target, [b @ phi for b in basis])
        coeffs.append(c.reshape(rank_q, phi.shape[1]))
        worst = max(worst, res)
    return ExpansionReport(np.array(coeffs), worst, rho0, tol)


# ---------------------------------------------------------------------------
# commuting random-unitary structure and the subspace search


@dataclass(frozen=True, eq=False)
class StructureReport:
    mixed_unitary: bool
    commuting: bool
    common_basis: Optional[np.ndarray]
    diagonal_residual: float
    weights: np.ndarray

    @property
    def excludes_private_subspaces(self) -> bool:
        return self.mixed_unitary and self.commuting


def _split_blocks(values: np.ndarray, gap: float) -> list[slice]:
    order_ok = np.all(np.diff(values) <= gap)
    assert order_ok  # eig_hermitian returns descending eigenvalues
    out, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i - 1] - values[i] > gap:
            out.append(slice(start, i))
            start = i
    return out


def theorem1_structure_check(ch: QuantumChannel, tol: float = TOL, seed: int = 0) -> StructureReport:
    """Is ``ch`` a random-unitary channel with mutually commuting Kraus operators?

    A common eigenbasis is built by diagonalising a random real
    combination of the Hermitian parts of the Kraus operators and then
    refining each degenerate eigenspace with every Hermitian part in turn.
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionError("structure check needs a square channel")
    d = ch.dim_in
    weights = np.array([np.trace(dag(k) @ k).real / d for k in ch.kraus])
    mixed = all(
        np.max(np.abs(dag(k) @ k - w * np.eye(d))) < tol for k, w in zip(ch.kraus, weights)
    )
    commuting = all(
        np.linalg.norm(a @ b - b @ a) < tol
        for i, a in enumerate(ch.kraus)
        for b in ch.kraus[i + 1:]
    )
    if not commuting:
        return StructureReport(mixed, False, None, float("inf"), weights)

    herm = []
    for k in ch.kraus:
        herm.append(k + dag(k))
        herm.append(1j * (k - dag(k)))
    rng = np.random.default_rng(seed)
    h = sum(c * m for c, m in zip(rng.normal(size=len(herm)), herm))
    spec = eig_hermitian(h, tol)
    basis = spec.eigenvectors
    gap = 1e3 * tol * max(1.0, float(np.max(np.abs(spec.eigenvalues))))
    blocks = _split_blocks(spec.eigenvalues, gap)
    for m in herm:
        refined = []
        for blk in blocks:
            sub = basis[:, blk]
            if sub.shape[1] > 1:
                local = eig_hermitian(dag(sub) @ m @ sub, tol)
                basis[:, blk] = sub @ local.eigenvectors
                scale = max(1.0, float(np.max(np.abs(local.eigenvalues))))
                for s in _split_blocks(local.eigenvalues, 1e3 * tol * scale):
                    refined.append(slice(blk.start + s.start, blk.start + s.stop))
            else:
                refined.append(blk)
        blocks = refined
    off = 0.0
    for k in ch.kraus:
        t = dag(basis) @ k @ basis
        off = max(off, float(np.linalg.norm(t - np.diag(np.diag(t)))))
    return StructureReport(mixed, True, basis, off, weights)


@dataclass(frozen=True, eq=False)
class SearchReport:
    best_value: float
    witness: np.ndarray
    restart_index: int
    restarts: int
    threshold: float

    @property
    def found(self) -> bool:
        """True when a frame below ``threshold`` was found. ``False`` is evidence, not proof."""
        return self.best_value < self.threshold


def _frame_deviation(kraus: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """Privacy deviation of each orthonormal frame in a batch ``(N, d, k)``."""
    kw = np.einsum("jab,nbk->njak", kraus, frames)
    out = np.einsum("njai,njbl->nilab", kw, kw.conj())  # images of |i><l|
    k = frames.shape[2]
    diffs = out.copy()
    for i in range(k):
        diffs[:, i, i] -= out[:, 0, 0]
    sv = np.linalg.svd(diffs, compute_uv=False).sum(axis=-1)
    return sv.reshape(len(frames), -1).max(axis=1)


def _random_frames(rng, n: int, d: int, k: int) -> np.ndarray:
    g = rng.normal(size=(n, d, k)) + 1j * rng.normal(size=(n, d, k))
    q, r = np.linalg.qr(g)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


def _cayley(a: np.ndarray) -> np.ndarray:
    eye = np.eye(a.shape[-1])
    return np.linalg.solve(eye - a / 2, eye + a / 2)


def search_private_subspace(
    ch: QuantumChannel,
    k: int,
    restarts: int = 10_000,
    steps: int = 30,
    seed: int = 42,
    threshold: float = 1e-6,
    step_size: float = 0.5,
    chunk: int = 2_000,
) -> SearchReport:
    """Randomised search for a ``k``-dimensional private subspace.

    Each restart draws a random orthonormal frame and refines it with
    Cayley-parametrised unitary perturbations ``(I - A/2)^-1 (I + A/2)``,
    halving a restart's step size whenever a move is rejected. The best
    frame is chosen by (value, restart index). A value above
    ``threshold`` means nothing was found; it does not prove absence.
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionError("search needs a square channel")
    d = ch.dim_in
    if k < 2 or k > d:
        raise ValueError(f"target dimension k={k} must satisfy 2 <= k <= {d}")
    kraus = np.stack(ch.kraus)
    rng = np.random.default_rng(seed)
    best_vals, best_frames = [], []
    for start in range(0, restarts, chunk):
        n = min(chunk, restarts - start)
        frames = _random_frames(rng, n, d, k)
        vals = _frame_deviation(kraus, frames)
        step = np.full(n, step_size)
        for _ in range(steps):
            g = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
            a = (g - dag(g)) / 2 * step[:, None, None]
            trial = _cayley(a) @ frames
            tv = _frame_deviation(kraus, trial)
            better = tv < vals
            frames[better] = trial[better]
            vals[better] = tv[better]
            step[~better] *= 0.5
        best_vals.append(vals)
        best_frames.append(frames)
    vals = np.concatenate(best_vals)
    frames = np.concatenate(best_frames)
    idx = int(np.argmin(vals))  # first index wins ties
    return SearchReport(float(vals[idx]), frames[idx], idx, restarts, threshold)


# ---------------------------------------------------------------------------
# environment-state conditions


@dataclass(frozen=True, eq=False)
class EnvConditionReport:
    norm_violation: float
    cross_violation: float
    tol: float
    env_states: np.ndarray = field(repr=False)

    @property
    def max_violation(self) -> float:
        return max(self.norm_violation, self.cross_violation)

    @property
    def valid(self) -> bool:
        return self.max_violation < self.tol


def _env_states(encoding, dilation, d_mix: int) -> np.ndarray:
    """``E[m, s, p, :]``: environment vector paired with system basis ``s``
    and mixing basis ``p`` in the dilated image of logical state ``m``."""
    enc = as_matrix(encoding, "encoding")
    v = as_matrix(dilation, "dilation")
    d_total, n_logical = enc.shape
    if d_total % d_mix:
        raise DimensionError("encoding dimension is not divisible by the mixing dimension")
    d_sys = d_total // d_mix
    if v.shape[1] != d_sys or v.shape[0] % d_sys:
        raise DimensionError(f"dilation of shape {v.shape} does not act on a {d_sys}-dim system")
    d_e = v.shape[0] // d_sys
    vt = v.reshape(d_sys, d_e, d_sys)
    psi = enc.T.reshape(n_logical, d_sys, d_mix)
    return np.einsum("ser,mrp->mspe", vt, psi)


def _env_report(states: np.ndarray, tol: float) -> EnvConditionReport:
    # g[m, n, s, t] = sum_p <E^m_{s p} | E^n_{t p}>
    g = np.einsum("mspe,ntpe->mnst", states.conj(), states)
    n = g.shape[0]
    norm = max((float(np.max(np.abs(g[m, m] - g[0, 0]))) for m in range(1, n)), default=0.0)
    cross = max(
        (float(np.max(np.abs(g[m, q]))) for m in range(n) for q in range(n) if m != q), default=0.0
    )
    return EnvConditionReport(norm, cross, tol, states)


def env_conditions_subspace(encoding, dilation, tol: float = TOL) -> EnvConditionReport:
    """Environment-state conditions for a subspace encoding.

    With ``V W |m> = sum_s |s> |E^m_s>``:
    ``<E^0_s|E^0_t> = <E^1_s|E^1_t>`` (``norm_violation``) and
    ``<E^0_s|E^1_t> = 0`` (``cross_violation``) for all ``s, t``.
    """
    return _env_report(_env_states(encoding, dilation, 1), tol)


def env_conditions_subsystem(encoding, dilation, d_mix: int = 2, tol: float = TOL) -> EnvConditionReport:
    """Environment-state conditions for an encoding with a mixing ancilla.

    ``encoding`` maps logical states into ``system (x) mixing``; the
    dilation acts on the system only. The conditions sum over the mixing
    index ``p``: ``sum_p <E^0_sp|E^0_tp> = sum_p <E^1_sp|E^1_tp>`` and
    ``sum_p <E^0_sp|E^1_tp> = 0``.
    """
    return _env_report(_env_states(encoding, dilation, d_mix), tol)
