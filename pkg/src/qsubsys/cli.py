"""Command-line front end.

Exit codes: 0 valid, 1 verification failure, 2 parse or usage error,
3 dimension error. Reports go to stdout (or ``--out``), diagnostics to
stderr.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import channels, privacy, qec, subsystems
from .channels import apply, channel_to_dict, dephasing_n, dephasing_prime, encoding_unitary_u, validate_cptp
from .jsonio import (
    CONVENTIONS_VERSION,
    ParseError,
    dumps_report,
    load_channel,
    load_decomposition,
    load_state,
)
from .linops import DimensionError
from .subsystems import SubsystemDecomposition

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DIM = 0, 1, 2, 3

EXAMPLES = (
    "dephasing-private",
    "lambda-matrix",
    "complementary-depolarizing",
    "rep5-genoqec",
    "appendix-conditions",
    "theorem1-search",
)
CHECKS = (
    "private-subsystem",
    "private-subspace",
    "operator-private",
    "kl",
    "genoqec",
    "theorem2",
    "env-subspace",
    "env-subsystem",
)


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-9
    seed: int = 42
    output_format: str = "text"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.output_format not in ("text", "json"):
            raise ValueError("format must be text or json")

    def as_dict(self) -> dict:
        return {"tolerance": self.tolerance, "seed": self.seed, "conventions": CONVENTIONS_VERSION}


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def dephasing_decomposition() -> SubsystemDecomposition:
    """Two-qubit decomposition on which the dephasing channel is private with ``sigma_A = I/2``."""
    return SubsystemDecomposition(2, 2, encoding_unitary_u().conj().T)


# ---------------------------------------------------------------------------
# worked examples; each returns (valid, results)


def example_dephasing_private(cfg: RunConfig, args) -> tuple[bool, dict]:
    tol = cfg.tolerance
    half = np.eye(2) / 2
    lam = privacy.is_private_subsystem(dephasing_n(2), dephasing_decomposition(), half, tol)
    lam_p = privacy.is_private_subsystem(
        dephasing_prime(), SubsystemDecomposition.computational(2, 2), half, tol
    )
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    u = encoding_unitary_u()
    for _ in range(100):
        sigma_b = random_density(rng, 2)
        rho_l = u.conj().T @ np.kron(half, sigma_b) @ u
        worst = max(worst, float(np.abs(apply(dephasing_n(2), rho_l) - np.eye(4) / 4).max()))
    ok = lam.valid and lam_p.valid and worst < tol
    return ok, {
        "dephasing": {"valid": lam.valid, "max_deviation": lam.max_deviation, "rho0": lam.rho0},
        "conjugated": {"valid": lam_p.valid, "max_deviation": lam_p.max_deviation, "rho0": lam_p.rho0},
        "random_inputs_max_entry_error": worst,
    }


def example_lambda_matrix(cfg: RunConfig, args) -> tuple[bool, dict]:
    cert = privacy.theorem2_certificate(
        dephasing_prime(), SubsystemDecomposition.computational(2, 2), np.eye(2) / 2, cfg.tolerance
    )
    return cert.valid and cert.is_unitary, {
        "lambda": cert.lam,
        "residual": cert.residual,
        "unitarity_residual": cert.isometry_residual,
        "is_unitary": cert.is_unitary,
    }


def example_complementary_depolarizing(cfg: RunConfig, args) -> tuple[bool, dict]:
    comp = subsystems.complementary(dephasing_prime())
    cert = privacy.is_private_subsystem(
        comp, SubsystemDecomposition.computational(2, 2), np.eye(2) / 2, cfg.tolerance
    )
    maxmix = float(np.abs(cert.rho0 - np.eye(4) / 4).max())
    ok = cert.valid and maxmix < cfg.tolerance
    return ok, {
        "kraus": list(comp.kraus),
        "private": cert.valid,
        "max_deviation": cert.max_deviation,
        "rho0": cert.rho0,
        "distance_from_maximally_mixed": maxmix,
    }


def example_rep5(cfg: RunConfig, args) -> tuple[bool, dict]:
    eps = [0.5, 0.1, 0.1, 0.1, 0.1, 0.1]
    e = qec.rep5_error_map(eps)
    r = qec.rep5_recovery()
    d = qec.rep5_decomposition()
    if args.fail_weight2:
        sigma_a = np.zeros((16, 16))
        sigma_a[0b1100, 0b1100] = 1.0
        rep = qec.genoqecc_verify(e, r, d, sigma_a, cfg.tolerance)
        e00 = np.diag([1.0, 0.0])
        out = apply(r, apply(e, subsystems.embed(d, sigma_a, e00)))
        local = d.embed.conj().T @ out @ d.embed
        expected = qec.rep5_failure_output(eps)
        return rep.valid, {
            "sigma_a": "|1100><1100|",
            "max_deviation": rep.max_deviation,
            "branch_decoded_0": eps[0] + eps[1] + eps[2],
            "branch_decoded_1": eps[3] + eps[4] + eps[5],
            "two_branch_residual": float(np.abs(local - expected).max()),
        }
    results = {}
    ok = True
    for p in (0.0, 0.05, 0.1, 0.15, 0.2, 0.25):
        rep = qec.genoqecc_verify(e, r, d, qec.rep5_ancilla(p), cfg.tolerance)
        results[f"p={p:.2f}"] = rep.max_deviation
        ok = ok and rep.valid
    certs = qec.theorem3_extract(e, d, qec.rep5_ancilla(0.1), r, cfg.tolerance)
    ok = ok and all(c.valid for c in certs)
    return ok, {
        "eps": eps,
        "deviation_by_p": results,
        "subspace_code_residuals": [c.residual for c in certs],
    }


def example_appendix(cfg: RunConfig, args) -> tuple[bool, dict]:
    v, _ = subsystems.stinespring(dephasing_n(2))
    sub = privacy.env_conditions_subsystem(subsystems.dephasing_privacy_encoding(), v, tol=cfg.tolerance)
    rng = np.random.default_rng(cfg.seed)
    viol = []
    for _ in range(20):
        g = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        q, _ = np.linalg.qr(g)
        viol.append(privacy.env_conditions_subspace(q, v, cfg.tolerance).max_violation)
    ok = sub.valid and min(viol) > 1e-3
    return ok, {
        "subsystem_max_violation": sub.max_violation,
        "subspace_min_violation": min(viol),
        "subspace_violations": viol,
    }


def example_theorem1(cfg: RunConfig, args) -> tuple[bool, dict]:
    lam = dephasing_n(2)
    st = privacy.theorem1_structure_check(lam, cfg.tolerance, seed=cfg.seed)
    res = privacy.search_private_subspace(lam, 2, restarts=args.restarts, seed=cfg.seed)
    return st.excludes_private_subspaces and not res.found, {
        "mixed_unitary": st.mixed_unitary,
        "commuting": st.commuting,
        "diagonal_residual": st.diagonal_residual,
        "search_best_value": res.best_value,
        "search_restarts": res.restarts,
        "search_threshold": res.threshold,
        "found": res.found,
        "note": "search evidence only; not a proof of absence",
    }


EXAMPLE_RUNNERS = {
    "dephasing-private": example_dephasing_private,
    "lambda-matrix": example_lambda_matrix,
    "complementary-depolarizing": example_complementary_depolarizing,
    "rep5-genoqec": example_rep5,
    "appendix-conditions": example_appendix,
    "theorem1-search": example_theorem1,
}


# ---------------------------------------------------------------------------
# checks on user files


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ParseError("missing required input(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _valid_channel(path) -> channels.QuantumChannel:
    ch = load_channel(path)
    rep = validate_cptp(ch)
    if not rep.valid:
        raise ParseError(f"{path}: not a CPTP channel (tp residual {rep.tp_residual:.2e}, min Choi eig {rep.min_choi_eig:.2e})")
    return ch


def _density(path, tol) -> np.ndarray:
    m = load_state(path)
    try:
        return channels.check_density(m, str(path), tol)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def run_check(kind: str, cfg: RunConfig, args) -> tuple[bool, dict]:
    tol = cfg.tolerance
    if kind in ("private-subsystem", "theorem2"):
        _need(args, "channel", "decomp", "sigma_a")
        ch, d = _valid_channel(args.channel), load_decomposition(args.decomp)
        sa = _density(args.sigma_a, tol)
        if kind == "private-subsystem":
            c = privacy.is_private_subsystem(ch, d, sa, tol)
            return c.valid, {"kind": c.kind, "max_deviation": c.max_deviation, "rho0": c.rho0}
        cert = privacy.theorem2_certificate(ch, d, sa, tol)
        return cert.valid, {
            "lambda": cert.lam,
            "residual": cert.residual,
            "isometry_residual": cert.isometry_residual,
            "is_unitary": cert.is_unitary,
        }
    if kind == "private-subspace":
        _need(args, "channel", "decomp")
        ch, d = _valid_channel(args.channel), load_decomposition(args.decomp)
        if d.d_A != 1:
            raise DimensionError("private-subspace needs a decomposition with d_A = 1")
        c = privacy.is_private_subspace(ch, d.embed, tol)
        return c.valid, {"kind": c.kind, "max_deviation": c.max_deviation, "rho0": c.rho0}
    if kind == "operator-private":
        _need(args, "channel", "decomp")
        rep = privacy.is_operator_private(_valid_channel(args.channel), load_decomposition(args.decomp), tol)
        return rep.valid, {
            "witness": rep.witness,
            "witness_deviation": rep.witness_deviation,
            "product_residual": rep.product_residual,
        }
    if kind == "kl":
        _need(args, "channel", "projector")
        cert = qec.kl_check(_valid_channel(args.channel), load_state(args.projector), tol)
        return cert.valid, {"c": cert.c, "residual": cert.residual}
    if kind == "genoqec":
        _need(args, "channel", "recovery", "decomp", "sigma_a")
        rep = qec.genoqecc_verify(
            _valid_channel(args.channel),
            _valid_channel(args.recovery),
            load_decomposition(args.decomp),
            _density(args.sigma_a, tol),
            tol,
        )
        return rep.valid, {"max_deviation": rep.max_deviation, "tau_a": rep.tau_a}
    if kind in ("env-subspace", "env-subsystem"):
        _need(args, "channel", "decomp")
        v, _ = subsystems.stinespring(_valid_channel(args.channel))
        enc = load_decomposition(args.decomp).embed
        if kind == "env-subspace":
            rep = privacy.env_conditions_subspace(enc, v, tol)
        else:
            rep = privacy.env_conditions_subsystem(enc, v, args.mix_dim, tol)
        return rep.valid, {"norm_violation": rep.norm_violation, "cross_violation": rep.cross_violation}
    raise ParseError(f"unknown check {kind!r}")


def run_complement(cfg: RunConfig, args) -> dict:
    ch = _valid_channel(args.channel)
    if not args.generalized:
        return channel_to_dict(subsystems.complementary(ch, cfg.tolerance))
    _need(args, "sigma_a")
    sa = _density(args.sigma_a, cfg.tolerance)
    if args.decomp is not None:
        d = load_decomposition(args.decomp)
    else:
        d = SubsystemDecomposition.computational(sa.shape[0], ch.dim_in // sa.shape[0])
    return channel_to_dict(subsystems.generalized_conjugate(ch, d, sa, cfg.tolerance))


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, np.ndarray):
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            return "\n" + str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and v and isinstance(v[0], np.ndarray):
        return "".join(f"\n[{i}]" + _fmt(m) for i, m in enumerate(v))
    return str(v)


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {'VALID' if report['valid'] else 'FAILED'}"]
    cfg = report["config"]
    lines.append(f"tolerance={cfg['tolerance']:g} seed={cfg['seed']} conventions={cfg['conventions']}")

    def walk(d, prefix=""):
        for k in sorted(d):
            v = d[k]
            if isinstance(v, dict):
                walk(v, prefix + k + ".")
            else:
                lines.append(f"{prefix}{k}: {_fmt(v)}")

    walk(report["results"])
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="verification tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="qsubsys", description="Verify privacy and error-correction conditions for quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", parents=[common], help="run a worked example")
    ex.add_argument("name", choices=EXAMPLES)
    ex.add_argument("--fail-weight2", action="store_true", help="rep5-genoqec: use the weight-two ancilla")
    ex.add_argument("--restarts", type=int, default=10_000, help="theorem1-search: number of restarts")

    ck = sub.add_parser("check", parents=[common], help="run a verifier on JSON inputs")
    ck.add_argument("kind", choices=CHECKS)
    ck.add_argument("--channel")
    ck.add_argument("--decomp")
    ck.add_argument("--sigma-a", dest="sigma_a")
    ck.add_argument("--projector")
    ck.add_argument("--recovery")
    ck.add_argument("--mix-dim", dest="mix_dim", type=int, default=2)

    cp = sub.add_parser("complement", parents=[common], help="write the complementary channel")
    cp.add_argument("channel")
    cp.add_argument("--generalized", action="store_true")
    cp.add_argument("--sigma-a", dest="sigma_a")
    cp.add_argument("--decomp")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.tol, args.seed, args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.command == "complement":
            _emit(dumps_report(run_complement(cfg, args)), args.out)
            return EXIT_OK
        if args.command == "example":
            valid, results = EXAMPLE_RUNNERS[args.name](cfg, args)
            label = f"example {args.name}"
        else:
            valid, results = run_check(args.kind, cfg, args)
            label = f"check {args.kind}"
    except DimensionError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = {"command": label, "config": cfg.as_dict(), "valid": bool(valid), "results": results}
    text = dumps_report(report) if cfg.output_format == "json" else render_text(report)
    _emit(text, args.out)
    return EXIT_OK if valid else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
