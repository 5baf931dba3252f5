"""Command-line interface: capacity, sweep, cluster, ball, validate-channel.

Reports are CSV with ``#`` metadata comment lines; numbers carry 12
significant digits and rows keep a fixed order, so identical configurations
produce byte-identical files.  All randomness flows from ``--seed``; the
``SUPAQ_THREADS`` environment variable caps worker parallelism (evaluation is
currently serial, which always respects the cap and keeps outputs
thread-count independent).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ball import InfoBall, minimax_ball
from .capacity import (
    CapacityResult,
    OptimizerConfig,
    holevo_capacity,
    private_capacity_lb,
    quantum_capacity_lb,
)
from .channels import (
    KrausChannel,
    depolarizing_channel,
    erasure_channel,
    identity_channel,
    load_channel,
)
from .clustering import (
    MedianSet,
    MuSimilarDomain,
    WeightedStateSet,
    bicriteria,
    build_coreset,
    clamp_to_domain,
    cluster,
    divergence_matrix,
)
from .exceptions import ParameterError, SupaqError
from .states import DensityMatrix
from .superactivation import SweepConfig, SweepReport, sweep

__all__ = ["run", "main", "write_report", "channel_from_uri", "load_state_set"]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def channel_from_uri(uri: str) -> KrausChannel:
    """Resolve ``builtin:<model>:<param>`` or ``file:<path>`` channel URIs."""
    parts = uri.split(":")
    if parts[0] == "file" and len(parts) >= 2:
        return load_channel(":".join(parts[1:]))
    if parts[0] == "builtin" and len(parts) == 3:
        model, raw = parts[1], parts[2]
        if model == "identity":
            return identity_channel(int(raw))
        if model == "depolarizing":
            return depolarizing_channel(float(raw))
        if model == "erasure":
            return erasure_channel(float(raw))
    raise ParameterError(
        f"unknown channel URI {uri!r}; use builtin:identity:d,"
        " builtin:depolarizing:p, builtin:erasure:eps or file:<path>"
    )


def load_state_set(path) -> tuple[list[DensityMatrix], np.ndarray]:
    """Read a JSON state set: dim, row-major [re, im] matrices, optional weights."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"could not parse state file {path}: {exc}") from exc
    try:
        dim = int(payload["dim"])
        raw_states = payload["states"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed state file {path}: {exc}") from exc
    states = []
    for flat in raw_states:
        values = [complex(float(re), float(im)) for re, im in flat]
        if len(values) != dim * dim:
            raise ParameterError(
                f"state needs {dim * dim} entries, got {len(values)}"
            )
        states.append(DensityMatrix(np.array(values).reshape(dim, dim)))
    weights = np.asarray(payload.get("weights", np.ones(len(states))), dtype=float)
    return states, weights


def _max_threads() -> int:
    raw = os.environ.get("SUPAQ_THREADS", "")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParameterError(f"SUPAQ_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ParameterError(f"SUPAQ_THREADS must be >= 1, got {value}")
    return value


# ---------------------------------------------------------------------------
# report rendering


def _render_sweep(report: SweepReport) -> str:
    lines = [f"# supaq {__version__}", "# command = sweep"]
    lines.append(f"# evaluator = {report.evaluator}")
    lines.append(f"# seed = {_fmt(report.metadata.get('seed', 0))}")
    lines.append(f"# threshold = {_fmt(report.metadata.get('threshold', 0.0))}")
    domain = " ".join(f"{_fmt(lo)}:{_fmt(hi)}" for lo, hi in report.domain)
    lines.append(f"# domain = {domain}")
    check = report.metadata.get("weight_check")
    if check:
        lines.append(
            f"# note: quadratic weight at p = {_fmt(check['p'])} computes to"
            f" {_fmt(check['computed'])}; reported value is {_fmt(check['reported'])}"
        )
    check = report.metadata.get("private_radius_check")
    if check:
        lines.append(
            f"# note: private-radius formula gives {_fmt(check['formula_value'])}"
            f" bits; reported floor is {_fmt(check['reported'])}"
        )
    for failure in report.metadata.get("failures", ()):
        lines.append(f"# failure: {failure}")
    lines.append("p,r_HH,r_HA,r_AA,r_super")
    for row in report.rows:
        lines.append(
            ",".join(_fmt(v) for v in (row.p, row.r_aa, row.r_ab, row.r_bb, row.r_super))
        )
    return "\n".join(lines) + "\n"


def _render_capacity(result: CapacityResult, quantity: str = "") -> str:
    lines = [f"# supaq {__version__}", "# command = capacity"]
    if quantity:
        lines.append(f"# quantity = {quantity}")
    lines.append("value,converged,iterations")
    lines.append(f"{_fmt(result.value)},{_fmt(result.converged)},{result.iterations}")
    return "\n".join(lines) + "\n"


def _render_ball(ball: InfoBall) -> str:
    lines = [f"# supaq {__version__}", "# command = ball"]
    lines.append(f"# radius = {_fmt(ball.radius)}")
    lines.append(f"# support = {' '.join(str(i) for i in ball.support)}")
    lines.append(f"# converged = {_fmt(ball.converged)}")
    lines.append("row,col,re,im")
    data = ball.center.data
    for r in range(data.shape[0]):
        for c in range(data.shape[1]):
            lines.append(f"{r},{c},{_fmt(data[r, c].real)},{_fmt(data[r, c].imag)}")
    return "\n".join(lines) + "\n"


def _render_medians(medians: MedianSet) -> str:
    lines = [f"# supaq {__version__}", "# command = cluster"]
    lines.append(f"# k = {medians.k}")
    if "error" in medians.meta:
        lines.append(f"# cost = {_fmt(medians.meta['error'])}")
    if "candidates_truncated" in medians.meta:
        lines.append(
            f"# candidates_truncated = {_fmt(medians.meta['candidates_truncated'])}"
        )
    lines.append("median,row,col,re,im")
    for idx, state in enumerate(medians.medians):
        data = state.data
        for r in range(data.shape[0]):
            for c in range(data.shape[1]):
                lines.append(
                    f"{idx},{r},{c},{_fmt(data[r, c].real)},{_fmt(data[r, c].imag)}"
                )
    return "\n".join(lines) + "\n"


def write_report(report, path) -> None:
    """Serialize a report object to CSV at ``path`` (bit-stable per input)."""
    if isinstance(report, SweepReport):
        text = _render_sweep(report)
    elif isinstance(report, CapacityResult):
        text = _render_capacity(report)
    elif isinstance(report, InfoBall):
        text = _render_ball(report)
    elif isinstance(report, MedianSet):
        text = _render_medians(report)
    else:
        raise ParameterError(f"cannot serialize {type(report).__name__}")
    Path(path).write_text(text)


# ---------------------------------------------------------------------------
# commands


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise ParameterError(f"grid must be start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise ParameterError(f"grid must advance forward, got {spec!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _optimizer_from_args(args) -> OptimizerConfig:
    kwargs = {"seed": args.seed}
    if getattr(args, "restarts", None) is not None:
        kwargs["restarts"] = args.restarts
    if getattr(args, "max_evals", None) is not None:
        kwargs["max_evals"] = args.max_evals
    if getattr(args, "ensemble_size", None) is not None:
        kwargs["ensemble_size"] = args.ensemble_size
    return OptimizerConfig(**kwargs)


def _cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    channel_a = channel_from_uri(args.channel_a) if args.channel_a else None
    channel_b = channel_from_uri(args.channel_b) if args.channel_b else None
    cfg = SweepConfig(
        p_grid=grid,
        channel_a=channel_a,
        channel_b=channel_b,
        evaluator=args.evaluator,
        threshold=args.threshold,
        seed=args.seed,
        optimizer=_optimizer_from_args(args),
    )
    report = sweep(cfg)
    if args.out:
        write_report(report, args.out)
    else:
        sys.stdout.write(_render_sweep(report))
    return 0


def _cmd_capacity(args) -> int:
    ch = channel_from_uri(args.channel)
    cfg = _optimizer_from_args(args)
    if args.quantity == "holevo":
        result = holevo_capacity(ch, cfg)
    elif args.quantity == "coherent":
        from .capacity import finite_n_capacity

        result = finite_n_capacity(ch, args.n, cfg)
    elif args.quantity == "quantum-lb":
        result = quantum_capacity_lb(ch, cfg)
    else:
        result = private_capacity_lb(ch, cfg)
    print(_fmt(result.value))
    if args.out:
        Path(args.out).write_text(_render_capacity(result, args.quantity))
    return 0


def _cmd_ball(args) -> int:
    states, _ = load_state_set(args.states)
    dom = MuSimilarDomain(args.clamp_floor, 1.0 - args.clamp_floor)
    clamped = [clamp_to_domain(s, dom) for s in states]
    ball = minimax_ball(clamped, tol=args.tol, max_iter=args.max_iter)
    if args.out:
        write_report(ball, args.out)
    else:
        sys.stdout.write(_render_ball(ball))
    return 0


def _cmd_cluster(args) -> int:
    states, weights = load_state_set(args.states)
    dom = MuSimilarDomain(args.clamp_floor, 1.0 - args.clamp_floor)
    clamped = [clamp_to_domain(s, dom) for s in states]
    if args.coreset_m is not None:
        rough = bicriteria(clamped, args.k, beta=args.beta, seed=args.seed)
        working = build_coreset(
            clamped, rough, m=args.coreset_m, alpha=args.beta * args.k, seed=args.seed
        )
    else:
        working = WeightedStateSet(clamped, weights)
    result = cluster(
        working,
        m=args.k,
        found=None,
        eps=args.eps,
        delta=args.delta,
        dom=dom,
        seed=args.seed,
        candidate_cap=args.candidate_cap,
    )
    full_cost = float(
        divergence_matrix(clamped, result.medians).min(axis=1) @ weights
    )
    result.meta["error"] = full_cost
    if args.out:
        write_report(result, args.out)
    else:
        sys.stdout.write(_render_medians(result))
    return 0


def _cmd_validate_channel(args) -> int:
    ch = load_channel(args.file)
    print(f"ok: {args.file} defines a {ch.dim_in}->{ch.dim_out} channel"
          f" with {len(ch.kraus)} Kraus operators")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supaq",
        description="Quantum-channel capacity radii and superactivation sweeps",
    )
    parser.add_argument("--version", action="version", version=f"supaq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="sweep the convex-combination parameter")
    sw.add_argument("--evaluator", choices=["paper-constants", "coherent-search"],
                    default="paper-constants")
    sw.add_argument("--grid", default="0:0.1:1e-4", help="start:stop:step")
    sw.add_argument("--threshold", type=float, default=0.0)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--channel-a", default=None, help="channel URI (coherent-search)")
    sw.add_argument("--channel-b", default=None, help="channel URI (coherent-search)")
    sw.add_argument("--restarts", type=int, default=None)
    sw.add_argument("--max-evals", type=int, default=None)
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=_cmd_sweep)

    cap = sub.add_parser("capacity", help="estimate a channel capacity quantity")
    cap.add_argument("--channel", required=True, help="channel URI")
    cap.add_argument("--quantity", choices=["holevo", "coherent", "quantum-lb", "private"],
                     default="quantum-lb")
    cap.add_argument("--n", type=int, default=1, help="parallel uses (coherent only)")
    cap.add_argument("--seed", type=int, default=0)
    cap.add_argument("--restarts", type=int, default=None)
    cap.add_argument("--max-evals", type=int, default=None)
    cap.add_argument("--ensemble-size", type=int, default=None)
    cap.add_argument("--out", default=None)
    cap.set_defaults(func=_cmd_capacity)

    ball = sub.add_parser("ball", help="smallest enclosing divergence ball")
    ball.add_argument("--states", required=True, help="state-set JSON file")
    ball.add_argument("--tol", type=float, default=1e-6)
    ball.add_argument("--max-iter", type=int, default=5000)
    ball.add_argument("--clamp-floor", type=float, default=1e-4)
    ball.add_argument("--out", default=None)
    ball.set_defaults(func=_cmd_ball)

    cl = sub.add_parser("cluster", help="k-median clustering of states")
    cl.add_argument("--states", required=True, help="state-set JSON file")
    cl.add_argument("--k", type=int, required=True)
    cl.add_argument("--eps", type=float, default=0.3)
    cl.add_argument("--delta", type=float, default=0.3)
    cl.add_argument("--clamp-floor", type=float, default=1e-4)
    cl.add_argument("--seed", type=int, default=0)
    cl.add_argument("--candidate-cap", type=int, default=16)
    cl.add_argument("--coreset-m", type=int, default=None,
                    help="per-ring coreset size; omit to cluster the full set")
    cl.add_argument("--beta", type=float, default=2.0)
    cl.add_argument("--out", default=None)
    cl.set_defaults(func=_cmd_cluster)

    val = sub.add_parser("validate-channel", help="check a channel definition file")
    val.add_argument("--file", required=True)
    val.set_defaults(func=_cmd_validate_channel)
    return parser


def run(argv=None) -> int:
    """Dispatch a CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        _max_threads()  # validate the cap before doing any work
        return args.func(args)
    except SupaqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
