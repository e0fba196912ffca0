"""Command-line frontend: CSV in, JSON/CSV out, reproducible by manifest.

Subcommands: ``entropy`` (entropy of selected columns), ``test``
(independence tests), ``regression`` (goodness-of-fit tests), ``power``
(Monte Carlo power tables), ``gen`` (scenario samples as CSV) and
``rerun`` (replay a recorded run). Whenever ``--output`` is given, a
run manifest is written next to the results with everything needed to
reproduce them byte-for-byte.

Exit codes: 0 success, 2 parse error, 3 estimator error, 4 argument
error, 5 singular design, 6 degenerate residuals.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import SETTINGS, ScenarioSpec, generate
from .entropy import EntropyEstimate, kl_entropy, solve_weights
from .errors import (
    DegenerateResidualsError,
    DomainError,
    DuplicatePointsError,
    IllConditionedError,
    InfeasibleSupportError,
    KTooLargeError,
    SamplerDimensionMismatchError,
    SingularDesignError,
)
from .independence import (
    BlockedSample,
    TestConfig,
    TestOutcome,
    default_k,
    mint_auto,
    mint_av,
    mint_known,
    mint_multi,
    mint_unknown,
)
from .power import PowerCell, POWER_COLUMNS, run_grid
from .regression import (
    RegressionProblem,
    mint_regression,
    mint_regression_partitioned,
    mint_regression_split,
)
from .samplers import parse_marginal, parse_noise

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ESTIMATOR = 3
EXIT_ARGS = 4
EXIT_SINGULAR = 5
EXIT_DEGENERATE = 6

_ESTIMATOR_ERRORS = (
    DuplicatePointsError,
    KTooLargeError,
    DomainError,
    InfeasibleSupportError,
    IllConditionedError,
    SamplerDimensionMismatchError,
)


class CliParseError(Exception):
    """Input that could not be parsed (CSV cells, unwritable paths, ...)."""


class CliArgumentError(Exception):
    """A violated argument contract detected after argparse."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_ARGS)


# ---------------------------------------------------------------------------
# CSV input


def read_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read a headered numeric CSV, reporting the location of bad cells."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliParseError(f"{path}: empty file (header row required)") from None
        header = [h.strip() for h in header]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CliParseError(
                    f"{path}: line {line_no} has {len(row)} fields, expected {len(header)}"
                )
            parsed = []
            for col_no, cell in enumerate(row, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CliParseError(
                        f"{path}: line {line_no}, column {col_no} "
                        f"({header[col_no - 1]!r}): non-numeric value {cell.strip()!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise CliParseError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=np.float64)


def select_columns(header: list[str], tokens: str) -> list[int]:
    """Resolve a comma-separated list of names or 1-based indices."""
    out = []
    for token in tokens.split(","):
        token = token.strip()
        if not token:
            continue
        if token.isdigit():
            idx = int(token)
            if not 1 <= idx <= len(header):
                raise CliArgumentError(
                    f"column index {idx} out of range 1..{len(header)}"
                )
            out.append(idx - 1)
        else:
            try:
                out.append(header.index(token))
            except ValueError:
                raise CliArgumentError(
                    f"no column named {token!r}; header is {header}"
                ) from None
    if not out:
        raise CliArgumentError(f"no columns selected from {tokens!r}")
    return out


def parse_k_grid(text: str) -> tuple[int, ...]:
    """Parse ``a:b`` (inclusive) or a comma list of neighbour orders."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


# ---------------------------------------------------------------------------
# Output, manifests, rerun


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def resolve_seed(seed: int | None) -> int:
    """Use the given seed, or draw one from system entropy (and record it)."""
    if seed is not None:
        return seed
    return int.from_bytes(os.urandom(8), "little")


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("MINT_THREADS")
    return max(1, int(env)) if env else 1


def _resolved_argv(argv: list[str], seed: int | None) -> list[str]:
    """The original argv with the resolved seed pinned in."""
    out = list(argv)
    if seed is None:
        return out
    if "--seed" in out:
        i = out.index("--seed")
        out[i + 1] = str(seed)
    else:
        out += ["--seed", str(seed)]
    return out


def emit(
    content: str,
    args,
    argv: list[str],
    seed: int | None,
    inputs: list[str],
    started: float,
) -> None:
    """Write results to --output (plus a manifest) or to stdout."""
    output = getattr(args, "output", None)
    if output is None:
        sys.stdout.write(content)
        return
    path = Path(output)
    try:
        path.write_text(content, encoding="utf-8")
    except OSError as exc:
        raise CliParseError(f"cannot write {output}: {exc}") from exc
    manifest = {
        "tool": "mint",
        "version": __version__,
        "command": args.command,
        "argv": _resolved_argv(argv, seed),
        "seed": seed,
        "inputs": {p: _sha256(p) for p in inputs},
        "outputs": [str(path)],
        "threads": resolve_threads(getattr(args, "threads", None)),
        "duration_s": time.monotonic() - started,
    }
    Path(str(path) + ".manifest.json").write_text(
        _json_dumps(manifest), encoding="utf-8"
    )


def outcome_payload(out: TestOutcome) -> dict:
    payload = {
        "statistic": out.statistic,
        "null_stats_summary": {
            "min": float(out.null_stats.min()),
            "max": float(out.null_stats.max()),
            "mean": float(out.null_stats.mean()),
        },
        "p_value": out.p_value,
        "critical_value": out.critical_value,
        "reject": bool(out.reject),
        "seed": out.seed,
        "k": list(out.k) if isinstance(out.k, tuple) else out.k,
    }
    if out.k_hat is not None:
        payload["k_hat"] = out.k_hat
    if out.beta_hat is not None:
        payload["beta_hat"] = [float(v) for v in out.beta_hat]
    if out.sigma_hat is not None:
        payload["sigma_hat"] = out.sigma_hat
    return payload


def entropy_payload(est: EntropyEstimate) -> dict:
    return {
        "value": est.value,
        "k": est.k,
        "n": est.n,
        "d": est.d,
        "weights": [float(w) for w in est.weights.w],
    }


# ---------------------------------------------------------------------------
# Subcommands


def cmd_entropy(args, argv, started):
    header, data = read_csv(args.input)
    cols = select_columns(header, args.columns) if args.columns else list(range(len(header)))
    pts = data[:, cols]
    k = args.k if args.k is not None else default_k(pts.shape[0])
    weights = solve_weights(k, pts.shape[1]) if args.weights == "auto" else None
    est = kl_entropy(pts, k, weights=weights, brute=args.brute)
    emit(_json_dumps(entropy_payload(est)), args, argv, None, [args.input], started)
    return EXIT_OK


def _build_blocked(args, header, data) -> BlockedSample:
    if args.blocks:
        groups = [grp for grp in args.blocks.split(";") if grp.strip()]
        col_sets = [select_columns(header, grp) for grp in groups]
        order = [c for cols in col_sets for c in cols]
        blocks, pos = [], 0
        for cols in col_sets:
            blocks.append((pos, pos + len(cols)))
            pos += len(cols)
        return BlockedSample(data[:, order], tuple(blocks))
    if not (args.x_cols and args.y_cols):
        raise CliArgumentError("--x-cols and --y-cols (or --blocks) are required")
    x_idx = select_columns(header, args.x_cols)
    y_idx = select_columns(header, args.y_cols)
    return BlockedSample(
        data[:, x_idx + y_idx], ((0, len(x_idx)), (len(x_idx), len(x_idx) + len(y_idx)))
    )


def cmd_test(args, argv, started):
    header, data = read_csv(args.input)
    sample = _build_blocked(args, header, data)
    seed = resolve_seed(args.seed)
    config = TestConfig(
        k_joint=args.k,
        weight_mode="auto-solve" if args.weights == "auto" else "unweighted",
        B=args.B,
        q=args.q,
        seed=seed,
        brute=args.brute,
    )
    if args.variant in ("auto", "av"):
        grid = parse_k_grid(args.k_grid) if args.k_grid else tuple(range(1, 21))
        if args.variant == "av":
            out = mint_av(sample, grid, config)
        else:
            out = mint_auto(sample, grid, args.auto_pairs, config)
    elif args.variant == "known":
        if not args.marginal:
            raise CliArgumentError("--marginal is required with --variant known")
        sampler = parse_marginal(args.marginal, dim=sample.block_dim(1))
        out = mint_known(sample, sampler, config)
    elif args.variant == "multi":
        out = mint_multi(sample, config)
    else:
        out = mint_unknown(sample, config)
    emit(_json_dumps(outcome_payload(out)), args, argv, seed, [args.input], started)
    return EXIT_OK


def cmd_regression(args, argv, started):
    header, data = read_csv(args.input)
    y_idx = select_columns(header, args.response_col)
    if len(y_idx) != 1:
        raise CliArgumentError("--response-col must select exactly one column")
    design_idx = select_columns(header, args.design_cols)
    partition = None
    if args.variant == "partitioned":
        if not args.star_cols:
            raise CliArgumentError("--star-cols is required with --variant partitioned")
        star_idx = select_columns(header, args.star_cols)
        rest = [c for c in design_idx if c not in star_idx]
        missing = [c for c in star_idx if c not in design_idx]
        if missing:
            raise CliArgumentError("--star-cols must be a subset of --design-cols")
        design_idx = star_idx + rest
        partition = (len(star_idx), len(rest))
    elif args.star_cols:
        raise CliArgumentError("--star-cols only applies to --variant partitioned")
    seed = resolve_seed(args.seed)
    problem = RegressionProblem(
        design=data[:, design_idx],
        response=data[:, y_idx[0]],
        partition=partition,
        noise=parse_noise(args.noise),
    )
    config = TestConfig(
        k_joint=args.k, k_marginals=args.k_eta, B=args.B, q=args.q, seed=seed
    )
    if args.variant == "full":
        out = mint_regression(problem, config)
    elif args.variant == "split":
        out = mint_regression_split(problem, config)
    else:
        out = mint_regression_partitioned(problem, config)
    emit(_json_dumps(outcome_payload(out)), args, argv, seed, [args.input], started)
    return EXIT_OK


def cmd_power(args, argv, started):
    seed = resolve_seed(args.seed)
    params: list[float | None]
    if args.params:
        params = [float(tok) for tok in args.params.split(",") if tok.strip()]
    else:
        params = [None]
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    grid = parse_k_grid(args.k_grid) if args.k_grid else tuple(range(1, 21))
    cells = [
        PowerCell(
            setting=args.setting,
            param=param,
            variant=variant,
            n=args.n,
            B=args.B,
            q=args.q,
            num_reps=args.num_reps,
            k=args.k,
            k_grid=grid if variant in ("auto", "av") else None,
            auto_pairs=args.auto_pairs,
            multivariate=args.multivariate,
        )
        for param in params
        for variant in variants
    ]
    rows = run_grid(cells, seed, threads=resolve_threads(args.threads))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=POWER_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    emit(buf.getvalue(), args, argv, seed, [], started)
    return EXIT_OK


def cmd_gen(args, argv, started):
    seed = resolve_seed(args.seed)
    spec = ScenarioSpec(
        setting=args.setting,
        n=args.n,
        param=args.param,
        multivariate=args.multivariate,
        seed=seed,
    )
    sample = generate(spec)
    dx, dy = sample.block_dim(0), sample.block_dim(1)
    names = [f"x{i + 1}" for i in range(dx)] + [f"y{i + 1}" for i in range(dy)]
    lines = [",".join(names)]
    for row in sample.points:
        lines.append(",".join(f"{v:.17g}" for v in row))
    emit("\n".join(lines) + "\n", args, argv, seed, [], started)
    return EXIT_OK


def cmd_rerun(args, argv, started):
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliParseError(f"cannot open {args.manifest}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliParseError(f"{args.manifest}: invalid JSON ({exc})") from exc
    for path, digest in manifest.get("inputs", {}).items():
        if not Path(path).exists():
            raise CliParseError(f"manifest input {path} is missing")
        if _sha256(path) != digest:
            raise CliParseError(
                f"manifest input {path} has changed since the recorded run"
            )
    return main(manifest["argv"])


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> _Parser:
    parser = _Parser(prog="mint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed=True):
        p.add_argument("--output", help="write results here (plus a .manifest.json)")
        if seed:
            p.add_argument("--seed", type=int, help="64-bit seed; drawn if omitted")

    p = sub.add_parser("entropy", help="entropy estimate of selected CSV columns")
    p.add_argument("--input", required=True)
    p.add_argument("--columns", help="names or 1-based indices (default: all)")
    p.add_argument("--k", type=int)
    p.add_argument("--weights", choices=["unweighted", "auto"], default="unweighted")
    p.add_argument("--brute", action="store_true", help="brute-force neighbour search")
    add_common(p, seed=False)
    p.set_defaults(fn=cmd_entropy)

    p = sub.add_parser("test", help="independence tests")
    p.add_argument("--variant", choices=["known", "unknown", "auto", "av", "multi"],
                   default="unknown")
    p.add_argument("--input", required=True)
    p.add_argument("--x-cols", dest="x_cols")
    p.add_argument("--y-cols", dest="y_cols")
    p.add_argument("--blocks", help="semicolon-separated column groups (variant multi)")
    p.add_argument("--k", type=int)
    p.add_argument("--k-grid", dest="k_grid", help="a:b or comma list (auto/av)")
    p.add_argument("--auto-N", dest="auto_pairs", type=int, default=100,
                   help="permutation pairs for k selection (variant auto)")
    p.add_argument("--B", type=int, default=99)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--marginal", help="normal(m,s) | uniform(a,b) | empirical:PATH")
    p.add_argument("--weights", choices=["unweighted", "auto"], default="unweighted")
    p.add_argument("--brute", action="store_true")
    add_common(p)
    p.set_defaults(fn=cmd_test)

    p = sub.add_parser("regression", help="linear-model goodness-of-fit tests")
    p.add_argument("--input", required=True)
    p.add_argument("--response-col", dest="response_col", required=True)
    p.add_argument("--design-cols", dest="design_cols", required=True)
    p.add_argument("--star-cols", dest="star_cols",
                   help="covariates of interest (variant partitioned)")
    p.add_argument("--variant", choices=["full", "split", "partitioned"],
                   default="full")
    p.add_argument("--k-eta", dest="k_eta", type=int, default=6,
                   help="neighbour order for the residual entropy")
    p.add_argument("--k", type=int, default=3,
                   help="neighbour order for the joint entropy")
    p.add_argument("--B", type=int, default=99)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--noise", default="normal", help="normal | t(df) | logistic")
    add_common(p)
    p.set_defaults(fn=cmd_regression)

    p = sub.add_parser("power", help="Monte Carlo power/size study")
    p.add_argument("--setting", choices=list(SETTINGS), required=True)
    p.add_argument("--params", help="comma list of scenario parameters")
    p.add_argument("--variants", default="unknown",
                   help="comma list from known,unknown,auto,av")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--B", type=int, default=99)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--k", type=int)
    p.add_argument("--k-grid", dest="k_grid")
    p.add_argument("--auto-N", dest="auto_pairs", type=int, default=100)
    p.add_argument("--num-reps", dest="num_reps", type=int, default=100)
    p.add_argument("--multivariate", action="store_true")
    p.add_argument("--threads", type=int,
                   help="worker threads (default: MINT_THREADS or 1)")
    add_common(p)
    p.set_defaults(fn=cmd_power)

    p = sub.add_parser("gen", help="write a scenario sample as CSV")
    p.add_argument("--setting", choices=list(SETTINGS), required=True)
    p.add_argument("--param", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--multivariate", action="store_true")
    add_common(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("rerun", help="replay a recorded run from its manifest")
    p.add_argument("manifest")
    p.set_defaults(fn=cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        return args.fn(args, argv, started)
    except CliParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CliArgumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except _ESTIMATOR_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR
    except SingularDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except DegenerateResidualsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
