"""Command-line interface.

Exit codes: 0 success, 1 verification failure (invalid program, failed
check, singular matrix), 2 usage, format, or parameter errors.  Every
command is deterministic given its inputs and seed flags.
"""

from __future__ import annotations

import argparse
import random
import sys

from .bilinear_core import (
    DEFAULT_PRIME,
    BilinearAlgorithm,
    DimensionTriple,
    dump_algorithm,
    exponent,
    format_algorithm,
    generic_lower_bound,
    known_bounds,
    load_algorithm,
    parse_algorithm,
    verify_brent,
    verify_trilinear_random,
)
from .errors import (
    BadArgument,
    BadField,
    BadTransform,
    DimensionError,
    ExponentUndefined,
    FormatError,
    InvalidAlgorithm,
    PivotFailure,
    SingularMatrix,
)
from .exact_algebra import PrimeField, dump_matrix, load_matrix, random_matrix
from .generators import classical, pan_aggregation, strassen_222
from .recursion import RecursionConfig, cost_model, recursive_invert, recursive_multiply
from .transforms import (
    apply_equivalence,
    dual,
    dump_transform,
    load_transform,
    random_equivalence,
    squareify,
    tensor_product,
)


def _exponent_str(alg: BilinearAlgorithm) -> str:
    try:
        return f"{exponent(alg):.4f}"
    except ExponentUndefined:
        return "undefined"


def _summary_lines(alg: BilinearAlgorithm) -> list:
    return [
        f"dims: {alg.dims}",
        f"rank: {alg.rank}",
        f"exponent: {_exponent_str(alg)}",
    ]


def _read_algorithm(path: str) -> BilinearAlgorithm:
    if path == "-":
        return parse_algorithm(sys.stdin.read())
    return load_algorithm(path)


def _require(value, flag: str):
    if value is None:
        raise BadArgument(f"missing required option {flag}")
    return value


def cmd_gen(args) -> int:
    if args.kind == "classical":
        alg = classical(
            _require(args.m, "--m"), _require(args.k, "--k"), _require(args.n, "--n")
        )
    elif args.kind == "strassen":
        alg = strassen_222()
    else:
        alg = pan_aggregation(_require(args.n, "--n"))
    text = format_algorithm(alg)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
        for line in _summary_lines(alg):
            print(line)
    else:
        sys.stdout.write(text)
        for line in _summary_lines(alg):
            print(line, file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    alg = _read_algorithm(args.path)
    if args.mode == "brent":
        report = verify_brent(alg)
        if report.valid:
            print(f"VALID ({alg.dims} rank {alg.rank}, coefficient equations hold exactly)")
            return 0
        print(f"INVALID: {len(report.violations)} violated equations")
        for (lq, ij, gh, expected, actual) in report.violations[:10]:
            print(f"  output {lq} left {ij} right {gh}: expected {expected}, got {actual}")
        if len(report.violations) > 10:
            print(f"  ... and {len(report.violations) - 10} more")
        return 1
    ok = verify_trilinear_random(alg, trials=args.trials, prime=args.prime, seed=args.seed)
    if ok:
        print(
            f"VALID ({alg.dims} rank {alg.rank}, {args.trials} random trials "
            f"mod {args.prime} agree)"
        )
        return 0
    print("INVALID: trilinear trace identity failed on a random trial")
    return 1


def cmd_info(args) -> int:
    alg = _read_algorithm(args.path)
    nu, nv, nw = alg.nonzero_counts()
    bound = known_bounds().lookup(alg.dims)
    print(f"file: {args.path}")
    for line in _summary_lines(alg):
        print(line)
    print(f"nonzeros: u={nu} v={nv} w={nw}")
    lower = "-" if bound.lower is None else bound.lower
    upper = "-" if bound.upper is None else bound.upper
    print(f"bounds: lower {lower}, upper {upper}")
    if bound.upper is not None and alg.rank > bound.upper:
        print(
            f"note: rank {alg.rank} exceeds the known upper bound {bound.upper}; "
            "a cheaper program exists"
        )
    if alg.rank < generic_lower_bound(alg.dims):
        print(
            f"warning: rank {alg.rank} is below the generic lower bound "
            f"{generic_lower_bound(alg.dims)}; no such correct program exists"
        )
    return 0


def cmd_bounds(args) -> int:
    table = known_bounds()
    if args.m or args.k or args.n:
        dims = DimensionTriple(
            _require(args.m, "--m"), _require(args.k, "--k"), _require(args.n, "--n")
        )
        row = table.lookup(dims)
        lower = "-" if row.lower is None else row.lower
        upper = "-" if row.upper is None else row.upper
        print(f"{dims}: lower {lower}, upper {upper} ({row.note})")
        return 0
    print("known rank bounds:")
    for row in table.entries:
        lower = "-" if row.lower is None else row.lower
        upper = "-" if row.upper is None else row.upper
        print(f"  {row.dims}: lower {lower}, upper {upper} ({row.note})")
    print("rules:")
    for rule in table.rules:
        print(f"  {rule}")
    return 0


def _write_transformed(alg: BilinearAlgorithm, out_path: str) -> int:
    if not verify_brent(alg).valid:
        print("error: refusing to write: result fails verification", file=sys.stderr)
        return 1
    dump_algorithm(alg, out_path)
    print(f"wrote {out_path}")
    for line in _summary_lines(alg):
        print(line)
    return 0


def cmd_dual(args) -> int:
    alg = _read_algorithm(args.path)
    return _write_transformed(dual(alg, args.perm), args.out)


def cmd_product(args) -> int:
    a = _read_algorithm(args.first)
    b = _read_algorithm(args.second)
    return _write_transformed(tensor_product(a, b), args.out)


def cmd_square(args) -> int:
    alg = _read_algorithm(args.path)
    if alg.dims.is_square:
        print(f"{alg.dims} is already square; writing it unchanged", file=sys.stderr)
        if not verify_brent(alg).valid:
            print("error: program fails verification", file=sys.stderr)
            return 1
        return _write_transformed(alg, args.out)
    return _write_transformed(squareify(alg), args.out)


def cmd_equiv(args) -> int:
    alg = _read_algorithm(args.path)
    if args.transform and args.seed is not None:
        raise BadArgument("give either --seed or --transform, not both")
    if args.transform:
        transform, _dims = load_transform(args.transform)
    elif args.seed is not None:
        transform = random_equivalence(alg.dims, alg.rank, args.seed)
        if args.transform_out:
            dump_transform(transform, alg.dims, args.transform_out)
            print(f"wrote transform {args.transform_out}")
    else:
        raise BadArgument("need --seed N or --transform FILE")
    return _write_transformed(apply_equivalence(alg, transform), args.out)


def _load_base(path: str) -> BilinearAlgorithm:
    alg = _read_algorithm(path)
    if not verify_brent(alg).valid:
        raise InvalidAlgorithm(f"base program {path} fails verification")
    if not alg.dims.is_square:
        print(f"base program is {alg.dims}; using its squared tensor cube", file=sys.stderr)
        alg = squareify(alg)
    return alg


def cmd_multiply(args) -> int:
    base = _load_base(args.alg)
    cfg = RecursionConfig(base, args.threshold)
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    side = max(a.rows, a.cols, b.cols)
    product, report = recursive_multiply(cfg, a.embed(side, side), b.embed(side, side))
    product = product.submatrix(0, 0, a.rows, b.cols)
    dump_matrix(product, args.out)
    print(f"wrote {args.out} ({product.rows}x{product.cols})")
    print(f"bilinear mults: {report.bilinear_mults}")
    print(f"scalar mults: {report.scalar_mults}")
    print(f"additions: {report.additions}")
    return 0


def cmd_invert(args) -> int:
    base = _load_base(args.alg)
    cfg = RecursionConfig(base, args.threshold)
    a = load_matrix(args.a)
    inverse, report = recursive_invert(cfg, a)
    dump_matrix(inverse, args.out)
    print(f"wrote {args.out} ({inverse.rows}x{inverse.cols})")
    print(f"bilinear mults: {report.bilinear_mults}")
    print(f"scalar mults: {report.scalar_mults}")
    print(f"additions: {report.additions}")
    return 0


def _parse_sizes(spec: str, side: int) -> list:
    if spec == "auto":
        sizes = []
        power = side
        while power <= 64:
            sizes.append(power)
            power *= side
        return sizes or [side]
    try:
        if ".." in spec:
            lo_text, hi_text = spec.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if lo < 1 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        sizes = [int(tok) for tok in spec.split(",")]
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError
        return sizes
    except ValueError:
        raise BadArgument(f"bad --sizes {spec!r}; use N, A..B, or A,B,C") from None


def cmd_bench(args) -> int:
    base = _load_base(args.alg)
    cfg = RecursionConfig(base, args.threshold)
    sizes = _parse_sizes(args.sizes, cfg.side)
    field = PrimeField(DEFAULT_PRIME)
    rng = random.Random(args.seed)
    rows = []
    for k in sizes:
        a = random_matrix(field, k, k, rng)
        b = random_matrix(field, k, k, rng)
        _, report = recursive_multiply(cfg, a, b)
        padded = 1
        while padded < k:
            padded *= cfg.side
        predicted = cost_model(base, padded).bilinear_mults
        rows.append((k, report.bilinear_mults, report.additions, predicted))
    widths = (6, 15, 15, 16)
    header = ("K", "measured_mults", "measured_adds", "predicted_mults")
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "  fast")
    for k, mm, ma, pm in rows:
        marker = "*" if mm < k**3 else ""
        print("  ".join(str(x).rjust(w) for x, w in zip((k, mm, ma, pm), widths))
              + (f"  {marker}" if marker else ""))
    print("(* = fewer multiplications than the K^3 triple loop)")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("K,measured_mults,measured_adds,predicted_mults\n")
            for row in rows:
                fh.write(",".join(str(x) for x in row) + "\n")
        print(f"wrote {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmalg",
        description="Workbench for exact bilinear matrix-multiplication programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a shipped program")
    p.add_argument("kind", choices=("classical", "strassen", "pan"))
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--out", help="output path (default: program text to stdout)")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("verify", help="check a program file")
    p.add_argument("path", help="program file, or - for stdin")
    p.add_argument("--mode", choices=("brent", "random"), default="brent")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("info", help="print statistics and known bounds")
    p.add_argument("path")
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("bounds", help="known rank bounds table or one lookup")
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("dual", help="one of the six duals")
    p.add_argument("path")
    p.add_argument("--perm", required=True,
                   choices=("mkn", "knm", "nmk", "mnk", "nkm", "kmn"))
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_dual)

    p = sub.add_parser("product", help="tensor product of two programs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_product)

    p = sub.add_parser("square", help="tensor cube of a rectangular program")
    p.add_argument("path")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_square)

    p = sub.add_parser("equiv", help="apply an equivalence transform")
    p.add_argument("path")
    p.add_argument("--seed", type=int)
    p.add_argument("--transform", help="transform file to apply")
    p.add_argument("--transform-out", help="where to save a generated transform")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_equiv)

    p = sub.add_parser("multiply", help="multiply two matrix files recursively")
    p.add_argument("alg")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_multiply)

    p = sub.add_parser("invert", help="invert a matrix file by block elimination")
    p.add_argument("alg")
    p.add_argument("a")
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("bench", help="measured vs predicted cost over sizes")
    p.add_argument("alg")
    p.add_argument("--sizes", default="auto", help="N, A..B, or comma list")
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write a CSV table")
    p.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BadArgument, BadField, BadTransform, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidAlgorithm, SingularMatrix, PivotFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
