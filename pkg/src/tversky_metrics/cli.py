"""Command-line interface: ``tversky-metrics <subcommand> …``.

Exit status is 0 on success, 1 on domain errors (bad parameter values,
malformed input files) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import List, Optional

from . import __version__
from .cluster import SequenceMeasure, alpha_grid, alpha_sweep, distance_matrix, ward_linkage
from .errors import DomainError, GroundTooLarge, TverskyError
from .fasta import parse_fasta
from .lz78 import dump_dictionary, lz78_dictionary, lzjd
from .measures import Family, MeasureSpec, as_rational, parse_set, tversky
from .textio import counterexample_lines, format_set, format_value, region_csv
from .verify import (
    MAX_GROUND,
    check_triangle_exhaustive,
    constructive_counterexample,
    default_workers,
    estimate_rho,
    gragera_rho,
    region_grid,
    region_predicate,
    symmetry_violation,
)

SAMPLE_FASTA = "sample"


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _measure_options(parser: argparse.ArgumentParser, default: Optional[str] = None) -> None:
    parser.add_argument("--measure", default=default, required=default is None,
                        help="family: strm, tversky, j1, jinf, jp, dice, overlap, delta, "
                             "steinhaus, lzjd, zkgram, edit")
    parser.add_argument("--alpha", type=_rational)
    parser.add_argument("--beta", type=_rational)
    parser.add_argument("--gamma", type=_rational)
    parser.add_argument("--s", type=_rational)
    parser.add_argument("--p", type=_rational)
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument("--bias", type=_rational, default=Fraction(0))
    parser.add_argument("--normalize", action="store_true",
                        help="divide Z_{k,alpha} by the size of the profile union")


def _spec(args) -> MeasureSpec:
    return MeasureSpec(
        Family.parse(args.measure), alpha=args.alpha, beta=args.beta, gamma=args.gamma,
        s=args.s, p=args.p, k=args.k, bias=args.bias, normalize=args.normalize,
    )


def _param_lines(spec: MeasureSpec) -> List[str]:
    lines = [f"measure: {spec.describe()}"]
    for name in ("alpha", "beta", "gamma", "s", "p"):
        value = getattr(spec, name)
        if value is not None:
            lines.append(f"{name}: {format_value(value)}")
    return lines


def _seed_lines(args) -> List[str]:
    return [f"seed: {args.seed}"] if args.seed is not None else []


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _records(path: str):
    if path == SAMPLE_FASTA:
        ref = resources.files("tversky_metrics") / "data" / "sample_spike.fasta"
        with resources.as_file(ref) as real:
            return parse_fasta(real)
    return parse_fasta(path)


def cmd_dist(args) -> int:
    spec = _spec(args)
    if spec.is_sequence_measure:
        value = SequenceMeasure(spec)(args.a, args.b)
    else:
        value = spec(parse_set(args.a), parse_set(args.b))
    lines = _param_lines(spec) + _seed_lines(args)
    if spec.is_sequence_measure:
        lines += [f"a: {args.a}", f"b: {args.b}"]
    else:
        lines += [f"a: {format_set(parse_set(args.a))}", f"b: {format_set(parse_set(args.b))}"]
    lines.append(f"value: {format_value(value)}")
    print("\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    spec = _spec(args)
    if spec.is_sequence_measure:
        raise DomainError(f"verify works on set measures, not {spec.family.value}")
    if args.ground > MAX_GROUND:
        raise GroundTooLarge(f"--ground {args.ground} exceeds the cap of {MAX_GROUND}")
    lines = ["command: verify", *_param_lines(spec), f"ground: {args.ground}", *_seed_lines(args)]
    if spec.family is Family.STRM and spec.bias == 0:
        lines.append(f"predicted_metric: {str(region_predicate(spec.alpha, spec.beta)).lower()}")
    if spec.family is Family.JP:
        lines.append("note: J_p metricity for 1 < p < inf is conjectural; findings are reported, not asserted")
    asym = symmetry_violation(spec, args.ground)
    if asym is not None:
        lines.append(f"symmetric: no, witness {format_set(asym[0])} vs {format_set(asym[1])}")
    else:
        lines.append("symmetric: yes")
    found = check_triangle_exhaustive(spec, args.ground, workers=_workers(args))
    if found is None:
        lines.append("result: no violation")
    else:
        lines.append("result: VIOLATION")
        lines += counterexample_lines(found)
    if args.constructive and spec.family is Family.STRM:
        witness = constructive_counterexample(spec.alpha, spec.beta)
        if witness is None:
            lines.append("constructive: none (inside the metric region)")
        else:
            lines.append(f"constructive: violation on {len(witness.X | witness.Y | witness.Z)} points")
            lines += ["  " + line for line in counterexample_lines(witness)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_region(args) -> int:
    cells = region_grid(args.alpha_steps, args.beta_max, args.beta_steps, args.ground,
                        workers=_workers(args))
    _emit(region_csv(cells), args.out)
    bad = [c for c in cells if c.contradicts_prediction]
    print(f"cells: {len(cells)}, metric: {sum(c.predicted_metric for c in cells)}, "
          f"contradictions: {len(bad)}", file=sys.stderr)
    return 0


def cmd_rho(args) -> int:
    spec = tversky(args.alpha, args.beta)
    theory = gragera_rho(args.alpha, args.beta)
    empirical = estimate_rho(spec, args.ground)
    lines = [
        "command: rho", *_param_lines(spec), f"ground: {args.ground}", *_seed_lines(args),
        f"rho_theory: {format_value(theory)}",
        f"rho_empirical: {format_value(empirical)}",
        f"empirical_within_theory: {str(empirical <= theory).lower()}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_lzjd(args) -> int:
    a, b = Path(args.file_a).read_bytes(), Path(args.file_b).read_bytes()
    if args.dump_a:
        Path(args.dump_a).write_text(dump_dictionary(lz78_dictionary(a)), encoding="utf-8")
    if args.dump_b:
        Path(args.dump_b).write_text(dump_dictionary(lz78_dictionary(b)), encoding="utf-8")
    da, db = lz78_dictionary(a), lz78_dictionary(b)
    print("\n".join([
        f"dictionary_a: {len(da)}",
        f"dictionary_b: {len(db)}",
        f"shared: {len(da & db)}",
        f"lzjd: {format_value(lzjd(a, b))}",
    ]))
    return 0


def cmd_phylo(args) -> int:
    records = _records(args.fasta)
    spec = _spec(args)
    matrix = distance_matrix([(r.id, r.residues) for r in records], spec, workers=_workers(args))
    tree = ward_linkage(matrix)
    newick = tree.to_newick(args.precision) + "\n"
    if args.matrix_out:
        Path(args.matrix_out).write_text(matrix.to_csv(args.precision), encoding="utf-8")
    _emit(newick, args.newick_out or args.out)
    if tree.inversions:
        print(f"warning: non-monotone merge heights at merges {tree.inversions}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    records = _records(args.fasta)
    grid = alpha_grid(args.step, args.alpha_min, args.alpha_max)
    intervals = alpha_sweep([(r.id, r.residues) for r in records], args.k, grid,
                            normalize=args.normalize, workers=_workers(args))
    lines = [
        "command: sweep",
        f"sequences: {len(records)}",
        f"k: {args.k}",
        f"step: {format_value(args.step)}",
        f"alpha_min: {format_value(args.alpha_min)}",
        f"alpha_max: {format_value(args.alpha_max)}",
        f"normalized: {str(args.normalize).lower()}",
        *_seed_lines(args),
        f"intervals: {len(intervals)}",
    ]
    for i, iv in enumerate(intervals, 1):
        lines.append(f"interval {i}: {format_value(iv.alpha_lo)} .. {format_value(iv.alpha_hi)}\t{iv.topology}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tversky-metrics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="recorded in reports; no command draws random numbers")
    common.add_argument("--workers", type=int,
                        help="parallel processes (default: $TVERSKY_WORKERS or all CPUs)")
    common.add_argument("--out", help="write the primary output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="one pairwise value")
    _measure_options(p)
    p.add_argument("--a", required=True, help="comma-separated set, or a sequence for lzjd/zkgram/edit")
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("verify", parents=[common], help="exhaustive triangle-inequality check")
    _measure_options(p)
    p.add_argument("--ground", type=int, required=True)
    p.add_argument("--constructive", action="store_true",
                   help="also run the constructive counterexamples (strm only)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("region", parents=[common], help="metric-region grid as CSV")
    p.add_argument("--alpha-steps", type=int, required=True)
    p.add_argument("--beta-max", type=_rational, required=True)
    p.add_argument("--beta-steps", type=int, required=True)
    p.add_argument("--ground", type=int, default=3)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("rho", parents=[common], help="relaxed triangle constant of d^T")
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--beta", type=_rational, required=True)
    p.add_argument("--ground", type=int, default=4)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("lzjd", parents=[common], help="LZJD between two files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--dump-a", help="write file A's dictionary here")
    p.add_argument("--dump-b", help="write file B's dictionary here")
    p.set_defaults(func=cmd_lzjd)

    p = sub.add_parser("phylo", parents=[common], help="FASTA -> distance matrix + Ward Newick tree")
    p.add_argument("fasta", help=f"FASTA path, or '{SAMPLE_FASTA}' for the bundled corpus")
    _measure_options(p, default="zkgram")
    p.add_argument("--matrix-out", help="write the distance matrix CSV here")
    p.add_argument("--newick-out", help="write the Newick tree here (default stdout)")
    p.add_argument("--precision", type=int, default=6)
    p.set_defaults(func=cmd_phylo)

    p = sub.add_parser("sweep", parents=[common], help="tree topology intervals over alpha")
    p.add_argument("fasta", help=f"FASTA path, or '{SAMPLE_FASTA}' for the bundled corpus")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--step", type=_rational, default=Fraction(1, 100))
    p.add_argument("--alpha-min", type=_rational, default=Fraction(0))
    p.add_argument("--alpha-max", type=_rational, default=Fraction(1, 2))
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "phylo" and args.alpha is None:
            if Family.parse(args.measure) is Family.ZKGRAM:
                args.alpha = Fraction(1, 2)
        return args.func(args)
    except TverskyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
