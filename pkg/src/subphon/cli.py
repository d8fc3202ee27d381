"""Command-line front end: ``subphon {align,confmat,report,render,mix}``.

Exit status is 0 on success, 1 when a batch finished with per-file failures
and 2 for usage or validation errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import confmat as cm
from . import metrics as mt
from . import noisemix as nm
from . import render as rd
from .align import (
    Alignment,
    align,
    format_alignments,
    format_tally_csv,
    pair_sequences,
    read_alignments,
    read_sequences,
)
from .errors import SubphonError, UnknownPhoneError, ValidationError
from .phoneset import (
    CategoryScheme,
    FeatureTable,
    data_dir,
    load_feature_table,
    load_scheme,
)

log = logging.getLogger("subphon")


@dataclass
class RunConfig:
    feature_table_path: Optional[Path] = None
    scheme_path: Optional[Path] = None
    nr_policy: mt.NRPolicy = mt.NRPolicy.MAX_DISTANCE
    output_dir: Path = Path(".")
    cell_size: int = 16
    gutter: int = 0

    def load(self) -> tuple[FeatureTable, CategoryScheme]:
        features = self.feature_table_path or data_dir() / "features.tsv"
        scheme = self.scheme_path or data_dir() / "scheme.txt"
        return load_feature_table(features), load_scheme(scheme)


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def _aligned_pairs(ref_path, hyp_path) -> list[tuple[str, Alignment]]:
    pairs = pair_sequences(read_sequences(ref_path), read_sequences(hyp_path))
    return [(utt, align(ref, hyp)) for utt, ref, hyp in pairs]


def cmd_align(args) -> int:
    aligned = _aligned_pairs(args.ref, args.hyp)
    out = Path(args.out)
    tally_path = Path(args.tally) if args.tally else out.with_suffix(".tally.csv")
    _write_text(out, format_alignments(aligned))
    _write_text(tally_path, format_tally_csv(aligned))
    return 0


def cmd_confmat(args) -> int:
    if args.align and (args.ref or args.hyp):
        raise ValidationError("give either --align or --ref/--hyp, not both")
    if args.align:
        aligned = read_alignments(args.align)
    elif args.ref and args.hyp:
        aligned = _aligned_pairs(args.ref, args.hyp)
    else:
        raise ValidationError("need --align, or both --ref and --hyp")
    alignments = [a for _, a in aligned]
    m = cm.build_from_alignments(alignments, cm.inventory_of(alignments), args.condition)
    cm.write_matrix_csv(m, args.out)
    return 0


def _check_inventory(m: cm.ConfusionMatrix, table: FeatureTable, scheme: CategoryScheme, source) -> None:
    for label in sorted(m.phones):
        if label not in table:
            raise UnknownPhoneError(label, f"feature table ({source})")
        if label not in scheme.inventory:
            raise UnknownPhoneError(label, f"category scheme ({source})")


def cmd_report(args) -> int:
    config = RunConfig(
        feature_table_path=args.features,
        scheme_path=args.scheme,
        nr_policy=mt.NRPolicy(args.nr_policy),
    )
    table, scheme = config.load()
    series = []
    for path in args.matrix:
        m = cm.read_matrix_csv(path, known=None)
        _check_inventory(m, table, scheme, path)
        series.append((m.condition or Path(path).stem, m))
    reports = mt.snr_report(series, scheme, table, config.nr_policy)
    rd.emit_curves(reports, args.out)
    return 0


def cmd_render(args) -> int:
    m = cm.reorder_canonical(cm.read_matrix_csv(args.matrix))
    img = rd.render_matrix(m, args.cell_size, args.gutter, absolute=args.absolute)
    rd.write_pgm(img, args.out)
    return 0


def _parse_levels(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValidationError(f"bad level list {text!r}") from None


def cmd_mix(args) -> int:
    rows = nm.batch_mix(args.input, args.output, _parse_levels(args.levels), args.seed)
    failed = sorted({r.file for r in rows if not r.ok})
    for name in failed:
        log.warning("failed: %s", name)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subphon", description="Sub-phonemic evaluation of phone recognition results."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align hypothesis to reference phone sequences")
    p.add_argument("--ref", required=True, help="reference sequence file")
    p.add_argument("--hyp", required=True, help="hypothesis sequence file")
    p.add_argument("--out", required=True, help="alignment output file")
    p.add_argument("--tally", help="edit tally CSV (default: <out>.tally.csv)")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("confmat", help="tabulate a confusion matrix")
    p.add_argument("--align", help="alignment file written by 'subphon align'")
    p.add_argument("--ref", help="reference sequence file")
    p.add_argument("--hyp", help="hypothesis sequence file")
    p.add_argument("--condition", default="", help="condition label, e.g. SNR=-6dB")
    p.add_argument("--out", required=True, help="matrix CSV output")
    p.set_defaults(func=cmd_confmat)

    p = sub.add_parser("report", help="error rates and DF-distance per matrix")
    p.add_argument("--matrix", required=True, nargs="+", action="extend", help="matrix CSV(s), in condition order")
    p.add_argument("--features", type=Path, help="feature table TSV (default: shipped)")
    p.add_argument("--scheme", type=Path, help="category scheme file (default: shipped)")
    p.add_argument(
        "--nr-policy",
        choices=[p.value for p in mt.NRPolicy],
        default=mt.NRPolicy.MAX_DISTANCE.value,
        help="how No Response cells enter the DF-distance",
    )
    p.add_argument("--out", required=True, help="report CSV output")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("render", help="render a matrix as a grey-scale PGM")
    p.add_argument("--matrix", required=True, help="matrix CSV")
    p.add_argument("--out", required=True, help="PGM output")
    p.add_argument("--cell-size", type=int, default=16)
    p.add_argument("--gutter", type=int, default=0, help="label margin in pixels (0: no labels)")
    p.add_argument("--absolute", action="store_true", help="shade by matrix-wide maximum, not row total")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("mix", help="mix white noise into WAV files at given SNRs")
    p.add_argument("--in", dest="input", required=True, help="input directory of mono 16-bit WAVs")
    p.add_argument("--out", dest="output", required=True, help="output directory")
    p.add_argument("--levels", required=True, help="comma-separated SNRs in dB, e.g. --levels=40,30,-10")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mix)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (SubphonError, OSError) as exc:
        print(f"subphon {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
