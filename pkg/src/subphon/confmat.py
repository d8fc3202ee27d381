"""Confusion matrices of reference phone against response, with a No Response column."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable, Optional

import numpy as np

from .align import Alignment, Op
from .errors import ParseError, UnknownPhoneError, ValidationError
from .phoneset import MASTER_ORDER, NR, canonical_order, check_label

CORNER = "ref\\resp"


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    ref_labels: tuple[str, ...]
    resp_labels: tuple[str, ...]
    counts: np.ndarray
    condition: str = ""
    insertions: int = 0

    def __post_init__(self):
        refs = tuple(self.ref_labels)
        resps = tuple(self.resp_labels)
        for label in refs:
            check_label(label)
        for label in resps:
            check_label(label)
        if len(set(refs)) != len(refs):
            raise ValidationError("duplicate reference labels")
        if len(set(resps)) != len(resps):
            raise ValidationError("duplicate response labels")
        if NR in refs:
            raise ValidationError(f"{NR} cannot be a reference label")
        if NR in resps and resps[-1] != NR:
            raise ValidationError(f"{NR} must be the last response label")
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.size == 0:
            counts = counts.reshape(len(refs), len(resps))
        if counts.shape != (len(refs), len(resps)):
            raise ValidationError(
                f"counts shape {counts.shape} does not match {len(refs)}x{len(resps)} labels"
            )
        if (counts < 0).any():
            raise ValidationError("confusion counts must be nonnegative")
        if int(self.insertions) < 0:
            raise ValidationError("insertion tally must be nonnegative")
        if "\n" in self.condition or "\r" in self.condition:
            raise ValidationError("condition label must be a single line")
        counts.flags.writeable = False
        object.__setattr__(self, "ref_labels", refs)
        object.__setattr__(self, "resp_labels", resps)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "insertions", int(self.insertions))

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return (
            self.ref_labels == other.ref_labels
            and self.resp_labels == other.resp_labels
            and np.array_equal(self.counts, other.counts)
            and self.condition == other.condition
            and self.insertions == other.insertions
        )

    __hash__ = None

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def phones(self) -> set[str]:
        return (set(self.ref_labels) | set(self.resp_labels)) - {NR}

    def count(self, ref: str, resp: str) -> int:
        try:
            return int(self.counts[self.ref_labels.index(ref), self.resp_labels.index(resp)])
        except ValueError:
            return 0

    def cells(self):
        """Yield ``(ref, resp, count)`` for every cell with a nonzero count."""
        for i, j in zip(*np.nonzero(self.counts)):
            yield self.ref_labels[i], self.resp_labels[j], int(self.counts[i, j])

    def scaled(self, k: int) -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.ref_labels, self.resp_labels, self.counts * k, self.condition, self.insertions * k
        )

    def with_condition(self, condition: str) -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.ref_labels, self.resp_labels, self.counts, condition, self.insertions
        )


def inventory_of(alignments: Iterable[Alignment]) -> set[str]:
    """Every phone that occurs on either side of the alignments."""
    phones = set()
    for alignment in alignments:
        for step in alignment.steps:
            phones.update(p for p in (step.ref, step.hyp) if p is not None)
    return phones


def build_from_alignments(
    alignments: Iterable[Alignment],
    inventory: Collection[str],
    condition: str = "",
    master: tuple[str, ...] = MASTER_ORDER,
) -> ConfusionMatrix:
    """Tabulate alignment steps: deletions go to NR, insertions to the side tally."""
    labels = canonical_order(set(inventory) - {NR}, master)
    resps = labels + [NR]
    row = {label: i for i, label in enumerate(labels)}
    col = {label: j for j, label in enumerate(resps)}
    counts = np.zeros((len(labels), len(resps)), dtype=np.int64)
    insertions = 0
    for alignment in alignments:
        for step in alignment.steps:
            for phone in (step.ref, step.hyp):
                if phone is not None and phone not in row:
                    raise UnknownPhoneError(phone, "matrix inventory")
            if step.op is Op.INSERT:
                insertions += 1
            elif step.op is Op.DELETE:
                counts[row[step.ref], col[NR]] += 1
            else:
                counts[row[step.ref], col[step.hyp]] += 1
    return ConfusionMatrix(tuple(labels), tuple(resps), counts, condition, insertions)


def reorder_canonical(m: ConfusionMatrix, master: tuple[str, ...] = MASTER_ORDER) -> ConfusionMatrix:
    refs = canonical_order(m.ref_labels, master)
    resps = canonical_order(m.resp_labels, master)
    rows = [m.ref_labels.index(r) for r in refs]
    cols = [m.resp_labels.index(r) for r in resps]
    counts = m.counts[np.ix_(rows, cols)]
    return ConfusionMatrix(tuple(refs), tuple(resps), counts, m.condition, m.insertions)


def row_normalize(m: ConfusionMatrix) -> np.ndarray:
    """Divide each row by its sum; all-zero rows stay zero."""
    counts = m.counts.astype(np.float64)
    sums = counts.sum(axis=1, keepdims=True)
    out = np.zeros_like(counts)
    np.divide(counts, sums, out=out, where=sums > 0)
    return out


# -- CSV -------------------------------------------------------------------


def format_matrix_csv(m: ConfusionMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([CORNER, *m.resp_labels])
    for label, row in zip(m.ref_labels, m.counts):
        writer.writerow([label, *(int(c) for c in row)])
    if m.condition:
        buf.write(f"# condition: {m.condition}\n")
    buf.write(f"# insertions: {m.insertions}\n")
    return buf.getvalue()


def parse_matrix_csv(
    text: str, source: str = "<input>", known: Optional[Collection[str]] = MASTER_ORDER
) -> ConfusionMatrix:
    """Parse matrix CSV text. ``known`` restricts labels; pass None to accept any."""
    condition = ""
    insertions = 0
    body = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            key = key.strip()
            if sep and key == "condition":
                condition = value.strip()
            elif sep and key == "insertions":
                try:
                    insertions = int(value.strip())
                except ValueError:
                    raise ParseError(f"{source}:{lineno}: bad insertion count {value.strip()!r}") from None
                if insertions < 0:
                    raise ParseError(f"{source}:{lineno}: negative insertion count")
            continue
        if line.strip():
            body.append((lineno, line))
    if not body:
        raise ParseError(f"{source}: no header row")

    rows = [(lineno, next(csv.reader([line]))) for lineno, line in body]
    lineno, header = rows[0]
    if header[0].strip() != CORNER:
        raise ParseError(f"{source}:{lineno}: first cell must be {CORNER!r}")
    resps = [h.strip() for h in header[1:]]
    allowed = None if known is None else set(known) | {NR}
    refs = []
    grid = []
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise ParseError(
                f"{source}:{lineno}: ragged row with {len(cells)} cells, expected {len(header)}"
            )
        refs.append(cells[0].strip())
        values = []
        for resp, cell in zip(resps, cells[1:]):
            try:
                value = int(cell.strip())
            except ValueError:
                raise ParseError(
                    f"{source}:{lineno}: cell ({refs[-1]}, {resp}) is not an integer: {cell!r}"
                ) from None
            if value < 0:
                raise ParseError(f"{source}:{lineno}: negative count at ({refs[-1]}, {resp})")
            values.append(value)
        grid.append(values)
    if allowed is not None:
        for label in refs + resps:
            if label not in allowed:
                raise UnknownPhoneError(label, f"known phones ({source})")
    try:
        counts = np.array(grid, dtype=np.int64).reshape(len(refs), len(resps))
        return ConfusionMatrix(tuple(refs), tuple(resps), counts, condition, insertions)
    except ValidationError as exc:
        raise ParseError(f"{source}: {exc}") from None


def read_matrix_csv(path, known: Optional[Collection[str]] = MASTER_ORDER) -> ConfusionMatrix:
    path = Path(path)
    return parse_matrix_csv(path.read_text(encoding="utf-8"), str(path), known)


def write_matrix_csv(m: ConfusionMatrix, path) -> None:
    Path(path).write_text(format_matrix_csv(m), encoding="utf-8", newline="")
