"""Minimum-edit-distance alignment of hypothesis phones to reference phones."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ParseError, UndefinedRateError, ValidationError
from .phoneset import NR, check_label


class Op(enum.Enum):
    MATCH = "M"
    SUBSTITUTE = "S"
    DELETE = "D"
    INSERT = "I"


class Step(NamedTuple):
    op: Op
    ref: Optional[str]
    hyp: Optional[str]

    def encode(self) -> str:
        return f"{self.op.value}:{self.ref or '-'}:{self.hyp or '-'}"

    @classmethod
    def decode(cls, token: str) -> "Step":
        parts = token.split(":")
        if len(parts) != 3:
            raise ParseError(f"bad alignment step {token!r}")
        code, ref, hyp = parts
        try:
            op = Op(code)
        except ValueError:
            raise ParseError(f"bad alignment step {token!r}") from None
        ref = None if ref == "-" else ref
        hyp = None if hyp == "-" else hyp
        if op is Op.MATCH and (ref is None or ref != hyp):
            raise ParseError(f"match step needs identical phones: {token!r}")
        if op is Op.SUBSTITUTE and (ref is None or hyp is None or ref == hyp):
            raise ParseError(f"substitution needs two different phones: {token!r}")
        if op is Op.DELETE and (ref is None or hyp is not None):
            raise ParseError(f"deletion carries only a reference phone: {token!r}")
        if op is Op.INSERT and (hyp is None or ref is not None):
            raise ParseError(f"insertion carries only a hypothesis phone: {token!r}")
        return cls(op, ref, hyp)


def Match(ref: str, hyp: Optional[str] = None) -> Step:
    return Step(Op.MATCH, ref, ref if hyp is None else hyp)


def Substitute(ref: str, hyp: str) -> Step:
    return Step(Op.SUBSTITUTE, ref, hyp)


def Delete(ref: str) -> Step:
    return Step(Op.DELETE, ref, None)


def Insert(hyp: str) -> Step:
    return Step(Op.INSERT, None, hyp)


_MATCH, _SUB, _DEL, _INS = Op.MATCH, Op.SUBSTITUTE, Op.DELETE, Op.INSERT


def _step(op: Op, ref: Optional[str], hyp: Optional[str]) -> Step:
    return tuple.__new__(Step, (op, ref, hyp))


@dataclass(frozen=True)
class Alignment:
    steps: tuple[Step, ...]
    # filled in by align(), which already knows the edit distance
    _cost: Optional[int] = field(default=None, compare=False, repr=False)

    @property
    def cost(self) -> int:
        if self._cost is not None:
            return self._cost
        return sum(step.op is not Op.MATCH for step in self.steps)

    @property
    def reference(self) -> list[str]:
        return [s.ref for s in self.steps if s.ref is not None]

    @property
    def hypothesis(self) -> list[str]:
        return [s.hyp for s in self.steps if s.hyp is not None]


@dataclass(frozen=True)
class EditTally:
    matches: int = 0
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0

    @property
    def entries(self) -> int:
        return self.matches + self.substitutions + self.deletions

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "EditTally") -> "EditTally":
        return EditTally(
            self.matches + other.matches,
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
        )


_seen_labels: set[str] = set()


def _check_sequence(seq: Sequence[str]) -> None:
    for label in seq:
        if label not in _seen_labels:
            check_label(label)
            if label == NR:
                raise ValidationError(f"{NR} cannot appear in a phone sequence")
            _seen_labels.add(label)


def align(reference: Sequence[str], hypothesis: Sequence[str]) -> Alignment:
    """Unit-cost Levenshtein alignment with a fixed traceback preference.

    At every cell the traceback takes the diagonal (match/substitute) if it
    lies on an optimal path, otherwise a deletion, otherwise an insertion.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    if not (_seen_labels.issuperset(ref) and _seen_labels.issuperset(hyp)):
        _check_sequence(ref)
        _check_sequence(hyp)
    if _kernel is not None:
        cost, steps = _kernel.align_steps(ref, hyp)
        return Alignment(steps, cost)
    return _align_py(ref, hyp)


def _align_py(ref: list[str], hyp: list[str]) -> Alignment:
    prev = list(range(len(hyp) + 1))
    table = [prev]
    for i, r in enumerate(ref, 1):
        cur = [i]
        left = i
        for h, best, up in zip(hyp, prev, prev[1:]):
            if r != h:
                best += 1
            if up + 1 < best:
                best = up + 1
            if left + 1 < best:
                best = left + 1
            cur.append(best)
            left = best
        table.append(cur)
        prev = cur

    steps = []
    i, j = len(ref), len(hyp)
    while i and j:
        here = table[i][j]
        r, h = ref[i - 1], hyp[j - 1]
        diag = table[i - 1][j - 1]
        if r == h and diag == here:
            steps.append(_step(_MATCH, r, h))
            i -= 1
            j -= 1
        elif r != h and diag + 1 == here:
            steps.append(_step(_SUB, r, h))
            i -= 1
            j -= 1
        elif table[i - 1][j] + 1 == here:
            steps.append(_step(_DEL, r, None))
            i -= 1
        else:
            steps.append(_step(_INS, None, h))
            j -= 1
    while i:
        i -= 1
        steps.append(_step(_DEL, ref[i], None))
    while j:
        j -= 1
        steps.append(_step(_INS, None, hyp[j]))
    steps.reverse()
    return Alignment(tuple(steps), table[-1][-1])


try:
    from . import _levenshtein as _kernel
except ImportError:  # built without a C compiler
    _kernel = None
else:
    _kernel.configure(Step, _MATCH, _SUB, _DEL, _INS)


def tally(alignment: Alignment) -> EditTally:
    counts = {op: 0 for op in Op}
    for step in alignment.steps:
        counts[step.op] += 1
    return EditTally(counts[Op.MATCH], counts[Op.SUBSTITUTE], counts[Op.DELETE], counts[Op.INSERT])


def error_rate(t: EditTally) -> float:
    """(D + I + S) / entries. Can exceed 1 when insertions dominate."""
    if t.entries == 0:
        raise UndefinedRateError("error rate undefined for an empty reference")
    return t.errors / t.entries


# -- sequence files -------------------------------------------------------


def parse_sequences(lines: Iterable[str], source: str = "<input>") -> dict[str, list[str]]:
    """Parse ``utt_id<TAB>phone phone ...`` lines into an ordered mapping."""
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        utt, _, rest = line.partition("\t")
        utt = utt.strip()
        if not utt or any(c.isspace() for c in utt):
            raise ParseError(f"{source}:{lineno}: bad utterance id {utt!r}")
        if utt in out:
            raise ParseError(f"{source}:{lineno}: duplicate utterance id {utt!r}")
        phones = rest.split()
        try:
            _check_sequence(phones)
        except ValidationError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        out[utt] = phones
    return out


def read_sequences(path) -> dict[str, list[str]]:
    with open(path, encoding="utf-8") as fh:
        return parse_sequences(fh, str(path))


def pair_sequences(
    ref: dict[str, list[str]], hyp: dict[str, list[str]]
) -> list[tuple[str, list[str], list[str]]]:
    """Pair utterances in reference order; mismatched ids raise ValidationError."""
    for utt in ref:
        if utt not in hyp:
            raise ValidationError(f"utterance {utt!r} missing from hypothesis")
    for utt in hyp:
        if utt not in ref:
            raise ValidationError(f"utterance {utt!r} missing from reference")
    return [(utt, ref[utt], hyp[utt]) for utt in ref]


def format_alignments(aligned: Iterable[tuple[str, Alignment]]) -> str:
    return "".join(
        f"{utt}\t{' '.join(s.encode() for s in a.steps)}\n" for utt, a in aligned
    )


def parse_alignments(lines: Iterable[str], source: str = "<input>") -> list[tuple[str, Alignment]]:
    out = []
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        utt, _, rest = line.partition("\t")
        if utt in seen:
            raise ParseError(f"{source}:{lineno}: duplicate utterance id {utt!r}")
        seen.add(utt)
        try:
            steps = tuple(Step.decode(tok) for tok in rest.split())
            for s in steps:
                _check_sequence([p for p in (s.ref, s.hyp) if p is not None])
        except (ParseError, ValidationError) as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        out.append((utt, Alignment(steps)))
    return out


def read_alignments(path) -> list[tuple[str, Alignment]]:
    with open(Path(path), encoding="utf-8") as fh:
        return parse_alignments(fh, str(path))


def format_tally_csv(aligned: Iterable[tuple[str, Alignment]]) -> str:
    """Per-utterance tallies followed by a ``TOTAL`` row."""
    lines = ["utt_id,matches,substitutions,deletions,insertions,entries,error_rate"]
    total = EditTally()

    def row(name: str, t: EditTally) -> str:
        rate = f"{error_rate(t):.6f}" if t.entries else ""
        return (
            f"{name},{t.matches},{t.substitutions},{t.deletions},{t.insertions},"
            f"{t.entries},{rate}"
        )

    for utt, a in aligned:
        t = tally(a)
        total = total + t
        lines.append(row(utt, t))
    lines.append(row("TOTAL", total))
    return "\n".join(lines) + "\n"
