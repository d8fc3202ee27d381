"""Error rates and distinctive-feature distance computed from confusion matrices."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .confmat import ConfusionMatrix
from .errors import UndefinedRateError, ValidationError
from .phoneset import NR, CategoryScheme, FeatureTable, feature_distance

REPORT_HEADER = ("condition", "overall", "manner", "place", "voicing", "df_distance", "n_trials")


class NRPolicy(enum.Enum):
    """How a No Response cell enters the feature distance."""

    MAX_DISTANCE = "max-distance"
    EXCLUDE = "exclude"


def overall_error(m: ConfusionMatrix, include_insertions: bool = True) -> float:
    """(off-diagonal + NR [+ side insertions]) / grand total."""
    total = m.total
    if total == 0:
        raise UndefinedRateError("error rate undefined for an empty matrix")
    wrong = sum(c for r, h, c in m.cells() if r != h)
    if include_insertions:
        wrong += m.insertions
    return wrong / total


def matrix_error(m: ConfusionMatrix) -> float:
    """Matrix-only error rate; never exceeds 1."""
    return overall_error(m, include_insertions=False)


class FeatureRates(NamedTuple):
    manner: Optional[float]
    place: Optional[float]
    voicing: Optional[float]


def feature_error_counts(m: ConfusionMatrix, scheme: CategoryScheme) -> dict[str, tuple[int, int]]:
    """Per measure, ``(error mass, denominator mass)``.

    An NR response is an error for every measure. A cell enters the place
    count only when both phones (just the reference, for NR) have a place.
    """
    out = {"manner": [0, 0], "place": [0, 0], "voicing": [0, 0]}
    for ref, resp, c in m.cells():
        r_manner, r_place, r_voice = (
            scheme.manner_of(ref), scheme.place_of(ref), scheme.voicing_of(ref)
        )
        if resp == NR:
            for key in ("manner", "voicing"):
                out[key][0] += c
                out[key][1] += c
            if r_place is not None:
                out["place"][0] += c
                out["place"][1] += c
            continue
        h_manner, h_place, h_voice = (
            scheme.manner_of(resp), scheme.place_of(resp), scheme.voicing_of(resp)
        )
        out["manner"][1] += c
        out["manner"][0] += c * (r_manner != h_manner)
        out["voicing"][1] += c
        out["voicing"][0] += c * (r_voice != h_voice)
        if r_place is not None and h_place is not None:
            out["place"][1] += c
            out["place"][0] += c * (r_place != h_place)
    return {key: (err, den) for key, (err, den) in out.items()}


def feature_error_rates(m: ConfusionMatrix, scheme: CategoryScheme) -> FeatureRates:
    """Manner, place and voicing error rates; None where no cell is classifiable."""
    counts = feature_error_counts(m, scheme)
    return FeatureRates(*(err / den if den else None for err, den in counts.values()))


def df_distance(
    m: ConfusionMatrix, table: FeatureTable, nr_policy: NRPolicy = NRPolicy.MAX_DISTANCE
) -> float:
    """Count-weighted mean feature mismatch over the matrix, normalized by 2F."""
    max_d = 2 * table.n_features
    num = 0
    den = 0
    for ref, resp, c in m.cells():
        if resp == NR:
            if nr_policy is NRPolicy.EXCLUDE:
                continue
            d = max_d
        else:
            d = feature_distance(ref, resp, table)
        num += c * d
        den += c
    if den == 0:
        raise UndefinedRateError("feature distance undefined: no scorable cells")
    return num / (max_d * den)


@dataclass(frozen=True)
class ErrorReport:
    condition: str
    overall_error: float
    manner_error: Optional[float]
    place_error: Optional[float]
    voicing_error: Optional[float]
    df_distance: Optional[float]
    n_trials: int
    denominators: dict = field(default_factory=dict, compare=False)


def error_report(
    m: ConfusionMatrix,
    scheme: CategoryScheme,
    table: FeatureTable,
    nr_policy: NRPolicy = NRPolicy.MAX_DISTANCE,
    condition: Optional[str] = None,
) -> ErrorReport:
    counts = feature_error_counts(m, scheme)
    rates = FeatureRates(*(err / den if den else None for err, den in counts.values()))
    try:
        dfd = df_distance(m, table, nr_policy)
    except UndefinedRateError:
        if m.total == 0:
            raise
        dfd = None  # every trial was NR under the exclude policy
    overall = matrix_error(m)
    denominators = {key: den for key, (_, den) in counts.items()}
    denominators["overall"] = m.total
    return ErrorReport(
        condition=m.condition if condition is None else condition,
        overall_error=overall,
        manner_error=rates.manner,
        place_error=rates.place,
        voicing_error=rates.voicing,
        df_distance=dfd,
        n_trials=m.total,
        denominators=denominators,
    )


def snr_report(
    matrices: Sequence[tuple[str, ConfusionMatrix]],
    scheme: CategoryScheme,
    table: FeatureTable,
    nr_policy: NRPolicy = NRPolicy.MAX_DISTANCE,
) -> list[ErrorReport]:
    """One report per condition, in the order given."""
    seen = set()
    for condition, _ in matrices:
        if condition in seen:
            raise ValidationError(f"duplicate condition {condition!r}")
        seen.add(condition)
    return [error_report(m, scheme, table, nr_policy, cond) for cond, m in matrices]


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def format_report_csv(reports: Iterable[ErrorReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for r in reports:
        writer.writerow([
            r.condition,
            _fmt(r.overall_error),
            _fmt(r.manner_error),
            _fmt(r.place_error),
            _fmt(r.voicing_error),
            _fmt(r.df_distance),
            r.n_trials,
        ])
    return buf.getvalue()
