"""Phone inventory, ternary distinctive features and manner/place/voicing classes.

The default data files live in ``subphon/data``; set ``SUBPHON_DATA_DIR`` to a
directory holding ``features.tsv`` and ``scheme.txt`` to replace them.
"""

from __future__ import annotations

import enum
import functools
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np

from .errors import ParseError, SubphonError, UnknownPhoneError, ValidationError

NR = "NR"

# Rows/columns of every confusion matrix follow this order; absent phones are skipped.
MASTER_ORDER = (
    "p", "t", "k", "f", "th", "s", "sh", "ch",
    "b", "d", "g", "v", "dh", "z", "zh", "dj",
    "m", "n", "ng", "w", "y", "r", "l", "h",
)

_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")


def check_label(label: str) -> str:
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise ValidationError(f"invalid phone label {label!r}")
    return label


def data_dir() -> Path:
    override = os.environ.get("SUBPHON_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("subphon") / "data"))


class FeatureValue(enum.Enum):
    PLUS = "+"
    MINUS = "-"
    UNSPECIFIED = "0"

    @property
    def numeric(self) -> int:
        return _NUMERIC[self]

    @classmethod
    def parse(cls, text: str) -> "FeatureValue":
        try:
            return cls(text)
        except ValueError:
            raise ParseError(f"feature value must be '+', '-' or '0', got {text!r}") from None


_NUMERIC = {FeatureValue.PLUS: 1, FeatureValue.UNSPECIFIED: 0, FeatureValue.MINUS: -1}


@dataclass(frozen=True)
class FeatureTable:
    feature_names: tuple[str, ...]
    rows: Mapping[str, tuple[FeatureValue, ...]]
    _numeric: Mapping[str, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.feature_names)
        if not names:
            raise ValidationError("feature table needs at least one feature")
        if len(set(names)) != len(names):
            raise ValidationError("duplicate feature names in feature table")
        rows = {}
        for label, values in self.rows.items():
            check_label(label)
            if label == NR:
                raise ValidationError(f"{NR} is reserved for 'No Response' and cannot carry features")
            values = tuple(values)
            if len(values) != len(names):
                raise ValidationError(
                    f"row {label!r} has {len(values)} values, expected {len(names)}"
                )
            rows[label] = values
        numeric = {}
        for label, values in rows.items():
            vec = np.array([v.numeric for v in values], dtype=np.int64)
            vec.flags.writeable = False
            numeric[label] = vec
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_numeric", numeric)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def phones(self) -> frozenset[str]:
        return frozenset(self.rows)

    def __contains__(self, label) -> bool:
        return label in self.rows

    def vector(self, label: str) -> np.ndarray:
        """Numeric embedding (+1 / 0 / -1) of a phone's feature bundle."""
        if label == NR:
            raise SubphonError(
                f"{NR} has no feature values; its distance is a matrix-level policy"
            )
        try:
            return self._numeric[label]
        except KeyError:
            raise UnknownPhoneError(label, "feature table") from None


def load_feature_table(path) -> FeatureTable:
    """Read a tab-separated feature table (header ``phone<TAB>f1...``)."""
    path = Path(path)
    names = None
    rows: dict[str, tuple[FeatureValue, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cells = line.split("\t")
            if names is None:
                if cells[0] != "phone":
                    raise ParseError(f"{path}:{lineno}: header must start with 'phone'")
                names = tuple(cells[1:])
                if not names or any(not n for n in names):
                    raise ParseError(f"{path}:{lineno}: empty feature name in header")
                continue
            label = cells[0]
            if len(cells) - 1 != len(names):
                raise ValidationError(
                    f"{path}:{lineno}: row {label!r} has {len(cells) - 1} values, "
                    f"expected {len(names)}"
                )
            if label in rows:
                raise ValidationError(f"{path}:{lineno}: duplicate phone {label!r}")
            values = []
            for name, cell in zip(names, cells[1:]):
                try:
                    values.append(FeatureValue.parse(cell))
                except ParseError as exc:
                    raise ParseError(
                        f"{path}:{lineno}: phone {label!r}, feature {name!r}: {exc}"
                    ) from None
            rows[label] = tuple(values)
    if names is None:
        raise ParseError(f"{path}: no header row")
    try:
        return FeatureTable(names, rows)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


@functools.lru_cache(maxsize=None)
def _cached_table(path: str) -> FeatureTable:
    return load_feature_table(path)


def default_feature_table() -> FeatureTable:
    return _cached_table(str(data_dir() / "features.tsv"))


def canonical_order(inventory: Iterable[str], master: tuple[str, ...] = MASTER_ORDER) -> list[str]:
    """Sort phones by their position in ``master``; ``NR`` always goes last."""
    labels = set(inventory)
    position = {label: i for i, label in enumerate(master)}
    for label in sorted(labels):
        if label != NR and label not in position:
            raise UnknownPhoneError(label, "the canonical phone order")
    ordered = sorted((lab for lab in labels if lab != NR), key=position.__getitem__)
    if NR in labels:
        ordered.append(NR)
    return ordered


def feature_distance(a: str, b: str, table: FeatureTable) -> int:
    """Sum over features of |embed(a) - embed(b)|; lies in [0, 2F]."""
    return int(np.abs(table.vector(a) - table.vector(b)).sum())


class Classification(NamedTuple):
    manner: str
    place: Optional[str]
    voicing: str


def _invert(classes: Mapping[str, frozenset], kind: str) -> dict[str, str]:
    owner: dict[str, str] = {}
    for name, members in classes.items():
        for phone in members:
            if phone in owner:
                raise ValidationError(
                    f"phone {phone!r} is in two {kind} classes: {owner[phone]!r} and {name!r}"
                )
            owner[phone] = name
    return owner


@dataclass(frozen=True)
class CategoryScheme:
    """Manner, place and voicing partitions of a phone inventory.

    Manner classes define the inventory. Place classes may leave phones
    unclassified. Voicing is ``unvoiced`` plus its complement ``voiced``.
    """

    manner: Mapping[str, frozenset[str]]
    place: Mapping[str, frozenset[str]]
    unvoiced: frozenset[str]
    _owners: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        manner = {name: frozenset(m) for name, m in self.manner.items()}
        place = {name: frozenset(m) for name, m in self.place.items()}
        unvoiced = frozenset(self.unvoiced)
        if not manner:
            raise ValidationError("scheme defines no manner classes")
        for members in list(manner.values()) + list(place.values()) + [unvoiced]:
            for phone in members:
                check_label(phone)
                if phone == NR:
                    raise ValidationError(f"{NR} cannot belong to a class")
        manner_of = _invert(manner, "manner")
        place_of = _invert(place, "place")
        inventory = frozenset(manner_of)
        for phone in sorted(set(place_of) - inventory):
            raise ValidationError(f"place class member {phone!r} has no manner class")
        for phone in sorted(unvoiced - inventory):
            raise ValidationError(f"unvoiced member {phone!r} has no manner class")
        object.__setattr__(self, "manner", manner)
        object.__setattr__(self, "place", place)
        object.__setattr__(self, "unvoiced", unvoiced)
        object.__setattr__(self, "_owners", {"manner": manner_of, "place": place_of})

    @property
    def inventory(self) -> frozenset[str]:
        return frozenset(self._owners["manner"])

    @property
    def voicing(self) -> dict[str, frozenset[str]]:
        return {"unvoiced": self.unvoiced, "voiced": self.inventory - self.unvoiced}

    def manner_of(self, phone: str) -> str:
        try:
            return self._owners["manner"][phone]
        except KeyError:
            raise UnknownPhoneError(phone, "category scheme") from None

    def place_of(self, phone: str) -> Optional[str]:
        self.manner_of(phone)
        return self._owners["place"].get(phone)

    def voicing_of(self, phone: str) -> str:
        self.manner_of(phone)
        return "unvoiced" if phone in self.unvoiced else "voiced"


def classify(phone: str, scheme: CategoryScheme) -> Classification:
    if phone == NR:
        raise SubphonError(f"{NR} has no manner, place or voicing class")
    return Classification(scheme.manner_of(phone), scheme.place_of(phone), scheme.voicing_of(phone))


_SCHEME_LINE = re.compile(r"^(manner|place|voicing)\.([A-Za-z0-9_]+)\s*=\s*(.*)$")


def load_scheme(path) -> CategoryScheme:
    """Read a scheme file of ``manner.<class> = ...`` style lines.

    ``[section]`` headers and ``#`` comments are allowed and ignored.
    """
    path = Path(path)
    groups: dict[str, dict[str, frozenset[str]]] = {"manner": {}, "place": {}, "voicing": {}}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#") or (line.startswith("[") and line.endswith("]")):
                continue
            match = _SCHEME_LINE.match(line)
            if not match:
                raise ParseError(f"{path}:{lineno}: cannot parse {line!r}")
            kind, name, members = match.groups()
            if name in groups[kind]:
                raise ValidationError(f"{path}:{lineno}: {kind}.{name} defined twice")
            if kind == "voicing" and name != "unvoiced":
                raise ParseError(
                    f"{path}:{lineno}: only voicing.unvoiced may be given (voiced is the complement)"
                )
            groups[kind][name] = frozenset(members.split())
    try:
        return CategoryScheme(
            groups["manner"], groups["place"], groups["voicing"].get("unvoiced", frozenset())
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


@functools.lru_cache(maxsize=None)
def _cached_scheme(path: str) -> CategoryScheme:
    return load_scheme(path)


def default_scheme() -> CategoryScheme:
    return _cached_scheme(str(data_dir() / "scheme.txt"))
