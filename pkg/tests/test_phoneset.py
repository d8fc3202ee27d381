import itertools

import pytest
from hypothesis import given, strategies as st

from subphon import (
    MASTER_ORDER,
    NR,
    FeatureValue,
    ParseError,
    SubphonError,
    UnknownPhoneError,
    ValidationError,
    canonical_order,
    classify,
    feature_distance,
    load_feature_table,
    load_scheme,
)
from subphon.phoneset import CategoryScheme, FeatureTable, data_dir

# Rows for /f/ and /s/ copied by hand from data/features.tsv, feature by feature.
F_ROW = "- + - + + - - - - - - - + - + - 0 0 0 - - 0 0 0".split()
S_ROW = "- + - + + - - - - - - - - 0 0 + + - + - - 0 0 0".split()
HAND_NUMERIC = {"+": 1, "0": 0, "-": -1}


def hand_distance(row_a, row_b):
    total = 0
    for a, b in zip(row_a, row_b):
        total += abs(HAND_NUMERIC[a] - HAND_NUMERIC[b])
    return total


def write_table(tmp_path, text):
    path = tmp_path / "features.tsv"
    path.write_text(text, encoding="utf-8")
    return path


def test_default_table_shape(table):
    assert table.n_features == 24
    assert table.phones == frozenset(MASTER_ORDER)
    assert NR not in table


def test_feature_value_embedding():
    assert [v.numeric for v in FeatureValue] == [1, -1, 0]
    assert FeatureValue.parse("0") is FeatureValue.UNSPECIFIED
    with pytest.raises(ParseError):
        FeatureValue.parse("x")


def test_bad_value_names_row_and_column(tmp_path):
    path = write_table(tmp_path, "phone\tvoice\tnasal\np\tx\t-\n")
    with pytest.raises(ParseError) as info:
        load_feature_table(path)
    assert "'p'" in str(info.value) and "'voice'" in str(info.value)


def test_duplicate_phone_rejected(tmp_path):
    path = write_table(tmp_path, "phone\tvoice\np\t-\np\t+\n")
    with pytest.raises(ValidationError, match="duplicate phone 'p'"):
        load_feature_table(path)


def test_ragged_row_rejected(tmp_path):
    path = write_table(tmp_path, "phone\tvoice\tnasal\np\t-\n")
    with pytest.raises(ValidationError, match="expected 2"):
        load_feature_table(path)


def test_nr_row_rejected(tmp_path):
    path = write_table(tmp_path, "phone\tvoice\nNR\t-\n")
    with pytest.raises(ValidationError):
        load_feature_table(path)


def test_empty_feature_list_rejected():
    with pytest.raises(ValidationError):
        FeatureTable((), {})


@pytest.mark.parametrize(
    "inventory, expected",
    [
        ({"s", "p", NR, "b"}, ["p", "s", "b", NR]),
        (set(MASTER_ORDER), list(MASTER_ORDER)),
        (set(), []),
        ({NR}, [NR]),
    ],
)
def test_canonical_order(inventory, expected):
    assert canonical_order(inventory) == expected


def test_master_order_matches_listing():
    listed = "p, t, k, f, th, s, sh, ch, b, d, g, v, dh, z, zh, dj, m, n, ng, w, y, r, l, h"
    assert MASTER_ORDER == tuple(listed.split(", "))


def test_canonical_order_unknown_label():
    with pytest.raises(UnknownPhoneError, match="'aa'"):
        canonical_order({"p", "aa"})


@given(st.sets(st.sampled_from(MASTER_ORDER + (NR,))), st.sets(st.sampled_from(MASTER_ORDER + (NR,))))
def test_canonical_order_is_stable_filter(s1, s2):
    merged = canonical_order(s1 | s2)
    assert [p for p in merged if p in s1] == canonical_order(s1)


def test_distance_identity(table):
    for p in MASTER_ORDER:
        assert feature_distance(p, p, table) == 0


def test_distance_f_s_matches_hand_sum(table):
    assert [v.value for v in table.rows["f"]] == F_ROW
    assert [v.value for v in table.rows["s"]] == S_ROW
    expected = hand_distance(F_ROW, S_ROW)
    assert expected == 9
    assert feature_distance("f", "s", table) == expected
    assert expected >= 4


def test_f_s_share_manner_features_but_differ_in_place(table):
    names = table.feature_names
    f, s = table.rows["f"], table.rows["s"]
    for feat in ("consonantal", "sonorant", "continuant"):
        i = names.index(feat)
        assert f[i] == s[i]
    assert f[names.index("labial")] is FeatureValue.PLUS
    assert s[names.index("labial")] is FeatureValue.MINUS


def test_distance_bounded_by_2f(table):
    top = max(feature_distance(a, b, table) for a in MASTER_ORDER for b in MASTER_ORDER)
    assert 0 < top <= 48


def test_distinct_phones_have_distinct_bundles(table):
    for a, b in itertools.combinations(MASTER_ORDER, 2):
        assert feature_distance(a, b, table) > 0, (a, b)


def test_distance_refuses_nr_and_unknown(table):
    with pytest.raises(SubphonError):
        feature_distance("p", NR, table)
    with pytest.raises(UnknownPhoneError):
        feature_distance("p", "aa", table)


@pytest.mark.parametrize(
    "phone, expected",
    [
        ("p", ("stops", "labials", "unvoiced")),
        ("w", ("glides", None, "voiced")),
        ("zh", ("fricatives", "palatals", "voiced")),
        ("ch", ("affricates", "palatals", "voiced")),
        ("h", ("glides", None, "voiced")),
        ("th", ("fricatives", "dentals", "unvoiced")),
    ],
)
def test_classify(scheme, phone, expected):
    assert tuple(classify(phone, scheme)) == expected


def test_classify_unknown(scheme):
    with pytest.raises(UnknownPhoneError):
        classify("aa", scheme)
    with pytest.raises(SubphonError):
        classify(NR, scheme)


def test_scheme_partitions(scheme):
    assert scheme.inventory == frozenset(MASTER_ORDER)
    seen = [p for members in scheme.manner.values() for p in members]
    assert sorted(seen) == sorted(MASTER_ORDER)
    voiced, unvoiced = scheme.voicing["voiced"], scheme.voicing["unvoiced"]
    assert voiced | unvoiced == scheme.inventory and not voiced & unvoiced
    assert unvoiced == {"f", "th", "s", "sh", "p", "t", "k"}
    places = list(scheme.place.values())
    for a, b in itertools.combinations(places, 2):
        assert not a & b


def test_scheme_class_sets(scheme):
    assert scheme.manner == {
        "glides": {"w", "y", "r", "l", "h"},
        "nasals": {"m", "n", "ng"},
        "fricatives": {"f", "th", "s", "sh", "v", "dh", "z", "zh"},
        "stops": {"p", "t", "k", "b", "d", "g"},
        "affricates": {"ch", "dj"},
    }
    assert scheme.place == {
        "labials": {"m", "f", "v", "p", "b"},
        "dentals": {"th", "dh"},
        "alveolars": {"n", "s", "z", "t", "d"},
        "palatals": {"sh", "zh", "ch", "dj"},
        "velars": {"ng", "k", "g"},
    }


def test_scheme_with_vowels(tmp_path):
    path = tmp_path / "scheme.txt"
    path.write_text(
        "manner.vowels = aa iy\nmanner.stops = p b\nplace.labials = p b\nvoicing.unvoiced = p\n",
        encoding="utf-8",
    )
    s = load_scheme(path)
    assert classify("aa", s) == ("vowels", None, "voiced")


@pytest.mark.parametrize(
    "text, error",
    [
        ("manner.stops = p\nmanner.nasals = p\n", ValidationError),
        ("manner.stops = p\nplace.labials = m\n", ValidationError),
        ("manner.stops = p\nvoicing.voiced = p\n", ParseError),
        ("stops: p t k\n", ParseError),
        ("manner.stops = p\nmanner.stops = t\n", ValidationError),
    ],
)
def test_bad_scheme(tmp_path, text, error):
    path = tmp_path / "scheme.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(error):
        load_scheme(path)


def test_data_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("SUBPHON_DATA_DIR", str(tmp_path))
    assert data_dir() == tmp_path


def test_scheme_rejects_nr():
    with pytest.raises(ValidationError):
        CategoryScheme({"stops": {"p", NR}}, {}, set())
