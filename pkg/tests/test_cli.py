import subprocess
import sys

import pytest

from helpers import DATA, speech_like_tone
from subphon import AudioBuffer, read_matrix_csv
from subphon.noisemix import write_wav
from subphon.cli import main


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    err = capsys.readouterr().err if capsys else ""
    return code, err


def test_align_identical_files(tmp_path):
    ref = write(tmp_path / "ref.txt", "u1\tp t k\nu2\ts sh\n")
    out = tmp_path / "out.align"
    assert run(["align", "--ref", ref, "--hyp", ref, "--out", out])[0] == 0
    rows = (tmp_path / "out.tally.csv").read_text().splitlines()
    assert rows[-1] == "TOTAL,5,0,0,0,5,0.000000"


def test_align_missing_utterance(tmp_path, capsys):
    ref = write(tmp_path / "ref.txt", "u1\tp\nu2\tt\n")
    hyp = write(tmp_path / "hyp.txt", "u1\tp\n")
    code, err = run(["align", "--ref", ref, "--hyp", hyp, "--out", tmp_path / "o"], capsys)
    assert code == 2
    assert "u2" in err and err.startswith("subphon align: error:")


def test_align_hand_counted_tally(tmp_path):
    ref = write(tmp_path / "ref.txt", "a\tp t k\nb\tb d\nc\tm\n")
    hyp = write(tmp_path / "hyp.txt", "a\tp k\nb\tb t g\nc\tm\n")
    tally = tmp_path / "t.csv"
    assert run(["align", "--ref", ref, "--hyp", hyp, "--out", tmp_path / "x", "--tally", tally])[0] == 0
    # a: 2 matches, 1 deletion; b: b=b, d->t, +g; c: 1 match
    assert tally.read_text().splitlines() == [
        "utt_id,matches,substitutions,deletions,insertions,entries,error_rate",
        "a,2,0,1,0,3,0.333333",
        "b,1,1,0,1,2,1.000000",
        "c,1,0,0,0,1,0.000000",
        "TOTAL,4,1,1,1,6,0.500000",
    ]
    assert (tmp_path / "x").read_text().splitlines()[0] == "a\tM:p:p D:t:- M:k:k"


def test_confmat_identity_and_nr(tmp_path):
    ref = write(tmp_path / "ref.txt", "u1\tb b\nu2\ts\n")
    hyp = write(tmp_path / "hyp.txt", "u1\tb b\nu2\t\n")
    out = tmp_path / "m.csv"
    assert run(["confmat", "--ref", ref, "--hyp", hyp, "--condition", "SNR=0dB", "--out", out])[0] == 0
    m = read_matrix_csv(out)
    assert m.count("b", "b") == 2 and m.count("s", "NR") == 1
    assert m.condition == "SNR=0dB"


def test_confmat_two_step_equals_one_step(tmp_path):
    ref = write(tmp_path / "ref.txt", "u1\tp t k s\nu2\tm n\n")
    hyp = write(tmp_path / "hyp.txt", "u1\tb t s\nu2\tm n ng\n")
    run(["align", "--ref", ref, "--hyp", hyp, "--out", tmp_path / "a.align"])
    run(["confmat", "--align", tmp_path / "a.align", "--out", tmp_path / "two.csv"])
    run(["confmat", "--ref", ref, "--hyp", hyp, "--out", tmp_path / "one.csv"])
    assert (tmp_path / "two.csv").read_bytes() == (tmp_path / "one.csv").read_bytes()


def test_confmat_needs_inputs(tmp_path, capsys):
    code, err = run(["confmat", "--out", tmp_path / "m.csv"], capsys)
    assert code == 2 and "--align" in err


def test_report_identity(tmp_path):
    m = write(tmp_path / "m.csv", "ref\\resp,p,b\np,4,0\nb,0,4\n# condition: 30dB\n")
    out = tmp_path / "r.csv"
    assert run(["report", "--matrix", m, "--out", out])[0] == 0
    lines = out.read_text().splitlines()
    assert lines[1].startswith("30dB,0.000000,0.000000,0.000000,0.000000,0.000000,")


def test_report_matches_library(tmp_path, table, scheme):
    import numpy as np

    from subphon.metrics import format_report_csv, snr_report

    labels = "p t k f th s sh b d g v dh z zh m n".split()
    rng = np.random.default_rng(16)
    paths = []
    for i, snr in enumerate((12, 6, 0, -6)):
        grid = rng.integers(0, 4 + 3 * i, size=(16, 16)) + np.eye(16, dtype=int) * (40 - 10 * i)
        rows = ["ref\\resp," + ",".join(labels)]
        rows += [labels[r] + "," + ",".join(map(str, grid[r])) for r in range(16)]
        paths.append(write(tmp_path / f"{snr}dB.csv", "\n".join(rows) + "\n"))
    out = tmp_path / "r.csv"
    assert run(["report", "--matrix", *paths, "--out", out])[0] == 0
    series = [(p.stem, read_matrix_csv(p)) for p in paths]
    assert out.read_text() == format_report_csv(snr_report(series, scheme, table))
    assert [line.split(",")[0] for line in out.read_text().splitlines()[1:]] == ["12dB", "6dB", "0dB", "-6dB"]


def test_report_unknown_phone(tmp_path, capsys):
    m = write(tmp_path / "m.csv", "ref\\resp,p,aa\np,4,0\naa,0,4\n")
    code, err = run(["report", "--matrix", m, "--out", tmp_path / "r.csv"], capsys)
    assert code == 2 and "'aa'" in err


def test_report_exclude_policy(tmp_path):
    m = write(tmp_path / "m.csv", "ref\\resp,p,b,NR\np,0,0,3\nb,0,0,2\n")
    out = tmp_path / "r.csv"
    assert run(["report", "--matrix", m, "--nr-policy", "exclude", "--out", out])[0] == 0
    assert out.read_text().splitlines()[1].split(",")[5] == ""


def test_render_golden(tmp_path):
    out = tmp_path / "m.pgm"
    assert run(["render", "--matrix", DATA / "fixture_3x3.csv", "--out", out, "--cell-size", 2])[0] == 0
    assert out.read_bytes() == (DATA / "fixture_3x3_c2.pgm").read_bytes()
    again = tmp_path / "again.pgm"
    run(["render", "--matrix", DATA / "fixture_3x3.csv", "--out", again, "--cell-size", 2])
    assert again.read_bytes() == out.read_bytes()


def test_render_bad_cell_size(tmp_path, capsys):
    code, _ = run(["render", "--matrix", DATA / "fixture_3x3.csv", "--out", tmp_path / "m.pgm", "--cell-size", 0], capsys)
    assert code == 2
    assert not (tmp_path / "m.pgm").exists()


def make_wavs(directory, n=2):
    directory.mkdir()
    for i in range(n):
        write_wav(AudioBuffer(16000, speech_like_tone(0.2, level=0.02)), directory / f"s{i}.wav")


def test_mix_seven_levels(tmp_path):
    make_wavs(tmp_path / "in")
    levels = "--levels=40,30,20,10,0,-10,-20"
    assert run(["mix", "--in", tmp_path / "in", "--out", tmp_path / "a", levels, "--seed", 4])[0] == 0
    assert len(list((tmp_path / "a").glob("*.wav"))) == 14
    run(["mix", "--in", tmp_path / "in", "--out", tmp_path / "b", levels, "--seed", 4])
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()


def test_mix_corrupt_input(tmp_path):
    make_wavs(tmp_path / "in", 1)
    (tmp_path / "in" / "bad.wav").write_bytes(b"nope")
    code, _ = run(["mix", "--in", tmp_path / "in", "--out", tmp_path / "o", "--levels", "0,10"])
    assert code == 1
    manifest = (tmp_path / "o" / "manifest.csv").read_text()
    assert manifest.count("error") == 2
    assert len(list((tmp_path / "o").glob("s0_*.wav"))) == 2


def test_mix_bad_levels(tmp_path, capsys):
    make_wavs(tmp_path / "in", 1)
    code, err = run(["mix", "--in", tmp_path / "in", "--out", tmp_path / "o", "--levels", "ten"], capsys)
    assert code == 2 and "level" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "subphon", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for command in ("align", "confmat", "report", "render", "mix"):
        assert command in proc.stdout


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["render"])
    assert info.value.code == 2
