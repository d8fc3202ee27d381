"""White-noise stimulus preparation at calibrated signal-to-noise ratios.

Noise is drawn from numpy's PCG64 generator (``standard_normal``) and scaled
to exactly unit RMS over the buffer, so the achieved SNR is set by the gain
alone. SNR is measured over the whole file.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import SubphonError, ValidationError

INT16_MIN, INT16_MAX = -32768, 32767
MANIFEST_HEADER = ("file", "level_db", "achieved_db", "clipped_samples", "status")


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    sample_rate: int
    samples: np.ndarray  # mono int16

    def __post_init__(self):
        if int(self.sample_rate) <= 0:
            raise ValidationError("sample rate must be positive")
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise ValidationError("audio must be mono (1-D samples)")
        if samples.dtype != np.int16:
            if samples.size and (samples.min() < INT16_MIN or samples.max() > INT16_MAX):
                raise ValidationError("samples out of 16-bit range")
            samples = samples.astype(np.int16)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class SnrSpec:
    target_db: float
    seed: int = 0


class MixResult(NamedTuple):
    audio: AudioBuffer
    achieved_db: float
    clipped: int
    gain: float


def measure_rms(buf: AudioBuffer) -> float:
    if len(buf) == 0:
        raise ValidationError("cannot measure RMS of an empty buffer")
    x = buf.samples.astype(np.float64)
    return math.sqrt(float(np.mean(x * x)))


def white_noise(n: int, seed: int) -> np.ndarray:
    """``n`` Gaussian samples rescaled to unit RMS."""
    rng = np.random.Generator(np.random.PCG64(int(seed) % 2**64))
    noise = rng.standard_normal(n)
    rms = math.sqrt(float(np.mean(noise * noise)))
    return noise / rms


def noise_gain(signal_rms: float, target_db: float) -> float:
    return signal_rms / 10 ** (target_db / 20)


def mix_with_stats(signal: AudioBuffer, spec: SnrSpec) -> MixResult:
    """Mix noise into ``signal``; also report achieved SNR and clipped count.

    The achieved SNR compares signal power with the power of the noise
    actually added (after rounding to integers, before saturation).
    """
    target = float(spec.target_db)
    if math.isnan(target):
        raise ValidationError("target SNR is NaN")
    if target == -math.inf:
        raise ValidationError("target SNR of -inf dB is not realisable")
    rms = measure_rms(signal)
    if rms == 0:
        raise ValidationError("signal is silent; SNR undefined")
    if target == math.inf:
        return MixResult(AudioBuffer(signal.sample_rate, signal.samples.copy()), math.inf, 0, 0.0)

    gain = noise_gain(rms, target)
    clean = signal.samples.astype(np.float64)
    mixed = np.rint(clean + gain * white_noise(len(signal), spec.seed))
    added = mixed - clean
    noise_power = float(np.mean(added * added))
    achieved = math.inf if noise_power == 0 else 10 * math.log10(rms * rms / noise_power)
    clipped = int(np.count_nonzero((mixed < INT16_MIN) | (mixed > INT16_MAX)))
    out = np.clip(mixed, INT16_MIN, INT16_MAX).astype(np.int16)
    return MixResult(AudioBuffer(signal.sample_rate, out), achieved, clipped, gain)


def mix_white_noise(signal: AudioBuffer, spec: SnrSpec) -> AudioBuffer:
    return mix_with_stats(signal, spec).audio


def achieved_snr(clean: AudioBuffer, noisy: AudioBuffer) -> float:
    """SNR of ``noisy`` relative to ``clean``, from the sample difference."""
    a = clean.samples.astype(np.float64)
    b = noisy.samples.astype(np.float64)
    diff = b - a
    noise_power = float(np.mean(diff * diff))
    if noise_power == 0:
        return math.inf
    return 10 * math.log10(float(np.mean(a * a)) / noise_power)


# -- WAV I/O -----------------------------------------------------------------


def read_wav(path) -> AudioBuffer:
    try:
        with wave.open(str(path), "rb") as wf:
            if wf.getnchannels() != 1:
                raise ValidationError(f"{path}: expected mono, got {wf.getnchannels()} channels")
            if wf.getsampwidth() != 2:
                raise ValidationError(f"{path}: expected 16-bit samples, got {8 * wf.getsampwidth()}-bit")
            rate = wf.getframerate()
            frames = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise ValidationError(f"{path}: unreadable WAV ({exc})") from None
    return AudioBuffer(rate, np.frombuffer(frames, dtype="<i2").astype(np.int16))


def wav_bytes(buf: AudioBuffer) -> bytes:
    out = io.BytesIO()
    with wave.open(out, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(buf.sample_rate))
        wf.writeframes(buf.samples.astype("<i2").tobytes())
    return out.getvalue()


def write_wav(buf: AudioBuffer, path) -> None:
    Path(path).write_bytes(wav_bytes(buf))


# -- batch ---------------------------------------------------------------------


def level_text(level: float) -> str:
    level = float(level)
    if level.is_integer():
        return str(int(level))
    return f"{level:g}"


def derive_seed(seed: int, filename: str, level: float) -> int:
    key = f"{int(seed)}\x00{filename}\x00{level_text(level)}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


@dataclass(frozen=True)
class ManifestRow:
    file: str
    level_db: float
    achieved_db: float | None
    clipped_samples: int | None
    status: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def format_manifest_csv(rows: Iterable[ManifestRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for r in rows:
        writer.writerow([
            r.file,
            level_text(r.level_db),
            "" if r.achieved_db is None else f"{r.achieved_db:.6f}",
            "" if r.clipped_samples is None else r.clipped_samples,
            r.status,
        ])
    return buf.getvalue()


def batch_mix(input_dir, output_dir, levels: Iterable[float], seed: int = 0) -> list[ManifestRow]:
    """Mix every ``*.wav`` in ``input_dir`` at each level.

    Writes ``<stem>_snr<level>.wav`` files plus ``manifest.csv`` to
    ``output_dir``. A file that cannot be read gets error rows in the
    manifest; the others are still processed.
    """
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    levels = [float(v) for v in levels]
    for v in levels:
        if math.isnan(v):
            raise ValidationError("SNR level is NaN")
    output_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(p for p in input_dir.iterdir() if p.is_file() and p.suffix.lower() == ".wav")
    rows = []
    for path in files:
        if not levels:
            continue
        try:
            audio = read_wav(path)
        except SubphonError as exc:
            rows.extend(ManifestRow(path.name, v, None, None, f"error: {exc}") for v in levels)
            continue
        for v in levels:
            try:
                result = mix_with_stats(audio, SnrSpec(v, derive_seed(seed, path.name, v)))
            except SubphonError as exc:
                rows.append(ManifestRow(path.name, v, None, None, f"error: {exc}"))
                continue
            write_wav(result.audio, output_dir / f"{path.stem}_snr{level_text(v)}.wav")
            rows.append(ManifestRow(path.name, v, result.achieved_db, result.clipped, "ok"))
    (output_dir / "manifest.csv").write_text(format_manifest_csv(rows), encoding="utf-8", newline="")
    return rows
