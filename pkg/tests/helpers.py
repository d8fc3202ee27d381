from pathlib import Path

import numpy as np

from subphon import NR, ConfusionMatrix

DATA = Path(__file__).parent / "data"


def square(labels, grid, nr=None, condition="", insertions=0):
    """Matrix over ``labels`` (+ optional NR column given as a list)."""
    labels = tuple(labels)
    grid = np.asarray(grid, dtype=np.int64).reshape(len(labels), len(labels))
    if nr is None:
        return ConfusionMatrix(labels, labels, grid, condition, insertions)
    grid = np.hstack([grid, np.asarray(nr, dtype=np.int64).reshape(-1, 1)])
    return ConfusionMatrix(labels, labels + (NR,), grid, condition, insertions)


def speech_like_tone(seconds=1.0, rate=16000, level=0.02):
    """Harmonic complex on a 120 Hz fundamental with a syllable-rate envelope."""
    t = np.arange(int(seconds * rate)) / rate
    harmonics = sum(np.sin(2 * np.pi * 120 * k * t + k) / k for k in range(1, 12))
    envelope = 0.6 + 0.4 * np.sin(2 * np.pi * 4 * t) ** 2
    x = harmonics * envelope
    x = x / np.abs(x).max() * level * 32767
    return np.rint(x).astype(np.int16)
