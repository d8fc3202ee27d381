"""Grey-scale confusion-matrix images (binary PGM) and curve CSV output.

Darkness encodes the row-normalized proportion of a cell: a phone that drew
the same response on every trial renders black, an unused cell white.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .confmat import ConfusionMatrix
from .errors import ParseError, ValidationError
from .metrics import ErrorReport, format_report_csv

GLYPH_W, GLYPH_H = 5, 7

# fmt: off
_FONT = {
    "a": [".....", ".....", ".###.", "....#", ".####", "#...#", ".####"],
    "b": ["#....", "#....", "#.##.", "##..#", "#...#", "#...#", "####."],
    "c": [".....", ".....", ".###.", "#....", "#....", "#...#", ".###."],
    "d": ["....#", "....#", ".##.#", "#..##", "#...#", "#...#", ".####"],
    "e": [".....", ".....", ".###.", "#...#", "#####", "#....", ".###."],
    "f": ["..##.", ".#..#", ".#...", "###..", ".#...", ".#...", ".#..."],
    "g": [".....", ".####", "#...#", "#...#", ".####", "....#", ".###."],
    "h": ["#....", "#....", "#.##.", "##..#", "#...#", "#...#", "#...#"],
    "i": ["..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."],
    "j": ["...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."],
    "k": ["#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."],
    "l": [".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."],
    "m": [".....", ".....", "##.#.", "#.#.#", "#.#.#", "#...#", "#...#"],
    "n": [".....", ".....", "#.##.", "##..#", "#...#", "#...#", "#...#"],
    "o": [".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."],
    "p": [".....", ".....", "####.", "#...#", "####.", "#....", "#...."],
    "q": [".....", ".....", ".##.#", "#..##", ".####", "....#", "....#"],
    "r": [".....", ".....", "#.##.", "##..#", "#....", "#....", "#...."],
    "s": [".....", ".....", ".###.", "#....", ".###.", "....#", "####."],
    "t": [".#...", ".#...", "###..", ".#...", ".#...", ".#..#", "..##."],
    "u": [".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#"],
    "v": [".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#.."],
    "w": [".....", ".....", "#...#", "#...#", "#.#.#", "#.#.#", ".#.#."],
    "x": [".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"],
    "y": [".....", ".....", "#...#", "#...#", ".####", "....#", ".###."],
    "z": [".....", ".....", "#####", "...#.", "..#..", ".#...", "#####"],
    "N": ["#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"],
    "R": ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"],
    "0": [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."],
    "1": ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."],
    "2": [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"],
    "3": ["#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."],
    "4": ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."],
    "5": ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."],
    "6": ["..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."],
    "7": ["#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."],
    "8": [".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."],
    "9": [".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."],
    "_": [".....", ".....", ".....", ".....", ".....", ".....", "#####"],
    "'": ["..#..", "..#..", ".#...", ".....", ".....", ".....", "....."],
    "?": [".###.", "#...#", "....#", "...#.", "..#..", ".....", "..#.."],
}
# fmt: on

_GLYPHS = {
    ch: np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    for ch, rows in _FONT.items()
}


@dataclass(frozen=True, eq=False)
class GreyImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8, row-major
    cell_size: int = 1
    label_gutter: int = 0

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.dtype != np.uint8:
            raise ValidationError("pixels must be uint8")
        if pixels.shape != (self.height, self.width):
            raise ValidationError(
                f"pixel grid {pixels.shape} does not match {self.height}x{self.width}"
            )


def luminance(p) -> int:
    """Grey level for proportion ``p``: round_half_away(255 * (1 - p))."""
    value = 255 * (1 - Fraction(p))
    if value < 0:
        return -math.floor(-value + Fraction(1, 2))
    return math.floor(value + Fraction(1, 2))


def _cell_luminance(count: int, denom: int) -> int:
    # 255 * (1 - count/denom), half rounded up, in integer arithmetic
    if denom == 0:
        return 255
    return (2 * 255 * (denom - count) + denom) // (2 * denom)


def _draw_text(canvas: np.ndarray, text: str, x0: int, y0: int, x1: int, y1: int) -> None:
    """Centre ``text`` in the box [x0, x1) x [y0, y1), clipped to the box."""
    width = len(text) * (GLYPH_W + 1) - 1
    x = x0 + (x1 - x0 - width) // 2
    y = y0 + (y1 - y0 - GLYPH_H) // 2
    for ch in text:
        glyph = _GLYPHS.get(ch, _GLYPHS["?"])
        for gy, gx in zip(*np.nonzero(glyph)):
            px, py = x + gx, y + gy
            if x0 <= px < x1 and y0 <= py < y1:
                canvas[py, px] = 0
        x += GLYPH_W + 1


def render_matrix(
    m: ConfusionMatrix, cell_size: int = 16, gutter: int = 0, absolute: bool = False
) -> GreyImage:
    """Render a (canonically ordered) matrix as grey squares.

    With ``absolute`` the darkest cell is the largest count in the whole
    matrix instead of the row total.
    """
    if not isinstance(cell_size, int) or cell_size <= 0:
        raise ValidationError("cell_size must be a positive integer")
    if not isinstance(gutter, int) or gutter < 0:
        raise ValidationError("gutter must be a nonnegative integer")
    rows, cols = m.counts.shape
    width = gutter + cols * cell_size
    height = gutter + rows * cell_size
    canvas = np.full((height, width), 255, dtype=np.uint8)

    counts = m.counts
    if absolute:
        peak = int(counts.max()) if counts.size else 0
        denoms = [peak] * rows
    else:
        denoms = [int(s) for s in counts.sum(axis=1)]
    for i in range(rows):
        y = gutter + i * cell_size
        for j in range(cols):
            x = gutter + j * cell_size
            canvas[y:y + cell_size, x:x + cell_size] = _cell_luminance(int(counts[i, j]), denoms[i])

    if gutter > 0:
        for j, label in enumerate(m.resp_labels):
            x = gutter + j * cell_size
            _draw_text(canvas, label, x, 0, x + cell_size, gutter)
        for i, label in enumerate(m.ref_labels):
            y = gutter + i * cell_size
            _draw_text(canvas, label, 0, y, gutter, y + cell_size)
    return GreyImage(width, height, canvas, cell_size, gutter)


def pgm_bytes(img: GreyImage) -> bytes:
    if img.width <= 0 or img.height <= 0:
        raise ValidationError("cannot write a zero-size image")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img.pixels, dtype=np.uint8).tobytes()


def write_pgm(img: GreyImage, path) -> None:
    Path(path).write_bytes(pgm_bytes(img))


def read_pgm(path) -> np.ndarray:
    """Minimal binary PGM reader (8-bit, comments allowed)."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    if tokens[0] != b"P5":
        raise ParseError(f"{path}: not a binary PGM")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ParseError(f"{path}: only 8-bit PGM supported")
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise ParseError(f"{path}: truncated raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def emit_curves(reports: Sequence[ErrorReport], path) -> None:
    """Write the report CSV behind error-pattern and DF-distance curves."""
    if not reports:
        raise ValidationError("no reports to write")
    Path(path).write_text(format_report_csv(reports), encoding="utf-8", newline="")
