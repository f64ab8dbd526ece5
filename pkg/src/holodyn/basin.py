"""Iteration of the skew product (w, z) -> (e^{2 pi i alpha} w, wz + z^2).

Orbits over the closed unit disk in w admit two one-line certificates:
the triangle T = {|w| + |z| < 1} is absorbing (|w z + z^2| <= |z|(|w|+|z|)),
and |z| > 2 forces |z_{n+1}| >= |z|(|z|-1) > |z|, hence divergence.  Every
orbit that triggers neither within the iteration budget stays Undecided;
no verdict is ever guessed.
"""

from __future__ import annotations

import cmath
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import DomainError
from .geometry import PlanarGrid, PointC2

ESCAPE_RADIUS = 2.0
DEFAULT_RENDER_ITER = 2000
DEFAULT_SCAN_ITER = 50000

STATUS_UNDECIDED = 0
STATUS_CONVERGED = 1
STATUS_ESCAPED = 2


@dataclass(frozen=True)
class AlphaMap:
    """The parameter alpha (in turns) and the map f_alpha it induces."""

    alpha: float
    rotation: complex = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "rotation", cmath.exp(2j * cmath.pi * self.alpha))


class Verdict(Enum):
    Converged = "converged"
    Escaped = "escaped"
    Undecided = "undecided"


@dataclass(frozen=True)
class OrbitVerdict:
    status: Verdict
    steps: int
    last: PointC2


def step(m: AlphaMap, p: PointC2) -> PointC2:
    return PointC2(p.w * m.rotation, p.w * p.z + p.z * p.z)


def retract(p: PointC2) -> PointC2:
    return PointC2(p.w, 0j)


def classify(m: AlphaMap, p: PointC2, max_iter: int) -> OrbitVerdict:
    """Certified verdict for the orbit of p; examines iterates 0..max_iter-1."""
    if abs(p.w) > 1.0 + 1e-12:
        raise DomainError(f"|w| = {abs(p.w)} > 1; basin lives over the closed disk")
    w, z = p.w, p.z
    rot = m.rotation
    for n in range(max_iter):
        if abs(w) + abs(z) < 1.0:
            return OrbitVerdict(Verdict.Converged, n, PointC2(w, z))
        if abs(z) > ESCAPE_RADIUS:
            return OrbitVerdict(Verdict.Escaped, n, PointC2(w, z))
        z = w * z + z * z
        w = w * rot
    return OrbitVerdict(Verdict.Undecided, max_iter, PointC2(w, z))


@njit(cache=True, nogil=True)
def _classify_block(w0, rot, zs, max_iter, status, steps):  # pragma: no cover
    rows, cols = zs.shape
    for i in range(rows):
        for j in range(cols):
            w = w0
            z = zs[i, j]
            st = 0
            k = max_iter
            for n in range(max_iter):
                if abs(w) + abs(z) < 1.0:
                    st = 1
                    k = n
                    break
                if abs(z) > 2.0:
                    st = 2
                    k = n
                    break
                z = w * z + z * z
                w = w * rot
            status[i, j] = st
            steps[i, j] = k


@dataclass
class SliceDomain:
    """Membership grid of a basin fiber slice {z : (w0, z) in B_alpha}.

    `inside` marks Converged cells, `undecided` the cells whose budget ran
    out; everything else escaped.
    """

    grid: PlanarGrid
    inside: np.ndarray
    undecided: np.ndarray
    origin_inside: bool
    undecided_count: int

    @property
    def escaped(self) -> np.ndarray:
        return ~(self.inside | self.undecided)

    def to_ppm(self, comment: str = "") -> bytes:
        """Binary PPM (P6): converged black, escaped white, undecided gray."""
        n = self.grid.resolution
        img = np.full((n, n, 3), 255, dtype=np.uint8)
        img[self.inside] = 0
        img[self.undecided] = 128
        buf = io.BytesIO()
        buf.write(b"P6\n")
        if comment:
            for line in comment.splitlines():
                buf.write(b"# " + line.encode() + b"\n")
        buf.write(f"{n} {n}\n255\n".encode())
        buf.write(img[::-1].tobytes())  # top row = highest Im z
        return buf.getvalue()

    def to_rle(self) -> str:
        """Run-length text serialization: rows of <count><c|e|u> tokens."""
        n = self.grid.resolution
        codes = np.full((n, n), "e", dtype="U1")
        codes[self.inside] = "c"
        codes[self.undecided] = "u"
        lines = [f"RLE {n} {n}"]
        for i in range(n):
            row = codes[i]
            toks = []
            run_char = row[0]
            run_len = 1
            for ch in row[1:]:
                if ch == run_char:
                    run_len += 1
                else:
                    toks.append(f"{run_len}{run_char}")
                    run_char, run_len = ch, 1
            toks.append(f"{run_len}{run_char}")
            lines.append("".join(toks))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_rle(text: str, center: complex = 0j, half_width: float = 1.0) -> "SliceDomain":
        lines = text.strip().split("\n")
        _, n, _ = lines[0].split()
        n = int(n)
        inside = np.zeros((n, n), dtype=bool)
        undecided = np.zeros((n, n), dtype=bool)
        for i, line in enumerate(lines[1:]):
            j = 0
            num = ""
            for ch in line:
                if ch.isdigit():
                    num += ch
                else:
                    cnt = int(num)
                    if ch == "c":
                        inside[i, j:j + cnt] = True
                    elif ch == "u":
                        undecided[i, j:j + cnt] = True
                    j += cnt
                    num = ""
        grid = PlanarGrid(center, half_width, n)
        i0, j0 = grid.index(0j)
        origin_inside = 0 <= i0 < n and 0 <= j0 < n and bool(inside[i0, j0])
        return SliceDomain(grid, inside, undecided, origin_inside,
                           int(undecided.sum()))


def render_slice(m: AlphaMap, w0: complex, grid: PlanarGrid,
                 max_iter: int = DEFAULT_RENDER_ITER,
                 threads: int = 1) -> SliceDomain:
    """Classify every grid cell of the fiber over w0.

    Rows are processed in independent blocks; the result is bit-identical
    for any thread count (each block writes a disjoint slab of the output).
    """
    if abs(w0) > 1.0 + 1e-12:
        raise DomainError(f"|w0| = {abs(w0)} > 1")
    n = grid.resolution
    zs = grid.points()
    status = np.zeros((n, n), dtype=np.int8)
    steps = np.zeros((n, n), dtype=np.int64)
    w0c = complex(w0)
    rot = m.rotation
    threads = max(1, int(threads))
    if threads == 1 or n < 64:
        _classify_block(w0c, rot, zs, max_iter, status, steps)
    else:
        blocks = np.array_split(np.arange(n), min(threads, n))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_classify_block, w0c, rot, zs[b[0]:b[-1] + 1],
                            max_iter, status[b[0]:b[-1] + 1],
                            steps[b[0]:b[-1] + 1])
                for b in blocks if len(b)
            ]
            for f in futs:
                f.result()
    inside = status == STATUS_CONVERGED
    undecided = status == STATUS_UNDECIDED
    i0, j0 = grid.index(0j)
    origin_inside = 0 <= i0 < n and 0 <= j0 < n and bool(inside[i0, j0])
    return SliceDomain(grid, inside, undecided, origin_inside,
                       int(undecided.sum()))
