"""Conformal radius of planar slice domains.

Two routes are kept deliberately independent: a certified inradius with
the Koebe sandwich d <= r <= 4d, and a Green's-function estimate
r = exp(h(0)) where h is discrete-harmonic on the component of the origin
with boundary data log|zeta| (5-point Laplacian, red-black SOR).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit
from scipy import ndimage

from .basin import DEFAULT_SCAN_ITER, AlphaMap, SliceDomain, render_slice
from .errors import NoConvergence, OriginOutside, Truncated
from .geometry import PlanarGrid

FIBER_WINDOW = 2.2
SOR_TOL = 1e-8


@dataclass(frozen=True)
class RadiusEstimate:
    """Koebe sandwich plus Green estimate for one slice.

    `inner_d` treats undecided cells as exterior (certified lower route);
    `koebe_high` is 4x the inradius counting undecided cells as interior,
    which keeps both sides of the sandwich conservative.  `green_r` is
    None when the component is truncated by the window or SOR failed.
    """

    inner_d: float
    koebe_low: float
    koebe_high: float
    green_r: float | None
    resolution: int
    undecided: int
    grid_error: float
    truncated: bool = False


def _origin_distances(slice_: SliceDomain, excluded: np.ndarray) -> float:
    pts = slice_.grid.points()
    if not excluded.any():
        return math.inf
    return float(np.abs(pts[excluded]).min())


def _edge_distance(grid: PlanarGrid) -> float:
    dx = abs(0.0 - grid.center.real)
    dy = abs(0.0 - grid.center.imag)
    return grid.half_width - max(dx, dy)


def inner_radius(slice_: SliceDomain) -> float:
    """Certified distance from 0 to the slice complement (lower bound for r).

    Undecided cells count as exterior.  On a full-true grid the window edge
    is the only obstruction and the estimate is flagged truncated (see
    `inner_radius_info`).
    """
    return inner_radius_info(slice_)[0]


def inner_radius_info(slice_: SliceDomain) -> tuple[float, bool]:
    if not slice_.origin_inside:
        raise OriginOutside("cell containing 0 is not inside the slice")
    half_diag = slice_.grid.cell * math.sqrt(2.0) / 2.0
    excluded = ~slice_.inside
    d_cells = _origin_distances(slice_, excluded) - half_diag
    d_edge = _edge_distance(slice_.grid)
    if d_cells >= d_edge:
        return d_edge, True
    return max(d_cells, 0.0), False


def _upper_inradius(slice_: SliceDomain) -> float:
    """Inradius counting undecided cells as interior (upper-bound route)."""
    half_diag = slice_.grid.cell * math.sqrt(2.0) / 2.0
    strictly_false = slice_.escaped
    d = _origin_distances(slice_, strictly_false) + half_diag
    return min(d, _edge_distance(slice_.grid) + half_diag)


@njit(cache=True, nogil=True)
def _sor_sweeps(h, mask, omega, tol, max_sweeps):  # pragma: no cover
    n = h.shape[0]
    for sweep in range(max_sweeps):
        delta = 0.0
        for parity in range(2):
            for i in range(1, n - 1):
                for j in range(1, n - 1):
                    if mask[i, j] and ((i + j) & 1) == parity:
                        upd = 0.25 * (h[i - 1, j] + h[i + 1, j]
                                      + h[i, j - 1] + h[i, j + 1]) - h[i, j]
                        h[i, j] += omega * upd
                        a = abs(omega * upd)
                        if a > delta:
                            delta = a
        if delta < tol:
            return sweep + 1
    return -1


def green_radius(slice_: SliceDomain, tol: float = SOR_TOL) -> float:
    """Conformal radius exp(h(0)) of the slice component of the origin.

    Undecided cells are treated as exterior, which can only shrink the
    component and the resulting radius.
    """
    if not slice_.origin_inside:
        raise OriginOutside("cell containing 0 is not inside the slice")
    grid = slice_.grid
    n = grid.resolution
    labels, _ = ndimage.label(slice_.inside)
    i0, j0 = grid.index(0j)
    comp = labels == labels[i0, j0]
    if comp[0, :].any() or comp[-1, :].any() or comp[:, 0].any() or comp[:, -1].any():
        raise Truncated("component of 0 reaches the window edge")
    pts = grid.points()
    # Dirichlet data log|zeta| on every non-component cell; only the cells
    # adjacent to the component are ever read by the 5-point stencil.
    h = np.log(np.maximum(np.abs(pts), grid.cell / 4.0))
    boundary = (~comp) & (
        np.roll(comp, 1, 0) | np.roll(comp, -1, 0)
        | np.roll(comp, 1, 1) | np.roll(comp, -1, 1))
    h[comp] = float(h[boundary].mean()) if boundary.any() else 0.0
    omega = 2.0 / (1.0 + math.pi / n)
    sweeps = _sor_sweeps(h, comp, omega, tol, 50 * n)
    if sweeps < 0:
        raise NoConvergence(f"SOR residual above {tol} after {50 * n} sweeps")
    # bilinear interpolation of h at the origin
    m = (n - 1) / 2.0
    fi = (0.0 - grid.center.imag) / grid.cell + m
    fj = (0.0 - grid.center.real) / grid.cell + m
    i, j = int(math.floor(fi)), int(math.floor(fj))
    ti, tj = fi - i, fj - j
    if comp[i:i + 2, j:j + 2].all():
        val = ((1 - ti) * (1 - tj) * h[i, j] + (1 - ti) * tj * h[i, j + 1]
               + ti * (1 - tj) * h[i + 1, j] + ti * tj * h[i + 1, j + 1])
    else:
        val = h[i0, j0]
    return float(np.exp(val))


def estimate_slice(slice_: SliceDomain) -> RadiusEstimate:
    d, truncated = inner_radius_info(slice_)
    d_up = _upper_inradius(slice_)
    try:
        g = green_radius(slice_)
    except (Truncated, NoConvergence):
        g = None
    return RadiusEstimate(
        inner_d=d,
        koebe_low=d,
        koebe_high=4.0 * d_up,
        green_r=g,
        resolution=slice_.grid.resolution,
        undecided=slice_.undecided_count,
        grid_error=2.0 * slice_.grid.cell,
        truncated=truncated,
    )


def fiber_radius(m: AlphaMap, w0: complex, resolution: int = 512,
                 max_iter: int = DEFAULT_SCAN_ITER,
                 threads: int = 1) -> RadiusEstimate:
    """Radius estimate of the basin fiber over w0 on the window [-2.2, 2.2]^2."""
    if abs(w0) >= 1.0:
        raise ValueError("fiber radius needs |w0| < 1")
    grid = PlanarGrid(0j, FIBER_WINDOW, resolution)
    sl = render_slice(m, w0, grid, max_iter=max_iter, threads=threads)
    return estimate_slice(sl)


@njit(cache=True, nogil=True)
def _escape_fraction(w0, rot, zs, max_iter):  # pragma: no cover
    escaped = 0
    for k in range(zs.shape[0]):
        w = w0
        z = zs[k]
        for _ in range(max_iter):
            if abs(z) > 2.0:
                escaped += 1
                break
            z = w * z + z * z
            w = w * rot
    return escaped


def julia_origin_escape(m: AlphaMap, w0: complex, probe_radius: float,
                        samples: int, max_iter: int = 20000) -> float:
    """Fraction of the probe circle that escapes under the q-fold map.

    For rational alpha = p/q and |w0| = 1 the q-th iterate acts on the
    fiber as a polynomial with root-of-unity multiplier, so the origin is
    in its Julia set and a positive fraction certifies that no linearizing
    disk of the probe radius survives.
    """
    frac = Fraction(m.alpha).limit_denominator(12)
    if abs(m.alpha - float(frac)) > 1e-12:
        raise ValueError("alpha must be rational with denominator <= 12")
    if abs(abs(w0) - 1.0) > 1e-9:
        raise ValueError("|w0| must be 1")
    ang = 2.0 * np.pi * np.arange(samples) / samples
    zs = probe_radius * np.exp(1j * ang)
    escaped = _escape_fraction(complex(w0), m.rotation, zs, max_iter)
    return escaped / samples


def rotation_scan(m: AlphaMap, w_samples: int, resolution: int,
                  delta: float = 0.05, max_iter: int = DEFAULT_SCAN_ITER,
                  threads: int = 1,
                  check_monotonicity: bool | None = None) -> dict:
    """Fiber-radius scan on the circle |w| = 1 - delta.

    For irrational alpha the scan also estimates each sample's orbit
    partner w * e^{2 pi i alpha} and counts the pairs whose estimate drops
    by more than the combined certified grid error (the fiber map pushes
    competitors forward, so the radius cannot truly decrease beyond the
    |w| = 1 - delta contraction factor).
    """
    if w_samples < 8:
        raise ValueError("w_samples must be >= 8")
    if check_monotonicity is None:
        check_monotonicity = abs(m.alpha - float(Fraction(m.alpha).limit_denominator(64))) > 1e-12
    r = 1.0 - delta
    ws = r * np.exp(2j * np.pi * np.arange(w_samples) / w_samples)
    rows = []
    for w in ws:
        rows.append((complex(w), fiber_radius(m, complex(w), resolution,
                                              max_iter, threads)))

    def _value(est: RadiusEstimate) -> float:
        return est.green_r if est.green_r is not None else est.koebe_low

    values = [_value(e) for _, e in rows]
    violations = 0
    partner_rows = []
    if check_monotonicity:
        for w, est in rows:
            w2 = complex(w * m.rotation)
            est2 = fiber_radius(m, w2, resolution, max_iter, threads)
            partner_rows.append((w2, est2))
            tol = est.grid_error + est2.grid_error
            if _value(est2) < _value(est) - tol:
                violations += 1
    return {
        "alpha": m.alpha,
        "delta": delta,
        "rows": rows,
        "partner_rows": partner_rows,
        "R_low": min(values),
        "R_high": max(values),
        "monotonicity_violations": violations if check_monotonicity else None,
    }


def scan_to_csv(scan: dict, header_comment: str = "") -> str:
    """CSV per the wire format: one row per sample, sample order."""
    out = io.StringIO()
    if header_comment:
        for line in header_comment.splitlines():
            out.write(f"# {line}\n")
    out.write("alpha,delta,w_re,w_im,inner_d,koebe_low,koebe_high,"
              "green_r,resolution,undecided\n")
    for w, est in scan["rows"]:
        g = "" if est.green_r is None else repr(est.green_r)
        out.write(f"{scan['alpha']!r},{scan['delta']!r},{w.real!r},{w.imag!r},"
                  f"{est.inner_d!r},{est.koebe_low!r},{est.koebe_high!r},"
                  f"{g},{est.resolution},{est.undecided}\n")
    return out.getvalue()
