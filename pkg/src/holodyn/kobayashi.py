"""Kobayashi-distance oracles and the rescaling estimates they certify.

Normalization: Poincare distance with d(0, x) = arctanh x on the unit
disk (curvature -4).  Every downstream use is a diameter bound or an
inclusion bracket, both convention-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InclusionViolated, OutsideDomain
from .geometry import DomainModel, _as_arr, boundary_frame, stream


class Method(Enum):
    ExactDisk = "exact_disk"
    ExactBall = "exact_ball"
    ExactPolydisc = "exact_polydisc"
    ChainUpper = "chain_upper"
    MonotoneLower = "monotone_lower"
    Bracket = "bracket"


@dataclass(frozen=True)
class KobayashiValue:
    lower: float
    upper: float
    method: Method


@dataclass(frozen=True)
class Ball:
    """Euclidean ball of C^2, the bracketing primitive for estimates."""

    center: tuple[complex, complex]
    radius: float

    def center_arr(self) -> np.ndarray:
        return np.asarray(self.center, dtype=np.complex128)

    def contains(self, q, slack: float = 0.0) -> bool:
        d = np.linalg.norm(_as_arr(q) - self.center_arr())
        return bool(d < self.radius + slack)


def disk_distance(a: complex, b: complex) -> float:
    """Poincare distance on the unit disk, d(0, x) = arctanh x."""
    num = abs(a - b)
    den = abs(1.0 - np.conj(a) * b)
    return float(np.arctanh(min(num / den, 1.0 - 1e-16)))


def ball_distance(a, b) -> float:
    """Kobayashi distance on the unit ball of C^2.

    Uses the symmetric Moebius identity
    tanh^2 d = 1 - (1-|a|^2)(1-|b|^2)/|1-<a,b>|^2.
    """
    av, bv = _as_arr(a), _as_arr(b)
    na = float(np.vdot(av, av).real)
    nb = float(np.vdot(bv, bv).real)
    ip = complex(np.vdot(bv, av))  # <a, b> = sum a_i conj(b_i)
    t2 = 1.0 - (1.0 - na) * (1.0 - nb) / abs(1.0 - ip) ** 2
    t2 = min(max(t2, 0.0), 1.0 - 1e-16)
    return float(np.arctanh(math.sqrt(t2)))


def ball_distance_in(ball: Ball, a, b) -> float:
    c = ball.center_arr()
    return ball_distance((_as_arr(a) - c) / ball.radius,
                         (_as_arr(b) - c) / ball.radius)


def kobayashi_exact(domain: DomainModel, a, b) -> KobayashiValue:
    """Exact Kobayashi distance on the disk, ball or polydisc."""
    if domain.kind == "unit_disk":
        aw = complex(np.atleast_1d(np.asarray(a, dtype=np.complex128))[0])
        bw = complex(np.atleast_1d(np.asarray(b, dtype=np.complex128))[0])
        if abs(aw) >= 1 or abs(bw) >= 1:
            raise OutsideDomain("disk points must satisfy |a| < 1")
        d = disk_distance(aw, bw)
        return KobayashiValue(d, d, Method.ExactDisk)
    if domain.kind == "unit_ball":
        av, bv = _as_arr(a), _as_arr(b)
        if np.linalg.norm(av) >= 1 or np.linalg.norm(bv) >= 1:
            raise OutsideDomain("ball points must satisfy |a| < 1")
        d = ball_distance(av, bv)
        return KobayashiValue(d, d, Method.ExactBall)
    if domain.kind == "polydisc":
        av, bv = _as_arr(a), _as_arr(b)
        if np.abs(av).max() >= 1 or np.abs(bv).max() >= 1:
            raise OutsideDomain("polydisc points must satisfy max|a_i| < 1")
        d = max(disk_distance(complex(av[0]), complex(bv[0])),
                disk_distance(complex(av[1]), complex(bv[1])))
        return KobayashiValue(d, d, Method.ExactPolydisc)
    raise ValueError(f"no exact oracle for model {domain.kind!r}")


def _sample_ball(ball: Ball, n: int, rng) -> np.ndarray:
    """n points uniform in the (4-real-dimensional) ball, as complex pairs."""
    u = rng.standard_normal((n, 4))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = ball.radius * rng.random(n) ** 0.25
    raw = u * r[:, None]
    pts = np.empty((n, 2), dtype=np.complex128)
    pts[:, 0] = raw[:, 0] + 1j * raw[:, 1]
    pts[:, 1] = raw[:, 2] + 1j * raw[:, 3]
    return ball.center_arr() + pts


def kobayashi_bounds(domain: DomainModel, a, b, inner: Ball, outer: Ball,
                     check_points: int = 1000, seed: int = 7) -> KobayashiValue:
    """Two-sided bracket from ball inclusions inner c domain c outer.

    Lower bound: exact distance in the circumscribed ball (monotonicity);
    upper bound: exact distance in the inscribed ball.  Inclusions are
    sample-checked and violations raise.
    """
    av, bv = _as_arr(a), _as_arr(b)
    if np.allclose(av, bv):
        return KobayashiValue(0.0, 0.0, Method.Bracket)
    rng = stream(seed, "kobayashi_bounds")
    pts_in = _sample_ball(inner, check_points, rng)
    for q in pts_in:
        if domain.rho(q) >= 0:
            raise InclusionViolated("inner ball sample escapes the domain")
    # sample the domain through the outer ball's bounding box
    c = outer.center_arr()
    box = outer.radius
    raw = rng.random((check_points * 4, 4)) * 2 * box - box
    cand = c + (raw[:, 0] + 1j * raw[:, 1])[:, None] * np.array([1, 0]) \
        + (raw[:, 2] + 1j * raw[:, 3])[:, None] * np.array([0, 1])
    for q in cand:
        if domain.rho(q) < 0 and not outer.contains(q, slack=1e-12):
            raise InclusionViolated("domain sample escapes the outer ball")
    if not (inner.contains(av) and inner.contains(bv)):
        raise OutsideDomain("bracket requires both points inside the inner ball")
    lower = ball_distance_in(outer, av, bv)
    upper = ball_distance_in(inner, av, bv)
    return KobayashiValue(lower, upper, Method.Bracket)


# -- the eps-tau box and its rescaling -------------------------------------

SCALING_BALL = Ball((1.0 + 0j, 0j), 0.5)

_MODEL_CURVATURE = {"siegel_ball": 1.0, "unit_ball": 0.5}
FEPS_EPS0 = 0.1
FEPS_TAU2 = 0.2


def _box_samples(tau: float, n: int) -> np.ndarray:
    """Deterministic samples of F_{1,tau} = {Re w = 1, |Im w| <= tau, |z| <= tau}."""
    n_im = max(2, int(round(math.sqrt(n))))
    n_z = max(2, n // n_im)
    ims = np.linspace(-tau, tau, n_im)
    k = np.arange(n_z)
    rad = tau * np.sqrt((k + 0.5) / n_z)
    ang = k * (math.pi * (3.0 - math.sqrt(5.0)))
    zs = rad * np.exp(1j * ang)
    # rim points matter for the diameter
    zs = np.concatenate([zs, [tau, -tau, 1j * tau, -1j * tau]])
    pts = []
    for im in ims:
        for z in zs:
            pts.append((1.0 + 1j * im, z))
    return np.asarray(pts, dtype=np.complex128)


def psi1(tau: float, samples: int = 64) -> float:
    """Diam of F_{1,tau} in the Kobayashi metric of the ball B((1,0), 1/2)."""
    pts = _box_samples(tau, samples)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, ball_distance_in(SCALING_BALL, pts[i], pts[j]))
    return best


def feps_diameter(domain: DomainModel, p, eps: float, tau: float,
                  samples: int = 64) -> float:
    """Upper bound for the Kobayashi diameter of the box F_{eps,tau}.

    Works in adapted coordinates at p (unitary change mapping the inward
    normal to the Re w axis).  The anisotropic rescaling
    (w, z) -> (w/eps, z/sqrt(eps)) sends F_{eps,tau} to the fixed box
    F_{1,tau}; for eps below the model threshold the reference ball
    B((1,0),1/2) sits inside the rescaled domain (verified on samples),
    so the diameter of F_{1,tau} in that ball bounds the true diameter.
    """
    if domain.kind not in _MODEL_CURVATURE:
        raise ValueError("feps_diameter supports the ball-type models")
    if eps > FEPS_EPS0:
        raise ValueError(f"eps must be <= {FEPS_EPS0}")
    if tau > FEPS_TAU2:
        raise ValueError(f"tau must be <= {FEPS_TAU2}")
    frame = boundary_frame(domain, p)
    # rescaled model: {Re w > c*(eps |w|^2 + |z|^2)} with c the model curvature
    c = _MODEL_CURVATURE[domain.kind]
    ball = SCALING_BALL
    rng = stream(11, "feps_inclusion", domain.kind)
    u = rng.standard_normal((256, 4))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = ball.radius * rng.random(256) ** 0.25
    raw = u * r[:, None]
    qs_w = 1.0 + raw[:, 0] + 1j * raw[:, 1]
    qs_z = raw[:, 2] + 1j * raw[:, 3]
    if not np.all(qs_w.real > c * (eps * np.abs(qs_w) ** 2 + np.abs(qs_z) ** 2)):
        raise InclusionViolated("reference ball not inside the rescaled domain")
    pts = _box_samples(tau, samples)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, ball_distance_in(ball, pts[i], pts[j]))
    _ = frame  # adapted frame exists; the estimate is frame-invariant
    return best


def rescale_hausdorff(eps: float, window_halfwidth: float = 2.0,
                      samples: int = 64) -> float:
    """Hausdorff distance, over a compact window, between the rescaled
    Siegel model {Re w > eps|w|^2 + |z|^2} and its limit {Re w >= |z|^2}.

    Both sets are z-phase invariant, so the computation lives on the
    (Re w, Im w, |z|) lattice.  The rescaled set is nested inside the
    limit, hence only the one-sided sup over limit points matters; the
    distance from a lattice point to the rescaled set is bounded by the
    offset along +Re w solving the defining quadratic.
    """
    if eps == 0.0:
        return 0.0
    if not (0.0 < eps <= 0.5):
        raise ValueError("eps must lie in (0, 0.5]")
    if window_halfwidth > 3.0:
        raise ValueError("window_halfwidth must be <= 3")
    from scipy.spatial import cKDTree

    W = window_halfwidth
    n = samples
    x = np.linspace(-W, W, n)
    y = np.linspace(-W, W, n)
    s = np.linspace(0.0, W, n)
    X, Y, S = np.meshgrid(x, y, s, indexing="ij")
    in_limit = X >= S ** 2
    in_scaled = X > eps * (X ** 2 + Y ** 2) + S ** 2
    if not in_scaled.any():
        raise ValueError("rescaled set misses the window lattice")
    # nesting: the rescaled set sits inside the limit, so only the sup over
    # limit points of the distance to the rescaled set is nonzero.  Where
    # the +Re w ray re-enters the set the offset solving the quadratic is
    # a certified bound independent of the lattice; elsewhere (large eps,
    # window corners) fall back to nearest lattice member.
    q = eps * Y ** 2 + S ** 2
    disc = 1.0 - 4.0 * eps * q
    ok = disc > 0.0
    with np.errstate(invalid="ignore"):
        x_need = np.where(ok, (1.0 - np.sqrt(np.maximum(disc, 0.0)))
                          / (2.0 * eps), np.inf)
    analytic = np.where(in_limit, np.maximum(x_need - X, 0.0), 0.0)
    pts_in = np.stack([X[in_scaled], Y[in_scaled], S[in_scaled]], axis=1)
    tree = cKDTree(pts_in)
    lim = np.stack([X[in_limit], Y[in_limit], S[in_limit]], axis=1)
    d_tree, _ = tree.query(lim)
    # both estimators bound the point distance from above and are each
    # monotone under the nesting of the rescaled sets, so their pointwise
    # minimum keeps the reported sup monotone in eps
    return float(np.minimum(analytic[in_limit], d_tree).max())


def arc_diameter(alpha_ang: float) -> float:
    """Poincare diameter of the subdisk D_alpha inside the unit disk."""
    if not (0.0 < alpha_ang < 1.0):
        raise ValueError("alpha_ang must lie in (0, 1)")
    return float(np.arctanh(2.0 * alpha_ang / (1.0 + alpha_ang ** 2)))
