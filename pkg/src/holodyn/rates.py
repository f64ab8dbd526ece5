"""Quantitative Hopf lemma and boundary derivative rates.

The Hopf engine integrates prescribed non-positive boundary data against
the Poisson kernel of a disk of radius r and compares the value at -r+t
with the linear decay bound -alpha*t/(4 pi r).  Normal escape rates
n_q(F) = <F'(q) N(q), N(F(q))> come from central finite differences and
transfer to complex-tangential directions through the Levi constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import MapsOffBoundary, QuadratureUnderflow
from .geometry import DomainModel, _as_arr, boundary_frame, levi_form, stream
from .maps import BoundaryMap


@dataclass(frozen=True)
class HarmonicProbe:
    """Poisson-quadrature probe on the disk of radius r.

    `data(theta)` must be <= -1 on [-arc_angle, arc_angle] and <= 0
    elsewhere; both are checked at the quadrature nodes.
    """

    radius: float
    arc_angle: float
    data: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    order: int = 4096

    def __post_init__(self):
        if not (0.0 < self.arc_angle <= math.pi):
            raise ValueError("arc half-angle must lie in (0, pi]")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.order < 2048:
            raise ValueError("quadrature order must be >= 2048")
        for lo, hi in _pieces(self.arc_angle):
            theta, _ = _piece_nodes(lo, hi, max(8, self.order // 4))
            vals = np.asarray(self.data(theta), dtype=float)
            if hi <= self.arc_angle + 1e-12:  # the arc piece
                if np.any(vals > -1.0 + 1e-12):
                    raise ValueError("boundary data must be <= -1 on the arc")
            if np.any(vals > 1e-12):
                raise ValueError("boundary data must be <= 0")


def arc_indicator(arc_angle: float) -> Callable[[np.ndarray], np.ndarray]:
    """Boundary data -1 on |theta| <= arc_angle, 0 elsewhere."""
    def data(theta):
        theta = np.asarray(theta, dtype=float)
        return np.where(np.abs(theta) <= arc_angle + 1e-15, -1.0, 0.0)
    return data


def _pieces(arc_angle: float) -> list[tuple[float, float]]:
    """Smooth pieces of the circle split at the arc endpoints."""
    if arc_angle >= math.pi - 1e-15:
        return [(-math.pi, math.pi)]
    return [(-arc_angle, arc_angle), (arc_angle, 2.0 * math.pi - arc_angle)]


def _piece_nodes(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes on [lo, hi] plus data-evaluation angles.

    Data is evaluated a hair inside the piece so that jump discontinuities
    sitting exactly at the split points take their one-sided limits; the
    kernel itself uses the exact nodes.
    """
    nodes = np.linspace(lo, hi, n + 1)
    eval_t = nodes.copy()
    eval_t[0] += 1e-11
    eval_t[-1] -= 1e-11
    eval_t = np.where(eval_t > math.pi, eval_t - 2.0 * math.pi, eval_t)
    return eval_t, nodes


def _poisson_value(probe: HarmonicProbe, x: complex, order: int) -> float:
    r = probe.radius
    total = 0.0
    span = 2.0 * math.pi
    for lo, hi in _pieces(probe.arc_angle):
        n = max(8, int(round(order * (hi - lo) / span)))
        eval_t, nodes = _piece_nodes(lo, hi, n)
        vals = np.asarray(probe.data(eval_t), dtype=float)
        zeta = r * np.exp(1j * nodes)
        kern = (r * r - abs(x) ** 2) / np.abs(x - zeta) ** 2
        f = kern * vals / (2.0 * math.pi)
        total += float(np.trapezoid(f, nodes))
    return total


def hopf_bound_check(probe: HarmonicProbe, t: float,
                     slack: float = 1e-6) -> tuple[float, float, bool]:
    """Evaluate the Poisson integral at -r+t against the linear Hopf bound.

    Returns (u_val, bound, ok) with bound = -arc_angle*t/(4 pi r); for data
    that are boundary values of a negative subharmonic function, ok must
    come out true.
    """
    r = probe.radius
    if t < 1e-8:
        raise QuadratureUnderflow("t below 1e-8; kernel too singular")
    if t > r:
        raise ValueError("need 0 < t <= r")
    order = probe.order
    if t < 0.05 * r:
        order *= 2  # kernel peaks near the evaluation point
    u_val = _poisson_value(probe, -r + t, order)
    bound = -probe.arc_angle * t / (4.0 * math.pi * r)
    return u_val, bound, bool(u_val <= bound + slack)


@dataclass(frozen=True)
class NormalRate:
    """Normal escape rate n_q(F) from a central finite difference."""

    q: tuple[complex, complex]
    value: float
    fd_step: float
    flagged: bool = False


def normal_rate(domain: DomainModel, F: BoundaryMap, q,
                fd_step: float = 1e-5) -> NormalRate:
    """n_q(F) = Re< F'(q) N(q), N(F(q)) > by central differences.

    A Richardson check at twice the step flags results that disagree by
    more than 1e-3.
    """
    qa = _as_arr(q)
    frame = boundary_frame(domain, qa)
    fq = F(qa)
    if abs(domain.rho(fq)) > 1e-6:
        raise MapsOffBoundary(f"|rho(F(q))| = {abs(domain.rho(fq)):.2e} > 1e-6")
    n_q = frame.normal.as_array()
    n_fq = boundary_frame(domain, fq).normal.as_array()

    def rate(h: float) -> float:
        d = (F(qa + h * n_q) - F(qa - h * n_q)) / (2.0 * h)
        return float(np.vdot(n_fq, d).real)  # Re<d, n_fq>

    v = rate(fd_step)
    v2 = rate(2.0 * fd_step)
    return NormalRate(q=(complex(qa[0]), complex(qa[1])), value=v,
                      fd_step=fd_step, flagged=bool(abs(v - v2) > 1e-3))


def levi_constants(domain: DomainModel, n_samples: int = 200,
                   seed: int = 3) -> tuple[float, float]:
    """(min, max) of the Levi form of the unit-gradient defining function
    over sampled boundary points, evaluated on the unit complex tangent."""
    rng = stream(seed, "levi_constants", domain.kind)
    lo, hi = math.inf, -math.inf
    for _ in range(n_samples):
        raw = rng.standard_normal(4)
        raw /= np.linalg.norm(raw)
        q = np.array([raw[0] + 1j * raw[1], raw[2] + 1j * raw[3]])
        if domain.kind == "ellipsoid":
            q[0] *= domain.a
        elif domain.kind == "siegel_ball":
            q = 0.5 * q + np.array([0.5, 0.0])
        fr = boundary_frame(domain, q)
        lam = levi_form(domain, fr.p, fr.tangC)
        lam /= float(np.linalg.norm(domain.real_gradient(fr.p)))
        lo, hi = min(lo, lam), max(hi, lam)
    return lo, hi


def tangential_transfer_check(domain: DomainModel, F: BoundaryMap, q,
                              trials: int = 100, fd_step: float = 1e-5,
                              slack: float = 0.05, n_q_scale: float = 1.0,
                              seed: int = 5) -> bool:
    """Check |F'(q) u| >= c sqrt(n_q(F)) |u| on random unit u in T^C_q.

    c = sqrt(c1/c2) from the Levi extrema of the model.  `n_q_scale`
    inflates the measured rate and exists for negative controls.
    """
    qa = _as_arr(q)
    frame = boundary_frame(domain, qa)
    c1, c2 = levi_constants(domain)
    c = math.sqrt(c1 / c2)
    nq = normal_rate(domain, F, qa, fd_step).value * n_q_scale
    if nq < 0:
        return False
    thresh = c * math.sqrt(nq) * (1.0 - slack)
    t = frame.tangC.as_array()
    rng = stream(seed, "transfer_trials")
    J = F.jacobian(qa)
    for _ in range(trials):
        u = np.exp(2j * math.pi * rng.random()) * t
        if float(np.linalg.norm(J @ u)) < thresh:
            return False
    return True
