"""Hopf fibration on disked-domain boundaries, fiber linking, circle-map
degree and spanning-set entropy.

The boundary of a circled model domain fibers into circles C_eta; the
gauge-normalized map h(eta) = eta/|eta| carries them to the Hopf fibers of
the round S^3, where linking is computed by the Gauss double integral
after stereographic projection.  Entropy of boundary Blaschke products is
estimated from greedy (n, eps)-spanning sets under the orbit metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (BudgetExceeded, FibersCoincide, MinZeros,
                     PhaseJumpTooLarge, ProjectionPoleOnCircle, ZeroPoint)
from .geometry import DomainModel, PointC2, _as_arr

SPAN_BUDGET = 10_000_000


@dataclass(frozen=True)
class FiberCircle:
    """The fiber circle C_eta = {e^{i theta} eta} with gauge radius |eta|."""

    eta: tuple[complex, complex]

    @property
    def gauge_radius(self) -> float:
        return float(np.linalg.norm(self.eta_arr()))

    def eta_arr(self) -> np.ndarray:
        return np.asarray(self.eta, dtype=np.complex128)

    def parameterize(self, thetas: np.ndarray) -> np.ndarray:
        """(n, 2) complex array of circle points e^{i theta} eta."""
        return np.exp(1j * np.asarray(thetas))[:, None] * self.eta_arr()


def fiber_circle(domain: DomainModel, eta) -> FiberCircle:
    ea = _as_arr(eta)
    if np.linalg.norm(ea) == 0.0:
        raise ZeroPoint("fiber through the origin is undefined")
    if abs(domain.rho(ea)) >= 1e-9:
        from .errors import PointNotOnBoundary
        raise PointNotOnBoundary("eta must lie on the boundary")
    return FiberCircle((complex(ea[0]), complex(ea[1])))


def hopf_map(domain: DomainModel, eta) -> PointC2:
    """Gauge normalization h(eta) = eta/R(eta); equivariant for the circle
    action, and a homeomorphism onto S^3 for disked boundaries."""
    ea = _as_arr(eta)
    r = float(np.linalg.norm(ea))
    if r == 0.0:
        raise ZeroPoint("h is undefined at the origin")
    return PointC2.from_array(ea / r)


def fibration_project(eta) -> tuple[complex, complex]:
    """Projective class [w : z], normalized so the largest-modulus
    component is real positive; constant along each fiber circle."""
    ea = _as_arr(eta)
    r = float(np.linalg.norm(ea))
    if r == 0.0:
        raise ZeroPoint("projective class of the origin is undefined")
    v = ea / r
    i = int(np.argmax(np.abs(v)))
    v = v * (abs(v[i]) / v[i])
    return complex(v[0]), complex(v[1])


def projective_distance(p1, p2) -> float:
    """Fubini-Study-type gap sqrt(1 - |<v1, v2>|^2) between classes."""
    v1 = _as_arr(p1)
    v2 = _as_arr(p2)
    v1 = v1 / np.linalg.norm(v1)
    v2 = v2 / np.linalg.norm(v2)
    ip = abs(np.vdot(v1, v2))
    return float(math.sqrt(max(0.0, 1.0 - min(ip, 1.0) ** 2)))


def _stereographic(points4: np.ndarray, pole: np.ndarray,
                   basis: np.ndarray) -> np.ndarray:
    """S^3 -> R^3 from `pole`; rows of `basis` span pole-orthogonal R^4."""
    denom = 1.0 - points4 @ pole
    return (points4 @ basis.T) / denom[:, None]


def _pole_for(curves4: list[np.ndarray], n_candidates: int = 32) -> np.ndarray:
    """Deterministic pole candidates on S^3; keep the one farthest from
    both curves."""
    k = np.arange(n_candidates)
    t1 = 2.0 * math.pi * k / n_candidates
    t2 = math.pi * (k * 0.37 % 1.0)
    t3 = 2.0 * math.pi * (k * 0.61 % 1.0)
    cand = np.stack([
        np.cos(t2),
        np.sin(t2) * np.cos(t3),
        np.sin(t2) * np.sin(t3) * np.cos(t1),
        np.sin(t2) * np.sin(t3) * np.sin(t1),
    ], axis=1)
    cand /= np.linalg.norm(cand, axis=1, keepdims=True)
    best, best_d = None, -1.0
    for p in cand:
        d = min(float(np.linalg.norm(c - p, axis=1).min()) for c in curves4)
        if d > best_d:
            best, best_d = p, d
    if best_d < 1e-3:
        raise ProjectionPoleOnCircle("all pole candidates sit on a circle")
    return best


def _to_r4(pts: np.ndarray) -> np.ndarray:
    return np.stack([pts[:, 0].real, pts[:, 0].imag,
                     pts[:, 1].real, pts[:, 1].imag], axis=1)


def linking_number(c1: FiberCircle, c2: FiberCircle,
                   quad_order: int = 256) -> float:
    """Gauss linking integral of two fiber circles.

    The circles are carried to round Hopf fibers by the gauge map, then
    stereographically projected from a pole far from both; the double
    integral over the smooth closed curves uses the trapezoid rule (which
    is spectrally accurate here) and lands within 0.05 of an integer.
    """
    if quad_order < 64:
        raise ValueError("quad_order must be >= 64")
    p1 = fibration_project(c1.eta_arr())
    p2 = fibration_project(c2.eta_arr())
    if projective_distance(p1, p2) < 1e-9:
        raise FibersCoincide("fiber circles coincide")
    thetas = 2.0 * math.pi * np.arange(quad_order) / quad_order
    v1 = c1.eta_arr() / np.linalg.norm(c1.eta_arr())
    v2 = c2.eta_arr() / np.linalg.norm(c2.eta_arr())
    g1 = np.exp(1j * thetas)[:, None] * v1
    g2 = np.exp(1j * thetas)[:, None] * v2
    d1 = 1j * g1  # d/dtheta e^{i theta} v
    d2 = 1j * g2
    x1, x2 = _to_r4(g1), _to_r4(g2)
    pole = _pole_for([x1, x2])
    # orthonormal basis of pole^perp
    M = np.eye(4) - np.outer(pole, pole)
    _, _, vt = np.linalg.svd(M)
    basis = vt[:3]
    y1 = _stereographic(x1, pole, basis)
    y2 = _stereographic(x2, pole, basis)
    t1 = _stereo_velocity(x1, _to_r4(d1), pole, basis)
    t2 = _stereo_velocity(x2, _to_r4(d2), pole, basis)
    diff = y1[:, None, :] - y2[None, :, :]
    dist3 = np.linalg.norm(diff, axis=2) ** 3
    cross = np.cross(t1[:, None, :], t2[None, :, :])
    integrand = np.einsum("ijk,ijk->ij", cross, diff) / dist3
    h = (2.0 * math.pi / quad_order) ** 2
    return float(integrand.sum() * h / (4.0 * math.pi))


def _stereo_velocity(x: np.ndarray, dx: np.ndarray, pole: np.ndarray,
                     basis: np.ndarray) -> np.ndarray:
    denom = 1.0 - x @ pole
    u = 1.0 / denom
    du = (dx @ pole) * u * u
    return (dx @ basis.T) * u[:, None] + (x @ basis.T) * du[:, None]


# -- Blaschke products and circle entropy -----------------------------------

@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product rot * prod (z - a_i)/(1 - conj(a_i) z)."""

    zeros: tuple[complex, ...]
    rotation: complex = 1.0 + 0j

    def __post_init__(self):
        if len(self.zeros) == 0:
            raise MinZeros("empty Blaschke product is a constant map")
        for a in self.zeros:
            if abs(a) >= 1.0:
                raise ValueError("Blaschke zeros must lie in the open disk")
        if abs(abs(self.rotation) - 1.0) > 1e-12:
            raise ValueError("rotation factor must have modulus 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.full_like(z, self.rotation)
        for a in self.zeros:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out

    def degree(self) -> int:
        return len(self.zeros)


def circle_degree(f: BlaschkeProduct, samples: int = 4096) -> int:
    """Topological degree of the boundary restriction by phase unwinding."""
    theta = 2.0 * math.pi * np.arange(samples + 1) / samples
    vals = f(np.exp(1j * theta))
    phases = np.angle(vals)
    un = np.unwrap(phases)
    jumps = np.abs(np.diff(un))
    if jumps.max() > math.pi / 2:
        raise PhaseJumpTooLarge(
            f"max phase step {jumps.max():.3f} rad; increase sampling")
    winding = (un[-1] - un[0]) / (2.0 * math.pi)
    return int(round(winding))


@njit(cache=True, nogil=True)
def _orbit_angles(theta, zeros_re, zeros_im, rot, n):  # pragma: no cover
    """Angles of the first n iterates of e^{i theta} under the product."""
    out = np.empty(n)
    z = complex(math.cos(theta), math.sin(theta))
    for k in range(n):
        out[k] = math.atan2(z.imag, z.real)
        w = rot
        for m in range(zeros_re.shape[0]):
            a = complex(zeros_re[m], zeros_im[m])
            w = w * (z - a) / (1.0 - np.conj(a) * z)
        az = abs(w)
        z = w / az  # renormalize to the circle
    return out


@njit(cache=True, nogil=True)
def _orbit_dist(t1, t2, zeros_re, zeros_im, rot, n):  # pragma: no cover
    """Orbit metric d_n = max over the first n iterates of circle distance."""
    z1 = complex(math.cos(t1), math.sin(t1))
    z2 = complex(math.cos(t2), math.sin(t2))
    best = 0.0
    for k in range(n):
        d = math.atan2(z1.imag, z1.real) - math.atan2(z2.imag, z2.real)
        d = abs((d + math.pi) % (2.0 * math.pi) - math.pi)
        if d > best:
            best = d
        w1 = rot
        w2 = rot
        for m in range(zeros_re.shape[0]):
            a = complex(zeros_re[m], zeros_im[m])
            w1 = w1 * (z1 - a) / (1.0 - np.conj(a) * z1)
            w2 = w2 * (z2 - a) / (1.0 - np.conj(a) * z2)
        z1 = w1 / abs(w1)
        z2 = w2 / abs(w2)
    return best


@njit(cache=True, nogil=True)
def _greedy_span_count(zeros_re, zeros_im, rot, n, eps, budget):  # pragma: no cover
    """Greedy walk covering the circle with orbit-metric balls.

    Starting at angle 0 (the seed point 1), each center covers the arc
    reaching to the first angle at which the orbit distance exceeds eps;
    the next center is placed at that frontier.  Returns the number of
    centers, or -1 if the budget is exceeded.
    """
    t = 0.0
    count = 0
    covered = 0.0
    two_pi = 2.0 * math.pi
    while covered < two_pi:
        count += 1
        if count > budget:
            return -1
        # bracket the right reach by doubling
        h_lo = 0.0
        h_hi = eps / 2.0
        grow = True
        for _ in range(64):
            if _orbit_dist(t, t + h_hi, zeros_re, zeros_im, rot, n) > eps:
                grow = False
                break
            h_lo = h_hi
            if covered + h_lo >= two_pi:
                return count
            h_hi *= 2.0
        if grow:
            return count  # one ball covers the rest of the circle
        for _ in range(40):
            mid = 0.5 * (h_lo + h_hi)
            if _orbit_dist(t, t + mid, zeros_re, zeros_im, rot, n) > eps:
                h_hi = mid
            else:
                h_lo = mid
        if h_lo <= 1e-15:
            return -1  # ball degenerated; treat as budget failure
        t += h_lo
        covered += h_lo
    return count


@dataclass(frozen=True)
class EntropyEstimate:
    n_values: tuple[int, ...]
    eps: float
    span_counts: tuple[int, ...]
    slope: float  # nats per iterate


def entropy_spanning(f: BlaschkeProduct, n_max: int, eps: float,
                     budget: int = SPAN_BUDGET) -> EntropyEstimate:
    """Greedy (n, eps)-spanning counts and their exponential growth rate.

    The slope of log counts over the last half of the n-range estimates
    the topological entropy, which equals log(degree) for the boundary
    restriction of a finite Blaschke product.
    """
    if not (1e-3 <= eps <= 1e-1):
        raise ValueError("eps must lie in [1e-3, 1e-1]")
    if n_max > 16 or n_max < 2:
        raise ValueError("n_max must lie in [2, 16]")
    d = circle_degree(f)
    if d < 2:
        raise ValueError("entropy estimation needs circle degree >= 2")
    zr = np.array([a.real for a in f.zeros])
    zi = np.array([a.imag for a in f.zeros])
    rot = complex(f.rotation)
    counts = []
    for n in range(1, n_max + 1):
        if counts and counts[-1] * d > budget:
            raise BudgetExceeded(
                f"projected spanning count {counts[-1] * d} exceeds {budget}")
        c = _greedy_span_count(zr, zi, rot, n, eps, budget)
        if c < 0:
            raise BudgetExceeded(f"spanning count exceeds {budget} at n={n}")
        counts.append(int(c))
    ns = np.arange(1, n_max + 1)
    half = n_max // 2
    slope = float(np.polyfit(ns[half:], np.log(np.array(counts[half:],
                                                        dtype=float)), 1)[0])
    return EntropyEstimate(tuple(ns.tolist()), eps, tuple(counts), slope)
