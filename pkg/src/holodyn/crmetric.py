"""Complex-tangential (CR) path distance on model hypersurfaces.

Upper bounds come from discrete horizontal paths optimized by a penalty
homotopy (shrink Euclidean length, penalize the complex-normal component
of each segment, reproject nodes to the boundary); the Euclidean distance
is the unconditional lower bound.  On the sphere two families of exactly
horizontal competitors seed the optimizer:

* a great-circle arc between phase-aligned points (all mutual Hermitian
  products real, so the contact form vanishes identically along it), and
* a spiral loop trading motion in the complex-tangent plane for a net
  phase along the fiber direction, with |phase| ~ pi * amplitude^2.

The anisotropy of the metric (delta in complex-tangent directions versus
sqrt(delta) along the fiber) is exactly the content of the eps-tau box
inclusions that the probes sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (Inapplicable, InsufficientData, NoConvergence,
                     ProjectionFailure, SamplingTooCoarse)
from .geometry import (BoundaryFrame, DomainModel, PointC2, _as_arr,
                       boundary_frame, stream)
from .maps import BoundaryMap

PROBE_EPS0 = {"unit_ball": 0.5, "ellipsoid": 0.25, "siegel_ball": 0.2}
RESIDUAL_TARGET = 1e-3

# optimizer budgets (segment count stays at 64: the discrete horizontality
# floor scales like the squared chord curvature, and numpy per-call cost
# dominates over array size at this scale anyway)
FULL_BUDGET = dict(segments=64, rounds=20, iters=40, mu0=256.0)
LIGHT_BUDGET = dict(segments=64, rounds=8, iters=24, mu0=1024.0)
CHEAP_BUDGET = dict(segments=64, rounds=5, iters=16, mu0=1024.0)


@dataclass(frozen=True)
class HorizontalPath:
    """Discrete near-horizontal boundary path and its certified data."""

    nodes: np.ndarray = field(repr=False)  # (n+1, 2) complex
    length: float
    horizontality_residual: float

    def node_points(self) -> list[PointC2]:
        return [PointC2.from_array(q) for q in self.nodes]

    @property
    def residual_correction(self) -> float:
        """Length-scale correction accompanying the upper bound."""
        return self.horizontality_residual * self.length


def cr_lower(x, y) -> float:
    """Euclidean distance: unconditional lower bound for the CR distance."""
    return float(np.linalg.norm(_as_arr(x) - _as_arr(y)))


# -- coordinate helpers -----------------------------------------------------

def _model_to_sphere(domain: DomainModel, Q: np.ndarray) -> np.ndarray:
    if domain.kind == "unit_ball":
        return Q
    if domain.kind == "ellipsoid":
        return Q / np.array([domain.a, 1.0])
    if domain.kind == "siegel_ball":
        return (Q - np.array([0.5, 0.0])) / 0.5
    raise ValueError(f"unsupported hypersurface model {domain.kind!r}")


def _sphere_to_model(domain: DomainModel, Q: np.ndarray) -> np.ndarray:
    if domain.kind == "unit_ball":
        return Q
    if domain.kind == "ellipsoid":
        return Q * np.array([domain.a, 1.0])
    if domain.kind == "siegel_ball":
        return 0.5 * Q + np.array([0.5, 0.0])
    raise ValueError(f"unsupported hypersurface model {domain.kind!r}")


def _project_rows(domain: DomainModel, Q: np.ndarray, steps: int = 3) -> np.ndarray:
    for _ in range(steps):
        r = domain.rho_rows(Q)
        g = 2.0 * np.conj(domain.d_rho_rows(Q))
        g2 = (np.abs(g) ** 2).sum(axis=1)
        Q = Q - (r / np.maximum(g2, 1e-30))[:, None] * g
    return Q


def _slerp(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Great-circle interpolation between unit vectors of C^2 = R^4."""
    ip = float(np.clip(np.real(np.vdot(b, a)), -1.0, 1.0))
    theta = math.acos(ip)
    t = np.linspace(0.0, 1.0, n + 1)
    if theta < 1e-9:
        return (1 - t)[:, None] * a + t[:, None] * b
    return (np.sin((1 - t) * theta)[:, None] * a
            + np.sin(t * theta)[:, None] * b) / math.sin(theta)


def _fiber_loop(base: np.ndarray, phase: float, n: int) -> np.ndarray:
    """Horizontal spiral at `base` ending at e^{i phase} base.

    Built in the unitary frame (base, e): gamma = cos(s) e^{i alpha} base
    + sin(s) e^{i beta} e with alpha' cos^2 s + beta' sin^2 s = 0 and tent
    amplitude s(t) = s0 sin(t/2).  The net phase -int tan^2(s) dt is
    monotone in s0, so s0 is found by bisection and the construction is
    horizontal up to discretization.
    """
    if abs(phase) < 1e-14:
        return np.repeat(base[None, :], n + 1, axis=0)
    e = np.array([-np.conj(base[1]), np.conj(base[0])])
    t = np.linspace(0.0, 2.0 * math.pi, n + 1)
    shape = np.sin(t / 2.0)

    def net_phase(s0: float) -> float:
        ad = np.tan(s0 * shape) ** 2
        return float(np.trapezoid(ad, t))

    lo, hi = 0.0, math.sqrt(abs(phase) / math.pi)
    while net_phase(hi) < abs(phase):
        hi = min(hi * 1.3, 1.5)
        if hi >= 1.5:
            break
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if net_phase(mid) < abs(phase):
            lo = mid
        else:
            hi = mid
    s0 = 0.5 * (lo + hi)
    s = s0 * shape
    beta_dot = -np.sign(phase)
    alpha_dot = -beta_dot * np.tan(s) ** 2
    alpha = np.concatenate([[0.0], np.cumsum(
        0.5 * (alpha_dot[1:] + alpha_dot[:-1]) * np.diff(t))])
    if abs(alpha[-1]) < 1e-14:
        return np.repeat(base[None, :], n + 1, axis=0)
    alpha *= phase / alpha[-1]  # endpoint exact; factor is 1 + O(1/n^2)
    beta = beta_dot * t
    return (np.cos(s) * np.exp(1j * alpha))[:, None] * base \
        + (np.sin(s) * np.exp(1j * beta))[:, None] * e


def _resample(path: np.ndarray, n: int) -> np.ndarray:
    """Arclength-uniform resampling of a polyline to n segments."""
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total < 1e-15:
        return np.repeat(path[:1], n + 1, axis=0)
    targets = np.linspace(0.0, total, n + 1)
    out = np.empty((n + 1, 2), dtype=np.complex128)
    for k, s in enumerate(targets):
        i = min(np.searchsorted(cum, s) - 1, len(seg) - 1)
        i = max(i, 0)
        t = (s - cum[i]) / max(seg[i], 1e-30)
        out[k] = (1 - t) * path[i] + t * path[i + 1]
    return out


def _initial_paths(domain: DomainModel, x: np.ndarray, y: np.ndarray,
                   segments: int) -> list[np.ndarray]:
    """Candidate starting paths on the model boundary (endpoints exact)."""
    xs = _model_to_sphere(domain, x[None, :])[0]
    ys = _model_to_sphere(domain, y[None, :])[0]
    xs = xs / np.linalg.norm(xs)
    ys = ys / np.linalg.norm(ys)
    ip = complex(np.vdot(xs, ys))  # <y, x>
    cands = []
    if abs(ip) < 1e-12:
        aligned = ys
        phase = 0.0
    else:
        aligned = ys * np.conj(ip) / abs(ip)
        phase = math.atan2(ip.imag, ip.real)
    # Chords of an aligned great-circle arc are exactly horizontal at any
    # coarseness, but the spiral's residual scales like the squared
    # chord-curvature product, so the loop piece always gets a fine count.
    theta = math.acos(min(1.0, abs(ip)))
    n_arc = max(8, segments // 2, min(96, int(round(theta * 24))))
    n_loop = max(segments, 128)
    pieces = []
    if theta > 1e-9:
        pieces.append(_slerp(xs, aligned, n_arc))
    if abs(phase) > 1e-12:
        pieces.append(_fiber_loop(aligned, phase, n_loop))
    if not pieces:
        pieces.append(_slerp(xs, ys, n_arc))
    cand = pieces[0]
    for piece in pieces[1:]:
        cand = np.concatenate([cand, piece[1:]], axis=0)
    cands.append(cand)
    if abs(phase) > 0.4:
        # two-hop route through the Hermitian-orthogonal direction (both
        # hops have real inner products, hence are exactly horizontal);
        # beats the spiral when the fiber phase is large
        e = np.array([-np.conj(xs[1]), np.conj(xs[0])])
        ipe = complex(np.vdot(e, ys))  # <ys, e>
        if abs(ipe) > 1e-12:
            e = e * ipe / abs(ipe)
        n_hop = max(segments // 2, 48)
        cands.append(np.concatenate([_slerp(xs, e, n_hop),
                                     _slerp(e, ys, n_hop)[1:]], axis=0))
    out = []
    for c in cands:
        path = _sphere_to_model(domain, c)
        path = _project_rows(domain, path)
        path[0], path[-1] = x, y
        out.append(path)
    return out


def _path_energy(domain: DomainModel, P: np.ndarray, mu: float):
    D = P[1:] - P[:-1]
    L = np.maximum(np.linalg.norm(D, axis=1), 1e-14)
    mid = 0.5 * (P[1:] + P[:-1])
    A = domain.d_rho_rows(mid)
    A = A / np.maximum(np.linalg.norm(A, axis=1), 1e-30)[:, None]
    c = (A * D).sum(axis=1)  # complex-bilinear pairing <d_rho, segment>
    E = L.sum() + mu * float((np.abs(c) ** 2 / L).sum())
    return E, D, L, A, c


def _path_residual(domain: DomainModel, P: np.ndarray) -> float:
    _, _, L, _, c = _path_energy(domain, P, 0.0)
    return float((np.abs(c) / L).max())


def _horizontalize(domain: DomainModel, P: np.ndarray,
                   sweeps: int = 6) -> np.ndarray:
    """Gauss-Seidel projection onto the discrete horizontality constraints.

    Each segment's violation c_k = <d_rho(mid), Delta_k> is complex-linear
    in Delta_k, so the minimum-norm correction is
    dDelta = -conj(A_k) c_k (A_k unit), split between the two endpoint
    nodes; nodes are re-projected to the boundary after every sweep.  The
    induced length change is O(residual * segment length).
    """
    P = P.copy()
    N = P.shape[0] - 1
    for _ in range(sweeps):
        mid = 0.5 * (P[1:] + P[:-1])
        A = domain.d_rho_rows(mid)
        A = A / np.maximum(np.linalg.norm(A, axis=1), 1e-30)[:, None]
        for k in range(N):
            d = P[k + 1] - P[k]
            a = A[k]
            c = complex((a * d).sum())
            corr = -np.conj(a) * c
            if k == 0:
                P[k + 1] += corr
            elif k == N - 1:
                P[k] -= corr
            else:
                P[k + 1] += 0.5 * corr
                P[k] -= 0.5 * corr
        P[1:-1] = _project_rows(domain, P[1:-1], steps=2)
    return P


def _optimize_path(domain: DomainModel, P: np.ndarray, rounds: int,
                   iters: int, mu0: float, growth: float = 1.5,
                   target_residual: float = RESIDUAL_TARGET) -> np.ndarray:
    """Penalty-homotopy descent; returns the shortest boundary path seen
    whose residual met the target (final state if none did).

    Tracking the best snapshot guards against late over-penalized rounds
    trading length for horizontality beyond the target.
    """
    best = None
    extension = max(6, rounds // 2)
    P = _horizontalize(domain, P, sweeps=6)
    for r in range(rounds + extension):
        mu = mu0 * growth ** r
        eta = 0.1
        E, D, L, A, c = _path_energy(domain, P, mu)
        for _ in range(iters):
            Ghat = D / L[:, None]
            gpen = (2.0 * c / L)[:, None] * np.conj(A) \
                - (np.abs(c) ** 2 / L ** 2)[:, None] * Ghat
            Gd = Ghat + mu * gpen
            Gnode = np.zeros_like(P)
            Gnode[1:] += Gd
            Gnode[:-1] -= Gd
            Gnode[0] = 0.0
            Gnode[-1] = 0.0
            gmax = float(np.abs(Gnode).max())
            if gmax < 1e-14:
                break
            scale = eta * float(L.mean()) / gmax
            cand = P - scale * Gnode
            cand = _project_rows(domain, cand, steps=2)
            cand[0], cand[-1] = P[0], P[-1]
            E2, D2, L2, A2, c2 = _path_energy(domain, cand, mu)
            if E2 <= E:
                P, E, D, L, A, c = cand, E2, D2, L2, A2, c2
                eta = min(eta * 1.1, 0.5)
            else:
                eta *= 0.5
                if eta < 1e-7:
                    break
        P = _horizontalize(domain, P, sweeps=2)
        Pr = _project_rows(domain, P, steps=2)
        res = _path_residual(domain, Pr)
        length = float(np.linalg.norm(np.diff(Pr, axis=0), axis=1).sum())
        if res <= target_residual and (best is None or length < best[0]):
            best = (length, Pr.copy())
        if r >= rounds - 1 and best is not None:
            break
    out = best[1] if best is not None else P
    return _project_rows(domain, out, steps=3)


def cr_upper(domain: DomainModel, x, y, segments: int = 64,
             iters: int = 40, rounds: int = 20, mu0: float = 256.0,
             target_residual: float = RESIDUAL_TARGET) -> HorizontalPath:
    """Locally minimized near-horizontal path from x to y.

    The returned length is an upper bound for the CR distance up to the
    reported residual correction; NoConvergence signals that the
    horizontality target was not met within the budget.
    """
    if segments < 4:
        raise ValueError("segments must be >= 4")
    xa = _project_rows(domain, _as_arr(x)[None, :])[0]
    ya = _project_rows(domain, _as_arr(y)[None, :])[0]
    if np.linalg.norm(xa - ya) < 1e-13:
        return HorizontalPath(np.stack([xa, ya]), 0.0, 0.0)
    best = None
    for P0 in _initial_paths(domain, xa, ya, segments):
        P = _optimize_path(domain, P0, rounds, iters, mu0,
                           target_residual=target_residual)
        length = float(np.linalg.norm(np.diff(P, axis=0), axis=1).sum())
        res = _path_residual(domain, P)
        if res <= target_residual and (best is None or length < best[0]):
            best = (length, res, P)
    if best is None:
        raise NoConvergence(
            f"no candidate path reached residual {target_residual}")
    return HorizontalPath(best[2], best[0], best[1])


# -- eps-tau probe boxes ----------------------------------------------------

@dataclass(frozen=True)
class CRProbe:
    """Samples of the box F_{eps,tau} and its normal projection U_{eps,tau}."""

    p: PointC2
    eps: float
    tau: float
    frame: BoundaryFrame
    F_samples: np.ndarray = field(repr=False)
    U_samples: np.ndarray = field(repr=False)


def _normal_project(domain: DomainModel, q: np.ndarray, n: np.ndarray,
                    eps_scale: float) -> np.ndarray:
    """Move from q along -n until rho = 0, bisecting the crossing to 1e-10."""
    if domain.rho(q) >= 0:
        raise ProjectionFailure("probe sample is not inside the domain")
    t_hi = max(eps_scale, 1e-6)
    for _ in range(60):
        if domain.rho(q - t_hi * n) >= 0:
            break
        t_hi *= 2.0
        if t_hi > 8.0:
            raise ProjectionFailure("no boundary crossing along the normal ray")
    t_lo = 0.0
    while t_hi - t_lo > 1e-10:
        mid = 0.5 * (t_lo + t_hi)
        if domain.rho(q - mid * n) >= 0:
            t_hi = mid
        else:
            t_lo = mid
    return q - 0.5 * (t_lo + t_hi) * n


def probe_boxes(domain: DomainModel, p, eps: float, tau: float,
                samples: int = 64) -> CRProbe:
    """Deterministic low-discrepancy samples of F_{eps,tau} = p_eps +
    (complex-tangent disk of radius tau sqrt(eps)) x (real-tangent segment
    of radius tau eps), with their projections to the boundary along the
    normal at p."""
    eps0 = PROBE_EPS0.get(domain.kind)
    if eps0 is None:
        raise ValueError(f"unsupported hypersurface model {domain.kind!r}")
    if eps > eps0:
        raise ValueError(f"eps must be <= {eps0} for {domain.kind}")
    if not (0.0 <= tau <= 0.5):
        raise ValueError("tau must lie in [0, 0.5]")
    frame = boundary_frame(domain, p)
    pa = frame.p.as_array()
    n = frame.normal.as_array()
    tc = frame.tangC.as_array()
    tr = frame.tangR.as_array()
    p_eps = pa + eps * n
    if tau == 0.0 or samples <= 1:
        F = p_eps[None, :]
    else:
        n_seg = max(1, int(round(samples ** (1.0 / 3.0))))
        n_disk = max(1, samples // n_seg)
        k = np.arange(n_disk)
        rad = tau * math.sqrt(eps) * np.sqrt((k + 0.5) / n_disk)
        ang = k * (math.pi * (3.0 - math.sqrt(5.0)))
        cs = np.concatenate([[0.0 + 0.0j], rad * np.exp(1j * ang)])
        ss = np.linspace(-1.0, 1.0, n_seg) * tau * eps if n_seg > 1 \
            else np.array([0.0])
        F = (p_eps[None, None, :]
             + cs[:, None, None] * tc[None, None, :]
             + ss[None, :, None] * tr[None, None, :]).reshape(-1, 2)
    U = np.stack([_normal_project(domain, q, n, eps) for q in F])
    return CRProbe(p=frame.p, eps=eps, tau=tau, frame=frame,
                   F_samples=F, U_samples=U)


# -- anisotropy of the CR balls ---------------------------------------------

def anisotropy_table(domain: DomainModel, p, deltas, direction: str = "real",
                     budget: dict | None = None) -> list[tuple[float, float, float, float]]:
    """Rows (delta, cr_upper, cr_lower, residual) for boundary targets
    displaced by delta along the chosen tangent direction."""
    deltas = [float(d) for d in deltas]
    if len(set(deltas)) < 4:
        raise InsufficientData("need at least 4 distinct deltas")
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        raise InsufficientData("deltas must be strictly decreasing")
    if any(d > 0.3 or d <= 0 for d in deltas):
        raise InsufficientData("deltas must lie in (0, 0.3]")
    if direction not in ("real", "complex"):
        raise ValueError("direction must be 'real' or 'complex'")
    frame = boundary_frame(domain, p)
    pa = frame.p.as_array()
    vec = frame.tangR.as_array() if direction == "real" \
        else frame.tangC.as_array()
    budget = dict(FULL_BUDGET) if budget is None else dict(budget)
    rows = []
    for d in deltas:
        q = _project_rows(domain, (pa + d * vec)[None, :], steps=6)[0]
        path = cr_upper(domain, pa, q, **budget)
        rows.append((d, path.length, cr_lower(pa, q),
                     path.horizontality_residual))
    return rows


def anisotropy_fit(domain: DomainModel, p, deltas, direction: str = "real",
                   budget: dict | None = None) -> float:
    """Least-squares slope of log d^CR against log delta (1/2 along the
    fiber direction, 1 along complex-tangent directions)."""
    rows = anisotropy_table(domain, p, deltas, direction, budget)
    ld = np.log([r[0] for r in rows])
    lu = np.log([r[1] for r in rows])
    return float(np.polyfit(ld, lu, 1)[0])


# -- dilation of CR balls under boundary maps --------------------------------

def _tangent_ball_samples(domain: DomainModel, x: np.ndarray, r: float,
                          count: int, rng) -> np.ndarray:
    """Boundary points spread over an anisotropic box shaped like the CR
    ball: radius r in the complex-tangent plane but only ~0.15 r^2 along
    the fiber direction (the spiral cost of a fiber offset phi is about
    2.7 sqrt(phi), so offsets beyond r^2/7 are unreachable anyway)."""
    frame = boundary_frame(domain, x)
    tc = frame.tangC.as_array()
    tr = frame.tangR.as_array()
    raw = rng.random((count, 3))
    ang = 2.0 * math.pi * raw[:, 0]
    rad = r * np.sqrt(raw[:, 1])
    # fiber offsets cost ~2.7 sqrt(offset), so the reachable extent is
    # ~(r/2.7)^2 and a quadratic law concentrates samples accordingly
    u = 2.0 * raw[:, 2] - 1.0
    off = u * np.abs(u) * (r / 2.7) ** 2
    pts = x[None, :] + (rad * np.exp(1j * ang))[:, None] * tc[None, :] \
        + off[:, None] * tr[None, :]
    return _project_rows(domain, pts, steps=6)


def construction_upper(domain: DomainModel, x, y, fine: int = 128) -> float:
    """Fast CR upper bound from hand-built horizontal competitors.

    The aligned arc, spiral loop and two-hop constructions are exactly
    horizontal smooth curves; the chord length of a fine sampling bounds
    their arclength from below by O(1/fine^2), so the minimum over the
    candidates is an upper estimate of the CR distance without any
    optimization.  Restricted to the sphere, where the constructions live.
    """
    xa = _as_arr(x)
    ya = _as_arr(y)
    xs = _model_to_sphere(domain, xa[None, :])[0]
    ys = _model_to_sphere(domain, ya[None, :])[0]
    xs = xs / np.linalg.norm(xs)
    ys = ys / np.linalg.norm(ys)
    ip = complex(np.vdot(xs, ys))
    if abs(ip) < 1e-12:
        aligned, phase = ys, 0.0
    else:
        aligned = ys * np.conj(ip) / abs(ip)
        phase = math.atan2(ip.imag, ip.real)
    theta = math.acos(min(1.0, abs(ip)))
    best = math.inf
    arc_len = theta
    if abs(phase) > 1e-12:
        loop = _fiber_loop(aligned, phase, fine)
        loop_len = float(np.linalg.norm(np.diff(loop, axis=0), axis=1).sum())
        best = arc_len + loop_len
    else:
        best = arc_len
    if abs(phase) > 0.4:
        e = np.array([-np.conj(xs[1]), np.conj(xs[0])])
        ipe = complex(np.vdot(e, ys))
        hop2 = math.acos(min(1.0, abs(ipe)))
        best = min(best, 0.5 * math.pi + hop2)
    return best


def ball_members(domain: DomainModel, x, r: float, count: int = 192,
                 seed: int = 17) -> np.ndarray:
    """Samples of the CR ball B^CR(x, r): candidate boundary points whose
    constructed horizontal competitor stays below r (conservative: the
    competitor length is an upper bound for the distance)."""
    if domain.kind != "unit_ball":
        raise ValueError("CR ball sampling implemented on the sphere model")
    xa = _project_rows(domain, _as_arr(x)[None, :])[0]
    rng = stream(seed, "ball_members", round(r, 12))
    cands = _tangent_ball_samples(domain, xa, r, count, rng)
    members = [xa]
    for q in cands:
        if construction_upper(domain, xa, q) <= r:
            members.append(q)
    return np.stack(members)


def min_tangential_dilation(domain: DomainModel, F: BoundaryMap, x, r: float,
                            count: int = 48, seed: int = 17) -> float:
    """Measured min over CR-ball samples of |F'(q) t_q| on the unit
    complex tangent (the constant C of the dilation property)."""
    pts = ball_members(domain, x, r, count=count, seed=seed)
    best = math.inf
    for q in pts:
        t = boundary_frame(domain, q).tangC.as_array()
        best = min(best, float(np.linalg.norm(F.jacobian(q) @ t)))
    return best


def dilation_check(domain: DomainModel, F: BoundaryMap, x, r: float, C: float,
                   samples: int = 96, margin: float = 0.1,
                   verify_preconditions: bool = True,
                   seed: int = 17) -> bool:
    """Test the covering property F(B^CR(x, r)) contains B^CR(F(x), C r).

    Samples of the target ball of radius C r (1 - margin) must each have
    an image point of the source ball within the covering tolerance set by
    the image sampling density.  With `verify_preconditions` the map must
    send sampled boundary points to the boundary and dilate the complex
    tangent by at least C on the source ball, else Inapplicable.
    """
    if samples < 16:
        raise SamplingTooCoarse("need at least 16 samples per ball")
    xa = _project_rows(domain, _as_arr(x)[None, :])[0]
    A = ball_members(domain, x, r, count=samples, seed=seed)
    if len(A) < 8:
        raise SamplingTooCoarse(f"only {len(A)} certified source samples")
    if verify_preconditions:
        for q in A:
            if abs(domain.rho(F(q))) > 1e-6:
                raise Inapplicable("map does not preserve the boundary")
            t = boundary_frame(domain, q).tangC.as_array()
            if float(np.linalg.norm(F.jacobian(q) @ t)) < C - 1e-9:
                raise Inapplicable(
                    "tangential derivative below C on the source ball")
    images = np.stack([_project_rows(domain, F(q)[None, :])[0] for q in A])
    fx = images[0]
    targets = ball_members(domain, fx, C * r * (1.0 - margin),
                           count=samples, seed=seed + 1)
    if len(targets) < 8:
        raise SamplingTooCoarse(f"only {len(targets)} certified target samples")
    # covering tolerance from the image cloud's own spacing
    d2 = np.linalg.norm(images[:, None, :] - images[None, :, :], axis=2)
    np.fill_diagonal(d2, np.inf)
    spacing = float(np.median(d2.min(axis=1)))
    tol = 3.0 * spacing + 1e-9
    dist = np.linalg.norm(targets[:, None, :] - images[None, :, :], axis=2)
    return bool(dist.min(axis=1).max() <= tol)
