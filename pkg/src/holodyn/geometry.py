"""Complex linear algebra in C^2, model domains, boundary frames and grids.

Conventions used throughout the package:

* a real-valued defining function rho is negative inside the domain and
  zero on the boundary;
* the "complex gradient" d_rho(p) is the vector (d rho/dw, d rho/dz) of
  Wirtinger derivatives, so a vector u is complex-tangent at p exactly
  when d_rho(p) . u = 0 (complex-bilinear pairing);
* the real gradient of rho, viewed as a vector of C^2, is
  grad = 2 * conj(d_rho), and the inward unit normal is -grad/|grad|.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateGradient, NotComplexTangent, PointNotOnBoundary

BOUNDARY_TOL = 1e-9


def _require_finite(*vals: complex) -> None:
    for v in vals:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"non-finite component {v!r}")


@dataclass(frozen=True)
class PointC2:
    """A point of C^2 with coordinates (w, z)."""

    w: complex
    z: complex

    def __post_init__(self):
        _require_finite(complex(self.w), complex(self.z))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.z], dtype=np.complex128)

    @staticmethod
    def from_array(arr) -> "PointC2":
        return PointC2(complex(arr[0]), complex(arr[1]))


@dataclass(frozen=True)
class CVec2:
    """A tangent vector of C^2 with components (dw, dz)."""

    dw: complex
    dz: complex

    def __post_init__(self):
        _require_finite(complex(self.dw), complex(self.dz))

    def as_array(self) -> np.ndarray:
        return np.array([self.dw, self.dz], dtype=np.complex128)

    @staticmethod
    def from_array(arr) -> "CVec2":
        return CVec2(complex(arr[0]), complex(arr[1]))

    def norm(self) -> float:
        return float(np.hypot(abs(self.dw), abs(self.dz)))


def herm(a: np.ndarray, b: np.ndarray) -> complex:
    """Hermitian inner product <a, b> = sum a_i conj(b_i)."""
    return complex(np.sum(a * np.conj(b)))


class DomainModel:
    """A model domain of C^2 given by a defining function.

    Instances carry the defining function, its complex gradient
    (Wirtinger (d/dw, d/dz) derivatives) and the constant matrix H of the
    complex Hessian, so that the Levi form is L(u) = conj(u)^T H u.  All
    built-in models have exact quadratic defining functions, hence a
    constant H.
    """

    def __init__(self, kind: str,
                 rho: Callable[[np.ndarray], float],
                 d_rho: Callable[[np.ndarray], np.ndarray],
                 hessian: np.ndarray | None,
                 a: float = 1.0,
                 rho_rows: Callable[[np.ndarray], np.ndarray] | None = None,
                 d_rho_rows: Callable[[np.ndarray], np.ndarray] | None = None):
        self.kind = kind
        self._rho = rho
        self._d_rho = d_rho
        self._hessian = None if hessian is None else np.asarray(hessian, dtype=np.complex128)
        self.a = a
        self._rho_rows = rho_rows
        self._d_rho_rows = d_rho_rows

    def __repr__(self):
        return f"DomainModel({self.kind!r})" if self.kind != "ellipsoid" \
            else f"DomainModel('ellipsoid', a={self.a})"

    # defining-function interface; accepts PointC2 or a complex 2-array
    def rho(self, p) -> float:
        return float(self._rho(_as_arr(p)))

    def d_rho(self, p) -> np.ndarray:
        return self._d_rho(_as_arr(p))

    def real_gradient(self, p) -> np.ndarray:
        """Real gradient of rho as a vector of C^2 (= 2 conj(d_rho))."""
        return 2.0 * np.conj(self.d_rho(p))

    def levi_matrix(self, p) -> np.ndarray:
        if self._hessian is None:
            raise NotImplementedError(f"no Levi structure for model {self.kind!r}")
        return self._hessian

    def contains(self, p) -> bool:
        return self.rho(p) < 0.0

    # row-vectorized forms over (n, 2) complex arrays
    def rho_rows(self, Q: np.ndarray) -> np.ndarray:
        if self._rho_rows is not None:
            return self._rho_rows(Q)
        return np.array([self._rho(q) for q in Q])

    def d_rho_rows(self, Q: np.ndarray) -> np.ndarray:
        if self._d_rho_rows is not None:
            return self._d_rho_rows(Q)
        return np.array([self._d_rho(q) for q in Q])

    @property
    def smooth(self) -> bool:
        return self._hessian is not None

    # ---- factories --------------------------------------------------

    @staticmethod
    def unit_ball() -> "DomainModel":
        def rho(q):
            return (q.real ** 2 + q.imag ** 2).sum() - 1.0

        def d_rho(q):
            return np.conj(q)

        return DomainModel(
            "unit_ball", rho, d_rho, np.eye(2),
            rho_rows=lambda Q: (np.abs(Q) ** 2).sum(axis=1) - 1.0,
            d_rho_rows=np.conj)

    @staticmethod
    def ellipsoid(a: float) -> "DomainModel":
        if a <= 0:
            raise ValueError("ellipsoid semi-axis must be positive")
        w2 = 1.0 / (a * a)
        wts = np.array([w2, 1.0])

        def rho(q):
            return w2 * abs(q[0]) ** 2 + abs(q[1]) ** 2 - 1.0

        def d_rho(q):
            return np.array([w2 * np.conj(q[0]), np.conj(q[1])])

        return DomainModel(
            "ellipsoid", rho, d_rho, np.diag([w2, 1.0]), a=a,
            rho_rows=lambda Q: (wts * np.abs(Q) ** 2).sum(axis=1) - 1.0,
            d_rho_rows=lambda Q: wts * np.conj(Q))

    @staticmethod
    def siegel_ball() -> "DomainModel":
        # {Re w > |w|^2 + |z|^2}; completing the square this is the
        # Euclidean ball of center (1/2, 0) and radius 1/2.
        def rho(q):
            return abs(q[0]) ** 2 + abs(q[1]) ** 2 - q[0].real

        def d_rho(q):
            return np.array([np.conj(q[0]) - 0.5, np.conj(q[1])])

        return DomainModel(
            "siegel_ball", rho, d_rho, np.eye(2),
            rho_rows=lambda Q: (np.abs(Q) ** 2).sum(axis=1) - Q[:, 0].real,
            d_rho_rows=lambda Q: np.conj(Q) - np.array([0.5, 0.0]))

    @staticmethod
    def unit_disk() -> "DomainModel":
        # planar model, used only by the Kobayashi oracles
        def rho(q):
            return abs(q[0]) ** 2 - 1.0

        def d_rho(q):
            return np.array([np.conj(q[0]), 0.0 + 0.0j])

        return DomainModel("unit_disk", rho, d_rho, None)

    @staticmethod
    def polydisc() -> "DomainModel":
        # non-smooth boundary; membership only
        def rho(q):
            return max(abs(q[0]), abs(q[1])) - 1.0

        def d_rho(q):
            raise NotImplementedError("polydisc boundary is not smooth")

        return DomainModel("polydisc", rho, d_rho, None)


def _as_arr(p) -> np.ndarray:
    if isinstance(p, PointC2):
        return p.as_array()
    if isinstance(p, CVec2):
        return p.as_array()
    return np.asarray(p, dtype=np.complex128)


@dataclass(frozen=True)
class BoundaryFrame:
    """Orthonormal frame at a boundary point.

    `normal` is the inward unit normal, `tangC` spans the complex tangent
    space (complex dimension 1 for k=2) and `tangR` = i*normal spans the
    remaining real tangent direction.
    """

    p: PointC2
    normal: CVec2
    tangC: CVec2
    tangR: CVec2


def project_to_boundary(domain: DomainModel, p, steps: int = 2) -> np.ndarray:
    """Newton-project a near-boundary point onto {rho = 0} along the gradient."""
    q = _as_arr(p).copy()
    for _ in range(steps):
        g = domain.real_gradient(q)
        g2 = float(np.vdot(g, g).real)
        if g2 < 1e-18:
            break
        q = q - domain.rho(q) * g / g2
    return q


def boundary_frame(domain: DomainModel, p) -> BoundaryFrame:
    """Orthonormal boundary frame (inward normal, complex tangent, i*normal)."""
    q0 = _as_arr(p)
    if abs(domain.rho(q0)) >= BOUNDARY_TOL:
        raise PointNotOnBoundary(
            f"|rho(p)| = {abs(domain.rho(q0)):.3e} >= {BOUNDARY_TOL}")
    g = domain.real_gradient(q0)
    gn = float(np.linalg.norm(g))
    if gn < 1e-9:
        raise DegenerateGradient(f"|grad rho(p)| = {gn:.3e} < 1e-9")
    q = project_to_boundary(domain, q0)
    g = domain.real_gradient(q)
    n = -g / np.linalg.norm(g)
    # Hermitian-orthogonal complement of n, phase-normalized so that the
    # largest-modulus component is real positive (fixes the convention
    # tangC = (0, 1) at the pole (1, 0) of the sphere).
    t = np.array([-np.conj(n[1]), np.conj(n[0])])
    i = int(np.argmax(np.abs(t)))
    t = t * (abs(t[i]) / t[i])
    return BoundaryFrame(
        p=PointC2.from_array(q),
        normal=CVec2.from_array(n),
        tangC=CVec2.from_array(t),
        tangR=CVec2.from_array(1j * n),
    )


def levi_form(domain: DomainModel, p, u) -> float:
    """Complex Hessian of the defining function at p applied to (u, conj u).

    Requires p on the boundary and u in the complex tangent space at p.
    """
    q = _as_arr(p)
    if abs(domain.rho(q)) >= BOUNDARY_TOL:
        raise PointNotOnBoundary(
            f"|rho(p)| = {abs(domain.rho(q)):.3e} >= {BOUNDARY_TOL}")
    v = _as_arr(u)
    pairing = complex(np.dot(domain.d_rho(q), v))
    if abs(pairing) >= 1e-9 * max(1.0, float(np.linalg.norm(v))):
        raise NotComplexTangent(f"|<d_rho, u>| = {abs(pairing):.3e}")
    H = domain.levi_matrix(q)
    return float(np.real(np.conj(v) @ H @ v))


@dataclass(frozen=True)
class PlanarGrid:
    """Square lattice of cell-center samples over a window of the plane.

    Cell (i, j) (row i = imaginary axis, column j = real axis, row-major)
    sits at center + (j - m)*cell + i*(i - m)*cell*1j with m = (n-1)/2, so
    index offsets are exactly antisymmetric about the window center.
    """

    center: complex
    half_width: float
    resolution: int

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def cell(self) -> float:
        return 2.0 * self.half_width / self.resolution

    def point(self, i: int, j: int) -> complex:
        m = (self.resolution - 1) / 2.0
        return self.center + complex((j - m) * self.cell, (i - m) * self.cell)

    def index(self, zeta: complex) -> tuple[int, int]:
        m = (self.resolution - 1) / 2.0
        j = int(round((zeta.real - self.center.real) / self.cell + m))
        i = int(round((zeta.imag - self.center.imag) / self.cell + m))
        return i, j

    def points(self) -> np.ndarray:
        """(resolution x resolution) complex array of cell centers."""
        m = (self.resolution - 1) / 2.0
        idx = np.arange(self.resolution)
        off = (idx - m) * self.cell
        re = self.center.real + off[None, :]
        im = self.center.imag + off[:, None]
        return re + 1j * im


def stream(seed: int, *path) -> np.random.Generator:
    """Deterministic splittable random stream (counter-based Philox).

    Child streams are derived from the root seed and a path of labels, so
    concurrent workers can draw independent, reproducible substreams.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for part in path:
        h = hashlib.sha256(repr(part).encode()).digest()
        words.append(int.from_bytes(h[:8], "little"))
    ss = np.random.SeedSequence(words)
    return np.random.Generator(np.random.Philox(ss))
