"""Bundled holomorphic self-maps of the model domains.

The unit ball of C^2 has no proper self-maps besides automorphisms, so the
bundle consists of Moebius automorphisms, unitary rotations and their
compositions.  Arbitrary smooth boundary self-maps are accepted anywhere a
`BoundaryMap` is, through the same callable-plus-Jacobian interface.
"""

from __future__ import annotations

import numpy as np

from .geometry import PointC2, _as_arr


class BoundaryMap:
    """A smooth self-map of C^2 with a (complex) Jacobian.

    `func` maps a complex 2-array to a complex 2-array.  If no analytic
    Jacobian is supplied it is computed by central complex differences,
    which is exact to O(h^2) for holomorphic maps.
    """

    def __init__(self, func, jac=None, name: str = "map", fd_step: float = 1e-6):
        self._func = func
        self._jac = jac
        self.name = name
        self.fd_step = fd_step

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self._func(_as_arr(p)), dtype=np.complex128)

    def point(self, p) -> PointC2:
        return PointC2.from_array(self(p))

    def jacobian(self, p) -> np.ndarray:
        """2x2 complex matrix J with dF = J . dzeta."""
        q = _as_arr(p)
        if self._jac is not None:
            return np.asarray(self._jac(q), dtype=np.complex128)
        h = self.fd_step
        J = np.empty((2, 2), dtype=np.complex128)
        for j in range(2):
            e = np.zeros(2, dtype=np.complex128)
            e[j] = h
            J[:, j] = (self(q + e) - self(q - e)) / (2.0 * h)
        return J

    def apply_vector(self, p, v) -> np.ndarray:
        return self.jacobian(p) @ _as_arr(v)

    def compose(self, other: "BoundaryMap") -> "BoundaryMap":
        """self after other: (self . other)(p) = self(other(p))."""
        def func(q):
            return self(other(q))

        def jac(q):
            return self.jacobian(other(q)) @ other.jacobian(q)

        return BoundaryMap(func, jac, name=f"{self.name}.{other.name}")


def identity_map() -> BoundaryMap:
    return BoundaryMap(lambda q: q.copy(), lambda q: np.eye(2, dtype=np.complex128),
                       name="id")


def unitary_map(U: np.ndarray, name: str = "unitary") -> BoundaryMap:
    U = np.asarray(U, dtype=np.complex128)

    return BoundaryMap(lambda q: U @ q, lambda q: U, name=name)


def rotation_map(theta: float) -> BoundaryMap:
    """(w, z) -> (e^{i theta} w, z), an automorphism of the ball."""
    return unitary_map(np.diag([np.exp(1j * theta), 1.0]), name=f"rot({theta})")


def ball_automorphism(a) -> BoundaryMap:
    """The involutive Moebius automorphism phi_a of the unit ball of C^2.

    phi_a(0) = a, phi_a(a) = 0, phi_a . phi_a = id; maps the sphere to
    itself and is smooth on a neighborhood of the closed ball.
    """
    a = _as_arr(a)
    na2 = float(np.vdot(a, a).real)
    if na2 >= 1.0:
        raise ValueError("automorphism parameter must lie in the open ball")
    if na2 == 0.0:
        return BoundaryMap(lambda q: -q, lambda q: -np.eye(2, dtype=np.complex128),
                           name="phi_0")
    s = np.sqrt(1.0 - na2)

    def func(q):
        ip = complex(np.vdot(a, q))  # <q, a> = sum q_i conj(a_i)
        P = (ip / na2) * a
        Q = q - P
        return (a - P - s * Q) / (1.0 - ip)

    def jac(q):
        # derivative of the Moebius quotient; dP = (<dq,a>/|a|^2) a
        ip = complex(np.vdot(a, q))
        P = (ip / na2) * a
        Q = q - P
        denom = 1.0 - ip
        val = (a - P - s * Q) / denom
        J = np.empty((2, 2), dtype=np.complex128)
        for j in range(2):
            e = np.zeros(2, dtype=np.complex128)
            e[j] = 1.0
            dip = complex(np.conj(a[j]))
            dP = (dip / na2) * a
            dQ = e - dP
            J[:, j] = (-dP - s * dQ) / denom + val * dip / denom
        return J

    return BoundaryMap(func, jac, name=f"phi_{tuple(a)}")


def ball_translation(a) -> BoundaryMap:
    """Non-involutive 'translation by a': phi_a composed with -id.

    Fixes the two boundary points of the complex line through a and dilates
    the boundary toward a/|a| as |a| -> 1; the natural family for boundary
    escape-rate growth experiments.
    """
    phi = ball_automorphism(a)
    neg = unitary_map(-np.eye(2), name="-id")
    t = phi.compose(neg)
    t.name = f"trans_{tuple(_as_arr(a))}"
    return t
