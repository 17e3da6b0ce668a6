"""Neumann eigenbasis of the disk: Bessel evaluation, derivative zeros,
truncated mode lists, and eigenfunction/gradient evaluation.

Eigenfunctions are J_n(beta_nm r / a) * {cos, sin}(n theta) with beta_nm the
zeros of J_n', normalized to unit L2 norm over the disk.  The reaction term
of the evolution operator shifts the modal growth rates to 1 - (beta/a)^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special


class DomainError(ValueError):
    """Argument outside the supported geometric or accuracy envelope."""


COS = "cos"
SIN = "sin"

MAX_BESSEL_ORDER = 60
MAX_BESSEL_ARG = 200.0
MAX_ZERO_ORDER = 40
MAX_ZERO_INDEX = 40

# Reference tensor-product quadrature resolution (radial x angular).
RADIAL_QUAD_NODES = 240
ANGULAR_QUAD_NODES = 480


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind J_order(x) on the supported envelope."""
    if not 0 <= order <= MAX_BESSEL_ORDER:
        raise DomainError(f"Bessel order {order} outside [0, {MAX_BESSEL_ORDER}]")
    if not 0.0 <= x <= MAX_BESSEL_ARG:
        raise DomainError(f"Bessel argument {x} outside [0, {MAX_BESSEL_ARG}]")
    return float(special.jv(order, x))


def bessel_jprime(order: int, x: float) -> float:
    """Derivative J_order'(x), via J0' = -J1 and 2 Jn' = J_{n-1} - J_{n+1}."""
    if order == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


@lru_cache(maxsize=None)
def bessel_jprime_zero(order: int, index: int) -> float:
    """index-th nonnegative root of J_order'.

    For order 0 the first root is 0 (the constant Neumann mode); for
    order >= 1 the trivial root at 0 is not counted.
    """
    if not 0 <= order <= MAX_ZERO_ORDER:
        raise DomainError(f"order {order} outside [0, {MAX_ZERO_ORDER}]")
    if not 1 <= index <= MAX_ZERO_INDEX:
        raise DomainError(f"index {index} outside [1, {MAX_ZERO_INDEX}]")
    if order == 0:
        if index == 1:
            return 0.0
        return float(special.jnp_zeros(0, index - 1)[index - 2])
    return float(special.jnp_zeros(order, index)[index - 1])


@dataclass(frozen=True)
class ModeTruncation:
    """Finite truncation of the eigenbasis: angular indices 0..n_max,
    radial indices 1..m_max per angular index."""

    n_max: int
    m_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")


@dataclass(frozen=True)
class EigenMode:
    """One eigenpair of the Neumann problem on the disk of radius a."""

    n: int
    m: int
    branch: str  # COS or SIN; SIN only for n >= 1
    beta: float  # zero of J_n'
    rate: float  # modal growth rate 1 - (beta/a)^2
    norm_const: float
    a: float  # ambient disk radius


@lru_cache(maxsize=8)
def _gauss_legendre(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def radial_rule(a: float, nodes: int = RADIAL_QUAD_NODES):
    """Gauss-Legendre nodes/weights on [0, a]."""
    x, w = _gauss_legendre(nodes)
    return 0.5 * a * (x + 1.0), 0.5 * a * w


def angular_rule(nodes: int = ANGULAR_QUAD_NODES):
    """Uniform periodic rule on [0, 2pi) (spectrally accurate)."""
    theta = np.arange(nodes) * (2.0 * np.pi / nodes)
    w = np.full(nodes, 2.0 * np.pi / nodes)
    return theta, w


def _mode_norm_const(a: float, n: int, beta: float) -> float:
    if beta == 0.0:
        return 1.0 / np.sqrt(np.pi * a * a)
    r, w = radial_rule(a)
    radial = np.sum(w * r * special.jv(n, beta * r / a) ** 2)
    angular = 2.0 * np.pi if n == 0 else np.pi
    return 1.0 / np.sqrt(radial * angular)


class EigenBasis:
    """Ordered truncated eigenbasis with per-sensor functional caches."""

    def __init__(self, a: float, trunc: ModeTruncation):
        if a <= 0:
            raise ValueError("disk radius must be positive")
        self.a = float(a)
        self.trunc = trunc
        modes = []
        for n in range(trunc.n_max + 1):
            for m in range(1, trunc.m_max + 1):
                beta = bessel_jprime_zero(n, m)
                rate = 1.0 - (beta / a) ** 2
                norm = _mode_norm_const(a, n, beta)
                branches = (COS,) if n == 0 else (COS, SIN)
                for branch in branches:
                    modes.append(EigenMode(n, m, branch, beta, rate, norm, self.a))
        self.modes = modes
        self.rates = np.array([mode.rate for mode in modes])
        self._index = {(mo.n, mo.m, mo.branch): k for k, mo in enumerate(modes)}
        # write-once caches of per-sensor modal functionals
        self._functional_cache: dict = {}

    def __len__(self):
        return len(self.modes)

    def index(self, n: int, m: int, branch: str = COS) -> int:
        return self._index[(n, m, branch)]

    @property
    def unstable_count(self) -> int:
        """Number of modes with nonnegative growth rate."""
        return int(np.sum(self.rates >= 0.0))


def build_eigenbasis(a: float, trunc: ModeTruncation) -> EigenBasis:
    """Build the truncated eigenbasis on the disk of radius a."""
    if trunc.n_max > MAX_ZERO_ORDER or trunc.m_max > MAX_ZERO_INDEX:
        raise DomainError("truncation exceeds the supported root-finding envelope")
    return EigenBasis(a, trunc)


def _check_inside(a: float, r: np.ndarray):
    if np.any(r < -1e-12) or np.any(r > a * (1.0 + 1e-9)):
        raise DomainError("point outside the closed disk")


def _trig(branch: str, x: np.ndarray) -> np.ndarray:
    return np.cos(x) if branch == COS else np.sin(x)


def _dtrig(branch: str, x: np.ndarray) -> np.ndarray:
    # d/d(theta) of trig(n theta) divided by n
    return -np.sin(x) if branch == COS else np.cos(x)


def _jv_gather(n: int, x: np.ndarray) -> np.ndarray:
    """J_n over an array, evaluated once per distinct value.

    Quadrature grids repeat each radius across all angles, so this saves the
    dominant Bessel cost without changing results.
    """
    if x.size <= 16:
        return special.jv(n, x)
    xu, inv = np.unique(x, return_inverse=True)
    if xu.size > x.size // 2:
        return special.jv(n, x)
    return special.jv(n, xu)[inv].reshape(x.shape)


def eval_eigenfunction(mode: EigenMode, r, theta):
    """Eigenfunction value at polar point(s) (r, theta)."""
    r_arr = np.asarray(r, dtype=float)
    th_arr = np.asarray(theta, dtype=float)
    _check_inside(mode.a, r_arr)
    scalar = r_arr.ndim == 0 and th_arr.ndim == 0
    val = (
        mode.norm_const
        * _jv_gather(mode.n, mode.beta * r_arr / mode.a)
        * _trig(mode.branch, mode.n * th_arr)
    )
    return float(val) if scalar else val


def eval_eigengradient(mode: EigenMode, r, theta):
    """Cartesian gradient (g_x, g_y) of the eigenfunction at (r, theta).

    The polar formula divides by r; at the origin the analytic series limit
    is used (zero except for n = 1, where it is a constant vector).
    """
    r_in = np.asarray(r, dtype=float)
    th_in = np.asarray(theta, dtype=float)
    _check_inside(mode.a, r_in)
    scalar = r_in.ndim == 0 and th_in.ndim == 0
    r_arr, th_arr = np.broadcast_arrays(np.atleast_1d(r_in), np.atleast_1d(th_in))
    gx = np.zeros(r_arr.shape)
    gy = np.zeros(r_arr.shape)
    if mode.beta > 0.0:
        n, beta, a, c = mode.n, mode.beta, mode.a, mode.norm_const
        pos = r_arr > 1e-300
        rp = r_arr[pos]
        tp = th_arr[pos]
        x = beta * rp / a
        jp = 0.5 * (_jv_gather(n - 1, x) - _jv_gather(n + 1, x)) if n >= 1 else -_jv_gather(1, x)
        d_r = c * (beta / a) * jp * _trig(mode.branch, n * tp)
        d_t = c * _jv_gather(n, x) * n * _dtrig(mode.branch, n * tp) / rp
        gx[pos] = d_r * np.cos(tp) - d_t * np.sin(tp)
        gy[pos] = d_r * np.sin(tp) + d_t * np.cos(tp)
        if np.any(~pos) and n == 1:
            # J_1(x) ~ x/2 near 0: gradient of c*(beta/2a)*{x, y}
            g0 = c * beta / (2.0 * a)
            if mode.branch == COS:
                gx[~pos] = g0
            else:
                gy[~pos] = g0
    if scalar:
        return float(gx[0]), float(gy[0])
    return gx, gy


def tangential_boundary_trace(mode: EigenMode, theta):
    """Tangential component of the eigenfunction gradient on r = a.

    The normal component vanishes identically by the Neumann condition;
    n = 0 modes have zero boundary-gradient trace.
    """
    th_arr = np.asarray(theta, dtype=float)
    scalar = th_arr.ndim == 0
    if mode.n == 0:
        out = np.zeros(np.atleast_1d(th_arr).shape)
        return 0.0 if scalar else out
    val = (
        mode.norm_const
        * special.jv(mode.n, mode.beta)
        * mode.n
        * _dtrig(mode.branch, mode.n * th_arr)
        / mode.a
    )
    return float(val) if scalar else val
