"""Semi-inner products on finite l^p and the frame identities they carry.

For p > 1 the space l^p_d admits the canonical semi-inner product

    [x, y] = sum_j x_j conj(y_j) |y_j|^(p-2) / ||y||_p^(p-2),   [x, 0] = 0,

linear in x, with [x, x] = ||x||_p^2 and |[x, y]| <= ||x|| ||y||. Frame-type
families (omega_n, tau_n) act through partial operators
S_M x = sum_{n in M} [x, omega_n] tau_n; the module checks the resulting
identities and the 3/4 lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linops
from .linops import herm, inverse, vec_pnorm

PARSEVAL_TOL = 1e-8


def sip(x, y, p) -> complex:
    """The canonical semi-inner product [x, y] on l^p, p > 1."""
    p = float(p)
    if not p > 1 or math.isinf(p):
        raise ValueError("the semi-inner product needs 1 < p < inf")
    x = linops.as_vector(x)
    y = linops.as_vector(y)
    if x.size != y.size:
        raise ValueError("vectors must share a dimension")
    ny = vec_pnorm(y, p)
    if ny == 0.0:
        return 0.0 + 0.0j
    ay = np.abs(y)
    w = np.zeros_like(y)
    nz = ay > 0
    w[nz] = np.conj(y[nz]) * ay[nz] ** (p - 2)
    return complex((x * w).sum() / ny ** (p - 2))


def sip_functional(y, p) -> np.ndarray:
    """Row w with [x, y] = w . x for all x (the duality map at y)."""
    y = linops.as_vector(y)
    ny = vec_pnorm(y, p)
    if ny == 0.0:
        return np.zeros_like(y)
    ay = np.abs(y)
    w = np.zeros_like(y)
    nz = ay > 0
    w[nz] = np.conj(y[nz]) * ay[nz] ** (p - 2)
    return w / ny ** (p - 2)


@dataclass(frozen=True)
class SipPair:
    """Family (omega_n, tau_n) in l^p_d, stored as columns of Omega and Tau."""

    p: float
    Omega: np.ndarray
    Tau: np.ndarray

    def __post_init__(self):
        p = float(self.p)
        if not p > 1 or math.isinf(p):
            raise ValueError("need 1 < p < inf")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "Omega", linops.as_matrix(self.Omega))
        object.__setattr__(self, "Tau", linops.as_matrix(self.Tau))
        if self.Omega.shape != self.Tau.shape:
            raise ValueError("Omega and Tau must share shape")

    @property
    def d(self) -> int:
        return self.Omega.shape[0]

    @property
    def m(self) -> int:
        return self.Omega.shape[1]

    def functionals(self) -> np.ndarray:
        """Matrix W (m x d) with row n the duality map of omega_n."""
        return np.vstack([sip_functional(self.Omega[:, n], self.p)
                          for n in range(self.m)])

    def analysis(self, x) -> np.ndarray:
        """Coefficients ([x, omega_n])_n."""
        return self.functionals() @ linops.as_vector(x)

    def frame_operator(self) -> np.ndarray:
        return self.Tau @ self.functionals()

    def is_parseval(self, tol: float = PARSEVAL_TOL) -> bool:
        return float(np.abs(self.frame_operator() - np.eye(self.d)).max()) <= tol


def _subset(P: SipPair, M) -> list[int]:
    idx = sorted({int(n) for n in M})
    for n in idx:
        if not 0 <= n < P.m:
            raise ValueError(f"subset index {n} out of range 0..{P.m - 1}")
    return idx


def partial_operator(P: SipPair, M) -> np.ndarray:
    """S_M = sum_{n in M} [., omega_n] tau_n, linear in x for every p."""
    idx = _subset(P, M)
    W = P.functionals()
    if not idx:
        return np.zeros((P.d, P.d), dtype=complex)
    return P.Tau[:, idx] @ W[idx, :]


def _complement(P: SipPair, M) -> list[int]:
    chosen = set(_subset(P, M))
    return [n for n in range(P.m) if n not in chosen]


def general_identity_residual(P: SipPair, M, x) -> float:
    """Residual of the index-split identity for an arbitrary pair with
    invertible frame operator:

    sum_{n in M} [x, omega_n][tau_n, x] - sum_n [S_M x, dual w_n][dual t_n, (S_M)* x]

    takes the same value on M and its complement. The canonical dual is
    realized as dual t_n = S^(-1) tau_n with [u, dual w_n] = [S^(-1) u, w_n],
    and the trailing slot (S_M)* x is eliminated through the defining
    relation [w, (S_M)* x] = [S_M w, x]; no generalized adjoint is built.
    """
    x = linops.as_vector(x)
    Sinv = inverse(P.frame_operator())
    p = P.p

    def side(idx):
        first = sum(sip(x, P.Omega[:, n], p) * sip(P.Tau[:, n], x, p)
                    for n in idx)
        u = Sinv @ partial_operator(P, idx) @ x
        w = sum((sip(u, P.Omega[:, n], p) * (Sinv @ P.Tau[:, n])
                 for n in range(P.m)),
                np.zeros(P.d, dtype=complex))
        second = sip(partial_operator(P, idx) @ w, x, p)
        return first - second

    return abs(side(_subset(P, M)) - side(_complement(P, M)))


def parseval_identity_residual(P: SipPair, M, x) -> float:
    """Residual of the Parseval form of the identity:

    sum_{n in M} [x,w_n][t_n,x] - sum_{n,k in M} [x,w_n][t_n,w_k][t_k,x]
    equals the same expression over the complement.
    """
    if not P.is_parseval():
        raise ValueError("frame operator is not the identity within 1e-8")
    x = linops.as_vector(x)
    p = P.p

    def side(idx):
        c = [sip(x, P.Omega[:, n], p) for n in idx]
        ct = [sip(P.Tau[:, n], x, p) for n in idx]
        first = sum(a * b for a, b in zip(c, ct))
        second = sum(c[i] * sip(P.Tau[:, idx[i]], P.Omega[:, idx[k]], p) * ct[k]
                     for i in range(len(idx)) for k in range(len(idx)))
        return first - second

    return abs(side(_subset(P, M)) - side(_complement(P, M)))


def operator_identity_residual(P: SipPair, M) -> float:
    """||S_M + S_{M^c}^2 - S_{M^c} - S_M^2|| for a Parseval pair."""
    if not P.is_parseval():
        raise ValueError("frame operator is not the identity within 1e-8")
    S_M = partial_operator(P, M)
    S_Mc = partial_operator(P, _complement(P, M))
    R = S_M + S_Mc @ S_Mc - S_Mc - S_M @ S_M
    return float(np.linalg.norm(R, 2))


@dataclass(frozen=True)
class LowerBoundReport:
    condition_value: float
    condition_holds: bool
    value: float
    passes: bool


def lower_bound_check(P: SipPair, M, x, slack: float = 1e-9) -> LowerBoundReport:
    """The 3/4 lower bound for Parseval pairs.

    Whenever [(S_M - I/2)^2 x, x] >= 0 (checked with a -1e-10 allowance),
    the quantity sum_{n in M} [x,w_n][t_n,x]
    + sum_{n,k in M^c} [x,w_n][t_n,w_k][t_k,x] is at least
    (3/4) ||x||_p^2 - slack.
    """
    if not P.is_parseval():
        raise ValueError("frame operator is not the identity within 1e-8")
    x = linops.as_vector(x)
    p = P.p
    M = _subset(P, M)
    Mc = _complement(P, M)
    S_M = partial_operator(P, M)
    half = S_M - 0.5 * np.eye(P.d)
    condition_value = sip(half @ half @ x, x, p).real
    condition_holds = condition_value >= -1e-10

    first = sum((sip(x, P.Omega[:, n], p) * sip(P.Tau[:, n], x, p)
                 for n in M), 0.0 + 0.0j)
    second = sum((sip(x, P.Omega[:, n], p)
                  * sip(P.Tau[:, n], P.Omega[:, k], p)
                  * sip(P.Tau[:, k], x, p)
                  for n in Mc for k in Mc), 0.0 + 0.0j)
    value = (first + second).real
    passes = (not condition_holds) or value >= 0.75 * vec_pnorm(x, p) ** 2 - slack
    return LowerBoundReport(condition_value, condition_holds, value, passes)


def make_parseval(p: float, d: int, m: int, seed: int = 0) -> SipPair:
    """Random omega_n with tau_n solved so the frame operator is exactly
    the identity (left inverse of the duality-map matrix)."""
    if m < d:
        raise ValueError("need m >= d vectors to reconstruct")
    rng = np.random.default_rng(seed)
    while True:
        Omega = rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m))
        W = np.vstack([sip_functional(Omega[:, n], p) for n in range(m)])
        if linops.is_invertible(herm(W) @ W):
            break
    Tau = inverse(herm(W) @ W) @ herm(W)
    return SipPair(p, Omega, Tau)
