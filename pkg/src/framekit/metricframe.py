"""Metric (Lipschitz) p-frames on finite sampled metric spaces.

A family of Lipschitz functions f_n is a metric p-frame when

    a d(x,y) <= (sum_n |f_n(x) - f_n(y)|^p)^(1/p) <= b d(x,y)

for all points x, y. On a finite sample everything is decidable by an
exhaustive pair scan: bounds, Bessel constants, perturbation hypotheses.
Families cut from infinite series carry a certified truncation remainder
that widens the reported upper bound.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linops
from .linops import vec_pnorm

DIST_TOL = 1e-12


class HypothesisViolated(ValueError):
    pass


@dataclass(frozen=True)
class MetricSample:
    """Finite metric space: point labels, a distance table, optional base.

    The table must be symmetric with zero diagonal and satisfy the
    triangle inequality within 1e-12; labels are opaque except where an
    operation states otherwise.
    """

    points: tuple
    dist: np.ndarray
    base: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        D = np.asarray(self.dist, dtype=float)
        n = len(self.points)
        if n < 1 or D.shape != (n, n):
            raise ValueError("distance table must be square and match the points")
        if not np.all(np.isfinite(D)):
            raise ValueError("distances must be finite")
        if D.min() < 0:
            raise ValueError("distances must be nonnegative")
        if np.abs(np.diagonal(D)).max(initial=0.0) > DIST_TOL:
            raise ValueError("diagonal must be zero")
        if np.abs(D - D.T).max(initial=0.0) > DIST_TOL:
            raise ValueError("distance table must be symmetric")
        for k in range(n):
            if (D - (D[:, [k]] + D[[k], :])).max() > DIST_TOL:
                raise ValueError("triangle inequality fails through point "
                                 f"{self.points[k]!r}")
        if self.base is not None and not 0 <= int(self.base) < n:
            raise ValueError("base index out of range")
        object.__setattr__(self, "dist", D)
        if self.base is not None:
            object.__setattr__(self, "base", int(self.base))

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LipschitzFamily:
    """Sampled function family: values[n][j] = f_n(point j).

    remainder bounds the l^1 tail of Lipschitz numbers of any terms
    dropped when an infinite family was cut; 0 means the table is the
    whole family.
    """

    values: np.ndarray
    remainder: float = 0.0

    def __post_init__(self):
        V = np.asarray(self.values)
        if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 1:
            raise ValueError("expected an m x N value table")
        if not np.all(np.isfinite(V.real)) or not np.all(np.isfinite(V.imag)):
            raise ValueError("family values must be finite")
        r = float(self.remainder)
        if not r >= 0 or math.isinf(r):
            raise ValueError("remainder must be finite and nonnegative")
        object.__setattr__(self, "values", V)
        object.__setattr__(self, "remainder", r)

    @property
    def m(self) -> int:
        return self.values.shape[0]


def sample_from_points(points, base: Optional[int] = None) -> MetricSample:
    """Sample of the real line: numeric labels, d(x, y) = |x - y|."""
    x = np.asarray(points, dtype=float).reshape(-1)
    return MetricSample(tuple(x.tolist()), np.abs(x[:, None] - x[None, :]), base)


def sample_from_vectors(X, p, base: Optional[int] = None) -> MetricSample:
    """Sample of K^d with the p-norm metric; labels are the columns of X."""
    X = linops.as_matrix(X)
    n = X.shape[1]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i):
            D[i, j] = D[j, i] = vec_pnorm(X[:, i] - X[:, j], p)
    labels = tuple(tuple(X[:, j].tolist()) for j in range(n))
    return MetricSample(labels, D, base)


def _check_sizes(S: MetricSample, F: LipschitzFamily):
    if F.values.shape[1] != S.n:
        raise ValueError("family table does not match the sample size")
    if S.n < 2:
        raise ValueError("need at least 2 points")


def _pair_ratios(S: MetricSample, values: np.ndarray, p: float):
    """All ratios ||f(x_i) - f(x_j)||_p / d(x_i, x_j) over pairs i < j."""
    p = float(p)
    if not 1 <= p < math.inf:
        raise ValueError("metric p-frames need 1 <= p < inf")
    ratios = []
    for i in range(S.n):
        for j in range(i + 1, S.n):
            num = vec_pnorm(values[:, i] - values[:, j], p)
            d = S.dist[i, j]
            if d <= 0:
                if num > DIST_TOL:
                    raise ValueError(
                        "points at distance 0 take different values: "
                        "no finite upper bound")
                continue
            ratios.append(num / d)
    if not ratios:
        raise ValueError("degenerate sample: all pairwise distances are 0")
    return ratios


def metric_frame_bounds(S: MetricSample, F: LipschitzFamily, p) -> tuple[float, float]:
    """Sampled frame bounds (a, b) = extreme pairwise ratios.

    A dropped tail can only increase each pairwise sum, so the measured
    minimum stays a valid lower bound while the upper bound widens by the
    remainder (the l^1 tail dominates the l^p tail for every p >= 1).
    """
    _check_sizes(S, F)
    ratios = _pair_ratios(S, F.values, p)
    return min(ratios), max(ratios) + F.remainder


def lipschitz_number(S: MetricSample, values) -> float:
    """max |f(x) - f(y)| / d(x, y) over sampled pairs; inf if a zero-distance
    pair separates values."""
    v = np.asarray(values).reshape(-1)
    if v.size != S.n:
        raise ValueError("value row does not match the sample size")
    best = 0.0
    for i in range(S.n):
        for j in range(i + 1, S.n):
            num = abs(v[i] - v[j])
            d = S.dist[i, j]
            if d <= 0:
                if num > DIST_TOL:
                    return math.inf
                continue
            best = max(best, num / d)
    return best


_NAME = re.compile(r"^\s*(log|rational)\s*\(\s*([^,()]+?)\s*(?:,\s*([^,()]+?)\s*)?\)\s*$")


def make_named_family(name: str, S: MetricSample, m: int) -> LipschitzFamily:
    """Built-in 1-frame families cut at m terms, with a certified remainder.

    log(a): on [a, inf) with a >= 1, rows 1, log(x), (log x)^2/2!, ...;
    the pairwise 1-sums telescope to |x - y|. rational(a, b): on
    [a, b] with 1 < a, rows (1 - 1/x)^n for n = 0..m-1; geometric sums
    again give |x - y|. Remainders bound the dropped Lipschitz tail via
    the ratio test (log) or the differentiated geometric series (rational).
    """
    mt = _NAME.match(name)
    if not mt:
        raise ValueError(f"unknown family {name!r}; use log(a) or rational(a,b)")
    if m < 1:
        raise ValueError("need at least one term")
    try:
        x = np.asarray([float(pt) for pt in S.points])
    except (TypeError, ValueError):
        raise ValueError("named families need numeric point labels") from None
    kind = mt.group(1)

    if kind == "log":
        if mt.group(3) is not None:
            raise ValueError("log takes a single parameter: log(a)")
        a = float(mt.group(2))
        if not a >= 1:
            raise ValueError("log family needs a >= 1")
        if x.min() < a - DIST_TOL:
            raise ValueError("sample leaves the domain [a, inf)")
        A, B = x.min(), x.max()
        c = math.log(max(B, 1.0))
        if m <= c:
            raise ValueError("too few terms to certify the tail: need m > log(max point)")
        rows = [np.ones_like(x)]
        term = np.ones_like(x)
        logs = np.log(x)
        for n in range(1, m):
            term = term * logs / n
            rows.append(term)
        # Lip(f_n) <= (log B)^(n-1)/((n-1)! A); geometric majorant from n = m
        t = c ** (m - 1) / math.factorial(m - 1)
        r = (t / (1.0 - c / m)) / A
        return LipschitzFamily(np.vstack(rows), r)

    if mt.group(3) is None:
        raise ValueError("rational takes two parameters: rational(a,b)")
    a, b = float(mt.group(2)), float(mt.group(3))
    if not 1 < a <= b:
        raise ValueError("rational family needs 1 < a <= b")
    if x.min() < a - DIST_TOL or x.max() > b + DIST_TOL:
        raise ValueError("sample leaves the domain [a, b]")
    A = x.min()
    t = 1.0 - 1.0 / x.max()
    base = 1.0 - 1.0 / x
    rows = [base ** n for n in range(m)]
    # Lip(f_n) <= n t^(n-1)/A^2; the tail sum has the closed form below
    r = (t ** (m - 1) * (m * (1 - t) + t) / (1 - t) ** 2) / A ** 2
    return LipschitzFamily(np.vstack(rows), r)


@dataclass(frozen=True)
class CombineReport:
    mode: str
    lam: complex
    predicted: tuple[float, float]
    measured: tuple[float, float]
    family: LipschitzFamily


def combine(S: MetricSample, F: LipschitzFamily, G: Optional[LipschitzFamily],
            lam, mode: str, p=1) -> CombineReport:
    """Scale a frame family or add a Bessel family to it.

    scale: lam*F has bounds (|lam| a, |lam| b). add: F + lam*G has bounds
    (a - |lam| d, b + |lam| d) where d is the measured Bessel bound of G,
    provided |lam| < a/d. Measured bounds of the combined family are
    reported next to the predictions.
    """
    _check_sizes(S, F)
    lam = complex(lam)
    al = abs(lam)
    a, b = metric_frame_bounds(S, F, p)
    if mode == "scale":
        fam = LipschitzFamily(lam * F.values, al * F.remainder)
        predicted = (al * a, al * b)
    elif mode == "add":
        if G is None:
            raise ValueError("add mode needs a second family")
        _check_sizes(S, G)
        if G.values.shape[0] != F.m:
            raise ValueError("families must have the same number of terms")
        d = max(_pair_ratios(S, G.values, p)) + G.remainder
        if not al * d < a:
            raise HypothesisViolated(
                f"|lam| d = {al * d:.6g} must stay below the lower bound {a:.6g}")
        fam = LipschitzFamily(F.values + lam * G.values,
                              F.remainder + al * G.remainder)
        predicted = (a - al * d, b + al * d)
    else:
        raise ValueError("mode must be 'scale' or 'add'")
    return CombineReport(mode, lam, predicted, metric_frame_bounds(S, fam, p), fam)


@dataclass(frozen=True)
class MetricPerturbation:
    hypothesis_holds: bool
    predicted: tuple[float, float]
    measured: tuple[float, float]


def perturb_certificate(S: MetricSample, F: LipschitzFamily, G: LipschitzFamily,
                        alpha: float, beta: float, gamma: float, p) -> MetricPerturbation:
    """Pairwise perturbation certificate for a candidate family G.

    Checks exhaustively (the sample is finite, so this is the whole
    hypothesis, not a sampling) that for all pairs

    ||(f-g)(x)-(f-g)(y)||_p <= alpha ||f(x)-f(y)||_p + beta ||g(x)-g(y)||_p
                               + gamma d(x,y),

    and reports the implied bounds ((1-alpha)a - gamma)/(1+beta) and
    ((1+alpha)b + gamma)/(1-beta). Certificates apply to the recorded
    tables; truncation remainders are not part of the hypothesis.
    """
    _check_sizes(S, F)
    _check_sizes(S, G)
    if G.values.shape != F.values.shape:
        raise ValueError("families must share the table shape")
    alpha, beta, gamma = float(alpha), float(beta), float(gamma)
    if min(alpha, beta, gamma) < 0:
        raise HypothesisViolated("alpha, beta, gamma must be nonnegative")
    if alpha >= 1 or beta >= 1:
        raise HypothesisViolated("need alpha < 1 and beta < 1")
    ratios = _pair_ratios(S, F.values, p)
    a, b = min(ratios), max(ratios)
    if not gamma < (1 - alpha) * a:
        raise HypothesisViolated("need gamma < (1 - alpha) a")

    holds = True
    diff = F.values - G.values
    for i in range(S.n):
        for j in range(i + 1, S.n):
            lhs = vec_pnorm(diff[:, i] - diff[:, j], p)
            rhs = (alpha * vec_pnorm(F.values[:, i] - F.values[:, j], p)
                   + beta * vec_pnorm(G.values[:, i] - G.values[:, j], p)
                   + gamma * S.dist[i, j])
            if lhs > rhs + 1e-12:
                holds = False
    predicted = (((1 - alpha) * a - gamma) / (1 + beta),
                 ((1 + alpha) * b + gamma) / (1 - beta))
    measured = (min(_pair_ratios(S, G.values, p)), max(_pair_ratios(S, G.values, p)))
    return MetricPerturbation(holds, predicted, measured)


def diff_lip_radius(S: MetricSample, F: LipschitzFamily, G: LipschitzFamily, p) -> float:
    """r = (sum_n Lip(f_n - g_n)^p)^(1/p) over the sample; when r < a the
    perturbed family is a frame with bounds (a - r, b + r)."""
    _check_sizes(S, F)
    _check_sizes(S, G)
    if G.values.shape != F.values.shape:
        raise ValueError("families must share the table shape")
    lips = [lipschitz_number(S, F.values[n] - G.values[n]) for n in range(F.m)]
    return float(vec_pnorm(np.asarray(lips), p))


@dataclass(frozen=True)
class ReconstructionReport:
    max_deviation: float
    reconstructor_lipschitz: float


def reconstruction_check(S: MetricSample, F: LipschitzFamily,
                         reconstructor: Callable, p=1) -> ReconstructionReport:
    """Feed each point's coefficient column through the reconstructor and
    measure the worst distance back to the point (numeric labels), plus a
    sampled Lipschitz number of the reconstructor on those columns."""
    _check_sizes(S, F)
    if S.base is None:
        raise ValueError("reconstruction needs a pointed sample")
    try:
        pts = np.asarray([float(x) for x in S.points])
    except (TypeError, ValueError):
        raise ValueError("reconstruction needs numeric point labels") from None
    outs = np.asarray([reconstructor(F.values[:, j]) for j in range(S.n)],
                      dtype=float)
    deviation = float(np.abs(outs - pts).max())
    lip = 0.0
    for i in range(S.n):
        for j in range(i + 1, S.n):
            gap = vec_pnorm(F.values[:, i] - F.values[:, j], p)
            if gap > 0:
                lip = max(lip, abs(outs[i] - outs[j]) / gap)
    return ReconstructionReport(deviation, lip)


def log_family_reconstructor(coeffs) -> float:
    """Inverts the log family: 1 + |sum of the non-constant coefficients|."""
    c = np.asarray(coeffs).reshape(-1)
    return float(1.0 + abs(c[1:].sum()))


def stability_bounds(theta_lip: float, S_lip: float,
                     alpha: float, gamma: float) -> tuple[float, float]:
    """Frame bounds surviving a perturbation of the analysis map when a
    Lipschitz reconstruction with number S_lip exists: requires
    alpha*theta_lip + gamma <= 1/S_lip and returns
    (1/S_lip - (alpha*theta_lip + gamma), theta_lip + (alpha*theta_lip + gamma))."""
    theta_lip, S_lip = float(theta_lip), float(S_lip)
    alpha, gamma = float(alpha), float(gamma)
    if min(theta_lip, S_lip) <= 0 or min(alpha, gamma) < 0:
        raise ValueError("Lipschitz numbers must be positive, alpha and gamma nonnegative")
    drift = alpha * theta_lip + gamma
    if drift > 1.0 / S_lip:
        raise HypothesisViolated("alpha*theta_lip + gamma exceeds 1/S_lip")
    return 1.0 / S_lip - drift, theta_lip + drift
