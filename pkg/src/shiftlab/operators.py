"""Finite windows of weighted shifts and adjoint Jordan chains.

Windows are rectangular by design: the shift maps coordinates 0..N-1 into
0..N exactly, and the adjoint maps 0..N onto 0..N-1 exactly, so neither
carries truncation error. Edge effects are confined to explicitly reported
tail bounds. A square adjoint truncation is also provided for polynomial
evaluation and perturbation experiments, where a square matrix is needed;
its only inexact row is the last one.

Chain vectors follow the normalization that f_{lam,k} has k-1 leading
zeros and a real positive leading coordinate, which makes the coefficients
depend on the weights alone and keeps reconstructions reproducible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .weights import WeightSequence

WINDOW_TAGS = ("shift", "adjoint", "polynomial_in_adjoint", "perturbed", "custom")

TAIL_REL_CUTOFF = 1e-18
TAIL_MAX_TERMS = 200_000


@dataclass
class OperatorWindow:
    """A rows x cols complex matrix acting from C^cols to C^rows."""

    matrix: np.ndarray
    tag: str = "custom"

    def __post_init__(self):
        if self.tag not in WINDOW_TAGS:
            raise ValueError(f"unknown window tag {self.tag!r}")
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        if self.matrix.ndim != 2:
            raise ValueError("window matrix must be 2-dimensional")

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def to_csv(self, path) -> None:
        """Row-major CSV with quoted "re,im" cells."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_ALL)
            for row in self.matrix:
                writer.writerow([f"{float(z.real)!r},{float(z.imag)!r}" for z in row])

    @classmethod
    def from_csv(cls, path, tag: str = "custom") -> "OperatorWindow":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for record in csv.reader(fh):
                rows.append([complex(*map(float, cell.split(","))) for cell in record])
        return cls(matrix=np.array(rows, dtype=np.complex128), tag=tag)


def shift_window(w: WeightSequence, N: int) -> OperatorWindow:
    """(N+1) x N window of the shift: column n carries alpha_n at row n+1."""
    if N < 1:
        raise ValueError("shift window needs N >= 1")
    M = np.zeros((N + 1, N), dtype=np.complex128)
    k = np.arange(N)
    M[k + 1, k] = w.alpha_array(N)
    return OperatorWindow(M, tag="shift")


def adjoint_window(w: WeightSequence, N: int) -> OperatorWindow:
    """N x (N+1) window of the adjoint; conjugate transpose of shift_window."""
    if N < 1:
        raise ValueError("adjoint window needs N >= 1")
    M = np.zeros((N, N + 1), dtype=np.complex128)
    k = np.arange(N)
    M[k, k + 1] = w.alpha_array(N)
    return OperatorWindow(M, tag="adjoint")


def adjoint_window_square(w: WeightSequence, N: int) -> OperatorWindow:
    """N x N truncation of the adjoint (superdiagonal alpha_0 .. alpha_{N-2}).

    Exact on every row but the last; suitable for Horner evaluation of
    polynomials and for dense perturbation experiments.
    """
    if N < 2:
        raise ValueError("square adjoint window needs N >= 2")
    M = np.zeros((N, N), dtype=np.complex128)
    k = np.arange(N - 1)
    M[k, k + 1] = w.alpha_array(N - 1)
    return OperatorWindow(M, tag="adjoint")


def apply_adjoint(w: WeightSequence, vec: np.ndarray) -> np.ndarray:
    """Apply the adjoint to a coordinate vector, dropping the top coordinate."""
    v = np.asarray(vec, dtype=np.complex128)
    return w.alpha_array(len(v) - 1) * v[1:]


# -- Jordan chains -------------------------------------------------------------

@dataclass
class JordanChain:
    """Vectors f_1 .. f_m with (T* - lam) f_{k+1} = f_k and (T* - lam) f_1 = 0.

    residuals[k] is the window norm of the defect in link k (k = 0 checks
    the eigen equation). tail_bound bounds the squared l2 mass of the last
    vector beyond the window, by geometric majorization at rate
    (|lam| / r_point)^2; it is infinite, and l2_member False, when
    |lam| >= r_point.
    """

    lam: complex
    vectors: list[np.ndarray]
    residuals: list[float]
    tail_bound: float
    l2_member: bool
    r_point: float

    @property
    def length(self) -> int:
        return len(self.vectors)

    @property
    def window_dim(self) -> int:
        return len(self.vectors[0])


def _tail_bound(w: WeightSequence, lam: complex, k: int, N: int, r_point: float) -> float:
    """Majorize sum_{n >= N} (C(n, k-1) |lam|^(n-k+1) / pi_n)^2.

    Uses pi_n >= pi_N * r_point^(n-N) beyond the window. The binomial
    factor is polynomial, so the series converges exactly when
    |lam| < r_point; it is summed until relative machine cutoff.
    """
    a = abs(lam)
    if a == 0.0:
        return 0.0
    if a >= r_point:
        return math.inf
    log_pi_N = w.log_pi(N)
    log_r = math.log(r_point)
    log_a = math.log(a)
    total = 0.0
    for n in range(N, N + TAIL_MAX_TERMS):
        log_c = math.lgamma(n + 1) - math.lgamma(k) - math.lgamma(n - k + 2)
        log_term = 2.0 * (log_c + (n - k + 1) * log_a - log_pi_N - (n - N) * log_r)
        term = math.exp(log_term)
        total += term
        if term <= TAIL_REL_CUTOFF * max(total, 1e-300):
            break
    return total


def _link_residual(w: WeightSequence, lam: complex, f_next: np.ndarray, f_prev: np.ndarray | None) -> float:
    """Window norm of (T* - lam) f_next - f_prev over computable coordinates."""
    y = apply_adjoint(w, f_next) - lam * f_next[:-1]
    if f_prev is not None:
        y = y - f_prev[:-1]
    return float(np.linalg.norm(y))


def jordan_chain(w: WeightSequence, lam: complex, m: int, N: int) -> JordanChain:
    """Solve the chain recurrence coordinatewise on a window of dimension N.

    f_{k, n+1} = (f_{k-1, n} + lam f_{k, n}) / alpha_n with the first k-1
    coordinates of f_k forced to zero. The leading coordinate of each
    vector is then a positive product of reciprocal weights.
    """
    if m < 1:
        raise ValueError("chain length m must be >= 1")
    if N < m + 2:
        raise ValueError(f"window too small: need N >= m + 2 = {m + 2}, got {N}")
    lam = complex(lam)
    alpha = w.alpha_array(N - 1)
    vectors: list[np.ndarray] = []
    for k in range(1, m + 1):
        f = np.zeros(N, dtype=np.complex128)
        prev = vectors[-1] if vectors else None
        if k == 1:
            f[0] = 1.0
        else:
            f[k - 1] = prev[k - 2] / alpha[k - 2]
        for n in range(k - 1, N - 1):
            drive = prev[n] if prev is not None else 0.0
            f[n + 1] = (drive + lam * f[n]) / alpha[n]
        vectors.append(f)

    residuals = [_link_residual(w, lam, vectors[0], None)]
    for k in range(1, m):
        residuals.append(_link_residual(w, lam, vectors[k], vectors[k - 1]))

    r_point = math.exp(w.log_pi(N) / N)
    tail = _tail_bound(w, lam, m, N, r_point)
    return JordanChain(
        lam=lam,
        vectors=vectors,
        residuals=residuals,
        tail_bound=tail,
        l2_member=bool(abs(lam) < r_point),
        r_point=r_point,
    )


def eigenvector_f1(w: WeightSequence, lam: complex, N: int) -> JordanChain:
    """Adjoint eigenvector (1, lam/pi_1, lam^2/pi_2, ...) on a window."""
    if N < 1:
        raise ValueError("window dimension must be >= 1")
    if N < 3:
        # too short for the generic recurrence; build directly
        lam = complex(lam)
        f = np.array([lam ** n / w.pi_product(n) for n in range(N)], dtype=np.complex128)
        r_point = math.exp(w.log_pi(N) / N)
        return JordanChain(
            lam=lam,
            vectors=[f],
            residuals=[_link_residual(w, lam, f, None)],
            tail_bound=_tail_bound(w, lam, 1, N, r_point),
            l2_member=bool(abs(lam) < r_point),
            r_point=r_point,
        )
    return jordan_chain(w, lam, 1, N)


def chain_continuity_probe(w: WeightSequence, k: int, r: float, steps: int, N: int = 400) -> float:
    """Max norm gap of f_{lam,k} between adjacent points of r * unit circle.

    The discrete modulus of continuity of the chain map along the circle;
    it must shrink as the grid refines, for r below the point-spectrum
    radius estimate.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    r_point = math.exp(w.log_pi(N) / N)
    if r >= r_point:
        raise ValueError(f"radius {r} is not inside the point-spectrum estimate {r_point:.6g}")
    if r == 0.0:
        return 0.0
    grid = r * np.exp(2j * np.pi * np.arange(steps + 1) / steps)
    prev = jordan_chain(w, grid[0], k, N).vectors[-1]
    worst = 0.0
    for lam in grid[1:]:
        cur = jordan_chain(w, lam, k, N).vectors[-1]
        worst = max(worst, float(np.linalg.norm(cur - prev)))
        prev = cur
    return worst
