"""Coefficient arithmetic for weighted power series.

Series are finitely supported coefficient vectors measured in the norms
||f||^2 = sum |f_hat(n)|^2 omega(n)^2, optionally against the shifted
weight omega_s(n) = omega(n) (1+n)^(-s). Everything here is coefficientwise
and degree-truncatable, so the function space itself is never materialized.

The empirical batch sweeps (product inequality, division lower bound,
derivative equivalence) are stability checks, not proofs: the contract is
the absence of a blow-up trend under degree doubling.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .seeding import TAG_SERIES, complex_uniform_square, stream
from .weights import WeightSequence, omega_s_increasing_tail


@dataclass
class CoefficientSeries:
    """Finitely supported power-series coefficients f_hat(0..d)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        # trim exact trailing zeros; the zero series keeps degree -1
        last = len(c)
        while last > 0 and c[last - 1] == 0:
            last -= 1
        self.coeffs = c[:last]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @classmethod
    def zero(cls) -> "CoefficientSeries":
        return cls(np.zeros(0))

    @classmethod
    def one(cls) -> "CoefficientSeries":
        return cls(np.array([1.0 + 0j]))

    @classmethod
    def monomial(cls, d: int, scale: complex = 1.0) -> "CoefficientSeries":
        c = np.zeros(d + 1, dtype=np.complex128)
        c[d] = scale
        return cls(c)

    @classmethod
    def from_roots(cls, roots) -> "CoefficientSeries":
        p = np.array([1.0 + 0j])
        for r in roots:
            p = np.convolve(p, np.array([-complex(r), 1.0 + 0j]))
        return cls(p)

    def __call__(self, z: complex) -> complex:
        acc = 0.0 + 0j
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length, dtype=np.complex128)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def to_json(self) -> str:
        return json.dumps([[z.real, z.imag] for z in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "CoefficientSeries":
        pairs = json.loads(text)
        return cls(np.array([complex(re, im) for re, im in pairs], dtype=np.complex128))


def multiply(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """Cauchy product; degree adds, zero factors give the zero series."""
    if f.is_zero or g.is_zero:
        return CoefficientSeries.zero()
    return CoefficientSeries(np.convolve(f.coeffs, g.coeffs))


def add(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    n = max(len(f.coeffs), len(g.coeffs))
    return CoefficientSeries(f.padded(n) + g.padded(n))


def derivative(f: CoefficientSeries) -> CoefficientSeries:
    if f.degree < 1:
        return CoefficientSeries.zero()
    n = np.arange(1, len(f.coeffs))
    return CoefficientSeries(n * f.coeffs[1:])


def beurling_norm(f: CoefficientSeries, w: WeightSequence, s: int = 0) -> float:
    """Weighted l2 coefficient norm; s > 0 measures against omega_s."""
    if f.is_zero:
        return 0.0
    n = np.arange(len(f.coeffs), dtype=float)
    log_omega = w.log_omega_array(len(f.coeffs))
    weights = np.exp(log_omega - s * np.log1p(n))
    return float(np.linalg.norm(f.coeffs * weights))


# -- convolution algebra constant ------------------------------------------------

@dataclass
class AlgebraConstantReport:
    """Per-degree convolution kernel sums and their running maxima.

    value is the running maximum at the last degree; kernel_values and
    running_maxima sample the sequence at `grid` so convergence (or an
    unbounded trend) is visible.
    """

    value: float
    argmax: int
    grid: list[int]
    kernel_values: list[float]
    running_maxima: list[float]
    unbounded_trend: bool


def _sample_grid(N: int) -> list[int]:
    grid = set(range(0, min(N, 8) + 1))
    p = 16
    while p <= N:
        grid.add(p)
        p *= 2
    grid.add(N)
    return sorted(grid)


def algebra_constant(w: WeightSequence | None, N: int) -> AlgebraConstantReport:
    """Max over n <= N of the Cauchy-Schwarz convolution kernel sum.

    For a weight sequence the summand is (omega(n)/(omega(k) omega(n-k)))^2;
    with w=None the specialized kernel (n+1)^2/((k+1)^2 (n-k+1)^2) is used.
    The square root of the reported value multiplies norms in the product
    inequality; the value itself is a valid (weaker) constant since it
    is >= 1 whenever omega(0) = 1.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    n = np.arange(N + 1, dtype=float)
    if w is None:
        inv_sq = 1.0 / (n + 1.0) ** 2
        scale_sq = (n + 1.0) ** 2
    else:
        log_omega = w.log_omega_array(N + 1)
        inv_sq = np.exp(-2.0 * log_omega)
        scale_sq = np.exp(2.0 * log_omega)
    # sum_k inv_sq[k] inv_sq[n-k] is the self-convolution of inv_sq
    conv = np.convolve(inv_sq, inv_sq)[: N + 1]
    values = scale_sq * conv
    running = np.maximum.accumulate(values)
    argmax = int(np.argmax(values))
    grid = _sample_grid(N)
    half = values[N // 2] if N >= 2 else values[0]
    unbounded = argmax == N and N >= 4 and values[N] >= 1.2 * half
    if unbounded:
        warnings.warn("convolution kernel sums keep growing; constant is a lower bound only", RuntimeWarning)
    return AlgebraConstantReport(
        value=float(running[-1]),
        argmax=argmax,
        grid=grid,
        kernel_values=[float(values[i]) for i in grid],
        running_maxima=[float(running[i]) for i in grid],
        unbounded_trend=bool(unbounded),
    )


# -- product inequality ------------------------------------------------------------

def check_wa(p: CoefficientSeries, f1: CoefficientSeries, f2: CoefficientSeries,
             w: WeightSequence) -> float:
    """Ratio ||p f1 f2|| / (||p f1|| ||p f2||) in the omega norm."""
    pf1 = multiply(p, f1)
    pf2 = multiply(p, f2)
    d1 = beurling_norm(pf1, w)
    d2 = beurling_norm(pf2, w)
    if d1 == 0.0 or d2 == 0.0:
        raise ZeroDivisionError("p*f1 and p*f2 must be nonzero")
    return beurling_norm(multiply(pf1, f2), w) / (d1 * d2)


def check_wa_batch(p: CoefficientSeries, w: WeightSequence, degree: int,
                   n_pairs: int, seed: int) -> float:
    """Empirical max of the product ratio over seeded random pairs."""
    worst = 0.0
    for i in range(n_pairs):
        rng = stream(seed, TAG_SERIES, 1, i)
        f1 = CoefficientSeries(complex_uniform_square(rng, degree + 1))
        f2 = CoefficientSeries(complex_uniform_square(rng, degree + 1))
        if multiply(p, f1).is_zero or multiply(p, f2).is_zero:
            continue
        worst = max(worst, check_wa(p, f1, f2, w))
    return worst


# -- division by z - 1 --------------------------------------------------------------

def divide_by_z_minus_1(g: CoefficientSeries) -> CoefficientSeries:
    """Coefficients of (g(z) - g(1)) / (z - 1): f_hat(k) = sum_{n > k} g_hat(n).

    A single backward pass; no vanishing condition on g is required since
    g(1) is subtracted internally.
    """
    if g.degree < 1:
        return CoefficientSeries.zero()
    tails = np.cumsum(g.coeffs[::-1])[::-1]
    return CoefficientSeries(tails[1:])


def check_wc(f: CoefficientSeries, w: WeightSequence, tail_check_N: int | None = None) -> float:
    """Ratio ||(z-1) f||_omega / ||f||_omega_1.

    The lower bound this probes holds when omega_2 increases for large n;
    a warning is emitted when the tail check fails, and the ratio is
    reported either way.
    """
    if f.is_zero:
        raise ZeroDivisionError("f must be nonzero")
    N_check = tail_check_N if tail_check_N is not None else max(64, 2 * (f.degree + 2))
    if w.kind != "explicit" or w.max_index_hint >= N_check:
        if not omega_s_increasing_tail(w, 2, N_check):
            warnings.warn("omega_2 is not increasing on the checked tail; no lower bound is claimed", RuntimeWarning)
    z_minus_1 = CoefficientSeries(np.array([-1.0 + 0j, 1.0 + 0j]))
    return beurling_norm(multiply(z_minus_1, f), w) / beurling_norm(f, w, s=1)


def check_wc_batch(w: WeightSequence, degree: int, n_samples: int, seed: int) -> float:
    """Empirical min of the division ratio over seeded random series."""
    best = math.inf
    for i in range(n_samples):
        rng = stream(seed, TAG_SERIES, 2, i)
        f = CoefficientSeries(complex_uniform_square(rng, degree + 1))
        if f.is_zero:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            best = min(best, check_wc(f, w))
    return best


# -- derivative norm equivalence -----------------------------------------------------

def derivative_equivalence_probe(f: CoefficientSeries, w: WeightSequence) -> tuple[float, float]:
    """Return (||f||_omega, |f(0)| + ||f'||_omega_1).

    The right-hand side uses the unsquared derivative term, the form
    consistent with scaling f -> t f; both sides are reported so the
    two-sided comparability can be read off directly.
    """
    if f.is_zero:
        raise ZeroDivisionError("f must be nonzero")
    left = beurling_norm(f, w)
    right = abs(complex(f.coeffs[0])) + beurling_norm(derivative(f), w, s=1)
    return left, right


def derivative_probe_batch(w: WeightSequence, degree: int, n_samples: int, seed: int) -> tuple[float, float]:
    """Empirical (min, max) of left/right over seeded random series."""
    lo, hi = math.inf, 0.0
    for i in range(n_samples):
        rng = stream(seed, TAG_SERIES, 3, i)
        f = CoefficientSeries(complex_uniform_square(rng, degree + 1))
        if f.is_zero:
            continue
        left, right = derivative_equivalence_probe(f, w)
        ratio = left / right
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi
