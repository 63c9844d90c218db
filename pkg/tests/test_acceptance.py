"""Acceptance suite: one test per shipped criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
"""

import math

import numpy as np

from shiftlab.beurling import CoefficientSeries, add, algebra_constant, divide_by_z_minus_1, multiply
from shiftlab.operators import eigenvector_f1, jordan_chain, shift_window
from shiftlab.report import fit_loglog_slope
from shiftlab.seeding import TAG_BASIS, complex_gaussian, stream
from shiftlab.stability import (
    PerturbationPlan,
    beurling_index_sweep,
    norm_stability_run,
    random_zero_sets,
    semicontinuity_run,
)
from shiftlab.subspaces import SubspaceBasis, gram_schmidt_projection, vanishing_subspace
from shiftlab.weights import WeightSequence, classify

PRESETS = {name: WeightSequence.preset(name) for name in ("unweighted", "bergman", "quasianalytic_sqrt")}


def report(tag, ok, detail):
    print(f"[{tag}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{tag}: {detail}"


def test_ac1_jordan_chain_residuals_and_closed_form():
    N = 400
    worst_resid = 0.0
    worst_rel = 0.0
    for w in PRESETS.values():
        log_pi = w.log_pi_array(N)
        for lam in (0.3, 0.5j, -0.6):
            for m in (1, 2, 3):
                chain = jordan_chain(w, lam, m, N)
                for k in range(1, m):
                    scale = np.linalg.norm(chain.vectors[k - 1])
                    assert chain.residuals[k] <= 1e-10 * scale
                    worst_resid = max(worst_resid, chain.residuals[k] / scale)
                if m >= 2:
                    n = np.arange(1, N)
                    gamma = n * np.asarray(lam, complex) ** (n - 1) * np.exp(-log_pi[1:N])
                    rel = np.abs(chain.vectors[1][1:] - gamma) / np.abs(gamma)
                    worst_rel = max(worst_rel, float(rel.max()))
                    assert rel.max() <= 1e-12
    report("AC1", True, f"max residual ratio {worst_resid:.2e} <= 1e-10, "
                        f"max gamma rel err {worst_rel:.2e} <= 1e-12")


def test_ac2_eigenvector_norm_oracles():
    f_unw = eigenvector_f1(PRESETS["unweighted"], 0.6, 200).vectors[0]
    f_ber = eigenvector_f1(PRESETS["bergman"], 0.5, 200).vectors[0]
    n1 = float(np.linalg.norm(f_unw)) ** 2
    n2 = float(np.linalg.norm(f_ber)) ** 2
    ok = abs(n1 - 1.5625) <= 1e-9 and abs(n2 - 16.0 / 9.0) <= 1e-9
    report("AC2", ok, f"unweighted |f|^2 = {n1:.12f} (1.5625), bergman |f|^2 = {n2:.12f} (16/9)")


def test_ac3_norm_stability_realization():
    eps = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    slopes, finals, failures = [], [], 0
    for seed in range(20):
        plan = PerturbationPlan(kind="dense_random", epsilon_schedule=eps, seed=seed)
        rep = norm_stability_run(PRESETS["bergman"], [0.3, -0.4], plan, N=200)
        failures += rep.metrics["failures"]
        slopes.append(rep.fitted_slope)
        finals.append(rep.metrics["final_distance"])
        assert rep.verdict == "pass"
    ok = (
        failures == 0
        and all(0.9 <= s <= 1.1 for s in slopes)
        and all(d <= 10 * eps[-1] for d in finals)
    )
    report("AC3", ok, f"20 seeds: slopes in [{min(slopes):.3f}, {max(slopes):.3f}], "
                      f"max final distance {max(finals):.2e} <= 1e-4, {failures} failures")


def test_ac4_beurling_index_sweep():
    sets = random_zero_sets(50, seed=11, max_size=5, radius=0.8, min_separation=1e-2)
    rep = beurling_index_sweep(sets, 128, rank_tol=1e-8)
    indices = [s["index"] for s in rep.per_step]
    gaps = [s["gap"] for s in rep.per_step]
    ok = rep.verdict == "pass" and set(indices) == {1} and min(gaps) >= 1e3
    report("AC4", ok, f"50 zero sets: indices all 1, min singular gap {min(gaps):.2e} >= 1e3")


def test_ac5_semicontinuity_direction():
    N = 128
    w = PRESETS["unweighted"]
    T = shift_window(w, N)
    M_in = vanishing_subspace([0.3, -0.4], N)
    M_out = vanishing_subspace([0.3, -0.4], N + 1)
    plan = PerturbationPlan(
        kind="weight_jitter",
        epsilon_schedule=tuple(2.0 ** -n for n in range(1, 15)),
        seed=7,
    )
    rep = semicontinuity_run(T, M_in, M_out, plan, 200)
    ok = (
        rep.verdict == "pass"
        and rep.metrics["violations"] == 0
        and rep.metrics["skip_fraction"] <= 0.10
    )
    report("AC5", ok, f"200 trials x 14 steps: {rep.metrics['violations']} violations, "
                      f"skip fraction {rep.metrics['skip_fraction']:.3f} <= 0.10")


def test_ac6_convolution_kernel_constant():
    rep = algebra_constant(None, 10_000)
    head = rep.running_maxima[:3]
    limit = math.pi ** 2 / 3
    tail_value = rep.kernel_values[-1]
    rel = abs(tail_value - limit) / limit
    ok = head == [1.0, 2.0, 2.5625] and rel <= 1e-3
    report("AC6", ok, f"running maxima head {head}, kernel value at n=1e4 within "
                      f"{rel:.2e} (rel) of pi^2/3")


def test_ac7_division_identity():
    z_minus_1 = CoefficientSeries(np.array([-1.0, 1.0], dtype=complex))
    worst = 0.0
    for i in range(1000):
        rng = stream(13, TAG_BASIS, 10, i)
        deg = int(rng.integers(1, 65))
        coeffs = rng.integers(-9, 10, deg + 1).astype(complex)
        g = CoefficientSeries(coeffs)
        f = divide_by_z_minus_1(g)
        back = add(multiply(z_minus_1, f), CoefficientSeries(np.array([g(1.0)])))
        n = max(len(back.coeffs), len(g.coeffs), 1)
        err = float(np.max(np.abs(back.padded(n) - g.padded(n)))) if n else 0.0
        worst = max(worst, err)
    ok = worst <= 1e-12
    report("AC7", ok, f"1000 integer series, max reconstruction error {worst:.2e} <= 1e-12")


def test_ac8_classifier_verdicts():
    reports = {name: classify(w, 4096) for name, w in PRESETS.items()}
    qa = reports["quasianalytic_sqrt"]
    ok = (
        qa.divergence_verdict == "diverges"
        and qa.fit_slope >= 0.1
        and qa.shields_hypotheses_met
        and reports["unweighted"].divergence_verdict == "converges"
        and reports["bergman"].divergence_verdict == "converges"
    )
    report("AC8", ok, "quasianalytic_sqrt diverges (slope "
                      f"{qa.fit_slope:.3f} >= 0.1) with hypothesis bundle true; "
                      "unweighted and bergman converge")


def test_ac9_projection_perturbation_slope():
    rng = stream(99, TAG_BASIS, 0)
    B = complex_gaussian(rng, (40, 5))
    _, P0 = gram_schmidt_projection(SubspaceBasis(B))
    deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    dists = []
    for j, d in enumerate(deltas):
        rng_j = stream(99, TAG_BASIS, 1, j)
        G = complex_gaussian(rng_j, (40, 5))
        G /= np.linalg.norm(G, axis=0, keepdims=True)
        _, P = gram_schmidt_projection(SubspaceBasis(B + d * G))
        dists.append(float(np.linalg.norm(P.matrix - P0.matrix, 2)))
    slope = fit_loglog_slope(deltas, dists)
    ok = abs(slope - 1.0) <= 0.1
    report("AC9", ok, f"basis perturbation slope {slope:.3f} within 1.0 +/- 0.1")


def test_ac10_deterministic_reports():
    plan = PerturbationPlan(kind="dense_random", epsilon_schedule=(1e-2, 1e-3, 1e-4), seed=2024)
    rep1 = norm_stability_run(PRESETS["bergman"], [0.3, -0.4], plan, N=120)
    rep2 = norm_stability_run(PRESETS["bergman"], [0.3, -0.4], plan, N=120)
    sets1 = random_zero_sets(10, seed=3)
    rep3 = beurling_index_sweep(sets1, 96)
    rep4 = beurling_index_sweep(random_zero_sets(10, seed=3), 96)
    ok = rep1.to_json_bytes() == rep2.to_json_bytes() and rep3.to_json_bytes() == rep4.to_json_bytes()
    report("AC10", ok, "repeated runs with identical seeds produce byte-identical reports")
