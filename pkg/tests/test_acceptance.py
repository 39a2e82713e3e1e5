"""End-to-end acceptance checks for the gradient-concentration toolkit.

Each test covers one numbered claim about the package at its stated
tolerance and prints a single pass/fail line; run with ``pytest -v`` (add
``-s`` to see the lines for passing criteria too).  The Monte-Carlo
criteria use fixed master seeds, so the whole module is deterministic.
"""

import time

import numpy as np
import pytest

from bpdiag.circuits import Example1Family, Example2Family, TreeFamily
from bpdiag.diagnostics import (
    batch_bound,
    check_oc_bound,
    clifford_oc_closed_form,
    estimate_stats,
    slope_fit,
)
from bpdiag.cli import main
from bpdiag.pauli import PauliString
from bpdiag.rng import sample_haar_batch
from bpdiag.weingarten import (
    Permutation,
    all_permutations,
    example1_closed_form,
    example2_exact_r,
    shift_unitary,
    trace_against_permutation,
    twirl_factor_coefficients,
    weingarten_table,
)


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} — {detail}", flush=True)
    assert ok, f"criterion {number}: {detail}"


def test_criterion_1_variance_identity():
    """var_grad = 2 u^2 (1 - r) E[T^2] holds within |z| <= 3 at 10^4 samples."""
    start = time.time()
    zs = {}
    for index, n in enumerate((3, 5, 7)):
        report = estimate_stats(TreeFamily(n), 10_000, (101, index))
        zs[n] = report.identity_z
    elapsed = time.time() - start
    ok = all(abs(z) <= 3.0 for z in zs.values()) and elapsed < 120.0
    detail = (
        "identity_z = "
        + ", ".join(f"n={n}: {z:+.2f}" for n, z in zs.items())
        + f" (|z| <= 3), {elapsed:.0f}s < 120s"
    )
    _report(1, ok, detail)


def test_criterion_2_tree_decay():
    """Exponential decay of var_grad and 1-r with matching slopes while the
    bare second moment stays comparatively flat, n in 3..13."""
    start = time.time()
    sizes = (3, 5, 7, 9, 11, 13)
    points = []
    for index, n in enumerate(sizes):
        report = estimate_stats(TreeFamily(n), 4096, (102, index))
        points.append((n, report.var_grad, report.one_minus_r, report.second_moment))
    elapsed = time.time() - start
    vg_fit = slope_fit([(n, vg) for n, vg, _, _ in points])
    omr_fit = slope_fit([(n, omr) for n, _, omr, _ in points])
    slope_gap = abs(vg_fit["slope"] - omr_fit["slope"]) / abs(vg_fit["slope"])
    vg_drop = np.log10(points[0][1]) - np.log10(points[-1][1])
    sm_change = abs(np.log10(points[-1][3]) - np.log10(points[0][3]))
    ok = (
        vg_fit["slope"] < 0.0
        and vg_fit["r_squared"] >= 0.9
        and slope_gap <= 0.20
        and sm_change < 0.5 * vg_drop
        and elapsed < 600.0
    )
    detail = (
        f"var_grad slope {vg_fit['slope']:+.3f} (r^2 {vg_fit['r_squared']:.3f}), "
        f"1-r slope {omr_fit['slope']:+.3f}, rel gap {slope_gap:.1%} <= 20%, "
        f"second-moment drift {sm_change:.2f} < half of {vg_drop:.2f} decades, "
        f"{elapsed:.0f}s < 600s"
    )
    _report(2, ok, detail)


def test_criterion_3_three_register_closed_form():
    """Monte-Carlo 1-r matches the exact 2-design ratio at three dimension
    triples; compact form is 1/3 at (16,2,4); halving and flatness checks."""
    start = time.time()
    triples = ((2, 1, 2), (3, 1, 2), (4, 1, 2))  # register qubit counts
    measured, ses, exacts, seconds = [], [], [], []
    for index, exponents in enumerate(triples):
        dims = tuple(1 << e for e in exponents)
        report = estimate_stats(Example1Family(*exponents), 16_384, (103, index))
        measured.append(report.one_minus_r)
        ses.append(report.one_minus_r_se)
        seconds.append(report.second_moment)
        exacts.append(example1_closed_form(*dims)["one_minus_r_exact"])
    elapsed = time.time() - start
    z_scores = [(m - e) / se for m, e, se in zip(measured, exacts, ses)]
    compact = example1_closed_form(16, 2, 4)["one_minus_r"]
    ratios = [b / a for a, b in zip(measured, measured[1:])]
    spread = (max(seconds) - min(seconds)) / float(np.mean(seconds))
    ok = (
        all(abs(z) <= 5.0 for z in z_scores)
        and abs(compact - 1.0 / 3.0) < 1e-12
        and all(abs(r / 0.5 - 1.0) <= 0.30 for r in ratios)
        and spread < 0.30
        and elapsed < 300.0
    )
    detail = (
        "z = " + ", ".join(f"{z:+.2f}" for z in z_scores) + " (<= 5), "
        f"compact(16,2,4) = {compact:.12f} == 1/3, "
        "halving ratios " + ", ".join(f"{r:.3f}" for r in ratios) + " (0.5 +- 30%), "
        f"second-moment spread {spread:.1%} < 30%, {elapsed:.0f}s < 300s"
    )
    _report(3, ok, detail)


def test_criterion_4_scramble_scaling():
    """1-r = O(1/d) for the scramble/unscramble family: d*(1-r) spread <= 30%
    over d in 4..32 and exact values match Monte-Carlo at d in {4,8}."""
    start = time.time()
    dims = (4, 8, 16, 32)
    scaled, z_small = [], []
    for index, d in enumerate(dims):
        n = d.bit_length() - 1
        family = Example2Family(n)
        report = estimate_stats(family, 10_000, (104, index))
        circuit = family.build(None)
        exact = example2_exact_r(d, circuit.probe_gate().generator, circuit.observable)
        scaled.append(d * report.one_minus_r)
        if d in (4, 8):
            z_small.append((report.one_minus_r - exact["one_minus_r"]) / report.one_minus_r_se)
    elapsed = time.time() - start
    spread = (max(scaled) - min(scaled)) / float(np.mean(scaled))
    ok = (
        spread <= 0.30
        and all(abs(z) <= 5.0 for z in z_small)
        and elapsed < 300.0
    )
    detail = (
        "d*(1-r) = " + ", ".join(f"{s:.3f}" for s in scaled) + f", spread {spread:.1%} <= 30%, "
        "exact-vs-MC z = " + ", ".join(f"{z:+.2f}" for z in z_small) + " (<= 5), "
        f"{elapsed:.0f}s < 300s"
    )
    _report(4, ok, detail)


def test_criterion_5_concentration_bound():
    """E<g>^2 <= (2/3)^|A| E[D_HS^2] on Clifford-augmented tree circuits, and
    the exact single-qubit Clifford average equals (x^2+y^2+z^2)/3."""
    result = check_oc_bound(TreeFamily(5), 4000, 105)
    closed_ok = True
    rng = np.random.default_rng(1055)
    for _ in range(20):
        v = rng.standard_normal(3)
        v /= max(1.0, float(np.linalg.norm(v)))
        closed = clifford_oc_closed_form(tuple(v))
        norm_sq = float(v @ v)
        closed_ok &= abs(closed["lhs"] - norm_sq / 3.0) < 1e-10
        closed_ok &= abs(closed["lhs"] / (norm_sq / 2.0) - 2.0 / 3.0) < 1e-12
    ok = result["holds"] and result["support_size"] == 1 and closed_ok
    detail = (
        f"tree n=5 margin z {result['margin_z']:+.1f} >= -3 "
        f"(lhs {result['lhs']:.4f} <= rhs {result['rhs']:.4f}), "
        f"closed form <g>^2 = |v|^2/3 and ratio 2/3 exact over 24 Cliffords"
    )
    _report(5, ok, detail)


def test_criterion_6_information_loss_bound():
    """var_grad <= batched light-cone bound within 3 sigma on the
    three-register circuits and the tree circuit, for K in {1,2} batches."""
    start = time.time()
    obs_tree = (
        (0.8, PauliString.single(5, 4, "Z")),
        (0.6, PauliString.single(5, 3, "Z")),
    )
    zz = PauliString.single(4, 1, "Z")
    z3 = PauliString.single(4, 2, "Z")
    obs_ex1 = (
        (0.7, PauliString(4, zz.x_mask | z3.x_mask, zz.z_mask | z3.z_mask)),
        (0.5, PauliString.single(4, 2, "X")),
    )
    families = {
        "example1": Example1Family(1, 2, 1, observable=obs_ex1),
        "tree": TreeFamily(5, observable=obs_tree),
    }
    outcomes = {}
    for name, family in families.items():
        for k_batches, partition in ((1, None), (2, [[0], [1]])):
            result = batch_bound(family, partition, 2000, 106)
            outcomes[f"{name} K={k_batches}"] = result
    elapsed = time.time() - start
    ok = all(r["holds"] for r in outcomes.values()) and elapsed < 300.0
    detail = (
        ", ".join(f"{key}: z {r['margin_z']:+.1f}" for key, r in outcomes.items())
        + f" (all >= -3), {elapsed:.0f}s < 300s"
    )
    _report(6, ok, detail)


def test_criterion_7_haar_moment_oracle():
    """Exact twirl coefficients against 10^5-sample Haar Monte-Carlo for
    k in 2..4, d in k..6, plus the closed-form table and trace anchors."""
    start = time.time()
    n_samples = 100_000
    worst = 0.0
    for k in (2, 3, 4):
        for d in range(k, 7):
            rng = np.random.default_rng(107_000 + 10 * k + d)
            factors = [
                rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                for _ in range(k)
            ]
            w = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
            v = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
            coeffs = twirl_factor_coefficients(k, d, factors)
            exact = sum(
                coeffs[j] * np.prod([np.vdot(w[s], v[pi(s)]) for s in range(k)])
                for j, pi in enumerate(all_permutations(k))
            )
            us = sample_haar_batch(d, n_samples, rng)
            samples = np.ones(n_samples, dtype=complex)
            for s in range(k):
                rotated = us @ factors[s] @ us.conj().swapaxes(-1, -2)
                samples *= np.einsum("a,nab,b->n", w[s].conj(), rotated, v[s])
            for part in (np.real, np.imag):
                err = abs(float(part(samples).mean()) - float(part(exact)))
                stderr = float(part(samples).std(ddof=1)) / np.sqrt(n_samples)
                worst = max(worst, err / stderr)
    table_ok = True
    for d in (2, 3, 4, 5, 6):
        table = weingarten_table(2, d)
        table_ok &= abs(table.values[(1, 1)] - 1.0 / (d * d - 1)) < 1e-12
        table_ok &= abs(table.values[(2,)] + 1.0 / (d * (d * d - 1))) < 1e-12
    anchor_ok = True
    for n, d in ((1, 2), (2, 4)):
        s = shift_unitary(PauliString.single(n, 0, "Z"))
        value = trace_against_permutation(
            Permutation.identity(4), [s, s.conj().T, s, s.conj().T]
        )
        anchor_ok &= abs(value - d**4 / 4.0) < 1e-10
    elapsed = time.time() - start
    ok = worst <= 5.0 and table_ok and anchor_ok
    detail = (
        f"worst twirl-vs-MC deviation {worst:.2f} stderr (<= 5) over k in 2..4, "
        f"pair table exact to 1e-12, identity-pattern trace d^4/4 to 1e-10, {elapsed:.0f}s"
    )
    _report(7, ok, detail)


def test_criterion_8_byte_deterministic_sweep(tmp_path):
    """Two sweep runs with the same configuration produce byte-identical CSV."""
    args = ["tree-sweep", "--seed", "21", "--samples", "256",
            "--n-min", "3", "--n-max", "7", "--n-step", "2"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    csv_a = (tmp_path / "a" / "results.csv").read_bytes()
    csv_b = (tmp_path / "b" / "results.csv").read_bytes()
    summary_same = (tmp_path / "a" / "summary.json").read_bytes() == (
        tmp_path / "b" / "summary.json"
    ).read_bytes()
    ok = csv_a == csv_b
    detail = (
        f"results.csv identical across runs ({len(csv_a)} bytes)"
        + (", summary.json identical too" if summary_same else "")
    )
    _report(8, ok, detail)
