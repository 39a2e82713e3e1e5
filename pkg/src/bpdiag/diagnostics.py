"""Parameter-shift gradient statistics and concentration-bound checks.

Estimators
----------
Each Monte-Carlo sample evaluates the cost three times with the probed angle
at theta, theta + pi/(4u) and theta - pi/(4u), where u is the probed gate's
shift constant, giving a triple (t_plus, t_minus, t_center).  From N triples:

- ``var_grad``       u^2 * mean[(t_plus - t_minus)^2]  (the exact derivative
                     is u * (t_plus - t_minus), mean zero over symmetric
                     ensembles)
- ``second_moment``  mean of (t+^2 + t-^2 + tc^2)/3 when the probed angle is
                     translation invariant (``pool_center=True``), else the
                     shifted pair only
- ``cross_moment``   mean[t_plus * t_minus]
- ``corr_r``         cross_moment / second_moment
- ``one_minus_r``    mean[(t+ - t-)^2] / (t+^2 and t-^2 pooled * 2); this
                     difference form is strictly positive and keeps a small
                     relative error when 1 - r is tiny, unlike
                     1 - corr_r whose centre-pool noise does not cancel
- ``identity_z``     z-score of var_grad - 2 u^2 (1 - corr_r) second_moment,
                     which vanishes in expectation exactly when the shifted
                     and centre marginals coincide (angle translation
                     invariance); stderr from a paired bootstrap

Standard errors come from a 200-resample bootstrap over triples, drawn from
a reserved stream of the master seed.

Bound checks
------------
``check_oc_bound`` tests  E[<g>^2] <= (2/3)^|A| * E[Tr(rho_A^2) - 2^-|A|]
with a fresh uniform single-qubit Clifford layer appended to every sampled
circuit, which enforces the local-scrambling hypothesis exactly.

``batch_bound`` (and its single-batch alias ``check_info_loss_bound``) tests

    Var(dC) <= sum_j u^2 ||B_j||_2^2 2^(|Gamma_j|+2) E[dev_Gamma_j(state at cut)]

where the observable terms are partitioned into batches B_j, Gamma_j is the
back-propagated support of batch j from the circuit end to the probed gate
(union the probe generator's support), and dev is the effective deviation of
the state just before the probe.  Clifford layers are inserted at the cut
and at the circuit end, enforcing the scrambling hypotheses on both sides;
all comparisons are paired per sample and reported as a one-sided z-score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .circuits import Circuit, cost_of_state, insert_clifford_layer, light_cone, resolve_haar_tags, run_statevector
from .pauli import PauliString
from .rng import CLIFFORD_TABLE, RESERVED_STREAM_BASE, stream_generator
from .statevector import effective_hs_deviation_sq, expect_pauli, hs_deviation_sq, partial_trace

BOOTSTRAP_RESAMPLES = 200


class ShiftTriple(NamedTuple):
    t_plus: float
    t_minus: float
    t_center: float


@dataclass
class GradientStatsReport:
    n_qubits: int
    n_samples: int
    shift_u: float
    var_grad: float
    var_grad_se: float
    second_moment: float
    second_moment_se: float
    cross_moment: float
    cross_moment_se: float
    corr_r: float
    one_minus_r: float
    one_minus_r_se: float
    mean_center: float
    mean_center_se: float
    identity_z: float


def shift_eval(
    circuit: Circuit,
    params: np.ndarray,
    probe_index: int | None = None,
    rng: np.random.Generator | None = None,
    tags: dict | None = None,
) -> ShiftTriple:
    """Evaluate the cost at the centre and the two shifted probe angles.

    Haar tags are resolved once and shared by all three evaluations; the
    prefix before the probed gate is simulated once and reused.
    """
    if probe_index is None:
        probe_index = circuit.probe_index
    if probe_index != circuit.probe_index:
        circuit = Circuit(
            circuit.n_qubits, circuit.gates, circuit.param_count, circuit.observable, probe_index
        )
    position = circuit.probe_gate_position()
    u = circuit.gates[position].shift_u
    if tags is None:
        if any(g.kind == "dense" and g.tag is not None for g in circuit.gates):
            if rng is None:
                raise ValueError("circuit has Haar tags; pass rng or tags")
            tags = resolve_haar_tags(circuit, rng)
        else:
            tags = {}
    params = np.asarray(params, dtype=float)
    prefix = run_statevector(circuit, params, tags, upto=position)
    shift = np.pi / (4.0 * u)
    values = []
    for delta in (shift, -shift, 0.0):
        shifted = params.copy()
        shifted[probe_index] += delta
        state = run_statevector(
            circuit, shifted, tags, start=prefix.copy(), from_gate=position
        )
        values.append(cost_of_state(circuit, state))
    return ShiftTriple(*values)


# ---------------------------------------------------------------------------
# Aggregation


def _seed_path(seed) -> tuple[int, ...]:
    """Seeds may be a single int or a path of ints (e.g. (master, point))."""
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(part) for part in seed)


def _bootstrap_indices(n_samples: int, seed) -> np.ndarray:
    rng = stream_generator(*_seed_path(seed), RESERVED_STREAM_BASE)
    return rng.integers(0, n_samples, size=(BOOTSTRAP_RESAMPLES, n_samples))


def _stats_from_samples(tp, tm, tc, u, pool_center):
    m_pp = float(np.mean(tp * tp))
    m_mm = float(np.mean(tm * tm))
    m_cc = float(np.mean(tc * tc))
    m_pm = float(np.mean(tp * tm))
    diff_sq = float(np.mean((tp - tm) ** 2))
    second = (m_pp + m_mm + m_cc) / 3.0 if pool_center else (m_pp + m_mm) / 2.0
    shifted_pool = (m_pp + m_mm) / 2.0
    var_grad = u * u * diff_sq
    corr = m_pm / second if second > 0.0 else 1.0
    one_minus_r = diff_sq / (2.0 * shifted_pool) if shifted_pool > 0.0 else 0.0
    identity_gap = var_grad - 2.0 * u * u * (1.0 - corr) * second
    return {
        "var_grad": var_grad,
        "second_moment": second,
        "cross_moment": m_pm,
        "corr_r": corr,
        "one_minus_r": one_minus_r,
        "mean_center": float(np.mean(tc)),
        "identity_gap": identity_gap,
    }


def aggregate_triples(
    tp: np.ndarray,
    tm: np.ndarray,
    tc: np.ndarray,
    *,
    shift_u: float,
    n_qubits: int,
    seed,
    pool_center: bool = True,
) -> GradientStatsReport:
    n_samples = tp.shape[0]
    point = _stats_from_samples(tp, tm, tc, shift_u, pool_center)
    idx = _bootstrap_indices(n_samples, seed)
    keys = ("var_grad", "second_moment", "cross_moment", "one_minus_r", "mean_center", "identity_gap")
    resampled = {key: np.empty(BOOTSTRAP_RESAMPLES) for key in keys}
    for b in range(BOOTSTRAP_RESAMPLES):
        take = idx[b]
        stats = _stats_from_samples(tp[take], tm[take], tc[take], shift_u, pool_center)
        for key in keys:
            resampled[key][b] = stats[key]
    se = {key: float(np.std(resampled[key], ddof=1)) for key in keys}
    gap_se = se["identity_gap"]
    # With the centre excluded from pooling the identity cancels exactly in
    # the sample statistics, so its z-score would be float noise.
    if pool_center and gap_se > 0.0:
        identity_z = point["identity_gap"] / gap_se
    else:
        identity_z = 0.0
    return GradientStatsReport(
        n_qubits=n_qubits,
        n_samples=n_samples,
        shift_u=shift_u,
        var_grad=point["var_grad"],
        var_grad_se=se["var_grad"],
        second_moment=point["second_moment"],
        second_moment_se=se["second_moment"],
        cross_moment=point["cross_moment"],
        cross_moment_se=se["cross_moment"],
        corr_r=point["corr_r"],
        one_minus_r=point["one_minus_r"],
        one_minus_r_se=se["one_minus_r"],
        mean_center=point["mean_center"],
        mean_center_se=se["mean_center"],
        identity_z=identity_z,
    )


def collect_triples(circuit_family, n_samples: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Sampled (t+, t-, tc) arrays; sample i always uses stream (*seed, i)."""
    if n_samples < 2:
        raise ValueError("need at least two samples")
    path = _seed_path(seed)
    tp = np.empty(n_samples)
    tm = np.empty(n_samples)
    tc = np.empty(n_samples)
    shift_u = None
    for i in range(n_samples):
        rng = stream_generator(*path, i)
        circuit = circuit_family.build(rng)
        params = circuit_family.sample_params(circuit, rng)
        triple = shift_eval(circuit, params, rng=rng)
        tp[i], tm[i], tc[i] = triple
        u = circuit.probe_gate().shift_u
        if shift_u is None:
            shift_u = u
        elif shift_u != u:
            raise ValueError("probe shift constant changed across samples")
    return tp, tm, tc, shift_u


def estimate_stats(
    circuit_family, n_samples: int, seed, *, return_samples: bool = False
):
    """Monte-Carlo gradient statistics for a circuit family.

    Returns a GradientStatsReport, or ``(report, (tp, tm, tc))`` when
    ``return_samples`` is set.
    """
    tp, tm, tc, shift_u = collect_triples(circuit_family, n_samples, seed)
    report = aggregate_triples(
        tp,
        tm,
        tc,
        shift_u=shift_u,
        n_qubits=circuit_family.n_qubits,
        seed=seed,
        pool_center=getattr(circuit_family, "pool_center", True),
    )
    if return_samples:
        return report, (tp, tm, tc)
    return report


# ---------------------------------------------------------------------------
# Bound checks


def _paired_margin(upper: np.ndarray, lower: np.ndarray) -> tuple[float, float]:
    """(mean gap, z-score) for the per-sample inequality upper >= lower."""
    gap = upper - lower
    mean = float(np.mean(gap))
    sem = float(np.std(gap, ddof=1) / np.sqrt(gap.shape[0]))
    z = mean / sem if sem > 0.0 else (np.inf if mean >= 0.0 else -np.inf)
    return mean, z


def check_oc_bound(
    circuit_family,
    n_samples: int,
    seed,
    observable: PauliString | None = None,
) -> dict:
    """Observable-concentration bound with an appended Clifford layer.

    Per sample: lhs = <g>^2 on the augmented circuit's output state,
    rhs = (2/3)^|A| * (purity deviation of rho_A), A = supp(g).
    """
    lhs = np.empty(n_samples)
    rhs = np.empty(n_samples)
    factor = None
    path = _seed_path(seed)
    for i in range(n_samples):
        rng = stream_generator(*path, i)
        circuit = circuit_family.build(rng)
        if observable is None:
            if len(circuit.observable) != 1:
                raise ValueError("default observable requires a single-term circuit observable")
            g = circuit.observable[0][1]
        else:
            g = observable
        support = g.support()
        if not support:
            raise ValueError("observable must be traceless")
        circuit = insert_clifford_layer(circuit, len(circuit.gates), rng)
        params = circuit_family.sample_params(circuit, rng)
        tags = resolve_haar_tags(circuit, rng)
        state = run_statevector(circuit, params, tags)
        lhs[i] = expect_pauli(state, g) ** 2
        if factor is None:
            factor = (2.0 / 3.0) ** len(support)
        rhs[i] = factor * hs_deviation_sq(partial_trace(state, support))
    gap, z = _paired_margin(rhs, lhs)
    return {
        "lhs": float(np.mean(lhs)),
        "rhs": float(np.mean(rhs)),
        "gap": gap,
        "margin_z": z,
        "holds": z >= -3.0,
        "n_samples": n_samples,
        "support_size": len(support),
    }


def batch_bound(
    circuit_family,
    partition: list[list[int]] | None,
    n_samples: int,
    seed,
) -> dict:
    """Batched information-loss bound; ``partition`` groups observable-term
    indices (default: one batch with every term)."""
    path = _seed_path(seed)
    template_rng = stream_generator(*path, RESERVED_STREAM_BASE + 1)
    template = circuit_family.build(template_rng)
    n_terms = len(template.observable)
    if partition is None:
        partition = [list(range(n_terms))]
    flat = sorted(i for batch in partition for i in batch)
    if flat != list(range(n_terms)) or any(not batch for batch in partition):
        raise ValueError("partition must cover every observable term exactly once")

    position = template.probe_gate_position()
    probe_gate = template.gates[position]
    shift = probe_gate.shift_u
    if shift is None:
        raise ValueError("probe must be a parametrized gate")
    # Support of the probe generator is axis-independent, so the light cones
    # computed on the template hold for every sampled circuit.
    gen_support = set(probe_gate.qubits)
    gammas = []
    norms_sq = []
    for batch in partition:
        support: set[int] = set()
        for term_index in batch:
            support.update(template.observable[term_index][1].support())
        cone = light_cone(template, tuple(sorted(support)), position)
        gammas.append(tuple(sorted(set(cone) | gen_support)))
        norms_sq.append(
            float(2**template.n_qubits)
            * sum(template.observable[i][0] ** 2 for i in batch)
        )

    var_terms = np.empty(n_samples)
    bound_terms = np.empty(n_samples)
    per_batch = np.empty((len(partition), n_samples))
    for i in range(n_samples):
        rng = stream_generator(*path, i)
        circuit = circuit_family.build(rng)
        circuit = insert_clifford_layer(circuit, circuit.probe_gate_position(), rng)
        circuit = insert_clifford_layer(circuit, len(circuit.gates), rng)
        params = circuit_family.sample_params(circuit, rng)
        tags = resolve_haar_tags(circuit, rng)
        cut = circuit.probe_gate_position()
        generator = circuit.gates[cut].generator_string(circuit.n_qubits)
        prefix = run_statevector(circuit, params, tags, upto=cut)
        total = 0.0
        for j, gamma in enumerate(gammas):
            dev = effective_hs_deviation_sq(prefix, gamma, generator)
            term = shift**2 * norms_sq[j] * 2.0 ** (len(gamma) + 2) * dev
            per_batch[j, i] = term
            total += term
        bound_terms[i] = total
        delta = np.pi / (4.0 * shift)
        costs = []
        for offset in (delta, -delta):
            shifted = params.copy()
            shifted[circuit.probe_index] += offset
            state = run_statevector(circuit, shifted, tags, start=prefix.copy(), from_gate=cut)
            costs.append(cost_of_state(circuit, state))
        var_terms[i] = shift**2 * (costs[0] - costs[1]) ** 2
    gap, z = _paired_margin(bound_terms, var_terms)
    return {
        "var_grad": float(np.mean(var_terms)),
        "bound": float(np.mean(bound_terms)),
        "batch_bounds": [float(np.mean(per_batch[j])) for j in range(len(partition))],
        "gamma_sizes": [len(g) for g in gammas],
        "ratio": float(np.mean(var_terms)) / float(np.mean(bound_terms)),
        "gap": gap,
        "margin_z": z,
        "holds": z >= -3.0,
        "n_samples": n_samples,
    }


def check_info_loss_bound(circuit_family, n_samples: int, seed) -> dict:
    """Single-batch information-loss bound (all observable terms together)."""
    return batch_bound(circuit_family, None, n_samples, seed)


# ---------------------------------------------------------------------------
# Closed-form single-qubit concentration case


def clifford_oc_closed_form(bloch: tuple[float, float, float]) -> dict:
    """Exact average over the 24 Cliffords of <Z>^2 for a single-qubit state
    with the given Bloch vector, against (2/3) * (purity deviation).

    The average equals (x^2 + y^2 + z^2)/3 and the deviation is |v|^2/2, so
    the ratio is exactly 2/3.
    """
    x, y, z = bloch
    rho = 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]])
    sigma_z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    values = []
    for c in CLIFFORD_TABLE:
        rotated = c @ rho @ c.conj().T
        values.append(float(np.trace(rotated @ sigma_z).real) ** 2)
    lhs = float(np.mean(values))
    norm_sq = x * x + y * y + z * z
    rhs = (2.0 / 3.0) * norm_sq / 2.0
    return {"lhs": lhs, "rhs": rhs, "norm_sq": norm_sq}


# ---------------------------------------------------------------------------
# Decay fits


def slope_fit(points: list[tuple[float, float]]) -> dict:
    """Least-squares line through (x, log10 y); y must be positive."""
    if len(points) < 3:
        raise ValueError("need at least three points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.any(y <= 0.0):
        raise ValueError("values must be positive for a log fit")
    logy = np.log10(y)
    slope, intercept = np.polyfit(x, logy, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((logy - fitted) ** 2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return {"slope": float(slope), "intercept": float(intercept), "r_squared": r_squared}
