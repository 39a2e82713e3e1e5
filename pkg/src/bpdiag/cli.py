"""Command-line front end.

Subcommands
-----------
- ``tree-sweep``  gradient-variance sweep of the funnel circuits over a
  range of qubit counts, with decay-slope fits
- ``example1``    three-register experiment: Monte-Carlo statistics against
  the exact 2-design closed form, per dimension triple
- ``example2``    scramble/unscramble experiment: Monte-Carlo statistics
  against the exact fourth-moment correlation, per dimension
- ``verify``      deterministic self-consistency checks; exits non-zero on
  any failure

Every run writes ``results.csv`` (fixed column set shared by all
experiments) and ``summary.json`` (sorted keys, no timestamps) into the
output directory, so identical configurations produce byte-identical
files.  The output directory comes from ``--out``, else the ``BPDIAG_OUT``
environment variable, else ``runs/<command>``.  ``--config FILE`` loads
defaults from a flat JSON object; explicit flags win.  Sweep point ``p``
of a run with master seed ``s`` draws from seed path ``(s, p)``.
"""

from __future__ import annotations

import argparse
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import weingarten
from .circuits import Example1Family, Example2Family, TreeFamily, tilted_observable
from .diagnostics import clifford_oc_closed_form, estimate_stats, slope_fit
from .pauli import PauliString
from .rng import stream_generator
from .weingarten import (
    Permutation,
    all_permutations,
    dense_permutation_operator,
    example1_closed_form,
    example2_exact_r,
    gram_entry,
    permute_tensor_slots,
    shift_unitary,
    trace_against_permutation,
    twirl_factor_coefficients,
)

CSV_COLUMNS = (
    "experiment",
    "n",
    "dim1",
    "dim2",
    "dim3",
    "n_samples",
    "var_grad",
    "var_grad_se",
    "second_moment",
    "second_moment_se",
    "r",
    "one_minus_r",
    "one_minus_r_se",
    "identity_z",
    "seed",
)

DEFAULTS = {
    "tree-sweep": {"seed": 7, "samples": 2048, "n_min": 3, "n_max": 9, "n_step": 2},
    "example1": {"seed": 7, "samples": 4096, "dims": "4,2,4;8,2,4;16,2,4"},
    "example2": {"seed": 7, "samples": 4096, "dims": "4,8,16,32"},
    "verify": {"seed": 7, "samples": 512},
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    samples: int
    out: str
    dump_pairs: bool = False
    n_min: int | None = None
    n_max: int | None = None
    n_step: int | None = None
    dims: str | None = None

    def summary_fields(self) -> dict:
        """Science-relevant fields only: the output path must not leak into
        the summary, or runs into different directories stop being
        byte-identical."""
        out = {"command": self.command, "seed": self.seed, "samples": self.samples}
        for key in ("n_min", "n_max", "n_step"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _parse_power_of_two(text: str) -> int:
    value = int(text)
    if value < 2 or value & (value - 1):
        raise ValueError(f"dimension {value} is not a power of two >= 2")
    return value


def _parse_dim_triples(text: str) -> list[tuple[int, int, int]]:
    """'4,2,4;8,2,4' -> [(4, 2, 4), (8, 2, 4)]."""
    points = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three dimensions, got {chunk!r}")
        points.append(tuple(_parse_power_of_two(p) for p in parts))
    if not points:
        raise ValueError("empty dimension list")
    return points


def _parse_dim_list(text: str) -> list[int]:
    """'4,8,16' -> [4, 8, 16]."""
    points = [_parse_power_of_two(p.strip()) for p in text.split(",")]
    if not points:
        raise ValueError("empty dimension list")
    return points


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, rows: list[dict]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(col)) for col in CSV_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_pairs(path: Path, tp: np.ndarray, tm: np.ndarray) -> None:
    lines = ["t_plus,t_minus"]
    for a, b in zip(tp, tm):
        lines.append(f"{float(a)!r},{float(b)!r}")
    path.write_text("\n".join(lines) + "\n")


def _stats_row(experiment: str, n: int, dims, report, seed: int) -> dict:
    d1, d2, d3 = (dims + (None,) * 3)[:3] if dims else (None, None, None)
    return {
        "experiment": experiment,
        "n": n,
        "dim1": d1,
        "dim2": d2,
        "dim3": d3,
        "n_samples": report.n_samples,
        "var_grad": report.var_grad,
        "var_grad_se": report.var_grad_se,
        "second_moment": report.second_moment,
        "second_moment_se": report.second_moment_se,
        "r": report.corr_r,
        "one_minus_r": report.one_minus_r,
        "one_minus_r_se": report.one_minus_r_se,
        "identity_z": report.identity_z,
        "seed": seed,
    }


def _safe_fit(points: list[tuple[float, float]]):
    try:
        return slope_fit(points)
    except ValueError:
        return None


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# Subcommands


def run_tree_sweep(cfg: RunConfig) -> int:
    sizes = list(range(cfg.n_min, cfg.n_max + 1, cfg.n_step))
    if not sizes:
        raise SystemExit("empty qubit range")
    out = _out_dir(cfg)
    rows, points = [], []
    for index, n in enumerate(sizes):
        report, (tp, tm, _) = estimate_stats(
            TreeFamily(n), cfg.samples, (cfg.seed, index), return_samples=True
        )
        rows.append(_stats_row("tree", n, None, report, cfg.seed))
        points.append({"n": n, **asdict(report)})
        if cfg.dump_pairs:
            _write_pairs(out / f"pairs_n{n}.csv", tp, tm)
        print(
            f"n={n:2d}  var_grad={report.var_grad:.3e}  "
            f"one_minus_r={report.one_minus_r:.3e}  identity_z={report.identity_z:+.2f}"
        )
    fits = {
        "var_grad": _safe_fit([(p["n"], p["var_grad"]) for p in points]),
        "one_minus_r": _safe_fit([(p["n"], p["one_minus_r"]) for p in points]),
        "second_moment": _safe_fit([(p["n"], p["second_moment"]) for p in points]),
    }
    summary = {
        "experiment": "tree-sweep",
        "config": {**cfg.summary_fields(), "sizes": sizes},
        "points": points,
        "fits": fits,
    }
    _write_csv(out / "results.csv", rows)
    _write_json(out / "summary.json", summary)
    print(f"wrote {out / 'results.csv'} and {out / 'summary.json'}")
    return 0


def run_example1(cfg: RunConfig) -> int:
    triples = _parse_dim_triples(cfg.dims)
    out = _out_dir(cfg)
    rows, points = [], []
    for index, dims in enumerate(triples):
        exponents = tuple(d.bit_length() - 1 for d in dims)
        family = Example1Family(*exponents)
        report, (tp, tm, _) = estimate_stats(
            family, cfg.samples, (cfg.seed, index), return_samples=True
        )
        exact = example1_closed_form(*dims)
        z = (
            (report.one_minus_r - exact["one_minus_r_exact"]) / report.one_minus_r_se
            if report.one_minus_r_se > 0.0
            else 0.0
        )
        n = sum(exponents)
        rows.append(_stats_row("example1", n, dims, report, cfg.seed))
        points.append(
            {
                "dims": list(dims),
                "n": n,
                "stats": asdict(report),
                "closed_form": exact,
                "one_minus_r_z": z,
            }
        )
        if cfg.dump_pairs:
            _write_pairs(out / f"pairs_n{n}.csv", tp, tm)
        print(
            f"dims={dims}  one_minus_r={report.one_minus_r:.4f}  "
            f"exact={exact['one_minus_r_exact']:.4f}  z={z:+.2f}"
        )
    measured = [p["stats"]["one_minus_r"] for p in points]
    seconds = [p["stats"]["second_moment"] for p in points]
    summary = {
        "experiment": "example1",
        "config": {**cfg.summary_fields(), "dims": [list(t) for t in triples]},
        "points": points,
        "consecutive_ratios": [b / a for a, b in zip(measured, measured[1:])],
        "second_moment_spread": (max(seconds) - min(seconds)) / float(np.mean(seconds)),
    }
    _write_csv(out / "results.csv", rows)
    _write_json(out / "summary.json", summary)
    print(f"wrote {out / 'results.csv'} and {out / 'summary.json'}")
    return 0


def run_example2(cfg: RunConfig) -> int:
    dims = _parse_dim_list(cfg.dims)
    out = _out_dir(cfg)
    rows, points = [], []
    for index, d in enumerate(dims):
        n = d.bit_length() - 1
        family = Example2Family(n)
        report, (tp, tm, _) = estimate_stats(
            family, cfg.samples, (cfg.seed, index), return_samples=True
        )
        circuit = family.build(None)
        probe = circuit.probe_gate().generator
        exact = example2_exact_r(d, probe, circuit.observable)
        z = (
            (report.one_minus_r - exact["one_minus_r"]) / report.one_minus_r_se
            if report.one_minus_r_se > 0.0
            else 0.0
        )
        rows.append(_stats_row("example2", n, (d,), report, cfg.seed))
        points.append(
            {
                "d": d,
                "n": n,
                "stats": asdict(report),
                "exact": exact,
                "one_minus_r_z": z,
                "scaled_one_minus_r": d * exact["one_minus_r"],
            }
        )
        if cfg.dump_pairs:
            _write_pairs(out / f"pairs_n{n}.csv", tp, tm)
        print(
            f"d={d:3d}  one_minus_r={report.one_minus_r:.5f}  "
            f"exact={exact['one_minus_r']:.5f}  z={z:+.2f}"
        )
    scaled = [p["scaled_one_minus_r"] for p in points]
    summary = {
        "experiment": "example2",
        "config": {**cfg.summary_fields(), "dims": dims},
        "points": points,
        "scaled_spread": (max(scaled) - min(scaled)) / float(np.mean(scaled)),
    }
    _write_csv(out / "results.csv", rows)
    _write_json(out / "summary.json", summary)
    print(f"wrote {out / 'results.csv'} and {out / 'summary.json'}")
    return 0


# ---------------------------------------------------------------------------
# Verification suite


def _check_permutation_algebra(rng) -> tuple[bool, str]:
    for k, d in ((2, 2), (3, 3), (4, 2)):
        perms = all_permutations(k)
        sigma = perms[int(rng.integers(len(perms)))]
        pi = perms[int(rng.integers(len(perms)))]
        left = dense_permutation_operator(sigma, d) @ dense_permutation_operator(pi, d)
        right = dense_permutation_operator(pi.compose(sigma), d)
        if not np.allclose(left, right, atol=1e-12):
            return False, f"composition mismatch at k={k}, d={d}"
        vec = rng.standard_normal(d**k)
        direct = permute_tensor_slots(vec, sigma, d)
        via_dense = dense_permutation_operator(sigma, d) @ vec
        if not np.allclose(direct, via_dense, atol=1e-12):
            return False, f"slot action mismatch at k={k}, d={d}"
    return True, "composition and slot action match the dense operators"


def _check_trace_identity(rng) -> tuple[bool, str]:
    for k, d in ((2, 3), (3, 2), (4, 2)):
        factors = [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(k)
        ]
        kron = factors[0]
        for f in factors[1:]:
            kron = np.kron(kron, f)
        for sigma in all_permutations(k):
            direct = trace_against_permutation(sigma, factors)
            dense = complex(np.trace(dense_permutation_operator(sigma, d) @ kron))
            if abs(direct - dense) > 1e-9 * max(1.0, abs(dense)):
                return False, f"trace mismatch at k={k}, d={d}, sigma={sigma.images}"
            gram_dense = complex(
                np.trace(
                    dense_permutation_operator(sigma, d).T
                    @ dense_permutation_operator(sigma, d)
                )
            )
            if abs(gram_entry(sigma, sigma, d) - gram_dense) > 1e-9:
                return False, f"gram mismatch at k={k}, d={d}"
    return True, "cycle-product traces match dense contractions"


def _check_weingarten_k2() -> tuple[bool, str]:
    for d in (2, 3, 4, 7):
        table = weingarten.weingarten_table(2, d)
        expected_id = 1.0 / (d * d - 1.0)
        expected_swap = -1.0 / (d * (d * d - 1.0))
        if abs(table.values[(1, 1)] - expected_id) > 1e-12:
            return False, f"identity value off at d={d}"
        if abs(table.values[(2,)] - expected_swap) > 1e-12:
            return False, f"transposition value off at d={d}"
    return True, "pair-moment values match 1/(d^2-1) and -1/(d(d^2-1))"


def _check_weingarten_normalization() -> tuple[bool, str]:
    for k in (2, 3, 4):
        for d in range(k, 7):
            table = weingarten.weingarten_table(k, d)
            total = sum(
                table(pi) * d ** len(pi.cycles()) for pi in all_permutations(k)
            )
            if abs(total - 1.0) > 1e-9:
                return False, f"sum rule broken at k={k}, d={d}: {total}"
    return True, "sum_pi Wg(pi) d^cycles(pi) = 1 for k <= 4"


def _check_twirl_projection(rng) -> tuple[bool, str]:
    for k, d in ((2, 4), (3, 3), (4, 4)):
        factors = [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(k)
        ]
        coeffs = twirl_factor_coefficients(k, d, factors)
        perms = all_permutations(k)
        for sigma in perms:
            target = trace_against_permutation(sigma.inverse(), factors)
            projected = sum(
                c * gram_entry(sigma, pi, d) for c, pi in zip(coeffs, perms)
            )
            if abs(projected - target) > 1e-6 * max(1.0, abs(target)):
                return False, f"projection traces differ at k={k}, d={d}"
    return True, "twirl coefficients reproduce every permutation trace"


def _check_shift_trace() -> tuple[bool, str]:
    for n in (1, 2):
        d = 2**n
        s = shift_unitary(PauliString.single(n, 0, "Z"))
        value = abs(np.trace(s)) ** 4
        if abs(value - d**4 / 4.0) > 1e-9:
            return False, f"|Tr S|^4 != d^4/4 at d={d}"
    return True, "|Tr exp(-i pi G/4)|^4 = d^4/4 for traceless Pauli G"


def _check_clifford_average(rng) -> tuple[bool, str]:
    for _ in range(5):
        v = rng.standard_normal(3)
        v /= max(1.0, np.linalg.norm(v))  # keep inside the Bloch ball
        result = clifford_oc_closed_form(tuple(v))
        if abs(result["lhs"] - result["rhs"]) > 1e-10:
            return False, f"single-qubit average not tight at bloch={v}"
    return True, "24-Clifford average of <Z>^2 equals 2/3 of the purity deviation"


def _check_three_register_anchors() -> tuple[bool, str]:
    anchors = [
        ((4, 2, 4), 39.0 / 567.0, 16.0 / 39.0),
        ((8, 2, 4), 1.0 / 17.0, 16.0 / 63.0),
        ((16, 2, 4), 111.0 / 2079.0, 16.0 / 111.0),
    ]
    for dims, second, exact_ratio in anchors:
        result = example1_closed_form(*dims)
        if abs(result["second_moment"] - second) > 1e-12:
            return False, f"second moment off at dims={dims}"
        if abs(result["one_minus_r_exact"] - exact_ratio) > 1e-12:
            return False, f"exact ratio off at dims={dims}"
    if abs(example1_closed_form(16, 2, 4)["one_minus_r"] - 1.0 / 3.0) > 1e-12:
        return False, "compact ratio at (16,2,4) is not 1/3"
    return True, "closed-form anchor values reproduced"


def _check_scramble_correlation() -> tuple[bool, str]:
    for n in (1, 2, 3):
        d = 2**n
        generator = PauliString.single(n, 0, "Z")
        result = example2_exact_r(d, generator, tilted_observable(n))
        if result["denominator"] <= 0.0:
            return False, f"non-positive second moment at d={d}"
        if not 0.0 < result["one_minus_r"] < 1.0:
            return False, f"correlation outside (0,1) at d={d}"
    return True, "exact scramble/unscramble correlation is sane for d <= 8"


def run_verify(cfg: RunConfig) -> int:
    rng = stream_generator(cfg.seed)
    checks = [
        ("permutation-algebra", lambda: _check_permutation_algebra(rng)),
        ("trace-identity", lambda: _check_trace_identity(rng)),
        ("weingarten-k2", _check_weingarten_k2),
        ("weingarten-normalization", _check_weingarten_normalization),
        ("twirl-projection", lambda: _check_twirl_projection(rng)),
        ("shift-trace", _check_shift_trace),
        ("clifford-average", lambda: _check_clifford_average(rng)),
        ("three-register-anchors", _check_three_register_anchors),
        ("scramble-correlation", _check_scramble_correlation),
    ]
    failures = 0
    for name, check in checks:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "ok  " if ok else "FAIL"
        print(f"{status} {name:28s} {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} of {len(checks)} checks failed")
        return 1
    print(f"all {len(checks)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# Argument handling


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpdiag",
        description="Gradient-concentration diagnostics for shallow random circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--samples", type=int, default=None, help="Monte-Carlo samples per point")
        p.add_argument("--out", default=None, help="output directory (default: $BPDIAG_OUT or runs/<command>)")
        p.add_argument("--config", default=None, help="JSON file with default option values")
        p.add_argument(
            "--dump-pairs",
            action="store_true",
            default=None,
            help="also write per-point pairs_n{n}.csv sample files",
        )

    p_tree = sub.add_parser("tree-sweep", help="funnel-circuit variance sweep")
    add_common(p_tree)
    p_tree.add_argument("--n-min", type=int, default=None, help="smallest qubit count")
    p_tree.add_argument("--n-max", type=int, default=None, help="largest qubit count")
    p_tree.add_argument("--n-step", type=int, default=None, help="qubit count step")

    p_ex1 = sub.add_parser("example1", help="three-register closed-form comparison")
    add_common(p_ex1)
    p_ex1.add_argument(
        "--dims",
        default=None,
        help="semicolon-separated dimension triples, e.g. '4,2,4;8,2,4'",
    )

    p_ex2 = sub.add_parser("example2", help="scramble/unscramble correlation")
    add_common(p_ex2)
    p_ex2.add_argument("--dims", default=None, help="comma-separated dimensions, e.g. '4,8,16'")

    p_verify = sub.add_parser("verify", help="run the self-consistency checks")
    add_common(p_verify)
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    command = args.command
    merged = dict(DEFAULTS[command])
    if args.config is not None:
        loaded = json.loads(Path(args.config).read_text())
        if not isinstance(loaded, dict):
            raise SystemExit("config file must hold a JSON object")
        allowed = set(DEFAULTS[command]) | {"out", "dump_pairs"}
        unknown = set(loaded) - allowed
        if unknown:
            raise SystemExit(f"unknown config keys for {command}: {sorted(unknown)}")
        merged.update(loaded)
    for key in ("seed", "samples", "out", "dump_pairs", "n_min", "n_max", "n_step", "dims"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    out = merged.get("out") or os.environ.get("BPDIAG_OUT") or f"runs/{command}"
    return RunConfig(
        command=command,
        seed=int(merged["seed"]),
        samples=int(merged["samples"]),
        out=str(out),
        dump_pairs=bool(merged.get("dump_pairs") or False),
        n_min=merged.get("n_min"),
        n_max=merged.get("n_max"),
        n_step=merged.get("n_step"),
        dims=merged.get("dims"),
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _merge_config(args)
    runner = {
        "tree-sweep": run_tree_sweep,
        "example1": run_example1,
        "example2": run_example2,
        "verify": run_verify,
    }[cfg.command]
    return runner(cfg)
