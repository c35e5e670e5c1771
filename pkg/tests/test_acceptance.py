"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line and records it for the terminal
summary, so ``pytest tests/test_acceptance.py -s`` reads as a checklist.
"""

import cmath
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from fockpipe import fock, metrics, oracle, scheme
from fockpipe.circuit import default_circuit_cutoff, evolve, run_circuit
from fockpipe.oracle import AnalyticState
from fockpipe.validation import mz_circuit

from conftest import ACCEPTANCE_LINES, random_amplitude, series_coherent

# one-click hybrid-limit fidelity at beta=0, alpha=3, from the analytic oracle
ONE_CLICK_HYBRID_FIDELITY = 0.784654720886196


def report(number, title, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  C{number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def product(cutoff, *alphas):
    return oracle.to_fock(AnalyticState.coherent(*alphas), cutoff)


def test_c1_beamsplitter_covariance():
    rng = np.random.default_rng(101)
    cutoff = 40
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a, b = random_amplitude(rng, 2.0), random_amplitude(rng, 2.0)
        theta, phi = rng.uniform(0, 2 * math.pi, 2)
        out = fock.apply_beamsplitter(product(cutoff, a, b), theta, phi, (0, 1))
        target = product(
            cutoff,
            a * math.cos(theta) + b * cmath.exp(-1j * phi) * math.sin(theta),
            -a * cmath.exp(1j * phi) * math.sin(theta) + b * math.cos(theta),
        )
        worst = max(worst, 1.0 - metrics.fidelity_fock(out, target))
    elapsed = time.perf_counter() - start
    report(1, "beam-splitter covariance", worst <= 1e-8 and elapsed < 30,
           f"worst infidelity {worst:.3g} (tol 1e-8), {elapsed:.2f} s (limit 30 s)")


def test_c2_kerr_cat():
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0, 3.0):
        cutoff = fock.default_cutoff(alpha)
        out = fock.apply_kerr(fock.coherent_fock(alpha, cutoff), math.pi / 2, 0)
        cat = (cmath.exp(-1j * math.pi / 4) * series_coherent(alpha, cutoff)
               + cmath.exp(1j * math.pi / 4) * series_coherent(-alpha, cutoff)) / math.sqrt(2)
        worst = max(worst, 1.0 - metrics.fidelity_fock(out, fock.MultiModeState(cat, cutoff)))
    report(2, "Kerr cat state", worst <= 1e-10, f"worst infidelity {worst:.3g} (tol 1e-10)")


def test_c3_sanders_ecs():
    grid = (0.0, 1.0, -2.0, 1.5j, 1 + 1j, -0.6 - 1.2j)
    worst = 0.0
    for alpha in grid:
        for beta in grid:
            out = evolve(mz_circuit(alpha, beta))
            target = oracle.to_fock(scheme.sanders_ecs(alpha, beta), out.cutoff)
            worst = max(worst, 1.0 - metrics.fidelity_fock(out, target))
    report(3, "Sanders ECS", worst <= 1e-8, f"worst infidelity {worst:.3g} over {len(grid)**2} points (tol 1e-8)")


def test_c4_heralding():
    g = 0.05
    worst_fid = worst_weight = 0.0
    for alpha in (0.0, 0.5, 1.0, 1.5 - 0.5j, 2j, 2.5):
        cutoff = fock.default_cutoff(abs(alpha) + 1)
        state = fock.coherent_fock(alpha, cutoff).tensor(fock.MultiModeState.vacuum(1, cutoff))
        branch = fock.postselect(fock.apply_tmsq(state, g, (0, 1)), 1, 1)
        spacs = oracle.to_fock(AnalyticState.coherent(alpha).add_photon(0), cutoff)
        expected = g**2 * (1 + abs(alpha) ** 2)
        worst_fid = max(worst_fid, 1.0 - metrics.fidelity_fock(branch.state, spacs))
        worst_weight = max(worst_weight, abs(branch.weight / expected - 1.0))
    report(4, "heralded photon addition", worst_fid <= 1e-10 and worst_weight <= 1e-10,
           f"worst infidelity {worst_fid:.3g}, weight rel. error {worst_weight:.3g} (tol 1e-10)")


BRANCH_POINTS = [(1.2, 0.7), (0.0, 0.0), (2.0, -1.0j), (2.5, 2.5), (-1.3 + 0.4j, 0.9j), (0.5, 0.0)]


def test_c5_branch_table():
    worst_fid = worst_ratio = 0.0
    for alpha, beta in BRANCH_POINTS:
        records, _ = scheme.simulate(scheme.SchemeParams(alpha, beta, 0.05))
        assert not any(r.empty for r in records)
        base = records[0]
        for r in records:
            worst_fid = max(worst_fid, 1.0 - r.fidelity)
            ratio = (r.weight / base.weight) / (r.expected_weight / base.expected_weight)
            worst_ratio = max(worst_ratio, abs(ratio - 1.0))
    report(5, "four-branch table", worst_fid <= 1e-6 and worst_ratio <= 1e-8,
           f"worst infidelity {worst_fid:.3g} (tol 1e-6), weight-ratio rel. error {worst_ratio:.3g} (tol 1e-8)")


def test_c6_oracle_consistency():
    rng = np.random.default_rng(606)
    cutoff = 80
    worst_overlap = 0.0
    for _ in range(12):
        x, y = random_amplitude(rng, 2.5), random_amplitude(rng, 2.5)
        for ma in (0, 1):
            for mb in (0, 1):
                brute = np.vdot(series_coherent(x, cutoff, ma), series_coherent(y, cutoff, mb))
                worst_overlap = max(worst_overlap, abs(oracle.overlap_single_mode(x, ma, y, mb) - brute))
    worst_entropy = 0.0
    for alpha, beta in BRANCH_POINTS:
        records, _ = scheme.simulate(scheme.SchemeParams(alpha, beta, 0.05))
        worst_entropy = max(worst_entropy, *(abs(r.entropy - r.entropy_oracle) for r in records))
    report(6, "oracle consistency", worst_overlap <= 1e-10 and worst_entropy <= 1e-6,
           f"overlap error {worst_overlap:.3g} (tol 1e-10), entropy gap {worst_entropy:.3g} (tol 1e-6)")


def test_c7_regression_constant():
    ideal = scheme.idealize_hybrid(scheme.hybrid_branch(3.0, (1, 0)))
    assert ideal.fidelity == pytest.approx(ONE_CLICK_HYBRID_FIDELITY, abs=1e-12)
    mirror = scheme.idealize_hybrid(scheme.hybrid_branch(3.0, (0, 1)))
    assert mirror.fidelity == pytest.approx(ONE_CLICK_HYBRID_FIDELITY, abs=1e-12)


def _normalized_spacs_reading(alpha):
    """Case-A branch with every photon-added ket normalized before superposing."""
    raw = scheme.raw_branch(scheme.SchemeParams(alpha, 0.0, 0.05), (1, 0))
    terms = []
    for t in raw.terms:
        unit = t.scaled(1 / t.coefficient)
        terms.append(t.scaled(1 / math.sqrt(oracle.term_overlap(unit, unit).real)))
    return AnalyticState(tuple(terms), 2).normalize()


def test_c7_hybrid_limit():
    alpha = 3.0
    ideal = scheme.idealize_hybrid(scheme.hybrid_branch(alpha, (1, 0)))
    # the simulated branch is the one the idealization is judged against
    params = scheme.SchemeParams(alpha, 0.0, 0.05)
    circuit = scheme.build_paper_circuit(params)
    cutoff = default_circuit_cutoff(circuit)
    sim = next(b for b in run_circuit(circuit, cutoff) if (b.outcome["a_i"], b.outcome["b_i"]) == (1, 0))
    sim_fid = metrics.fidelity_fock(sim.state, oracle.to_fock(ideal.ideal, cutoff))
    two_click = scheme.idealize_hybrid(scheme.hybrid_branch(alpha, (1, 1))).fidelity
    literal = scheme.idealize_hybrid(_normalized_spacs_reading(alpha)).fidelity
    report(7, "hybrid limit, one-click branch", min(ideal.fidelity, sim_fid) > 0.99,
           f"fidelity {ideal.fidelity:.12g} (simulated {sim_fid:.12g}) vs required > 0.99; "
           f"term weights {ideal.weights[0]:.4f}:{ideal.weights[1]:.4f}; omega {ideal.omega:.6g}; "
           f"two-click branch {two_click:.6g}; normalized-SPACS reading {literal:.6g}")


def test_c8_type1_type2_overlaps():
    worst_type1 = worst_type2 = 0.0
    for alpha in (0.5, 1.0, 2.0, 3.0, 1.5 - 1.5j):
        cmp = scheme.compare_hes(scheme.SchemeParams(alpha, 0.0, 0.05), omega=0.0)
        worst_type1 = max(worst_type1, abs(cmp.overlap_diagnostics["type1"][1][0, 1]))
        expected = abs(alpha) * math.exp(-abs(alpha) ** 2 / 2)
        worst_type2 = max(worst_type2, abs(abs(cmp.overlap_diagnostics["type2"][0][0, 1]) - expected))
    report(8, "type-I vs type-II overlaps", worst_type1 < 1e-14 and worst_type2 <= 1e-10,
           f"type-I parity overlap {worst_type1:.3g} (< 1e-14), type-II error {worst_type2:.3g} (tol 1e-10)")


def test_c9_determinism():
    cmds = {
        "validate": [sys.executable, "-m", "fockpipe", "validate"],
        "paper": [sys.executable, "-m", "fockpipe", "paper", "--format", "json"],
        "paper sweep": [sys.executable, "-m", "fockpipe", "paper", "--beta", "0", "--sweep", "alpha:0.5:3:6"],
    }
    same = {}
    for name, cmd in cmds.items():
        runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
        same[name] = bool(runs[0]) and runs[0] == runs[1]
    report(9, "byte-identical CLI output", all(same.values()),
           ", ".join(f"{k}: {'identical' if v else 'DIFFERS'}" for k, v in same.items()))
