"""Embedded golden checks run by ``fockpipe validate``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import fock, metrics, oracle, scheme
from .circuit import Circuit, Coherent, Element, ModeDecl, default_circuit_cutoff, evolve, run_circuit
from .fock import BeamSplitter, Kerr

FAULTS = ("bs-sign",)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tolerance


def _sign(fault):
    return -1.0 if fault == "bs-sign" else 1.0


def _product_coherent(cutoff, *alphas):
    return oracle.to_fock(oracle.AnalyticState.coherent(*alphas), cutoff)


def check_bs_covariance(fault=None) -> Check:
    rng = np.random.default_rng(5)
    worst = 0.0
    cutoff = 40
    for _ in range(8):
        a, b = (r * cmath.exp(1j * t) for r, t in zip(rng.uniform(0, 2, 2), rng.uniform(0, 2 * math.pi, 2)))
        theta, phi = rng.uniform(0, 2 * math.pi, 2)
        state = _product_coherent(cutoff, a, b)
        out = fock.apply_beamsplitter(state, _sign(fault) * theta, phi, (0, 1))
        target = _product_coherent(
            cutoff,
            a * math.cos(theta) + b * cmath.exp(-1j * phi) * math.sin(theta),
            -a * cmath.exp(1j * phi) * math.sin(theta) + b * math.cos(theta),
        )
        worst = max(worst, 1.0 - metrics.fidelity_fock(out, target))
    return Check("bs-coherent-covariance", worst, 1e-8)


def check_bs_quarter(fault=None) -> Check:
    cutoff = 30
    state = _product_coherent(cutoff, 1.0, 0.5)
    out = fock.apply_beamsplitter(state, _sign(fault) * math.pi / 4, 3 * math.pi / 2, (0, 1))
    target = _product_coherent(cutoff, (1 + 0.5j) / math.sqrt(2), (0.5 + 1j) / math.sqrt(2))
    return Check("bs-balanced-golden", 1.0 - metrics.fidelity_fock(out, target), 1e-9)


def check_kerr_cat(fault=None) -> Check:
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0, 3.0):
        cutoff = fock.default_cutoff(alpha)
        out = fock.apply_kerr(fock.coherent_fock(alpha, cutoff), math.pi / 2, 0)
        cat = (cmath.exp(-1j * math.pi / 4) * oracle.AnalyticState.coherent(alpha)
               + cmath.exp(1j * math.pi / 4) * oracle.AnalyticState.coherent(-alpha))
        worst = max(worst, 1.0 - metrics.fidelity_fock(out, oracle.to_fock(cat, cutoff)))
    return Check("kerr-cat-state", worst, 1e-10)


def mz_circuit(alpha, beta, theta=math.pi / 4, phi=3 * math.pi / 2) -> Circuit:
    bs = BeamSplitter(theta, phi)
    return Circuit(
        (ModeDecl("a", Coherent(alpha)), ModeDecl("b", Coherent(beta))),
        (Element(bs, ("a", "b")), Element(Kerr(math.pi / 2), ("a",)), Element(bs, ("a", "b"))),
    )


def check_sanders(fault=None) -> Check:
    worst = 0.0
    for alpha in (0.0, 1.0, 2.0, 1.0 + 1.0j):
        for beta in (0.0, 0.7, -1.5j, 2.0):
            circuit = mz_circuit(alpha, beta, theta=_sign(fault) * math.pi / 4)
            out = evolve(circuit)
            target = oracle.to_fock(scheme.sanders_ecs(alpha, beta), out.cutoff)
            worst = max(worst, 1.0 - metrics.fidelity_fock(out, target))
    return Check("sanders-ecs", worst, 1e-8)


def check_heralding(fault=None) -> Check:
    g = 0.05
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5 - 0.5j):
        cutoff = fock.default_cutoff(abs(alpha) + 1)
        state = fock.coherent_fock(alpha, cutoff).tensor(fock.MultiModeState.vacuum(1, cutoff))
        branch = fock.postselect(fock.apply_tmsq(state, g, (0, 1)), 1, 1)
        spacs = oracle.to_fock(oracle.AnalyticState.coherent(alpha).add_photon(0), cutoff)
        expected_w = g**2 * (1 + abs(alpha) ** 2)
        worst = max(worst, 1.0 - metrics.fidelity_fock(branch.state, spacs),
                    abs(branch.weight / expected_w - 1.0))
    return Check("heralded-photon-addition", worst, 1e-10)


def _branch_records(fault):
    params = scheme.SchemeParams(1.2, 0.7, 0.05, theta=_sign(fault) * math.pi / 4)
    reference = scheme.SchemeParams(1.2, 0.7, 0.05)
    circuit = scheme.build_paper_circuit(params)
    cutoff = default_circuit_cutoff(circuit)
    return scheme.compare_branches(reference, run_circuit(circuit, cutoff), cutoff)


def check_branch_states(fault=None) -> Check:
    records = _branch_records(fault)
    if any(r.empty for r in records):
        return Check("branch-states", math.inf, 1e-6)
    return Check("branch-states", max(1.0 - r.fidelity for r in records), 1e-6)


def check_branch_weights(fault=None) -> Check:
    records = _branch_records(fault)
    if any(r.empty for r in records):
        return Check("branch-weight-ratios", math.inf, 1e-8)
    base = records[0]
    worst = max(
        abs((r.weight / base.weight) / (r.expected_weight / base.expected_weight) - 1.0) for r in records
    )
    return Check("branch-weight-ratios", worst, 1e-8)


def check_overlaps(fault=None) -> Check:
    cutoff = 80
    worst = 0.0
    for x, y in ((1.0, 2.0), (0.3 - 1.1j, -0.8 + 0.4j), (2.5, -2.5j)):
        for ma in (0, 1):
            for mb in (0, 1):
                vx = oracle.to_fock(oracle.AnalyticState((oracle.CoherentTerm((x,), (ma,)),), 1), cutoff)
                vy = oracle.to_fock(oracle.AnalyticState((oracle.CoherentTerm((y,), (mb,)),), 1), cutoff)
                worst = max(worst, abs(vx.inner(vy) - oracle.overlap_single_mode(x, ma, y, mb)))
    return Check("oracle-overlaps", worst, 1e-10)


CHECKS = (
    check_bs_covariance,
    check_bs_quarter,
    check_kerr_cat,
    check_sanders,
    check_heralding,
    check_branch_states,
    check_branch_weights,
    check_overlaps,
)


def run_checks(fault: str | None = None) -> list[Check]:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    return [check(fault) for check in CHECKS]
