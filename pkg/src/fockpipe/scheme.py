"""The two-stage generation pipeline: a Kerr Mach-Zehnder interferometer producing an
entangled coherent state, followed by one heralded down-converter per output arm.

Analytic expectations are obtained by pushing the input coherent state through the
same devices with the closed-form maps of :mod:`fockpipe.oracle`, then applying one
``a^dagger`` per idler click. The photon-added kets stay unnormalized, so an arm
that carries ``a^dag|x>`` picks up the weight ``1 + |x|^2`` automatically.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import metrics, oracle
from .circuit import (
    Circuit,
    Coherent,
    Detection,
    Element,
    ModeDecl,
    Vacuum,
    default_circuit_cutoff,
    run_circuit,
)
from .fock import (
    FIRST_ORDER_G_LIMIT,
    FIRST_ORDER_G_WARN,
    BeamSplitter,
    Kerr,
    SqueezerOrder,
    TwoModeSqueezer,
)
from .oracle import AnalyticState, CoherentTerm

OUTCOMES = ((0, 0), (1, 0), (0, 1), (1, 1))
SIGNAL_MODES = ("a", "b")
IDLER_MODES = ("a_i", "b_i")


@dataclass(frozen=True)
class SchemeParams:
    alpha: complex
    beta: complex
    g: float
    squeezer_order: SqueezerOrder = SqueezerOrder.FIRST
    theta: float = math.pi / 4
    phi: float = 3 * math.pi / 2
    chi: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "squeezer_order", SqueezerOrder(self.squeezer_order))
        if not (cmath.isfinite(self.alpha) and cmath.isfinite(self.beta) and math.isfinite(self.g)):
            raise ValueError("scheme parameters must be finite")
        if self.chi != math.pi / 2:
            raise ValueError("the cat-generating Kerr phase is fixed at chi = pi/2")
        if self.squeezer_order is SqueezerOrder.FIRST:
            if abs(self.g) >= FIRST_ORDER_G_LIMIT:
                raise ValueError(f"|g| must be below {FIRST_ORDER_G_LIMIT} for the first-order squeezer")
            if abs(self.g) > FIRST_ORDER_G_WARN:
                warnings.warn(f"|g|={abs(self.g):g} is outside the low-gain regime", stacklevel=2)


def build_paper_circuit(params: SchemeParams) -> Circuit:
    """Modes ``a, b`` (coherent inputs) and vacuum idlers ``a_i, b_i``."""
    bs = BeamSplitter(params.theta, params.phi)
    sq = TwoModeSqueezer(params.g, params.squeezer_order)
    return Circuit(
        modes=(
            ModeDecl("a", Coherent(params.alpha)),
            ModeDecl("b", Coherent(params.beta)),
            ModeDecl("a_i", Vacuum()),
            ModeDecl("b_i", Vacuum()),
        ),
        elements=(
            Element(bs, ("a", "b")),
            Element(Kerr(params.chi), ("a",)),
            Element(bs, ("a", "b")),
            Element(sq, ("a", "a_i")),
            Element(sq, ("b", "b_i")),
        ),
        detections=(Detection("a_i", (0, 1)), Detection("b_i", (0, 1))),
    )


def match_paper_circuit(circuit: Circuit) -> SchemeParams | None:
    """Recover the parameters if ``circuit`` is structurally the heralded two-stage pipeline."""
    try:
        a, b = circuit.modes[0].initial, circuit.modes[1].initial
        sq = circuit.elements[3].op
        bs = circuit.elements[0].op
        params = SchemeParams(a.alpha, b.alpha, sq.g, sq.order, bs.theta, bs.phi, circuit.elements[1].op.chi)
    except (AttributeError, IndexError, TypeError, ValueError):
        return None
    return params if build_paper_circuit(params) == circuit else None


def sanders_ecs(alpha: complex, beta: complex) -> AnalyticState:
    """``(e^{-i pi/4}|i beta>|i alpha> + e^{i pi/4}|-alpha>|beta>) / sqrt 2``."""
    alpha, beta = complex(alpha), complex(beta)
    s = 1 / math.sqrt(2)
    return AnalyticState(
        (
            CoherentTerm((1j * beta, 1j * alpha), (0, 0), s * cmath.exp(-1j * math.pi / 4)),
            CoherentTerm((-alpha, beta), (0, 0), s * cmath.exp(1j * math.pi / 4)),
        ),
        2,
        normalized=True,
    )


def mz_output(params: SchemeParams) -> AnalyticState:
    """Interferometer output obtained by propagating ``|alpha>|beta>`` term by term."""
    state = AnalyticState.coherent(params.alpha, params.beta)
    state = oracle.beamsplitter_coherent(state, params.theta, params.phi, (0, 1))
    state = oracle.kerr_half_pi(state, 0)
    return oracle.beamsplitter_coherent(state, params.theta, params.phi, (0, 1))


def _check_outcome(outcome) -> tuple[int, int]:
    outcome = tuple(int(n) for n in outcome)
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be one of {OUTCOMES}, got {outcome}")
    return outcome


def raw_branch(params: SchemeParams, outcome) -> AnalyticState:
    """Unnormalized signal-mode branch ``(a^dag)^x (b^dag)^y`` applied to the ECS.

    The gain prefactor ``g^(x+y)`` is *not* included; see :func:`branch_weight`.
    """
    x, y = _check_outcome(outcome)
    state = mz_output(params)
    if x:
        state = state.add_photon(0)
    if y:
        state = state.add_photon(1)
    return state


def expected_branch(params: SchemeParams, outcome) -> AnalyticState:
    """Normalized conditional signal state for idler clicks ``outcome = (a_i, b_i)``."""
    return raw_branch(params, outcome).normalize()


def branch_weight(params: SchemeParams, outcome) -> float:
    """First-order relative weight ``g^(2(x+y)) ||(a^dag)^x (b^dag)^y ECS||^2``."""
    x, y = _check_outcome(outcome)
    return params.g ** (2 * (x + y)) * oracle.norm_squared(raw_branch(params, outcome))


# -- hybrid-state idealization -----------------------------------------------


def coherent_surrogate(alpha: complex) -> complex:
    """Coherent amplitude closest in fidelity to the photon-added state ``a^dag|alpha>``.

    Maximizing ``|<beta|a^dag|alpha>|^2 = |beta|^2 exp(-|beta - alpha|^2)`` puts
    ``beta`` along ``alpha`` with modulus ``(|alpha| + sqrt(|alpha|^2 + 4)) / 2``.
    """
    r = abs(alpha)
    if r == 0.0:
        raise ValueError("a^dag|0> = |1> has no coherent surrogate")
    return alpha / r * (r + math.sqrt(r * r + 4.0)) / 2.0


VACUUM_AMPLITUDE = 1e-9


def _ideal_factor(x: complex, m: int) -> CoherentTerm:
    if abs(x) < VACUUM_AMPLITUDE:
        # interferometer round-off leaves ~1e-16 where the amplitude is exactly 0
        x = 0.0
    if m == 0 or x == 0:
        return CoherentTerm((x,), (m,))
    return CoherentTerm((coherent_surrogate(x),), (0,))


@dataclass(frozen=True)
class HybridIdealization:
    """Two-term branch versus its ``|1>|x'> + e^{i omega}|x''>|1~>`` idealization."""

    exact: AnalyticState
    ideal: AnalyticState
    omega: float
    fidelity: float
    weights: tuple[float, float] = field(default=(0.0, 0.0))


def idealize_hybrid(branch: AnalyticState) -> HybridIdealization:
    """Replace each photon-added coherent factor by its best coherent surrogate and
    give both products equal weight, with the relative phase ``omega`` chosen to
    maximize the overlap with ``branch``.

    ``weights`` are the squared magnitudes of the two exact terms, normalized to
    sum to one; an equal-weight idealization cannot exceed
    ``(sqrt(w1) + sqrt(w2))^2 / 2`` fidelity when the terms are nearly orthogonal.
    """
    if len(branch.terms) != 2 or branch.mode_count != 2:
        raise ValueError("idealization needs a two-term, two-mode state")
    products = []
    for t in branch.terms:
        a = _ideal_factor(t.amplitudes[0], t.adds[0])
        b = _ideal_factor(t.amplitudes[1], t.adds[1])
        term = CoherentTerm(a.amplitudes + b.amplitudes, a.adds + b.adds)
        products.append(AnalyticState((term,), 2).normalize())
    o1, o2 = (oracle.inner(p, branch) for p in products)
    omega = cmath.phase(o2) - cmath.phase(o1)
    omega = math.remainder(omega, 2 * math.pi)
    ideal = (products[0] + cmath.exp(1j * omega) * products[1]).normalize()
    w = [abs(t.coefficient) ** 2 * oracle.term_overlap(t, t).real for t in branch.terms]
    total = sum(w)
    return HybridIdealization(
        branch, ideal, omega, oracle.fidelity_analytic(ideal, branch), (w[0] / total, w[1] / total)
    )


def hybrid_branch(alpha: complex, outcome=(1, 0)) -> AnalyticState:
    """Normalized branch of the ``beta = 0`` pipeline."""
    return expected_branch(SchemeParams(alpha, 0.0, 0.0), outcome)


# -- type-I reference and comparison -------------------------------------------


def cat(alpha: complex, parity: int) -> AnalyticState:
    """Normalized even (``parity=0``) or odd (``parity=1``) cat ``|alpha> +- |-alpha>``."""
    sign = -1.0 if parity else 1.0
    state = AnalyticState.coherent(alpha) + sign * AnalyticState.coherent(-alpha)
    return state.normalize()


def build_type1_hes(alpha: complex, sign: int = +1) -> AnalyticState:
    """``xi (|up>|alpha>_odd +- |down>|alpha>_even)`` with ``|up>=|0>``, ``|down>=|1>``."""
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("the odd cat is undefined at alpha = 0")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    up = AnalyticState.fock01(0).tensor(cat(alpha, 1))
    down = AnalyticState.fock01(1).tensor(cat(alpha, 0))
    return (up + float(sign) * down).normalize()


def build_type2_hes(alpha: complex, omega: float = 0.0, tilde: int = 1) -> AnalyticState:
    """``|1>|alpha> + e^{i omega}|alpha>|tilde>`` normalized, ``tilde`` in {0, 1}."""
    alpha = complex(alpha)
    first = AnalyticState.fock01(1).tensor(AnalyticState.coherent(alpha))
    second = AnalyticState.coherent(alpha).tensor(AnalyticState.fock01(tilde))
    return (first + cmath.exp(1j * omega) * second).normalize()


def branch_gram(kets) -> np.ndarray:
    """Gram matrix of normalized single-mode states."""
    kets = [k.normalize() for k in kets]
    return np.array([[oracle.inner(x, y) for y in kets] for x in kets])


@dataclass(frozen=True)
class HesComparison:
    type2_state: AnalyticState
    type1_state: AnalyticState
    overlap_diagnostics: dict
    entropies: tuple[float, float]
    omega: float


def compare_hes(params: SchemeParams, omega: float | None = None, tilde: int = 1) -> HesComparison:
    """Contrast the ``beta = 0`` type-II state with the spin/parity type-I state.

    ``omega`` defaults to the phase of the idealized two-click branch.
    ``overlap_diagnostics`` maps each state type to one 2x2 branch Gram matrix per
    mode; the type-I parity kets are orthogonal, the type-II ones are not.
    """
    alpha = params.alpha
    if omega is None:
        omega = idealize_hybrid(hybrid_branch(alpha, (1, 1))).omega
    type2 = build_type2_hes(alpha, omega, tilde)
    type1 = build_type1_hes(alpha, +1)
    one, coh = AnalyticState.fock01(1), AnalyticState.coherent(alpha)
    diagnostics = {
        "type2": (branch_gram([one, coh]), branch_gram([coh, AnalyticState.fock01(tilde)])),
        "type1": (
            branch_gram([AnalyticState.fock01(0), AnalyticState.fock01(1)]),
            branch_gram([cat(alpha, 1), cat(alpha, 0)]),
        ),
    }
    s2 = oracle.entanglement_entropy(oracle.schmidt_two_term(type2, (0,)))
    # four terms: route through the dense path
    s1 = metrics.entanglement_entropy(oracle.to_fock(type1), (0,))
    return HesComparison(type2, type1, diagnostics, (s2, s1), omega)


# -- simulation versus expectation ----------------------------------------------


@dataclass(frozen=True)
class BranchRecord:
    outcome: tuple[int, int]
    probability: float
    weight: float
    expected_weight: float
    fidelity: float | None
    phase: float | None
    entropy: float | None
    entropy_oracle: float | None
    log_negativity: float | None
    tail_mass: float | None
    empty: bool = False


def compare_branches(params: SchemeParams, branches, cutoff: int) -> list[BranchRecord]:
    """Pair simulated branches with their analytic expectations, in ``OUTCOMES`` order."""
    by_outcome = {(b.outcome["a_i"], b.outcome["b_i"]): b for b in branches}
    records = []
    for outcome in OUTCOMES:
        expected_w = branch_weight(params, outcome)
        sim = by_outcome.get(outcome)
        if sim is None:
            records.append(BranchRecord(outcome, 0.0, 0.0, expected_w, None, None, None, None, None, None, True))
            continue
        expected = expected_branch(params, outcome)
        target = oracle.to_fock(expected, cutoff)
        overlap = target.inner(sim.state)
        fid = metrics.fidelity_fock(target, sim.state)
        records.append(
            BranchRecord(
                outcome,
                sim.probability,
                sim.weight,
                expected_w,
                fid,
                cmath.phase(overlap),
                metrics.entanglement_entropy(sim.state, (0,)),
                oracle.entanglement_entropy(oracle.schmidt_two_term(expected, (0,))),
                metrics.log_negativity(sim.state, (0,)),
                sim.state.tail_mass(),
            )
        )
    return records


def simulate(params: SchemeParams, cutoff: int | None = None) -> tuple[list[BranchRecord], int]:
    """Run the pipeline numerically and compare each branch with the oracle."""
    circuit = build_paper_circuit(params)
    if cutoff is None:
        cutoff = default_circuit_cutoff(circuit)
    return compare_branches(params, run_circuit(circuit, cutoff), cutoff), cutoff
