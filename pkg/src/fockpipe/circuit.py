"""Declarative circuits: named input modes, an ordered element list, detections."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .fock import (
    BranchResult,
    MultiModeState,
    OperatorSpec,
    PhotonAdd,
    SqueezerOrder,
    TruncationError,
    TwoModeSqueezer,
)

MAX_TENSOR_ELEMENTS = 1 << 24


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Coherent:
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class Fock:
    n: int


InitialState = Vacuum | Coherent | Fock


@dataclass(frozen=True)
class ModeDecl:
    name: str
    initial: InitialState = Vacuum()


@dataclass(frozen=True)
class Element:
    op: OperatorSpec
    modes: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Detection:
    mode: str
    outcomes: tuple[int, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Circuit:
    modes: tuple[ModeDecl, ...] = ()
    elements: tuple[Element, ...] = ()
    detections: tuple[Detection, ...] = ()

    @property
    def mode_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.modes)

    def index(self, name: str) -> int:
        return self.mode_names.index(name)

    def validate(self) -> Circuit:
        """Check cross references; raises ``ValueError`` on the first problem."""
        names = self.mode_names
        if len(set(names)) != len(names):
            raise ValueError("duplicate mode name")
        for el in self.elements:
            unknown = [m for m in el.modes if m not in names]
            if unknown:
                raise ValueError(f"element references undeclared mode {unknown[0]!r}")
            if len(el.modes) != op_arity(el.op) or len(set(el.modes)) != len(el.modes):
                raise ValueError(f"bad mode list {el.modes} for {type(el.op).__name__}")
        seen = set()
        for det in self.detections:
            if det.mode not in names:
                raise ValueError(f"detection on undeclared mode {det.mode!r}")
            if det.mode in seen:
                raise ValueError(f"mode {det.mode!r} detected twice")
            if not det.outcomes or any(n < 0 for n in det.outcomes):
                raise ValueError("detection outcomes must be a non-empty set of counts")
            seen.add(det.mode)
        return self


def op_arity(op: OperatorSpec) -> int:
    return op.arity


class CircuitExecutionError(TruncationError):
    """A truncation guard tripped while applying element ``element_index``."""

    def __init__(self, message: str, element_index: int, tail_mass: float | None = None):
        super().__init__(message, tail_mass)
        self.element_index = element_index


def photon_budget(circuit: Circuit) -> float:
    """Upper estimate of the mean photon number any one mode can reach."""
    budget = 0.0
    for m in circuit.modes:
        if isinstance(m.initial, Coherent):
            budget += abs(m.initial.alpha) ** 2
        elif isinstance(m.initial, Fock):
            budget += m.initial.n
    for el in circuit.elements:
        if isinstance(el.op, PhotonAdd):
            budget += 1.0
        elif isinstance(el.op, TwoModeSqueezer):
            budget += 1.0 if el.op.order is SqueezerOrder.FIRST else 1.0 + 2.0 * math.sinh(abs(el.op.g)) ** 2 * (budget + 1.0)
    return budget


def default_circuit_cutoff(circuit: Circuit) -> int:
    # linear devices conserve total photon number, so sqrt(budget) bounds every
    # single-mode coherent amplitude along the way
    return fock.default_cutoff(math.sqrt(photon_budget(circuit)))


def initial_state(circuit: Circuit, cutoff: int) -> MultiModeState:
    state = MultiModeState(np.array(1.0 + 0.0j), cutoff)
    for decl in circuit.modes:
        init = decl.initial
        if isinstance(init, Coherent):
            single = fock.coherent_fock(init.alpha, cutoff)
        elif isinstance(init, Fock):
            single = MultiModeState.fock_state([init.n], cutoff)
        else:
            single = MultiModeState.vacuum(1, cutoff)
        state = state.tensor(single)
    return state


def evolve(circuit: Circuit, cutoff: int | None = None) -> MultiModeState:
    """Initial product state pushed through every element (no detection)."""
    circuit.validate()
    if cutoff is None:
        cutoff = default_circuit_cutoff(circuit)
    if (cutoff + 1) ** len(circuit.modes) > MAX_TENSOR_ELEMENTS:
        raise TruncationError(
            f"{len(circuit.modes)} modes at cutoff {cutoff} exceed the tensor size limit"
        )
    try:
        state = initial_state(circuit, cutoff)
    except TruncationError as exc:
        raise CircuitExecutionError(f"initial state: {exc}", -1, exc.tail_mass) from exc
    for k, el in enumerate(circuit.elements):
        targets = [circuit.index(name) for name in el.modes]
        try:
            state = fock.apply_operator(state, el.op, targets)
        except TruncationError as exc:
            raise CircuitExecutionError(
                f"element {k} (line {el.line}): {exc}", k, exc.tail_mass
            ) from exc
    return state


def enumerate_branches(circuit: Circuit, state: MultiModeState) -> list[BranchResult]:
    names = circuit.mode_names
    detected = [circuit.index(d.mode) for d in circuit.detections]
    survivors = tuple(n for k, n in enumerate(names) if k not in detected)
    branches = []
    for counts in itertools.product(*(d.outcomes for d in circuit.detections)):
        res = fock.postselect_many(state, dict(zip(detected, counts)))
        if res.empty:
            continue
        outcome = {d.mode: n for d, n in zip(circuit.detections, counts)}
        branches.append(
            BranchResult(outcome, res.probability, res.weight, res.relative, res.state, survivors)
        )
    branches.sort(key=lambda b: (-b.probability, tuple(b.outcome.values())))
    return branches


def run_circuit(circuit: Circuit, cutoff: int | None = None) -> list[BranchResult]:
    """Apply every element, then post-select on each declared outcome pattern.

    Empty branches are dropped; the rest are sorted by descending probability with
    ties broken by the outcome tuple. ``cutoff=None`` selects the default policy.
    """
    return enumerate_branches(circuit, evolve(circuit, cutoff))
