"""Exact coherent-state algebra used as a truncation-free reference.

A state is a finite sum of terms ``c * prod_k (a_k^dag)^{m_k} |alpha_k>`` with
``m_k`` in {0, 1}. The photon-added kets are *unnormalized*: ``a^dag|alpha>`` has
squared norm ``1 + |alpha|^2``. All inner products reduce to the four closed forms
in :func:`overlap_single_mode`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    DEFAULT_MAX_TAIL,
    MultiModeState,
    TruncationError,
    coherent_amplitudes,
    coherent_tail,
    default_cutoff,
)

@dataclass(frozen=True)
class CoherentTerm:
    """``coefficient * prod_k (a^dag)^{adds[k]} |amplitudes[k]>``."""

    amplitudes: tuple[complex, ...]
    adds: tuple[int, ...]
    coefficient: complex = 1.0

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        adds = tuple(int(m) for m in self.adds)
        if len(amps) != len(adds):
            raise ValueError("one photon-addition count per mode is required")
        if any(m not in (0, 1) for m in adds):
            raise ValueError("only single photon addition (m in {0, 1}) is supported")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "adds", adds)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def mode_count(self) -> int:
        return len(self.amplitudes)

    def scaled(self, factor: complex) -> CoherentTerm:
        return CoherentTerm(self.amplitudes, self.adds, self.coefficient * factor)

    def factor(self, modes) -> CoherentTerm:
        """The unit-coefficient product over ``modes`` only."""
        return CoherentTerm(
            tuple(self.amplitudes[k] for k in modes), tuple(self.adds[k] for k in modes)
        )


@dataclass(frozen=True)
class AnalyticState:
    terms: tuple[CoherentTerm, ...]
    mode_count: int
    normalized: bool = False

    def __post_init__(self):
        terms = tuple(self.terms)
        if any(t.mode_count != self.mode_count for t in terms):
            raise ValueError("every term must span the same modes")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def coherent(cls, *amplitudes: complex) -> AnalyticState:
        """Product coherent state ``|a_1>|a_2>...``."""
        return cls((CoherentTerm(amplitudes, (0,) * len(amplitudes)),), len(amplitudes), True)

    @classmethod
    def fock01(cls, n: int) -> AnalyticState:
        """Single-mode ``|0>`` or ``|1>``, written as ``(a^dag)^n |0>``."""
        if n not in (0, 1):
            raise ValueError("only |0> and |1> are representable")
        return cls((CoherentTerm((0.0,), (n,)),), 1, True)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=np.complex128)

    def __add__(self, other: AnalyticState) -> AnalyticState:
        if other.mode_count != self.mode_count:
            raise ValueError("mode count mismatch")
        return AnalyticState(self.terms + other.terms, self.mode_count)

    def __sub__(self, other: AnalyticState) -> AnalyticState:
        return self + (-1.0) * other

    def __rmul__(self, factor: complex) -> AnalyticState:
        return AnalyticState(tuple(t.scaled(factor) for t in self.terms), self.mode_count)

    def tensor(self, other: AnalyticState) -> AnalyticState:
        terms = tuple(
            CoherentTerm(a.amplitudes + b.amplitudes, a.adds + b.adds, a.coefficient * b.coefficient)
            for a in self.terms
            for b in other.terms
        )
        return AnalyticState(terms, self.mode_count + other.mode_count, self.normalized and other.normalized)

    def add_photon(self, mode: int) -> AnalyticState:
        """Apply ``a^dag`` to ``mode`` (unnormalized, as the operator acts)."""
        new = []
        for t in self.terms:
            if t.adds[mode]:
                raise ValueError("a second photon addition on one mode is not supported")
            adds = list(t.adds)
            adds[mode] = 1
            new.append(CoherentTerm(t.amplitudes, tuple(adds), t.coefficient))
        return AnalyticState(tuple(new), self.mode_count)

    def normalize(self) -> AnalyticState:
        n = norm(self)
        out = (1.0 / n) * self
        return AnalyticState(out.terms, self.mode_count, True)


def overlap_single_mode(alpha: complex, m_a: int, beta: complex, m_b: int) -> complex:
    """``<alpha| a^{m_a} (a^dag)^{m_b} |beta>`` for ``m_a, m_b`` in {0, 1}."""
    alpha, beta = complex(alpha), complex(beta)
    base = cmath.exp(alpha.conjugate() * beta - (abs(alpha) ** 2 + abs(beta) ** 2) / 2)
    if (m_a, m_b) == (0, 0):
        return base
    if (m_a, m_b) == (0, 1):
        return alpha.conjugate() * base
    if (m_a, m_b) == (1, 0):
        return beta * base
    if (m_a, m_b) == (1, 1):
        return (1.0 + alpha.conjugate() * beta) * base
    raise ValueError("photon-addition counts must be 0 or 1")


def term_overlap(a: CoherentTerm, b: CoherentTerm) -> complex:
    """``<a|b>`` ignoring coefficients."""
    out = 1.0 + 0.0j
    for x, ma, y, mb in zip(a.amplitudes, a.adds, b.amplitudes, b.adds):
        out *= overlap_single_mode(x, ma, y, mb)
    return out


def gram_matrix(terms) -> np.ndarray:
    """``G[k, l] = <term_k|term_l>`` (coefficients excluded)."""
    terms = list(terms)
    n = len(terms)
    gram = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        gram[k, k] = term_overlap(terms[k], terms[k])
        for l in range(k + 1, n):
            gram[k, l] = term_overlap(terms[k], terms[l])
            gram[l, k] = gram[k, l].conjugate()
    return gram


def inner(a: AnalyticState, b: AnalyticState) -> complex:
    if a.mode_count != b.mode_count:
        raise ValueError("mode count mismatch")
    total = 0.0 + 0.0j
    for s in a.terms:
        for t in b.terms:
            total += s.coefficient.conjugate() * t.coefficient * term_overlap(s, t)
    return complex(total)


def norm_squared(state: AnalyticState) -> float:
    c = state.coefficients
    return float(np.vdot(c, gram_matrix(state.terms) @ c).real)


def norm(state: AnalyticState) -> float:
    n2 = norm_squared(state)
    if n2 <= 0.0:
        raise ValueError("state has zero norm")
    return math.sqrt(n2)


def fidelity_analytic(a: AnalyticState, b: AnalyticState) -> float:
    """``|<a|b>|^2 / (||a||^2 ||b||^2)``."""
    na, nb = norm_squared(a), norm_squared(b)
    if na <= 0.0 or nb <= 0.0:
        raise ValueError("fidelity of a zero-norm state")
    return abs(inner(a, b)) ** 2 / (na * nb)


def max_amplitude(state: AnalyticState) -> float:
    return max((abs(x) for t in state.terms for x in t.amplitudes), default=0.0)


def _term_vector(alpha: complex, adds: int, cutoff: int) -> np.ndarray:
    vec = coherent_amplitudes(alpha, cutoff)
    if adds:
        raised = np.zeros(cutoff + 1, dtype=np.complex128)
        raised[1:] = vec[: cutoff] * np.sqrt(np.arange(1, cutoff + 1))
        return raised
    return vec


def to_fock(
    state: AnalyticState, cutoff: int | None = None, max_tail: float = DEFAULT_MAX_TAIL
) -> MultiModeState:
    """Expand every term in the truncated Fock basis and sum.

    Raises:
        TruncationError: some coherent amplitude loses more than ``max_tail``
            probability beyond ``cutoff``.
    """
    if cutoff is None:
        cutoff = default_cutoff(max_amplitude(state) + 1.0)
    worst = max(
        (coherent_tail(x, max(cutoff - 1, 0)) for t in state.terms for x in t.amplitudes),
        default=0.0,
    )
    if worst > max_tail:
        raise TruncationError(
            f"cutoff {cutoff} too small for amplitude {max_amplitude(state):.4g}", tail_mass=worst
        )
    amps = np.zeros((cutoff + 1,) * state.mode_count, dtype=np.complex128)
    for t in state.terms:
        prod = np.array(t.coefficient, dtype=np.complex128)
        for x, m in zip(t.amplitudes, t.adds):
            prod = np.multiply.outer(prod, _term_vector(x, m, cutoff))
        amps += prod
    return MultiModeState(amps, cutoff, normalized=state.normalized)


# -- two-party entanglement from Gram matrices -------------------------------


def schmidt_weights(state: AnalyticState, split) -> np.ndarray:
    """Schmidt weights of ``state`` across ``split`` versus the remaining modes.

    With ``|psi> = sum_k c_k |A_k>|B_k>`` the reduced state on ``A`` is
    ``sum_kl c_k conj(c_l) <B_l|B_k> |A_k><A_l|``; its nonzero spectrum equals that of
    ``K @ G_A`` with ``K[k, l] = c_k conj(c_l) G_B[l, k]``. Returned weights are sorted
    in descending order and sum to one.
    """
    side_a = tuple(sorted(set(split)))
    if not side_a or any(not 0 <= m < state.mode_count for m in side_a):
        raise ValueError(f"invalid bipartition {split!r}")
    side_b = tuple(m for m in range(state.mode_count) if m not in side_a)
    gram_a = gram_matrix(t.factor(side_a) for t in state.terms)
    gram_b = gram_matrix(t.factor(side_b) for t in state.terms)
    c = state.coefficients
    kmat = np.outer(c, c.conj()) * gram_b.T
    lam = np.linalg.eigvals(kmat @ gram_a).real
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if total <= 0.0:
        raise ValueError("state has zero norm")
    return np.sort(lam / total)[::-1]


def schmidt_two_term(state: AnalyticState, split) -> tuple[float, float]:
    """Exact Schmidt weights ``(l1, l2)`` of a two-term state across ``split``."""
    if len(state.terms) != 2:
        raise ValueError(
            f"schmidt_two_term needs exactly 2 terms, got {len(state.terms)}; use the numeric path"
        )
    lam = schmidt_weights(state, split)
    return float(lam[0]), float(lam[1])


def entanglement_entropy(weights) -> float:
    """``-sum w log2 w`` in ebits."""
    w = np.asarray(weights, dtype=float)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum()) + 0.0


# -- devices on photon-addition-free terms ----------------------------------


def _require_plain(state: AnalyticState, modes):
    if any(t.adds[m] for t in state.terms for m in modes):
        raise ValueError("closed-form device maps need terms without photon additions")


def beamsplitter_coherent(state: AnalyticState, theta: float, phi: float, modes) -> AnalyticState:
    """Map ``|x>|y> -> |x cos t + y e^{-i p} sin t>|-x e^{i p} sin t + y cos t>`` per term."""
    i, j = modes
    _require_plain(state, (i, j))
    c, s = math.cos(theta), math.sin(theta)
    down, up = cmath.exp(-1j * phi), cmath.exp(1j * phi)
    terms = []
    for t in state.terms:
        amps = list(t.amplitudes)
        x, y = amps[i], amps[j]
        amps[i] = x * c + y * down * s
        amps[j] = -x * up * s + y * c
        terms.append(CoherentTerm(tuple(amps), t.adds, t.coefficient))
    return AnalyticState(tuple(terms), state.mode_count, state.normalized)


def kerr_half_pi(state: AnalyticState, mode: int) -> AnalyticState:
    """``exp(-i (pi/2) n^2)`` on ``mode``: ``|x> -> (e^{-i pi/4}|x> + e^{i pi/4}|-x>)/sqrt 2``."""
    _require_plain(state, (mode,))
    plus, minus = cmath.exp(-1j * math.pi / 4) / math.sqrt(2), cmath.exp(1j * math.pi / 4) / math.sqrt(2)
    terms = []
    for t in state.terms:
        flipped = list(t.amplitudes)
        flipped[mode] = -flipped[mode]
        terms.append(t.scaled(plus))
        terms.append(CoherentTerm(tuple(flipped), t.adds, t.coefficient * minus))
    return AnalyticState(tuple(terms), state.mode_count, state.normalized)
