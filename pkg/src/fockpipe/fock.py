"""Truncated multi-mode Fock-space states and the device operations acting on them.

Every state is a dense complex tensor with one axis per mode; axis ``k`` runs over
photon numbers ``0..cutoff`` of mode ``k``. Operations are pure: they never modify
the input tensor.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc

DEFAULT_NORM_TOLERANCE = 1e-10
DEFAULT_MAX_TAIL = 1e-3
FIRST_ORDER_G_LIMIT = 0.3
FIRST_ORDER_G_WARN = 0.1
EMPTY_BRANCH_THRESHOLD = 1e-30


class TruncationError(ValueError):
    """The photon-number cutoff is too small for the requested operation."""

    def __init__(self, message: str, tail_mass: float | None = None):
        super().__init__(message)
        self.tail_mass = tail_mass


def default_cutoff(alpha_max: float) -> int:
    """Cutoff ``ceil(a^2 + 6a + 10)`` for a largest coherent amplitude ``a``."""
    a = abs(alpha_max)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


@dataclass(frozen=True, eq=False)
class MultiModeState:
    """Pure state on ``mode_count`` modes, each truncated at ``cutoff`` photons.

    ``normalized`` is False for intermediate states such as the first-order
    squeezer output, whose norm carries branch weights.
    """

    amplitudes: np.ndarray
    cutoff: int
    normalized: bool = True
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if any(n != self.cutoff + 1 for n in amps.shape):
            raise ValueError(
                f"amplitude shape {amps.shape} does not match cutoff {self.cutoff}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @classmethod
    def vacuum(cls, mode_count: int, cutoff: int) -> MultiModeState:
        return cls.fock_state([0] * mode_count, cutoff)

    @classmethod
    def fock_state(cls, photons, cutoff: int) -> MultiModeState:
        photons = tuple(int(n) for n in photons)
        if any(n < 0 or n > cutoff for n in photons):
            raise TruncationError(f"Fock state {photons} exceeds cutoff {cutoff}")
        amps = np.zeros((cutoff + 1,) * len(photons), dtype=np.complex128)
        amps[photons] = 1.0
        return cls(amps, cutoff)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tail_mass(self, mode: int | None = None) -> float:
        """Probability weight sitting on the truncation boundary.

        With ``mode=None`` this sums over every basis index where *any* mode is at
        the cutoff; otherwise only the given mode is inspected. The value is
        relative to the state's squared norm.
        """
        total = self.norm_squared()
        if total == 0.0 or self.mode_count == 0:
            return 0.0
        probs = np.abs(self.amplitudes) ** 2
        if mode is not None:
            edge = np.take(probs, self.cutoff, axis=mode).sum()
        else:
            inner = probs[(slice(0, self.cutoff),) * self.mode_count].sum()
            edge = probs.sum() - inner
        return max(float(edge / total), 0.0)

    def normalize(self) -> MultiModeState:
        n2 = self.norm_squared()
        if n2 == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return replace(self, amplitudes=self.amplitudes / math.sqrt(n2), normalized=True)

    def inner(self, other: MultiModeState) -> complex:
        """<self|other> without normalization."""
        _check_compatible(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: MultiModeState) -> MultiModeState:
        if self.cutoff != other.cutoff:
            raise ValueError("tensor product requires equal cutoffs")
        amps = np.multiply.outer(self.amplitudes, other.amplitudes)
        return MultiModeState(
            amps,
            self.cutoff,
            normalized=self.normalized and other.normalized,
            norm_tolerance=min(self.norm_tolerance, other.norm_tolerance),
            warnings=self.warnings + other.warnings,
        )

    def with_amplitudes(self, amplitudes, **changes) -> MultiModeState:
        return replace(self, amplitudes=amplitudes, **changes)


def _check_compatible(a: MultiModeState, b: MultiModeState):
    if a.amplitudes.shape != b.amplitudes.shape:
        raise ValueError(
            f"dimension mismatch: {a.amplitudes.shape} vs {b.amplitudes.shape}"
        )


def _check_mode(state: MultiModeState, mode: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < state.mode_count:
        raise IndexError(f"mode {mode} out of range for {state.mode_count} modes")
    return int(mode)


def _check_pair(state: MultiModeState, modes) -> tuple[int, int]:
    if len(modes) != 2:
        raise ValueError("two-mode operation needs exactly two modes")
    i, j = (_check_mode(state, m) for m in modes)
    if i == j:
        raise ValueError("two-mode operation needs distinct modes")
    return i, j


# -- single mode preparation ------------------------------------------------


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock coefficients ``exp(-|a|^2/2) a^n / sqrt(n!)`` for ``n = 0..cutoff``."""
    out = np.empty(cutoff + 1, dtype=np.complex128)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def coherent_tail(alpha: complex, cutoff: int) -> float:
    """Poisson probability of more than ``cutoff`` photons in ``|alpha>``."""
    lam = abs(alpha) ** 2
    if lam == 0.0:
        return 0.0
    return float(gammainc(cutoff + 1, lam))


def coherent_fock(
    alpha: complex,
    cutoff: int,
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> MultiModeState:
    """Single-mode coherent state ``|alpha>`` truncated at ``cutoff``.

    Raises:
        ValueError: ``alpha`` is not finite or ``cutoff`` is negative.
        TruncationError: the probability lost beyond the cutoff exceeds ``max_tail``.
    """
    alpha = complex(alpha)
    if not cmath.isfinite(alpha):
        raise ValueError(f"coherent amplitude must be finite, got {alpha}")
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    lost = coherent_tail(alpha, cutoff)
    if lost > max_tail:
        raise TruncationError(
            f"cutoff {cutoff} loses probability {lost:.3g} for |alpha|={abs(alpha):.4g}",
            tail_mass=lost,
        )
    notes = ()
    if lost >= norm_tolerance:
        notes = (f"truncation: probability {lost:.3g} lost beyond cutoff {cutoff}",)
    return MultiModeState(
        coherent_amplitudes(alpha, cutoff),
        cutoff,
        normalized=lost < norm_tolerance,
        norm_tolerance=norm_tolerance,
        warnings=notes,
    )


# -- photon-level operations ------------------------------------------------


def _raise_along(amps: np.ndarray, axis: int) -> np.ndarray:
    """Apply a^dagger on ``axis``, dropping the top level."""
    moved = np.moveaxis(amps, axis, 0)
    out = np.zeros_like(moved)
    sq = np.sqrt(np.arange(1, moved.shape[0]))
    out[1:] = moved[:-1] * sq.reshape((-1,) + (1,) * (moved.ndim - 1))
    return np.moveaxis(out, 0, axis)


def _guard_overflow(state: MultiModeState, mode: int, what: str):
    edge = state.tail_mass(mode)
    if edge > state.norm_tolerance:
        raise TruncationError(
            f"{what}: mode {mode} holds weight {edge:.3g} at the cutoff {state.cutoff}",
            tail_mass=edge,
        )


def photon_add(state: MultiModeState, mode: int) -> tuple[MultiModeState, float]:
    """Apply a^dagger to ``mode`` and renormalize.

    Returns the normalized state and the norm ``||a^dagger psi||`` before
    renormalization, so that ``norm_factor**2 == <psi|a a^dagger|psi>``.
    """
    mode = _check_mode(state, mode)
    _guard_overflow(state, mode, "photon_add")
    raised = _raise_along(state.amplitudes, mode)
    norm_factor = math.sqrt(float(np.vdot(raised, raised).real))
    if norm_factor == 0.0:
        raise ValueError("photon_add on the zero vector")
    return state.with_amplitudes(raised / norm_factor, normalized=True), norm_factor


def _apply_blocks(amps: np.ndarray, i: int, j: int, blocks) -> np.ndarray:
    moved = np.moveaxis(amps, (i, j), (0, 1))
    d = moved.shape[0]
    flat = moved.reshape(d, d, -1)
    out = np.empty_like(flat)
    for ni, nj, unitary in blocks:
        out[ni, nj, :] = unitary @ flat[ni, nj, :]
    return np.moveaxis(out.reshape(moved.shape), (0, 1), (i, j))


@lru_cache(maxsize=64)
def beamsplitter_blocks(cutoff: int, theta: float, phi: float):
    """Per-sector exponentials of ``theta (e^{-i phi} a^dag b - e^{i phi} a b^dag)``.

    The generator conserves ``N = n_a + n_b``, so each sector is a small dense
    block indexed by ``n_a``. Returns ``(n_a, n_b, U)`` triples.
    """
    blocks = []
    up = theta * cmath.exp(-1j * phi)
    down = theta * cmath.exp(1j * phi)
    for total in range(2 * cutoff + 1):
        lo, hi = max(0, total - cutoff), min(total, cutoff)
        na = np.arange(lo, hi + 1)
        nb = total - na
        size = len(na)
        gen = np.zeros((size, size), dtype=np.complex128)
        for k in range(size - 1):
            # |n, m> -> |n+1, m-1> with amplitude sqrt((n+1) m)
            amp = math.sqrt((na[k] + 1) * nb[k])
            gen[k + 1, k] = up * amp
            gen[k, k + 1] = -down * amp
        unitary = expm(gen) if size > 1 else np.ones((1, 1), dtype=np.complex128)
        blocks.append((na, nb, unitary))
    return tuple(blocks)


def apply_beamsplitter(
    state: MultiModeState, theta: float, phi: float, modes: tuple[int, int]
) -> MultiModeState:
    i, j = _check_pair(state, modes)
    blocks = beamsplitter_blocks(state.cutoff, float(theta), float(phi))
    return state.with_amplitudes(_apply_blocks(state.amplitudes, i, j, blocks))


def apply_kerr(state: MultiModeState, chi: float, mode: int) -> MultiModeState:
    """Diagonal self-phase ``exp(-i chi n^2)`` on ``mode``."""
    mode = _check_mode(state, mode)
    n = np.arange(state.dim)
    phase = np.exp(-1j * chi * (n * n).astype(float))
    shape = [1] * state.mode_count
    shape[mode] = state.dim
    return state.with_amplitudes(state.amplitudes * phase.reshape(shape))


class SqueezerOrder(str, enum.Enum):
    FIRST = "first"
    EXACT = "exact"


@lru_cache(maxsize=64)
def squeezer_blocks(cutoff: int, g: float):
    """Per-sector exponentials of ``g (a^dag b^dag - a b)``; sectors fix ``n_a - n_b``."""
    blocks = []
    for diff in range(-cutoff, cutoff + 1):
        nb = np.arange(max(0, -diff), min(cutoff, cutoff - diff) + 1)
        na = nb + diff
        size = len(nb)
        gen = np.zeros((size, size))
        for k in range(size - 1):
            amp = g * math.sqrt((na[k] + 1) * (nb[k] + 1))
            gen[k + 1, k] = amp
            gen[k, k + 1] = -amp
        unitary = expm(gen) if size > 1 else np.ones((1, 1))
        blocks.append((na, nb, unitary.astype(np.complex128)))
    return tuple(blocks)


def apply_tmsq(
    state: MultiModeState,
    g: float,
    modes: tuple[int, int],
    order: SqueezerOrder | str = SqueezerOrder.FIRST,
    first_order_limit: float = FIRST_ORDER_G_LIMIT,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> MultiModeState:
    """Two-mode squeezer ``exp(g (a_s^dag a_i^dag - a_s a_i))`` on ``(signal, idler)``.

    ``FIRST`` returns the unnormalized ``(1 + g a_s^dag a_i^dag)|psi>``; ``EXACT``
    exponentiates the truncated generator and reports the boundary weight of the
    result as a warning.
    """
    order = SqueezerOrder(order)
    s, i = _check_pair(state, modes)
    g = float(g)
    if not math.isfinite(g):
        raise ValueError("squeezer gain must be finite")
    if order is SqueezerOrder.FIRST:
        if abs(g) >= first_order_limit:
            raise ValueError(
                f"|g|={abs(g):g} too large for the first-order squeezer (limit {first_order_limit:g})"
            )
        if abs(g) > FIRST_ORDER_G_WARN:
            warnings.warn(
                f"first-order squeezer at |g|={abs(g):g}: O(g^2) terms are not negligible",
                stacklevel=2,
            )
        if g == 0.0:
            return state
        _guard_overflow(state, s, "tmsq")
        _guard_overflow(state, i, "tmsq")
        pair = _raise_along(_raise_along(state.amplitudes, s), i)
        return state.with_amplitudes(state.amplitudes + g * pair, normalized=False)

    blocks = squeezer_blocks(state.cutoff, g)
    out = state.with_amplitudes(_apply_blocks(state.amplitudes, s, i, blocks))
    loss = max(out.tail_mass(s), out.tail_mass(i))
    if loss > max_tail:
        raise TruncationError(
            f"exact squeezer at g={g:g} pushes weight {loss:.3g} to cutoff {state.cutoff}",
            tail_mass=loss,
        )
    if loss >= state.norm_tolerance:
        out = replace(out, warnings=out.warnings + (f"truncation: squeezer boundary weight {loss:.3g}",))
    if state.normalized:
        out = out.normalize()
    return out


# -- measurement ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BranchResult:
    """One detector-outcome pattern and the state conditioned on it.

    ``probability`` is the projected weight divided by the input weight;
    ``weight`` is the raw squared norm of the projected vector. When the input was
    unnormalized (``relative`` is True) the weight is the meaningful quantity.
    A zero-probability outcome has ``state is None``.
    """

    outcome: dict
    probability: float
    weight: float
    relative: bool = False
    state: MultiModeState | None = None
    modes: tuple = ()

    @property
    def empty(self) -> bool:
        return self.state is None


def project(state: MultiModeState, pattern: dict[int, int]) -> tuple[np.ndarray, float]:
    """Project the modes in ``pattern`` onto the given photon numbers.

    Returns the unnormalized amplitudes of the surviving modes (in ascending mode
    order) and their squared norm.
    """
    index = [slice(None)] * state.mode_count
    for mode, n in pattern.items():
        mode = _check_mode(state, mode)
        if n < 0:
            raise ValueError("photon counts are non-negative")
        if n > state.cutoff:
            rest = state.mode_count - len(pattern)
            return np.zeros((state.dim,) * rest, dtype=np.complex128), 0.0
        index[mode] = int(n)
    sub = state.amplitudes[tuple(index)]
    return sub, float(np.vdot(sub, sub).real)


def postselect_many(state: MultiModeState, pattern: dict[int, int]) -> BranchResult:
    total = state.norm_squared()
    if total == 0.0:
        raise ValueError("cannot post-select the zero vector")
    sub, weight = project(state, pattern)
    survivors = tuple(m for m in range(state.mode_count) if m not in pattern)
    relative = not state.normalized
    if weight <= EMPTY_BRANCH_THRESHOLD * total:
        return BranchResult(dict(pattern), 0.0, 0.0, relative, None, survivors)
    cond = MultiModeState(
        sub / math.sqrt(weight),
        state.cutoff,
        normalized=True,
        norm_tolerance=state.norm_tolerance,
        warnings=state.warnings,
    )
    return BranchResult(dict(pattern), weight / total, weight, relative, cond, survivors)


def postselect(state: MultiModeState, mode: int, n_detected: int) -> BranchResult:
    """Condition ``mode`` on detecting ``n_detected`` photons and remove it."""
    return postselect_many(state, {mode: n_detected})


# -- operator dispatch ------------------------------------------------------


@dataclass(frozen=True)
class BeamSplitter:
    theta: float
    phi: float
    arity = 2


@dataclass(frozen=True)
class Kerr:
    chi: float
    arity = 1


@dataclass(frozen=True)
class TwoModeSqueezer:
    g: float
    order: SqueezerOrder = SqueezerOrder.FIRST
    arity = 2


@dataclass(frozen=True)
class PhotonAdd:
    arity = 1


OperatorSpec = BeamSplitter | Kerr | TwoModeSqueezer | PhotonAdd


def apply_operator(state: MultiModeState, op: OperatorSpec, modes) -> MultiModeState:
    modes = tuple(modes)
    if len(modes) != op.arity:
        raise ValueError(f"{type(op).__name__} acts on {op.arity} mode(s), got {len(modes)}")
    if isinstance(op, BeamSplitter):
        return apply_beamsplitter(state, op.theta, op.phi, modes)
    if isinstance(op, Kerr):
        return apply_kerr(state, op.chi, modes[0])
    if isinstance(op, TwoModeSqueezer):
        return apply_tmsq(state, op.g, modes, op.order)
    if isinstance(op, PhotonAdd):
        return photon_add(state, modes[0])[0]
    raise TypeError(f"unknown operator {op!r}")
