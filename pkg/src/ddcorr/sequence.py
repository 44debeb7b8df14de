"""Multi-block CPMG pulse timelines and their filter functions.

An l-dimensional decoupling sequence is l consecutive CPMG blocks, block i
having pulse half-interval tau_i (us) and pulse count N_i.  Within a block
the sensor is flipped at local times (2p - 1) * tau_i, p = 1..N_i, so pulses
are 2*tau_i apart with tau_i padding at both block edges.

The filter function F(omega, t) = omega * |integral_0^t f(t') e^{i omega t'} dt'|
measures how strongly the sequence's modulation function f (the +-1 square
wave toggling at each flip) picks up noise at omega; a block is resonant with
a transition when 2*tau = pi*(2c - 1)/omega, where F reaches 2N.

All filter integrals here are evaluated from exact per-segment antiderivatives
of e^{i omega t}, never by quadrature.  Filter phases are measured with t = 0
at the start of the whole timeline.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .spin_model import TargetCluster, all_transitions

# |cos(omega*t/(2N))| below this, the closed-form CPMG filter is evaluated
# through the generic segment sum instead (removable 0/0 point).
_CLOSED_FORM_SINGULAR_TOL = 1e-6

# Fraction of the on-resonance value 2N at which an off-target transition
# counts as contaminating a block.
_OVERLAP_FRACTION = 0.2

# A block targets a transition when 2*tau*omega/pi is within this distance
# of an odd integer.
_RESONANCE_RESIDUAL = 0.05


@dataclass(frozen=True)
class Block:
    """One CPMG block: pulses 2*tau apart, tau padding at the edges."""

    tau: float
    n_pulses: int

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"block tau must be > 0, got {self.tau}")
        if self.n_pulses != int(self.n_pulses) or self.n_pulses < 0:
            raise ValueError(f"n_pulses must be a nonnegative integer, got {self.n_pulses}")
        object.__setattr__(self, "n_pulses", int(self.n_pulses))

    @property
    def duration(self) -> float:
        return 2.0 * self.n_pulses * self.tau


@dataclass(frozen=True)
class SequenceSpec:
    """Ordered CPMG blocks; 1-3 blocks cover the supported cases."""

    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(
            b if isinstance(b, Block) else Block(*b) for b in self.blocks
        )
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("sequence needs at least one block")

    @property
    def total_time(self) -> float:
        return sum(b.duration for b in self.blocks)

    def with_block(self, index: int, *, tau=None, n_pulses=None) -> "SequenceSpec":
        """Copy with one block's tau and/or pulse count replaced."""
        blocks = list(self.blocks)
        old = blocks[index]
        blocks[index] = Block(
            old.tau if tau is None else tau,
            old.n_pulses if n_pulses is None else n_pulses,
        )
        return SequenceSpec(tuple(blocks))


@dataclass(frozen=True, eq=False)
class PulseTimeline:
    """Compiled absolute flip times (us) over [0, total_time]."""

    flip_times: np.ndarray
    total_time: float

    def __post_init__(self):
        flips = np.array(self.flip_times, dtype=float)
        flips.setflags(write=False)
        object.__setattr__(self, "flip_times", flips)
        if flips.size:
            if flips[0] <= 0:
                raise ValueError("first flip must come after t = 0")
            if np.any(np.diff(flips) <= 0):
                raise ValueError("flip times must be strictly ascending")
            if flips[-1] >= self.total_time:
                raise ValueError("last flip must come before total_time")
        elif self.total_time < 0:
            raise ValueError("total_time must be >= 0")

    @property
    def n_flips(self) -> int:
        return int(self.flip_times.size)


@dataclass(frozen=True)
class FilterResult:
    """Filter magnitude F (dimensionless, >= 0) and phase xi (rad)."""

    magnitude: float
    phase: float


def build_timeline(spec: SequenceSpec) -> PulseTimeline:
    """Compile a block sequence to absolute flip times.

    Block i's flips sit at (cumulative duration of earlier blocks)
    + (2p - 1) * tau_i for p = 1..N_i; zero-pulse blocks contribute nothing.
    """
    flips = []
    start = 0.0
    for block in spec.blocks:
        for p in range(1, block.n_pulses + 1):
            flips.append(start + (2 * p - 1) * block.tau)
        start += block.duration
    return PulseTimeline(np.array(flips), start)


def resonant_tau(omega: float, order: int = 1) -> float:
    """Half-interval putting a CPMG block on resonance: 2*tau = pi*(2c-1)/omega.

    Args:
        omega: transition frequency (rad/us), > 0.
        order: dip order c >= 1 (c = 1 is the principal dip).
    """
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if order < 1 or order != int(order):
        raise ValueError(f"order must be a positive integer, got {order}")
    return np.pi * (2 * order - 1) / (2.0 * omega)


def modulation(timeline: PulseTimeline, t: float) -> int:
    """Modulation function f(t): +1 before the first flip, toggling at each flip."""
    if not 0 <= t <= timeline.total_time:
        raise ValueError(f"t = {t} outside [0, {timeline.total_time}]")
    flipped = bisect.bisect_right(timeline.flip_times.tolist(), t)
    return -1 if flipped % 2 else 1


def _filter_integral(flip_times, total_time: float, omega: float) -> complex:
    """omega * integral_0^T f(t) e^{i omega t} dt, exactly, segment by segment."""
    bounds = np.concatenate([[0.0], flip_times, [total_time]])
    phases = np.exp(1j * omega * bounds)
    signs = np.where(np.arange(bounds.size - 1) % 2, -1.0, 1.0)
    # omega * s * (e^{i w b} - e^{i w a}) / (i w) summed over segments
    return -1j * np.sum(signs * (phases[1:] - phases[:-1]))


def filter_numeric(timeline: PulseTimeline, omega: float) -> FilterResult:
    """Filter magnitude and phase of an arbitrary timeline at frequency omega.

    Returns (F, xi) with F * e^{i xi} = omega * integral f(t) e^{i omega t} dt,
    the phase referenced to the timeline start.
    """
    if omega == 0:
        raise ValueError("filter undefined at omega = 0")
    z = _filter_integral(timeline.flip_times, timeline.total_time, omega)
    return FilterResult(float(abs(z)), float(np.angle(z)) if z != 0 else 0.0)


def filter_cpmg_closed(n_pulses: int, tau: float, omega: float) -> float:
    """Closed-form CPMG-N filter magnitude at the block's full duration 2*N*tau.

    Uses the parity-split product form; at the removable 0/0 points (where
    cos(omega*tau) vanishes, e.g. on resonance) it falls back to the exact
    segment sum, which has the finite limit 2N there.
    """
    if n_pulses < 1:
        raise ValueError(f"n_pulses must be >= 1, got {n_pulses}")
    if tau <= 0 or omega <= 0:
        raise ValueError("tau and omega must be > 0")
    t = 2.0 * n_pulses * tau
    half_angle = omega * t / (2.0 * n_pulses)  # = omega * tau
    if abs(np.cos(half_angle)) < _CLOSED_FORM_SINGULAR_TOL:
        block = build_timeline(SequenceSpec((Block(tau, n_pulses),)))
        return filter_numeric(block, omega).magnitude
    envelope = 4.0 * np.sin(omega * t / (4.0 * n_pulses)) ** 2
    if n_pulses % 2:
        comb = np.cos(omega * t / 2.0)
    else:
        comb = np.sin(omega * t / 2.0)
    return float(envelope * abs(comb / np.cos(half_angle)))


def filter_multiblock(spec: SequenceSpec, omega: float) -> FilterResult:
    """Coherent per-block composition of the sequence filter.

    Each block contributes its own filter amplitude rotated by the phase
    accumulated up to the block start, and sign-flipped when an odd number
    of pulses precede it; the result equals filter_numeric of the compiled
    timeline.
    """
    if omega == 0:
        raise ValueError("filter undefined at omega = 0")
    z = 0.0 + 0.0j
    start = 0.0
    sign = 1.0
    for block in spec.blocks:
        if block.n_pulses:
            local_flips = (2 * np.arange(1, block.n_pulses + 1) - 1) * block.tau
            z_block = _filter_integral(local_flips, block.duration, omega)
            z += sign * np.exp(1j * omega * start) * z_block
        start += block.duration
        sign *= (-1) ** block.n_pulses
    return FilterResult(float(abs(z)), float(np.angle(z)) if z != 0 else 0.0)


def lint_resonance_overlap(clusters, spec: SequenceSpec) -> list[str]:
    """Flag blocks whose filter also picks up transitions other than their target.

    A block targets the transition whose resonance condition it satisfies,
    2*tau*omega/pi within 0.05 of an odd integer; exact harmonic ties go to
    the lowest harmonic order.  Any other transition whose CPMG filter at
    the block's duration reaches 20% of the on-resonance value 2N
    (odd-harmonic hits, accidental near-resonances) produces a warning.
    """
    if isinstance(clusters, TargetCluster):
        clusters = [clusters]
    transitions = []
    for ci, cluster in enumerate(clusters):
        transitions.extend((ci, t) for t in all_transitions(cluster))
    warnings = []
    for bi, block in enumerate(spec.blocks):
        if block.n_pulses < 1 or not transitions:
            continue
        full = 2.0 * block.n_pulses
        hits = []
        for ci, t in transitions:
            x = 2.0 * block.tau * t.omega / np.pi
            order = max(round((x - 1.0) / 2.0), 0)
            residual = abs(x - (2 * order + 1))
            if residual <= _RESONANCE_RESIDUAL:
                hits.append((order, residual, ci, t))
        if not hits:
            continue  # block targets nothing; nothing to contaminate
        _, _, best_ci, best_t = min(hits, key=lambda h: h[:2])
        for ci, t in transitions:
            if ci == best_ci and t == best_t:
                continue
            f = filter_cpmg_closed(block.n_pulses, block.tau, t.omega)
            if f >= _OVERLAP_FRACTION * full:
                warnings.append(
                    f"block {bi} (tau = {block.tau:.6g} us) is resonant with "
                    f"cluster {best_ci} transition ({best_t.m},{best_t.n}) but also "
                    f"drives cluster {ci} transition ({t.m},{t.n}) at "
                    f"F = {f:.3g} ({f / full:.0%} of 2N)"
                )
    return warnings
