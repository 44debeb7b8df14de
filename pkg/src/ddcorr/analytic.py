"""Closed-form coherence dips from first-order average-Hamiltonian theory.

On resonance with transition (m, n), a CPMG block of N pulses acts on the
target, to first order in delta = |beta_mn / omega_mn|, as a rotation by
angle N*delta in the (m, n) plane and identity elsewhere.  The sensor
coherence dip is then a normalized trace of a short product of such
rotations, which reduces to the closed forms implemented here for each
transition topology:

  one transition          (d - 2 + 2 cos(2 N delta)) / d
  two, no shared level    (d - 4 + 2 c1 + 2 c2) / d
  two, one shared level   (d - 3 + c1 + c2 + c1 c2) / d
  separate molecules      product of one-transition factors

with c_i = cos(2 N_i delta_i), plus the three-transition variants below.
Driving each transition for N_i = pi/(2 delta_i) pulses (a half period)
pins the dip at a quantized minimum fixed by d and the topology alone.

Pulse counts may be real-valued here: the closed forms are smooth in N and
exactly periodic with period pi/delta_i, which the tests exploit.  Integer
counts matter only when an actual timeline is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spin_model import TargetCluster, transition

_KIND_2D = ("independent_molecules", "uncorrelated", "correlated")
_KIND_3D = (
    "independent",
    "uncorrelated",
    "ring",
    "star",
    "linked_ladder",
    "unlinked_ladder",
)
# Smallest Hilbert dimension that can host each topology.
_MIN_D_2D = {"uncorrelated": 4, "correlated": 3}
_MIN_D_3D = {
    "uncorrelated": 6,
    "ring": 3,
    "star": 4,
    "linked_ladder": 4,
    "unlinked_ladder": 5,
}


@dataclass(frozen=True)
class DipParams:
    """Dimension, contrasts delta_i, and (real-valued) pulse counts N_i."""

    d: int
    deltas: tuple[float, ...]
    pulses: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(x) for x in self.deltas))
        object.__setattr__(self, "pulses", tuple(float(x) for x in self.pulses))
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if len(self.deltas) != len(self.pulses):
            raise ValueError("deltas and pulses must have equal length")
        if any(x <= 0 for x in self.deltas):
            raise ValueError("every delta must be > 0")
        if any(n < 0 for n in self.pulses):
            raise ValueError("pulse counts must be >= 0")


@dataclass(frozen=True)
class Topology2D:
    """How two driven transitions relate: separate molecules, no shared
    level within one molecule, or one shared level."""

    kind: str
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _KIND_2D:
            raise ValueError(f"unknown 2D topology {self.kind!r}")
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if self.kind == "independent_molecules":
            if len(self.dims) != 2 or any(d < 2 for d in self.dims):
                raise ValueError("independent_molecules needs two dimensions >= 2")
        elif self.dims:
            raise ValueError(f"{self.kind} takes no dimension payload")

    @classmethod
    def independent_molecules(cls, d1: int, d2: int) -> "Topology2D":
        return cls("independent_molecules", (d1, d2))

    @classmethod
    def uncorrelated(cls) -> "Topology2D":
        return cls("uncorrelated")

    @classmethod
    def correlated(cls) -> "Topology2D":
        return cls("correlated")


@dataclass(frozen=True)
class Topology3D:
    """How three driven transitions relate.

    ring: a closed triangle on three levels; star: three transitions
    sharing a hub level; linked_ladder: a chain where consecutive
    transitions share a level; unlinked_ladder: transitions 2 and 3 chained,
    transition 1 detached; uncorrelated: no shared levels at all.
    """

    kind: str
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _KIND_3D:
            raise ValueError(f"unknown 3D topology {self.kind!r}")
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if self.kind == "independent":
            if len(self.dims) != 3 or any(d < 2 for d in self.dims):
                raise ValueError("independent needs three dimensions >= 2")
        elif self.dims:
            raise ValueError(f"{self.kind} takes no dimension payload")

    @classmethod
    def independent(cls, d1: int, d2: int, d3: int) -> "Topology3D":
        return cls("independent", (d1, d2, d3))

    @classmethod
    def uncorrelated(cls) -> "Topology3D":
        return cls("uncorrelated")

    @classmethod
    def ring(cls) -> "Topology3D":
        return cls("ring")

    @classmethod
    def star(cls) -> "Topology3D":
        return cls("star")

    @classmethod
    def linked_ladder(cls) -> "Topology3D":
        return cls("linked_ladder")

    @classmethod
    def unlinked_ladder(cls) -> "Topology3D":
        return cls("unlinked_ladder")


class PulsePeriod(NamedTuple):
    exact: float
    even: int


def _require_dim(topology, d: int, minima_table: dict) -> None:
    least = minima_table[topology.kind]
    if d < least:
        raise ValueError(
            f"{topology.kind} topology needs dimension >= {least}, got {d}"
        )


def magnus_rotation(
    cluster: TargetCluster, m: int, n: int, pulse_count: float
) -> np.ndarray:
    """First-order effective propagator of a resonant CPMG block.

    Identity except the 2x2 block on levels (m, n), which rotates by
    pulse_count * delta with the coupling phase kappa; level order inside
    the block follows the omega > 0 normalization of transition().
    """
    spec = transition(cluster, m, n)
    theta = pulse_count * spec.delta
    u = np.eye(cluster.dim, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[spec.m, spec.m] = c
    u[spec.n, spec.n] = c
    u[spec.m, spec.n] = -1j * np.exp(1j * spec.kappa) * s
    u[spec.n, spec.m] = -1j * np.exp(-1j * spec.kappa) * s
    return u


def dip_1d(d: int, delta: float, n_pulses: float) -> float:
    """Single-transition dip (d - 2 + 2 cos(2 N delta)) / d."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    return (d - 2 + 2 * math.cos(2 * n_pulses * delta)) / d


def dip_2d(topology: Topology2D, params: DipParams) -> float:
    """Two-transition dip for the given topology."""
    if len(params.deltas) != 2:
        raise ValueError("2D dip needs exactly two (delta, N) pairs")
    (d1v, n1), (d2v, n2) = zip(params.deltas, params.pulses)
    if topology.kind == "independent_molecules":
        da, db = topology.dims
        if params.d != da * db:
            raise ValueError(
                f"joint dimension {params.d} != {da} * {db} for separate molecules"
            )
        return dip_1d(da, d1v, n1) * dip_1d(db, d2v, n2)
    _require_dim(topology, params.d, _MIN_D_2D)
    c1 = math.cos(2 * n1 * d1v)
    c2 = math.cos(2 * n2 * d2v)
    if topology.kind == "uncorrelated":
        return (params.d - 4 + 2 * c1 + 2 * c2) / params.d
    return (params.d - 3 + c1 + c2 + c1 * c2) / params.d


def dip_trace_2d(cluster: TargetCluster, first, second, n1: float, n2: float) -> complex:
    """Trace oracle (1/d) Tr[U_2(2 N_2) U_1(2 N_1)] for two transitions.

    first/second are (m, n) level pairs.  Valid for any integer parity:
    flipping both rotation angles' signs (the odd-count variant) only
    conjugates the trace, so the real part is parity-blind.
    """
    u1 = magnus_rotation(cluster, *first, 2 * n1)
    u2 = magnus_rotation(cluster, *second, 2 * n2)
    return complex(np.trace(u2 @ u1) / cluster.dim)


def dip_trace_3d(
    cluster: TargetCluster, transitions, n1: float, n2: float, n3: float
) -> complex:
    """Trace oracle (1/d) Tr[U_3(2 N_3) U_2(N_2) U_1(2 N_1) U_2(N_2)].

    The second transition's rotation is split into two half-angle factors
    bracketing the first; the order matters whenever the transitions share
    levels, so the split is kept literal.
    """
    t1, t2, t3 = transitions
    u1 = magnus_rotation(cluster, *t1, 2 * n1)
    u2 = magnus_rotation(cluster, *t2, n2)
    u3 = magnus_rotation(cluster, *t3, 2 * n3)
    return complex(np.trace(u3 @ u2 @ u1 @ u2) / cluster.dim)


def dip_3d(topology: Topology3D, params: DipParams) -> float:
    """Three-transition dip for the given topology (real part of the trace)."""
    if len(params.deltas) != 3:
        raise ValueError("3D dip needs exactly three (delta, N) pairs")
    angles = [2 * n * dv for dv, n in zip(params.deltas, params.pulses)]
    if topology.kind == "independent":
        da, db, dc = topology.dims
        if params.d != da * db * dc:
            raise ValueError(
                f"joint dimension {params.d} != {da} * {db} * {dc} for separate molecules"
            )
        return (
            dip_1d(da, params.deltas[0], params.pulses[0])
            * dip_1d(db, params.deltas[1], params.pulses[1])
            * dip_1d(dc, params.deltas[2], params.pulses[2])
        )
    _require_dim(topology, params.d, _MIN_D_3D)
    d = params.d
    ca, cb, cc = (math.cos(a) for a in angles)
    if topology.kind == "uncorrelated":
        return (d - 6 + 2 * ca + 2 * cb + 2 * cc) / d
    if topology.kind == "unlinked_ladder":
        return (d - 5 + 2 * ca + cb + cc + cb * cc) / d
    # ring/star/linked forms carry the middle rotation as split half angles
    half = params.pulses[1] * params.deltas[1]
    cos2, sin2 = math.cos(half) ** 2, math.sin(half) ** 2
    cross = ca * cos2 + cos2 * cc - ca * sin2 * cc - sin2
    if topology.kind == "linked_ladder":
        return (d - 4 + ca + cc + cross) / d
    return (d - 3 + ca * cc + cross) / d


def pulse_period(delta: float) -> PulsePeriod:
    """Dip period in pulse number, N_c = pi/delta, and its nearest even integer.

    Even rounding serves grid construction: sweeping N over one period in
    steps of 2 tiles pulse-number space with whole unit cells.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    exact = math.pi / delta
    return PulsePeriod(exact, 2 * round(exact / 2))


def _factor_extremes(dims):
    """Corner candidates of a product of one-transition factors."""
    lows = [(d - 4) / d for d in dims]
    values = [1.0]
    for low in lows:
        values = [v * x for v in values for x in (low, 1.0)]
    return min(values)


def minima(topology, d: int) -> float:
    """Quantized dip minimum for a topology at dimension d.

    Accepts "1d", a Topology2D, or a Topology3D.  Each value is the global
    minimum of the corresponding closed form over real pulse counts, reached
    at half-period driving (N_i = pi/(2 delta_i)).
    """
    if topology == "1d":
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        return (d - 4) / d
    if isinstance(topology, Topology2D):
        if topology.kind == "independent_molecules":
            if d != topology.dims[0] * topology.dims[1]:
                raise ValueError("joint dimension mismatch")
            return _factor_extremes(topology.dims)
        _require_dim(topology, d, _MIN_D_2D)
        if topology.kind == "uncorrelated":
            return (d - 8) / d
        return (d - 4) / d
    if isinstance(topology, Topology3D):
        if topology.kind == "independent":
            if d != topology.dims[0] * topology.dims[1] * topology.dims[2]:
                raise ValueError("joint dimension mismatch")
            return _factor_extremes(topology.dims)
        _require_dim(topology, d, _MIN_D_3D)
        return {
            "uncorrelated": (d - 12) / d,
            "ring": (d - 4) / d,
            "star": (d - 4) / d,
            "linked_ladder": (d - 8) / d,
            "unlinked_ladder": (d - 8) / d,
        }[topology.kind]
    raise ValueError(f"unrecognized topology {topology!r}")
