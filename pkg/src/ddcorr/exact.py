"""Exact conditional evolution of target clusters under a pulse timeline.

Between sensor flips the target evolves under H0 + s*f(t)*beta/2, where
s = +-1 labels the sensor eigenstate, H0 = diag(level energies), beta is the
sensor-conditional coupling matrix, and f(t) is the sequence's square-wave
modulation (+1 before the first flip).  The sensor coherence after the
sequence, for a maximally mixed target, is

    L_k = (1/d) Tr[(U^-)^dagger U^+]

per cluster, and the product over clusters for a system of independent
clusters.

Only two Hamiltonians ever appear (H0 + beta/2 and H0 - beta/2), so each is
eigendecomposed once and every segment propagator is a diagonal phase
sandwich.  The coherence path additionally collapses the long alternating
interior of a CPMG block into a matrix power; conditional_propagator keeps
the literal segment-by-segment product as the reference.
"""

from __future__ import annotations

import numpy as np

from .sequence import PulseTimeline
from .spin_model import SystemModel, TargetCluster

_HERM_TOL = 1e-10
# Segment durations are quantized at this many decimals (times are in us)
# when testing for repeated segments; 1e-12 us of drift is far below any
# physical phase at the frequencies handled here.
_DT_DECIMALS = 12


def herm_propagator(hamiltonian: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i * H * dt) for Hermitian H (rad/us and us), via eigendecomposition."""
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > _HERM_TOL:
        raise ValueError("Hamiltonian is not Hermitian")
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


class _ConditionalBases:
    """Eigendecompositions of H0 +- beta/2 plus a per-(sign, dt) propagator cache."""

    def __init__(self, cluster: TargetCluster):
        h0 = np.diag(cluster.energies)
        self.dim = cluster.dim
        self.eig = {}
        for sigma in (1, -1):
            w, v = np.linalg.eigh(h0 + sigma * cluster.coupling / 2.0)
            self.eig[sigma] = (w, v)
        self._cache: dict[tuple[int, float], np.ndarray] = {}

    def segment(self, sigma: int, dt: float) -> np.ndarray:
        key = (sigma, round(dt, _DT_DECIMALS))
        u = self._cache.get(key)
        if u is None:
            w, v = self.eig[sigma]
            u = (v * np.exp(-1j * w * dt)) @ v.conj().T
            self._cache[key] = u
        return u


def _segments(timeline: PulseTimeline, sensor_sign: int):
    """(sigma_p, dt_p) per segment: coupling sign sensor_sign * (-1)^p."""
    bounds = np.concatenate([[0.0], timeline.flip_times, [timeline.total_time]])
    dts = np.diff(bounds)
    sigmas = sensor_sign * np.where(np.arange(dts.size) % 2, -1, 1)
    return sigmas, dts


def conditional_propagator(
    cluster: TargetCluster, timeline: PulseTimeline, sensor_sign: int
) -> np.ndarray:
    """Target propagator for one sensor eigenstate, literal segment product.

    Args:
        sensor_sign: +1 or -1, selecting H0 + beta/2 or H0 - beta/2 for the
            first segment; the coupling sign toggles at every flip.
    """
    if sensor_sign not in (1, -1):
        raise ValueError(f"sensor_sign must be +1 or -1, got {sensor_sign}")
    bases = _ConditionalBases(cluster)
    sigmas, dts = _segments(timeline, sensor_sign)
    u = np.eye(cluster.dim, dtype=complex)
    for sigma, dt in zip(sigmas, dts):
        u = bases.segment(int(sigma), float(dt)) @ u
    return u


def _folded_propagator(bases: _ConditionalBases, sigmas, dts) -> np.ndarray:
    """Segment product with runs of a repeating (sign, dt) pair collapsed.

    A CPMG block interior alternates the same two segments N-1 times, so the
    product reduces to a matrix power; block edges and joins fall through to
    single steps.
    """
    keys = [(int(s), round(float(dt), _DT_DECIMALS)) for s, dt in zip(sigmas, dts)]
    u = np.eye(bases.dim, dtype=complex)
    i = 0
    n = len(keys)
    while i < n:
        if i + 3 < n and keys[i + 2] == keys[i] and keys[i + 3] == keys[i + 1]:
            repeats = 2
            while (
                i + 2 * repeats + 1 < n
                and keys[i + 2 * repeats] == keys[i]
                and keys[i + 2 * repeats + 1] == keys[i + 1]
            ):
                repeats += 1
            pair = bases.segment(*keys[i + 1]) @ bases.segment(*keys[i])
            u = np.linalg.matrix_power(pair, repeats) @ u
            i += 2 * repeats
        else:
            u = bases.segment(*keys[i]) @ u
            i += 1
    return u


def coherence_cluster(cluster: TargetCluster, timeline: PulseTimeline) -> complex:
    """Sensor coherence (1/d) Tr[(U^-)^dagger U^+] contributed by one cluster."""
    bases = _ConditionalBases(cluster)
    props = {}
    for sensor_sign in (1, -1):
        sigmas, dts = _segments(timeline, sensor_sign)
        props[sensor_sign] = _folded_propagator(bases, sigmas, dts)
    val = np.trace(props[-1].conj().T @ props[1]) / cluster.dim
    return complex(val)


def coherence_system(model: SystemModel, timeline: PulseTimeline) -> complex:
    """Product of per-cluster coherences for independent clusters."""
    val = 1.0 + 0.0j
    for cluster in model.clusters:
        val *= coherence_cluster(cluster, timeline)
    return complex(val)
