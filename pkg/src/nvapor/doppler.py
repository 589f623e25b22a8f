"""Thermal velocity distribution, ensemble averaging, and cutoff studies.

A thermal vapour is represented by a uniform grid of axial velocity
classes weighted by the 1-D Maxwell-Boltzmann density. Averaging solves
the steady state for every class in one batched call and reduces with a
fixed weight order, so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import k as BOLTZMANN_K

from .core import (Dissipator, build_dissipator, hamiltonian_stack,
                   reference_rate, steady_state_stack)
from .exceptions import EmptyGrid, InvalidGrid, SingularSystem
from .levels import DriveSet, LevelScheme

#: Dephasing applied to the ground coherence, in units of the reference
#: rate, to produce the interference-free baseline of cutoff and Rabi
#: scans. Large enough to kill the two-photon coherence, small enough
#: to keep the scaled linear system well conditioned.
EIT_OFF_DEPHASING_FACTOR = 1e4


@dataclass(frozen=True)
class VelocityGrid:
    """Quadrature nodes and weights over the axial velocity distribution.

    ``cutoff`` optionally restricts the ensemble to classes with
    ``|k v| <= cutoff`` (rad/s); the restriction is applied lazily at
    averaging time because the wavevector lives with the drive fields.
    """

    sigma_v: float
    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float | None = None

    def with_cutoff(self, cutoff: float | None) -> "VelocityGrid":
        return replace(self, cutoff=cutoff)


def thermal_grid(temperature: float, atomic_mass: float,
                 span: float = 4.0, n_nodes: int = 2001) -> VelocityGrid:
    """Uniform velocity grid over ``+-span * sigma_v`` with Gaussian weights.

    Parameters
    ----------
    temperature : float
        Vapour temperature, K. Must be positive.
    atomic_mass : float
        Atomic mass, kg.
    span : float
        Half-width of the grid in units of sigma_v; at least 3.
    n_nodes : int
        Odd node count of at least 3, so the stationary class v = 0 is
        always sampled exactly.

    Returns
    -------
    VelocityGrid with weights proportional to the Gaussian density,
    normalized to unit sum.

    Raises
    ------
    InvalidGrid on even or too-small ``n_nodes``, non-positive
    temperature or mass, or ``span < 3``.
    """
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise InvalidGrid(f"n_nodes must be odd and >= 3, got {n_nodes}")
    if temperature <= 0 or atomic_mass <= 0:
        raise InvalidGrid("temperature and atomic mass must be positive")
    if span < 3:
        raise InvalidGrid(f"span must cover at least 3 sigma_v, got {span}")
    sigma_v = math.sqrt(BOLTZMANN_K * temperature / atomic_mass)
    half = n_nodes // 2
    step = span * sigma_v / half
    nodes = (np.arange(n_nodes) - half) * step
    weights = np.exp(-0.5 * (nodes / sigma_v) ** 2)
    weights /= weights.sum()
    return VelocityGrid(sigma_v=sigma_v, nodes=nodes, weights=weights)


def delta_grid(velocity: float = 0.0) -> VelocityGrid:
    """Degenerate grid holding a single velocity class with weight 1."""
    return VelocityGrid(sigma_v=0.0, nodes=np.array([float(velocity)]),
                        weights=np.array([1.0]))


def effective_nodes(grid: VelocityGrid,
                    wavevector: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and renormalized weights after applying the kv cutoff."""
    if grid.cutoff is None:
        return grid.nodes, grid.weights
    keep = np.abs(wavevector * grid.nodes) <= grid.cutoff
    if not np.any(keep):
        raise EmptyGrid(
            f"cutoff {grid.cutoff:.3e} rad/s excludes every velocity node")
    weights = grid.weights[keep]
    return grid.nodes[keep], weights / weights.sum()


def eit_off_dissipator(scheme: LevelScheme) -> Dissipator:
    """Dissipator with the ground coherence dephased to extinction.

    Used as the interference-free reference: populations and one-photon
    physics are unchanged while the two-photon coherence, and with it
    the transparency or enhanced-absorption feature, is removed.
    """
    base = build_dissipator(scheme)
    gamma = base.coherence_decay.copy()
    extra = EIT_OFF_DEPHASING_FACTOR * reference_rate(scheme)
    gamma[0, 2] += extra
    gamma[2, 0] += extra
    return Dissipator(coherence_decay=gamma,
                      population_flow=base.population_flow)


def average_with_dissipator(scheme: LevelScheme, drives: DriveSet,
                            grid: VelocityGrid, d: Dissipator) -> float:
    """Weighted ensemble absorption with an explicit dissipator."""
    nodes, weights = effective_nodes(grid, drives.wavevector)
    h = hamiltonian_stack(scheme, drives, nodes)
    try:
        sigmas = steady_state_stack(h, d, scale_rate=reference_rate(scheme),
                                    velocities=nodes)
    except SingularSystem as err:
        if err.detuning is None:
            err.detuning = drives.probe.detuning
        raise
    absorptions = np.imag(sigmas[:, 0, 1])
    return float(np.dot(weights, absorptions))


def doppler_average(scheme: LevelScheme, drives: DriveSet,
                    grid: VelocityGrid) -> float:
    """Ensemble-averaged probe absorption.

    Equals the weighted sum of the single-velocity observable over the
    grid nodes in index order. A delta grid reproduces the core result
    exactly.
    """
    return average_with_dissipator(scheme, drives, grid,
                                   build_dissipator(scheme))


def cutoff_scan(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
                cutoffs: list[float]) -> list[tuple[float, float]]:
    """Central contrast versus velocity-class cutoff.

    For each cutoff the ensemble is truncated to ``|kv| <= cutoff`` and
    renormalized, and the probe absorption is compared against the same
    truncated ensemble with the ground coherence dephased (the
    interference-free baseline). Negative contrast marks transparency,
    positive marks enhanced absorption.

    Raises EmptyGrid if a cutoff excludes all nodes, ValueError if the
    cutoffs are not ascending.
    """
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly ascending")
    d_on = build_dissipator(scheme)
    d_off = eit_off_dissipator(scheme)
    results = []
    for cutoff in cutoffs:
        tg = grid.with_cutoff(cutoff)
        signal = average_with_dissipator(scheme, drives, tg, d_on)
        baseline = average_with_dissipator(scheme, drives, tg, d_off)
        results.append((float(cutoff), signal - baseline))
    return results
