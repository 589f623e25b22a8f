"""Single-velocity steady state of the four-level master equation.

The density matrix is vectorized row-major (entry sigma[i][j] at position
4*i + j) and the steady state is obtained from a dense 16x16 linear solve
with one row replaced by the trace constraint. The system is scaled to
dimensionless time (units of the excited-state decay) before solving so
entries stay O(1) even for GHz detunings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularSystem
from .levels import DriveSet, LevelScheme

#: Max-norm tolerance on the scaled master-equation residual.
RESIDUAL_TOL = 1e-10

_I4 = np.eye(4)
_TRACE_ROW = np.zeros(16)
_TRACE_ROW[[0, 5, 10, 15]] = 1.0


@dataclass(frozen=True)
class Dissipator:
    """Relaxation terms of the master equation.

    coherence_decay[i][j] is the rate gamma_ij applied to sigma[i][j]
    for i != j; population_flow lists (source, target, rate) transfers.
    Every departure appears as an arrival, so the flow conserves trace.
    """

    coherence_decay: np.ndarray
    population_flow: tuple[tuple[int, int, float], ...]


def build_hamiltonian(scheme: LevelScheme, drives: DriveSet,
                      v: float) -> np.ndarray:
    """Rotating-frame Hamiltonian at axial velocity ``v``, rad/s.

    Doppler-shifted detunings enter as seen by the moving atom; the
    frame is chosen so the probe one-photon resonance carries the full
    Doppler shift while the probe-coupling two-photon (Raman) resonance
    is velocity independent, as required for co-propagating beams.
    """
    return hamiltonian_stack(scheme, drives, np.array([float(v)]))[0]


def hamiltonian_stack(scheme: LevelScheme, drives: DriveSet,
                      velocities: np.ndarray) -> np.ndarray:
    """Hamiltonians for a batch of velocities, shape (n, 4, 4)."""
    drives.validate()
    v = np.asarray(velocities, dtype=float)
    kv = drives.wavevector * v
    dp = drives.probe.detuning + drives.probe.doppler_sign * kv
    dc = drives.coupling.detuning + drives.coupling.doppler_sign * kv
    dd = drives.control.detuning + drives.control.doppler_sign * kv

    h = np.zeros(v.shape + (4, 4), dtype=complex)
    h[..., 0, 0] = dp - dc
    h[..., 1, 1] = -dc
    h[..., 3, 3] = -dd
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * drives.probe.rabi
    h[..., 1, 2] = h[..., 2, 1] = 0.5 * drives.coupling.rabi
    h[..., 2, 3] = h[..., 3, 2] = 0.5 * drives.control.rabi
    return h


def build_dissipator(scheme: LevelScheme) -> Dissipator:
    """Coherence decay rates and population flows for ``scheme``.

    Coherence rates follow gamma_ij = (Gi + Gj)/2 with Gi the total
    departure rate from level i. Spontaneous flows follow the branching
    table; transit relaxation exchanges the two ground populations in
    both directions (or, with the dephasing flag, only damps their
    coherence).
    """
    scheme.validate()
    departures = scheme.departure_rates()
    gamma = 0.5 * (departures[:, None] + departures[None, :])
    np.fill_diagonal(gamma, 0.0)
    if scheme.transit_as_dephasing:
        gamma[0, 2] += scheme.transit_rate
        gamma[2, 0] += scheme.transit_rate

    flows: list[tuple[int, int, float]] = []
    for i in range(4):
        if scheme.natural_decay[i] <= 0:
            continue
        for j in range(4):
            if scheme.branching[i][j] > 0:
                flows.append((i, j, scheme.natural_decay[i] * scheme.branching[i][j]))
    if scheme.transit_rate > 0 and not scheme.transit_as_dephasing:
        flows.append((0, 2, scheme.transit_rate))
        flows.append((2, 0, scheme.transit_rate))
    return Dissipator(coherence_decay=gamma, population_flow=tuple(flows))


def dissipator_superoperator(d: Dissipator) -> np.ndarray:
    """16x16 action of the dissipator on the vectorized density matrix."""
    sup = np.zeros((16, 16))
    for i in range(4):
        for j in range(4):
            if i != j:
                r = 4 * i + j
                sup[r, r] -= d.coherence_decay[i, j]
    for src, dst, rate in d.population_flow:
        sup[4 * src + src, 4 * src + src] -= rate
        sup[4 * dst + dst, 4 * src + src] += rate
    return sup


def liouvillian(h: np.ndarray, d: Dissipator) -> np.ndarray:
    """Full generator L with dsigma/dt = L sigma in vectorized form."""
    coherent = -1j * (np.kron(h, _I4) - np.kron(_I4, h.T))
    return coherent + dissipator_superoperator(d)


def reference_rate(scheme: LevelScheme) -> float:
    """Rate used to scale the linear system to O(1) entries."""
    rates = [g for g in scheme.natural_decay if g > 0]
    if rates:
        return max(rates)
    return max(scheme.transit_rate, 1.0)


def steady_state(h: np.ndarray, d: Dissipator,
                 scale_rate: float | None = None) -> np.ndarray:
    """Steady-state density matrix of the master equation.

    Parameters
    ----------
    h : (4, 4) complex ndarray
        Hermitian Hamiltonian, rad/s.
    d : Dissipator
        Relaxation terms.
    scale_rate : float, optional
        Rate dividing the generator before the solve. Defaults to the
        largest coherence-decay entry (or 1 if all relaxation is zero,
        in which case the solve fails as SingularSystem).

    Returns
    -------
    (4, 4) complex ndarray with unit trace.

    Raises
    ------
    SingularSystem
        If the linear system is rank-deficient beyond the trace
        replacement, or the scaled residual exceeds 1e-10.
    """
    sigma = _solve_stack(np.asarray(h)[None, :, :], d, scale_rate)
    return sigma[0]


def steady_state_stack(h_stack: np.ndarray, d: Dissipator,
                       scale_rate: float | None = None,
                       velocities: np.ndarray | None = None) -> np.ndarray:
    """Batched steady states for a stack of Hamiltonians, shape (n, 4, 4)."""
    return _solve_stack(h_stack, d, scale_rate, velocities)


def _default_scale(d: Dissipator) -> float:
    peak = float(np.max(d.coherence_decay)) if d.coherence_decay.size else 0.0
    return peak if peak > 0 else 1.0


def _solve_stack(h_stack: np.ndarray, d: Dissipator,
                 scale_rate: float | None,
                 velocities: np.ndarray | None = None) -> np.ndarray:
    n = h_stack.shape[0]
    scale = 1.0 / (scale_rate if scale_rate else _default_scale(d))
    coherent = np.einsum('nik,jl->nijkl', h_stack, _I4).reshape(n, 16, 16)
    coherent -= np.einsum('ik,nlj->nijkl', _I4, h_stack).reshape(n, 16, 16)
    full = (-1j * coherent + dissipator_superoperator(d)) * scale

    system = full.copy()
    system[:, 0, :] = _TRACE_ROW
    rhs = np.zeros((n, 16, 1), dtype=complex)
    rhs[:, 0, 0] = 1.0
    try:
        vec = np.linalg.solve(system, rhs)[..., 0]
    except np.linalg.LinAlgError as err:
        raise SingularSystem(f"steady-state solve failed: {err}") from err

    residuals = np.abs(np.einsum('nij,nj->ni', full, vec)).max(axis=1)
    worst = int(np.argmax(residuals))
    if not np.isfinite(residuals[worst]) or residuals[worst] > RESIDUAL_TOL:
        v_ctx = float(velocities[worst]) if velocities is not None else None
        raise SingularSystem(
            f"scaled steady-state residual {residuals[worst]:.3e} exceeds "
            f"{RESIDUAL_TOL:.0e}; the relaxation structure does not single "
            "out a unique steady state", velocity=v_ctx)
    return vec.reshape(n, 4, 4)


def probe_absorption(sigma: np.ndarray) -> float:
    """Probe absorption observable: Im sigma[0][1].

    The sign convention makes the isolated two-level resonance positive.
    """
    return float(np.imag(sigma[0, 1]))


def density_matrix_checks(sigma: np.ndarray, h: np.ndarray | None = None,
                          d: Dissipator | None = None,
                          scale_rate: float | None = None) -> dict[str, float]:
    """Diagnostics for the density-matrix invariants.

    Returns hermiticity defect, trace error, smallest eigenvalue, and
    (when ``h`` and ``d`` are given) the scaled master-equation residual.
    """
    checks = {
        "hermiticity": float(np.abs(sigma - sigma.conj().T).max()),
        "trace_error": float(abs(np.trace(sigma).real - 1.0)
                             + abs(np.trace(sigma).imag)),
        "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (sigma + sigma.conj().T)).min()),
    }
    if h is not None and d is not None:
        scale = 1.0 / (scale_rate if scale_rate else _default_scale(d))
        rhs = (liouvillian(h, d) * scale) @ sigma.reshape(16)
        checks["residual"] = float(np.abs(rhs).max())
    return checks
