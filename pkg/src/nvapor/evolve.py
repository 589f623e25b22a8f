"""Fixed-step time integrator used to validate the steady-state solve.

Deliberately independent of the linear-algebra path: the right-hand
side is evaluated with direct 4x4 matrix arithmetic (no vectorization,
no superoperator) and advanced with classical fourth-order Runge-Kutta.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .core import Dissipator
from .exceptions import StepTooLarge

#: Allowed trace drift per step before the integrator aborts.
TRACE_DRIFT_LIMIT = 1e-8


@njit(cache=True)
def _rhs(h, gamma, fsrc, fdst, frate, s, out):
    for i in range(4):
        for j in range(4):
            acc = 0.0 + 0.0j
            for m in range(4):
                acc += h[i, m] * s[m, j] - s[i, m] * h[m, j]
            out[i, j] = -1j * acc
            if i != j:
                out[i, j] -= gamma[i, j] * s[i, j]
    for f in range(fsrc.shape[0]):
        a = fsrc[f]
        b = fdst[f]
        moved = frate[f] * s[a, a]
        out[a, a] -= moved
        out[b, b] += moved


@njit(cache=True)
def _evolve(h, gamma, fsrc, fdst, frate, sigma0, dt, nsteps):
    s = sigma0.copy()
    k1 = np.empty((4, 4), dtype=np.complex128)
    k2 = np.empty((4, 4), dtype=np.complex128)
    k3 = np.empty((4, 4), dtype=np.complex128)
    k4 = np.empty((4, 4), dtype=np.complex128)
    stage = np.empty((4, 4), dtype=np.complex128)
    for step in range(nsteps):
        trace_before = (s[0, 0] + s[1, 1] + s[2, 2] + s[3, 3]).real
        _rhs(h, gamma, fsrc, fdst, frate, s, k1)
        for i in range(4):
            for j in range(4):
                stage[i, j] = s[i, j] + 0.5 * dt * k1[i, j]
        _rhs(h, gamma, fsrc, fdst, frate, stage, k2)
        for i in range(4):
            for j in range(4):
                stage[i, j] = s[i, j] + 0.5 * dt * k2[i, j]
        _rhs(h, gamma, fsrc, fdst, frate, stage, k3)
        for i in range(4):
            for j in range(4):
                stage[i, j] = s[i, j] + dt * k3[i, j]
        _rhs(h, gamma, fsrc, fdst, frate, stage, k4)
        for i in range(4):
            for j in range(4):
                s[i, j] = s[i, j] + (dt / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        trace_after = (s[0, 0] + s[1, 1] + s[2, 2] + s[3, 3]).real
        if abs(trace_after - trace_before) > TRACE_DRIFT_LIMIT:
            return s, step
    return s, -1


@njit(cache=True, parallel=True)
def _evolve_batch(hs, gamma, fsrc, fdst, frate, sigma0s, dts, nsteps):
    n = hs.shape[0]
    out = np.empty((n, 4, 4), dtype=np.complex128)
    flags = np.empty(n, dtype=np.int64)
    for t in prange(n):
        s, flag = _evolve(hs[t], gamma, fsrc, fdst, frate,
                          sigma0s[t], dts[t], nsteps[t])
        out[t] = s
        flags[t] = flag
    return out, flags


def _flow_arrays(d: Dissipator):
    if d.population_flow:
        src = np.array([f[0] for f in d.population_flow], dtype=np.int64)
        dst = np.array([f[1] for f in d.population_flow], dtype=np.int64)
        rate = np.array([f[2] for f in d.population_flow], dtype=float)
    else:
        src = np.empty(0, dtype=np.int64)
        dst = np.empty(0, dtype=np.int64)
        rate = np.empty(0, dtype=float)
    return src, dst, rate


def max_rate(h: np.ndarray, d: Dissipator) -> float:
    """Largest Hamiltonian entry or relaxation rate, for step control."""
    rates = [np.abs(h).max(), d.coherence_decay.max(initial=0.0)]
    rates += [f[2] for f in d.population_flow]
    return float(max(rates))


def time_evolve(h: np.ndarray, d: Dissipator, sigma0: np.ndarray,
                t_final: float, dt: float) -> np.ndarray:
    """Integrate the master equation from ``sigma0`` for ``t_final`` seconds.

    ``dt`` must satisfy dt <= 0.01 / max(|H| entries, relaxation rates)
    so the fixed-step scheme stays deep in its stability region. The
    step count rounds t_final up to a whole number of steps.

    Raises StepTooLarge if the trace moves by more than 1e-8 in a single
    step, and ValueError for an oversized dt or invalid initial state.
    """
    h = np.asarray(h, dtype=complex)
    sigma0 = np.asarray(sigma0, dtype=complex)
    bound = 0.01 / max(max_rate(h, d), 1e-300)
    if dt > bound * (1 + 1e-9):
        raise ValueError(f"dt={dt:.3e} exceeds the step bound {bound:.3e}")
    if abs(np.trace(sigma0) - 1.0) > 1e-9 or np.abs(sigma0 - sigma0.conj().T).max() > 1e-9:
        raise ValueError("sigma0 must be Hermitian with unit trace")
    nsteps = max(1, int(np.ceil(t_final / dt - 1e-12)))
    fsrc, fdst, frate = _flow_arrays(d)
    out, flag = _evolve(h, d.coherence_decay, fsrc, fdst, frate,
                        sigma0, float(dt), nsteps)
    if flag >= 0:
        raise StepTooLarge(f"trace drifted more than {TRACE_DRIFT_LIMIT} "
                           f"at step {flag}")
    return out


def time_evolve_many(hs: np.ndarray, d: Dissipator, sigma0s: np.ndarray,
                     t_finals: np.ndarray, dts: np.ndarray) -> np.ndarray:
    """Integrate several independent trajectories in parallel.

    Same contract as :func:`time_evolve` per trajectory; trajectories
    share the dissipator. Used by the validation suite to keep many
    long integrations affordable.
    """
    hs = np.asarray(hs, dtype=complex)
    dts = np.asarray(dts, dtype=float)
    nsteps = np.maximum(1, np.ceil(np.asarray(t_finals) / dts - 1e-12).astype(np.int64))
    for h, dt in zip(hs, dts):
        if dt > 0.01 / max(max_rate(h, d), 1e-300) * (1 + 1e-9):
            raise ValueError(f"dt={dt:.3e} exceeds the step bound")
    fsrc, fdst, frate = _flow_arrays(d)
    out, flags = _evolve_batch(hs, d.coherence_decay, fsrc, fdst, frate,
                               np.asarray(sigma0s, dtype=complex), dts, nsteps)
    bad = np.nonzero(flags >= 0)[0]
    if bad.size:
        raise StepTooLarge(f"trace drift limit exceeded in trajectory {bad[0]} "
                           f"at step {flags[bad[0]]}")
    return out
