"""Pure numpy versions of the routines in ``_kernels.pyx``.

Signatures and in-place semantics match the compiled module exactly.
"""

import numpy as np


def _axis_step(state, axis, in_index, good):
    state[good] *= -1
    state[:] = 2 * axis * np.vdot(axis, state) - state
    state[in_index] *= -1
    state[:] = 2 * axis * np.vdot(axis, state) - state
    state *= -1


def _dense_step(state, oracle, in_index, good):
    state[good] *= -1
    tmp = oracle.conj().T @ state
    tmp[in_index] *= -1
    state[:] = -(oracle @ tmp)


def axis_grover_power(state, axis, in_index, good, n):
    good = good.view(bool)
    for _ in range(n):
        _axis_step(state, axis, in_index, good)


def dense_grover_power(state, oracle, in_index, good, n):
    good = good.view(bool)
    for _ in range(n):
        _dense_step(state, oracle, in_index, good)


def axis_good_mass_trajectory(state, axis, in_index, good, m):
    good = good.view(bool)
    out = np.empty(m)
    for t in range(m):
        if t:
            _axis_step(state, axis, in_index, good)
        out[t] = np.sum(np.abs(state[good]) ** 2)
    return out


def dense_good_mass_trajectory(state, oracle, in_index, good, m):
    good = good.view(bool)
    out = np.empty(m)
    for t in range(m):
        if t:
            _dense_step(state, oracle, in_index, good)
        out[t] = np.sum(np.abs(state[good]) ** 2)
    return out
