"""Batch kernels for the Monte Carlo paths.

Each kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version.  The public names dispatch to numba unless it is missing or the
environment sets ``TELEPORT_SIM_DISABLE_NUMBA`` to a non-empty value other
than ``0``.  Both paths produce identical integers for identical input.

Per-trial randomness comes from SplitMix64: trial ``i`` of a batch seeded
with ``master`` gets seed ``mix64(master + (i + 1) * GOLDEN)`` and its
uniform draw is the top 53 bits of ``mix64(seed)``.  This keeps
``sample_trial(seed)`` and the batch path bit-for-bit consistent.
"""

import os

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def _numba_requested():
    flag = os.environ.get("TELEPORT_SIM_DISABLE_NUMBA", "")
    return flag in ("", "0")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def to_u64(seed):
    """Reduce any Python int (negative included) to an unsigned 64-bit seed."""
    return int(seed) & _MASK64


# --- numpy path -------------------------------------------------------------


def mix64_np(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def trial_seeds_np(master, n):
    idx = np.arange(1, n + 1, dtype=np.uint64)
    return mix64_np(np.uint64(master) + idx * GOLDEN)


def uniforms_np(seeds):
    return (mix64_np(seeds) >> np.uint64(11)).astype(np.float64) * _INV_2_53


def sample_outcomes_np(master, n, cumulative):
    """Trial seeds and categorical outcomes (indices into ``cumulative``)."""
    seeds = trial_seeds_np(master, n)
    u = uniforms_np(seeds)
    out = np.searchsorted(cumulative, u, side="right").astype(np.int8)
    np.minimum(out, len(cumulative) - 1, out=out)
    return seeds, out


def classical_stream_np(message, lm):
    """Run the lottery-machine conveyor over a block of ball pairs.

    ``message`` holds ball colours (0 = R, 1 = B); ``lm`` is an ``(n, 2)``
    array of (Alice's ball, Bob's ball).  Returns
    ``(pairs_used, balls_done, filtered, replace, bob_final)`` where the
    per-pair arrays cover ``lm[:pairs_used]`` and entries for filtered pairs
    are -1 in ``replace``/``bob_final``.
    """
    message = np.asarray(message, dtype=np.int8)
    lm = np.asarray(lm, dtype=np.int8)
    filtered = lm[:, 0] == lm[:, 1]
    survivors = np.flatnonzero(~filtered)
    k = min(len(survivors), len(message))
    if k == len(message):
        used = int(survivors[k - 1]) + 1 if k else 0
    else:
        used = len(lm)
    replace = np.full(used, -1, dtype=np.int8)
    bob_final = np.full(used, -1, dtype=np.int8)
    idx = survivors[:k]
    same = message[:k] == lm[idx, 0]
    replace[idx] = same
    bob_final[idx] = np.where(same, 1 - lm[idx, 1], lm[idx, 1])
    return used, k, filtered[:used].copy(), replace, bob_final


# --- numba path -------------------------------------------------------------

if HAVE_NUMBA:
    _njit = numba.njit(cache=True, nogil=True)

    @_njit
    def _mix64(z):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @_njit
    def _sample_outcomes_nb(master, n, cumulative):
        seeds = np.empty(n, dtype=np.uint64)
        out = np.empty(n, dtype=np.int8)
        last = len(cumulative) - 1
        for i in range(n):
            s = _mix64(master + np.uint64(i + 1) * np.uint64(0x9E3779B97F4A7C15))
            seeds[i] = s
            u = np.float64(_mix64(s) >> np.uint64(11)) * (1.0 / 9007199254740992.0)
            k = 0
            while k < last and u >= cumulative[k]:
                k += 1
            out[i] = k
        return seeds, out

    @_njit
    def _classical_stream_nb(message, lm):
        n = lm.shape[0]
        total = message.shape[0]
        filtered = np.zeros(n, dtype=np.bool_)
        replace = np.full(n, -1, dtype=np.int8)
        bob_final = np.full(n, -1, dtype=np.int8)
        done = 0
        used = 0
        for i in range(n):
            if done == total:
                break
            used = i + 1
            alice = lm[i, 0]
            bob = lm[i, 1]
            if alice == bob:
                filtered[i] = True
                continue
            if message[done] == alice:
                replace[i] = 1
                bob_final[i] = 1 - bob
            else:
                replace[i] = 0
                bob_final[i] = bob
            done += 1
        return used, done, filtered[:used].copy(), replace[:used].copy(), bob_final[:used].copy()

    def sample_outcomes_nb(master, n, cumulative):
        return _sample_outcomes_nb(
            np.uint64(master), int(n), np.ascontiguousarray(cumulative, dtype=np.float64)
        )

    def classical_stream_nb(message, lm):
        used, done, filtered, replace, bob_final = _classical_stream_nb(
            np.ascontiguousarray(message, dtype=np.int8), np.ascontiguousarray(lm, dtype=np.int8)
        )
        return int(used), int(done), filtered, replace, bob_final

else:  # pragma: no cover
    sample_outcomes_nb = None
    classical_stream_nb = None


def sample_outcomes(master, n, cumulative):
    if USE_NUMBA:
        return sample_outcomes_nb(master, n, cumulative)
    return sample_outcomes_np(master, n, cumulative)


def classical_stream(message, lm):
    if USE_NUMBA:
        return classical_stream_nb(message, lm)
    return classical_stream_np(message, lm)


def trial_seed(master, index):
    """Seed of trial ``index`` in a batch with master seed ``master``."""
    z = (to_u64(master) + (int(index) + 1) * int(GOLDEN)) & _MASK64
    return int(mix64_np(np.array([z], dtype=np.uint64))[0])


def uniform_from_seed(seed):
    return float(uniforms_np(np.array([to_u64(seed)], dtype=np.uint64))[0])


def categorical_from_seed(seed, cumulative):
    u = uniform_from_seed(seed)
    k = 0
    last = len(cumulative) - 1
    while k < last and u >= cumulative[k]:
        k += 1
    return k
