"""Hill-climbing kernels for Smatch alignment.

Problem encoding (shared by both backends):

* ``unary[i, a]`` - matched instance/attribute triples when gold variable
  ``i`` maps to predicted variable ``a``; the extra last column means
  "unmapped" and is always zero.
* ``pi, pj, pa, pb, pw`` - relation pairs: gold relation ``(i, j)`` and
  predicted relation ``(a, b)`` share ``w`` labels, so the mapping earns
  ``w`` when ``i -> a`` and ``j -> b``.
* ``mapping[i]`` - predicted variable of ``i`` or ``n2`` for unmapped.

Each step takes the single best move (remap one variable to a free target
or to unmapped) or swap (exchange two variables' targets).  Ties go to the
first candidate in row-major order, moves before swaps, so the numba and
numpy versions walk through identical states.  Set ``PSEUDOAMR_NO_NUMBA=1``
to force the numpy version.
"""
from __future__ import annotations

import os

import numpy as np

_NEG = np.int64(-(2**62))

try:  # pragma: no cover - exercised implicitly when numba is present
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _score_numpy(unary, pi, pj, pa, pb, pw, mapping):
    total = unary[np.arange(len(mapping)), mapping].sum()
    hit = (mapping[pi] == pa) & (mapping[pj] == pb)
    return np.int64(total + pw[hit].sum())


def hill_climb_numpy(unary, pi, pj, pa, pb, pw, mapping):
    """Climb from ``mapping`` (modified in place); returns the final score."""
    n1, width = unary.shape
    n2 = width - 1
    rows = np.arange(n1)
    upper = np.triu(np.ones((n1, n1), dtype=bool), 1)
    while True:
        # gain[i, a]: score contributed by i if it mapped to a, others fixed
        gain = unary.copy()
        m = mapping[pj] == pb
        np.add.at(gain, (pi[m], pa[m]), pw[m])
        m = mapping[pi] == pa
        np.add.at(gain, (pj[m], pb[m]), pw[m])
        current = gain[rows, mapping]

        taken = np.zeros(width, dtype=bool)
        taken[mapping[mapping < n2]] = True
        taken[n2] = False
        moves = gain - current[:, None]
        blocked = np.broadcast_to(taken, moves.shape) & (np.arange(width)[None, :] != mapping[:, None])
        moves = np.where(blocked, _NEG, moves)
        flat = int(np.argmax(moves))
        best_move = moves.flat[flat]

        best_swap = _NEG
        swap_at = -1
        if n1 > 1:
            # swap (i, j): i takes mapping[j] and j takes mapping[i]
            cross = gain[:, mapping]  # cross[i, j] = gain[i, mapping[j]]
            swaps = cross - current[:, None] + cross.T - current[None, :]
            # pairs linking i and j are miscounted by the gain matrix
            corr = np.zeros((n1, n1), dtype=np.int64)
            m = (mapping[pi] == pa) & (mapping[pj] == pb)
            np.add.at(corr, (pi[m], pj[m]), pw[m])
            m = (mapping[pj] == pa) & (mapping[pi] == pb)
            np.add.at(corr, (pi[m], pj[m]), pw[m])
            swaps = swaps + corr + corr.T
            valid = upper & ~((mapping[:, None] == n2) & (mapping[None, :] == n2))
            swaps = np.where(valid, swaps, _NEG)
            swap_at = int(np.argmax(swaps))
            best_swap = swaps.flat[swap_at]

        if best_move <= 0 and best_swap <= 0:
            break
        if best_move >= best_swap:
            mapping[flat // width] = flat % width
        else:
            i, j = divmod(swap_at, n1)
            mapping[i], mapping[j] = mapping[j], mapping[i]
    return _score_numpy(unary, pi, pj, pa, pb, pw, mapping)


def _hill_climb_loops(unary, pi, pj, pa, pb, pw, mapping):
    n1, width = unary.shape
    n2 = width - 1
    npairs = pi.shape[0]
    gain = np.empty((n1, width), dtype=np.int64)
    corr = np.zeros((n1, n1), dtype=np.int64)
    taken = np.zeros(width, dtype=np.bool_)
    while True:
        for i in range(n1):
            for a in range(width):
                gain[i, a] = unary[i, a]
            for j in range(n1):
                corr[i, j] = 0
        for a in range(width):
            taken[a] = False
        for i in range(n1):
            if mapping[i] < n2:
                taken[mapping[i]] = True
        for p in range(npairs):
            i, j, a, b, w = pi[p], pj[p], pa[p], pb[p], pw[p]
            if mapping[j] == b:
                gain[i, a] += w
            if mapping[i] == a:
                gain[j, b] += w
            if mapping[i] == a and mapping[j] == b:
                corr[i, j] += w
            if mapping[j] == a and mapping[i] == b:
                corr[i, j] += w

        best_move = _NEG
        move_i = -1
        move_a = -1
        for i in range(n1):
            cur = gain[i, mapping[i]]
            for a in range(width):
                if taken[a] and a != mapping[i] and a != n2:
                    continue
                g = gain[i, a] - cur
                if g > best_move:
                    best_move = g
                    move_i = i
                    move_a = a

        best_swap = _NEG
        swap_i = -1
        swap_j = -1
        for i in range(n1):
            x = mapping[i]
            for j in range(i + 1, n1):
                y = mapping[j]
                if x == n2 and y == n2:
                    continue
                g = gain[i, y] - gain[i, x] + gain[j, x] - gain[j, y] + corr[i, j] + corr[j, i]
                if g > best_swap:
                    best_swap = g
                    swap_i = i
                    swap_j = j

        if best_move <= 0 and best_swap <= 0:
            break
        if best_move >= best_swap:
            mapping[move_i] = move_a
        else:
            x = mapping[swap_i]
            mapping[swap_i] = mapping[swap_j]
            mapping[swap_j] = x

    total = 0
    for i in range(n1):
        total += unary[i, mapping[i]]
    for p in range(npairs):
        if mapping[pi[p]] == pa[p] and mapping[pj[p]] == pb[p]:
            total += pw[p]
    return total


if HAVE_NUMBA:
    hill_climb_numba = njit(cache=True, nogil=True)(_hill_climb_loops)
else:  # pragma: no cover
    hill_climb_numba = None


BACKENDS = ("numba", "numpy")


def resolve_backend(name=None) -> str:
    """Pick a backend: explicit name, else numpy when PSEUDOAMR_NO_NUMBA=1 or numba is missing."""
    if name is None:
        if os.environ.get("PSEUDOAMR_NO_NUMBA", "") not in ("", "0") or not HAVE_NUMBA:
            return "numpy"
        return "numba"
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return name


def hill_climb(unary, pi, pj, pa, pb, pw, mapping, backend=None) -> int:
    if resolve_backend(backend) == "numba":
        return int(hill_climb_numba(unary, pi, pj, pa, pb, pw, mapping))
    return int(hill_climb_numpy(unary, pi, pj, pa, pb, pw, mapping))
