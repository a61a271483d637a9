"""Independent reference implementations used only to check the library.

Kept deliberately naive: transitive closure by boolean matrix powering for
reachability, a direct recursive self-avoiding-walk count, and a
brute-force witness search.  Nothing here shares code with the package.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from dre.directions import all_directions
from dre.env import EnvironmentGrid


def window_sites(env: EnvironmentGrid) -> list[tuple]:
    ranges = [range(env.window.lo[i], env.window.hi[i] + 1) for i in range(env.d)]
    return [tuple(reversed(s)) for s in product(*reversed(ranges))]


def closure_matrix(env: EnvironmentGrid) -> tuple[list[tuple], np.ndarray]:
    """Reflexive-transitive closure of the open-arrow relation on the window."""
    sites = window_sites(env)
    index = {s: i for i, s in enumerate(sites)}
    n = len(sites)
    adj = np.eye(n, dtype=bool)
    for s in sites:
        mask = env.mask_at(s)
        for dn in all_directions(env.d):
            if mask & (1 << dn.bit(env.d)):
                t = tuple(c + v for c, v in zip(s, dn.step(env.d)))
                if t in index:
                    adj[index[s], index[t]] = True
    closure = adj
    while True:
        nxt = closure | (closure @ closure)
        if np.array_equal(nxt, closure):
            return sites, closure
        closure = nxt


def oracle_cluster_sets(env: EnvironmentGrid, x: tuple):
    sites, closure = closure_matrix(env)
    index = {s: i for i, s in enumerate(sites)}
    ix = index[x]
    fwd = {s for s, i in index.items() if closure[ix, i]}
    bwd = {s for s, i in index.items() if closure[i, ix]}
    return fwd, bwd, fwd & bwd


def oracle_touches(env: EnvironmentGrid, sites: set) -> bool:
    return any(env.window.on_edge(s) for s in sites)


def naive_saw_count(n: int) -> int:
    """Self-avoiding walks of length n on the square lattice, no tricks."""

    def walk(path: list, remaining: int) -> int:
        if remaining == 0:
            return 1
        x, y = path[-1]
        total = 0
        for nxt in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nxt not in path:
                total += walk(path + [nxt], remaining - 1)
        return total

    return walk([(0, 0)], n)


def brute_force_theta_plus_witness(measure) -> bool:
    """Any mutually orthogonal direction set meeting every atom?"""
    d = measure.d
    dirs = all_directions(d)
    masks = [m for m, _ in measure.atoms]
    for r in range(1, d + 1):
        for combo in combinations(dirs, r):
            axes = [dn.axis for dn in combo]
            if len(set(axes)) != len(axes):
                continue  # two directions share an axis: not orthogonal
            vmask = 0
            for dn in combo:
                vmask |= 1 << dn.bit(d)
            if all(m & vmask for m in masks):
                return True
    return False
