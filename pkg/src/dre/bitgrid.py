"""Bit-packed reachability on two-dimensional windows.

Frontier BFS over a 200x200 window is too slow in Python for tens of
thousands of Monte Carlo trials, so reachable sets are propagated as
uint64 bit rows instead: one fixpoint iteration is a handful of vectorized
shift/and/or passes over (ny, nx/64) words.  The packed engine is an exact
mirror of clusters.forward_cluster / backward_cluster on d=2 grids and is
cross-checked against them in the test suite.

Layout: bit ix of row iy is the site (lo_x + ix, lo_y + iy).  The shift
helpers are exported for other packed lattices (the triangular-lattice
simulators in montecarlo reuse them with their own move sets).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .directions import BIT_E, BIT_N, BIT_S, BIT_W
from .env import EnvironmentGrid
from .errors import DimensionError

_ONE = np.uint64(1)
_SH1 = np.uint64(1)
_SH63 = np.uint64(63)


def pack_bool(grid: np.ndarray) -> np.ndarray:
    """(nx, ny) bool -> (ny, nwords) uint64, bit index = x index."""
    nx, ny = grid.shape
    by_rows = np.ascontiguousarray(grid.T)  # (ny, nx)
    packed8 = np.packbits(by_rows, axis=1, bitorder="little")  # (ny, ceil(nx/8))
    nbytes = packed8.shape[1]
    pad = (-nbytes) % 8
    if pad:
        packed8 = np.pad(packed8, ((0, 0), (0, pad)))
    return packed8.view(np.uint64)


def unpack_words(words: np.ndarray, nx: int) -> np.ndarray:
    """(ny, nwords) uint64 -> (nx, ny) bool."""
    bytes8 = words.view(np.uint8)
    bits = np.unpackbits(bytes8, axis=1, bitorder="little")[:, :nx]
    return bits.astype(bool).T


def valid_mask(nx: int, ny: int) -> np.ndarray:
    return pack_bool(np.ones((nx, ny), dtype=bool))


def edge_mask(nx: int, ny: int) -> np.ndarray:
    grid = np.zeros((nx, ny), dtype=bool)
    grid[0, :] = grid[-1, :] = True
    grid[:, 0] = grid[:, -1] = True
    return pack_bool(grid)


def shift_xp(r: np.ndarray, valid: np.ndarray) -> np.ndarray:
    out = r << _SH1
    out[:, 1:] |= r[:, :-1] >> _SH63
    return out & valid


def shift_xm(r: np.ndarray) -> np.ndarray:
    out = r >> _SH1
    out[:, :-1] |= (r[:, 1:] & _ONE) << _SH63
    return out


def shift_yp(r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r)
    out[1:] = r[:-1]
    return out


def shift_ym(r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r)
    out[:-1] = r[1:]
    return out


def seed_word(valid_like: np.ndarray, ix: int, iy: int) -> np.ndarray:
    r = np.zeros_like(valid_like)
    r[iy, ix // 64] = _ONE << np.uint64(ix % 64)
    return r


def popcount(r: np.ndarray) -> int:
    return int(np.bitwise_count(r).sum())


@dataclass
class PackedGrid:
    """Direction masks of one environment, packed for fast reachability."""

    nx: int
    ny: int
    m_e: np.ndarray
    m_n: np.ndarray
    m_w: np.ndarray
    m_s: np.ndarray
    valid: np.ndarray
    edge: np.ndarray

    @classmethod
    def from_arrows(cls, arrows: np.ndarray) -> "PackedGrid":
        if arrows.ndim != 2:
            raise DimensionError("packed reachability requires d=2")
        nx, ny = arrows.shape
        return cls(
            nx, ny,
            pack_bool((arrows & np.uint16(BIT_E)).astype(bool)),
            pack_bool((arrows & np.uint16(BIT_N)).astype(bool)),
            pack_bool((arrows & np.uint16(BIT_W)).astype(bool)),
            pack_bool((arrows & np.uint16(BIT_S)).astype(bool)),
            valid_mask(nx, ny),
            edge_mask(nx, ny),
        )

    @classmethod
    def from_env(cls, env: EnvironmentGrid) -> "PackedGrid":
        return cls.from_arrows(env.arrows)

    def seed(self, ix: int, iy: int) -> np.ndarray:
        return seed_word(self.valid, ix, iy)

    def _grow_forward(self, r: np.ndarray) -> np.ndarray:
        return (r
                | shift_xp(r & self.m_e, self.valid)
                | shift_yp(r & self.m_n)
                | shift_xm(r & self.m_w)
                | shift_ym(r & self.m_s))

    def _grow_backward(self, r: np.ndarray) -> np.ndarray:
        return (r
                | (self.m_e & shift_xm(r))
                | (self.m_n & shift_ym(r))
                | (self.m_w & shift_xp(r, self.valid))
                | (self.m_s & shift_yp(r)))

    def reach(self, ix: int, iy: int, backward: bool = False,
              stop_at_edge: bool = False) -> tuple[np.ndarray, bool]:
        """Fixpoint reachable set from one site.

        Returns (packed set, touched_edge).  With stop_at_edge the iteration
        aborts as soon as the set meets the window's edge ring, which is all
        boundary-reach statistics need.
        """
        grow = self._grow_backward if backward else self._grow_forward
        r = self.seed(ix, iy)
        touched = bool((r & self.edge).any())
        if stop_at_edge and touched:
            return r, True
        while True:
            nxt = grow(r)
            if not touched and (nxt & self.edge).any():
                touched = True
                if stop_at_edge:
                    return nxt, True
            if np.array_equal(nxt, r):
                return r, touched
            r = nxt

    def unpack(self, r: np.ndarray) -> np.ndarray:
        return unpack_words(r, self.nx)

    @staticmethod
    def count(r: np.ndarray) -> int:
        return popcount(r)

    @staticmethod
    def touches(r: np.ndarray, other: np.ndarray) -> bool:
        return bool((r & other).any())


def reach_stats(arrows: np.ndarray, origin_index: tuple[int, int],
                kind: str) -> tuple[int, bool]:
    """(cluster size, edge contact of the set) for forward/backward/communicating."""
    pg = PackedGrid.from_arrows(arrows)
    ix, iy = origin_index
    if kind == "forward":
        r, touched = pg.reach(ix, iy, backward=False)
    elif kind == "backward":
        r, touched = pg.reach(ix, iy, backward=True)
    elif kind == "communicating":
        rf, _ = pg.reach(ix, iy, backward=False)
        rb, _ = pg.reach(ix, iy, backward=True)
        r = rf & rb
        return popcount(r), bool((r & pg.edge).any())
    else:
        raise ValueError(f"unknown reach kind {kind!r}")
    return popcount(r), touched
