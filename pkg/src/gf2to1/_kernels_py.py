"""Pure-Python (numpy) implementations of the hot kernels.

This module mirrors ``_kernels.pyx`` function for function. It is used when
the compiled extension is unavailable or when ``GF2TO1_PURE_PYTHON=1``.
Arrays of field elements are ``uint32``; log tables are ``int64`` with
``log[0] == -1``.
"""

from __future__ import annotations

import numpy as np


def mulmod(a: int, b: int, modulus: int, n: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> n) & 1:
            a ^= modulus
    return r


def _mul_array_scalar(arr: np.ndarray, b: int, modulus: int, n: int) -> np.ndarray:
    acc = np.zeros(arr.shape, dtype=np.uint64)
    a = arr.astype(np.uint64)
    j = 0
    while b:
        if b & 1:
            acc ^= a << np.uint64(j)
        b >>= 1
        j += 1
    for bit in range(2 * n - 2, n - 1, -1):
        hit = ((acc >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        acc[hit] ^= np.uint64(modulus << (bit - n))
    return acc.astype(np.uint32)


def build_exp_table(n: int, modulus: int, g: int) -> np.ndarray:
    order = (1 << n) - 1
    exp = np.empty(order, dtype=np.uint32)
    block = min(order, 256)
    x = 1
    for i in range(block):
        exp[i] = x
        x = mulmod(x, g, modulus, n)
    filled = block
    while filled < order:
        step = _pow(g, filled, modulus, n)
        take = min(filled, order - filled)
        exp[filled:filled + take] = _mul_array_scalar(exp[:take], step, modulus, n)
        filled += take
    return exp


def _pow(a: int, e: int, modulus: int, n: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = mulmod(r, a, modulus, n)
        a = mulmod(a, a, modulus, n)
        e >>= 1
    return r


def linear_table(images, n: int) -> np.ndarray:
    """Values of an F2-linear map at every element, from the images of 1, x, ..., x^(n-1)."""
    table = np.zeros(1 << n, dtype=np.uint32)
    for i in range(n):
        lo = 1 << i
        table[lo:2 * lo] = table[:lo] ^ np.uint32(images[i])
    return table


def term_accumulate(out: np.ndarray, x: np.ndarray, u: np.ndarray, c: int, r: int, e: int,
                    exp: np.ndarray, log: np.ndarray) -> None:
    """In place: ``out ^= c * x**r * u**e`` elementwise (0**0 == 1)."""
    if c == 0:
        return
    order = exp.shape[0]
    acc = np.full(out.shape, int(log[c]), dtype=np.int64)
    alive = np.ones(out.shape, dtype=bool)
    if r:
        lx = log[x]
        alive &= lx >= 0
        acc += np.where(lx >= 0, lx, 0) * (r % order)
    if e:
        lu = log[u]
        alive &= lu >= 0
        acc += np.where(lu >= 0, lu, 0) * (e % order)
    vals = exp[acc % order]
    out[alive] ^= vals[alive]


def value_counts(values: np.ndarray, q: int) -> np.ndarray:
    return np.bincount(values, minlength=q)


def partners(values: np.ndarray) -> np.ndarray:
    """Index of the other member of each value class; -1 if the class is not a pair."""
    m = values.shape[0]
    out = np.full(m, -1, dtype=np.int64)
    if m == 0:
        return out
    order = np.argsort(values, kind="stable")
    sv = values[order]
    starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    sizes = np.diff(np.r_[starts, m])
    pair_starts = starts[sizes == 2]
    a = order[pair_starts]
    b = order[pair_starts + 1]
    out[a] = b
    out[b] = a
    return out
