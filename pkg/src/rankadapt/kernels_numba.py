"""Numba-compiled versions of the hot training kernels.

Same signatures and semantics as :mod:`rankadapt.kernels_numpy`.  Loops are
fused and sequential: no parallel reductions, so results are reproducible
run to run.  First call pays a JIT compile; cache=True persists it.
"""

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True)
def affine(x, w, b):
    n, din = x.shape
    dout = w.shape[0]
    out = np.empty((n, dout))
    for i in range(n):
        for o in range(dout):
            acc = b[o]
            for j in range(din):
                acc += w[o, j] * x[i, j]
            out[i, o] = acc
    return out


@njit(cache=True)
def affine_tanh(x, w, b):
    n, din = x.shape
    dout = w.shape[0]
    out = np.empty((n, dout))
    for i in range(n):
        for o in range(dout):
            acc = b[o]
            for j in range(din):
                acc += w[o, j] * x[i, j]
            out[i, o] = math.tanh(acc)
    return out


@njit(cache=True)
def linear_backward(x, w, dz):
    n, din = x.shape
    dout = w.shape[0]
    dw = np.zeros((dout, din))
    db = np.zeros(dout)
    dx = np.zeros((n, din))
    for i in range(n):
        for o in range(dout):
            g = dz[i, o]
            db[o] += g
            for j in range(din):
                dw[o, j] += g * x[i, j]
                dx[i, j] += g * w[o, j]
    return dw, db, dx


@njit(cache=True)
def tanh_grad(h, dh):
    n, k = h.shape
    out = np.empty((n, k))
    for i in range(n):
        for j in range(k):
            out[i, j] = dh[i, j] * (1.0 - h[i, j] * h[i, j])
    return out


@njit(cache=True)
def bag_means(table, ids, offsets, rows):
    m = rows.shape[0]
    k = table.shape[1]
    out = np.zeros((m, k))
    for r in range(m):
        start = offsets[rows[r]]
        end = offsets[rows[r] + 1]
        n = end - start
        if n == 0:
            continue
        for p in range(start, end):
            row = ids[p]
            for j in range(k):
                out[r, j] += table[row, j]
        inv = 1.0 / n
        for j in range(k):
            out[r, j] *= inv
    return out


@njit(cache=True)
def bag_means_backward(ids, offsets, rows, upstream, vocab):
    k = upstream.shape[1]
    grad = np.zeros((vocab, k))
    for r in range(rows.shape[0]):
        start = offsets[rows[r]]
        end = offsets[rows[r] + 1]
        n = end - start
        if n == 0:
            continue
        inv = 1.0 / n
        for p in range(start, end):
            row = ids[p]
            for j in range(k):
                grad[row, j] += upstream[r, j] * inv
    return grad


@njit(cache=True)
def softmax_click_loss(scores, clicked):
    n, nd = scores.shape
    dscores = np.empty((n, nd))
    loss = 0.0
    for i in range(n):
        mx = scores[i, 0]
        for j in range(1, nd):
            if scores[i, j] > mx:
                mx = scores[i, j]
        denom = 0.0
        for j in range(nd):
            denom += math.exp(scores[i, j] - mx)
        loss += math.log(denom) - (scores[i, clicked[i]] - mx)
        for j in range(nd):
            dscores[i, j] = math.exp(scores[i, j] - mx) / denom / n
        dscores[i, clicked[i]] -= 1.0 / n
    return loss / n, dscores


@njit(cache=True)
def sigmoid_click_loss(scores, clicked):
    n = scores.shape[0]
    dscores = np.zeros(scores.shape)
    loss = 0.0
    for i in range(n):
        s = scores[i, clicked[i]]
        loss += max(-s, 0.0) + math.log1p(math.exp(-abs(s)))
        dscores[i, clicked[i]] = (1.0 / (1.0 + math.exp(-s)) - 1.0) / n
    return loss / n, dscores


@njit(cache=True)
def binary_ce_click_loss(scores, clicked):
    n, nd = scores.shape
    dscores = np.empty((n, nd))
    loss = 0.0
    for i in range(n):
        for j in range(nd):
            s = scores[i, j]
            loss += max(s, 0.0) + math.log1p(math.exp(-abs(s)))
            dscores[i, j] = 1.0 / (1.0 + math.exp(-s)) / n
        loss -= scores[i, clicked[i]]
        dscores[i, clicked[i]] -= 1.0 / n
    return loss / n, dscores
