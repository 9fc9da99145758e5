"""Pure-numpy reference implementations of the hot training kernels.

Mirrored one-to-one by :mod:`rankadapt.kernels_numba`; the active set is
picked by :mod:`rankadapt.backend`.  All arrays are float64 / int64, weights
use the (out_dim, in_dim) convention, batches are row-major (n, dim).
"""

import numpy as np

BACKEND_NAME = "numpy"


def affine(x, w, b):
    """x @ w.T + b for a batch x of shape (n, in_dim)."""
    return x @ w.T + b


def affine_tanh(x, w, b):
    """tanh(x @ w.T + b)."""
    return np.tanh(x @ w.T + b)


def linear_backward(x, w, dz):
    """Gradients of z = x @ w.T + b given upstream dz.

    Returns (dw, db, dx).
    """
    return dz.T @ x, dz.sum(axis=0), dz @ w


def tanh_grad(h, dh):
    """Chain upstream dh through tanh whose *output* was h."""
    return dh * (1.0 - h * h)


def bag_means(table, ids, offsets, rows):
    """Mean-pool table rows for each requested bag.

    ids/offsets form a CSR-style ragged list of id bags; ``rows`` selects
    which bags to pool.  Empty bags contribute a zero vector.
    """
    m = rows.shape[0]
    k = table.shape[1]
    out = np.zeros((m, k))
    starts = offsets[rows]
    lens = offsets[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return out
    out_row = np.repeat(np.arange(m), lens)
    pos = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens) + np.repeat(starts, lens)
    np.add.at(out, out_row, table[ids[pos]])
    nonzero = lens > 0
    out[nonzero] /= lens[nonzero, None]
    return out


def bag_means_backward(ids, offsets, rows, upstream, vocab):
    """Scatter upstream bag gradients back to a dense (vocab, k) table grad.

    Each id in a bag of size L receives upstream_row / L; ids absent from
    every selected bag get exactly zero.
    """
    k = upstream.shape[1]
    grad = np.zeros((vocab, k))
    starts = offsets[rows]
    lens = offsets[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return grad
    out_row = np.repeat(np.arange(rows.shape[0]), lens)
    pos = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens) + np.repeat(starts, lens)
    np.add.at(grad, ids[pos], upstream[out_row] / lens[out_row, None])
    return grad


def softmax_click_loss(scores, clicked):
    """Mean softmax cross-entropy of the clicked candidate per query.

    scores: (n_queries, n_docs); clicked: int index per query.
    Returns (loss, dscores) with dscores the gradient of the mean loss.
    """
    n = scores.shape[0]
    shifted = scores - scores.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    denom = expz.sum(axis=1)
    p = expz / denom[:, None]
    rows = np.arange(n)
    loss = float(np.mean(np.log(denom) - shifted[rows, clicked]))
    dscores = p / n
    dscores[rows, clicked] -= 1.0 / n
    return loss, dscores


def sigmoid_click_loss(scores, clicked):
    """Mean -log(logistic(score_clicked)); unclicked scores get zero gradient."""
    n = scores.shape[0]
    rows = np.arange(n)
    s = scores[rows, clicked]
    loss = float(np.mean(np.maximum(-s, 0.0) + np.log1p(np.exp(-np.abs(s)))))
    dscores = np.zeros_like(scores)
    dscores[rows, clicked] = (1.0 / (1.0 + np.exp(-s)) - 1.0) / n
    return loss, dscores


def binary_ce_click_loss(scores, clicked):
    """Mean full binary cross-entropy: clicked docs count as 1, others as 0."""
    n = scores.shape[0]
    rows = np.arange(n)
    softplus = np.maximum(scores, 0.0) + np.log1p(np.exp(-np.abs(scores)))
    s = scores[rows, clicked]
    # softplus(s) - s == softplus(-s), turning the clicked term into -log(p)
    loss = float(np.mean(softplus.sum(axis=1) - s))
    dscores = 1.0 / (1.0 + np.exp(-scores)) / n
    dscores[rows, clicked] -= 1.0 / n
    return loss, dscores
