"""Feed-forward scorer over document embeddings and the click loss.

The click loss has two primary forms: the literal per-document sigmoid
cross-entropy (only the clicked document contributes) and softmax
cross-entropy over a query's candidates.  A full binary cross-entropy over
all candidates is available as a third, off-by-default mode.
"""

import enum

import numpy as np

from . import mlp
from .backend import kernels as K
from .errors import NumericError, ShapeError, ValidationError
from .params import RankerParams


class LossMode(enum.Enum):
    LITERAL_SIGMOID = "LiteralSigmoid"
    SOFTMAX_OVER_CANDIDATES = "SoftmaxOverCandidates"
    FULL_BINARY_CE = "FullBinaryCE"


_LOSS_KERNELS = {
    LossMode.LITERAL_SIGMOID: "sigmoid_click_loss",
    LossMode.SOFTMAX_OVER_CANDIDATES: "softmax_click_loss",
    LossMode.FULL_BINARY_CE: "binary_ce_click_loss",
}


def score(x, params):
    """Scalar relevance score of one embedded document."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("score takes a single embedding vector")
    scores, _ = mlp.forward(x[None, :], params)
    return float(scores[0])


def score_batch(x, params):
    """Scores for a batch of embeddings; returns (scores, cache)."""
    return mlp.forward(x, params)


def query_loss(scores, clicks, mode=LossMode.SOFTMAX_OVER_CANDIDATES):
    """Click loss of one query given its candidate scores.

    clicks is a boolean indicator with exactly one True; fewer candidates
    than two make the ranking problem vacuous, so N >= 2 is required.
    """
    scores = np.asarray(scores, dtype=np.float64)
    clicks = np.asarray(clicks, dtype=bool)
    if scores.shape != clicks.shape or scores.ndim != 1:
        raise ShapeError("scores and clicks must be equal-length vectors")
    if scores.size < 2:
        raise ValidationError("a query needs at least two candidates")
    n_clicked = int(clicks.sum())
    if n_clicked != 1:
        raise ValidationError(f"exactly one click required, got {n_clicked}")
    clicked = np.array([int(np.argmax(clicks))], dtype=np.int64)
    loss, _ = getattr(K, _LOSS_KERNELS[mode])(scores[None, :], clicked)
    return float(loss)


def batch_loss(x, clicked_idx, docs_per_query, params, mode=LossMode.SOFTMAX_OVER_CANDIDATES):
    """Mean query loss over a batch of embedded documents.

    x is (n_queries * docs_per_query, embed_dim) in query-major order;
    clicked_idx gives the clicked column per query.  Returns
    (loss, ranker_grads, dx) with gradients of the mean loss.
    """
    x = np.asarray(x, dtype=np.float64)
    nq = x.shape[0] // docs_per_query
    if nq * docs_per_query != x.shape[0] or nq == 0:
        raise ShapeError("batch rows must be a nonempty multiple of docs_per_query")
    scores, cache = mlp.forward(x, params)
    loss, dscores = getattr(K, _LOSS_KERNELS[mode])(
        scores.reshape(nq, docs_per_query), np.asarray(clicked_idx, dtype=np.int64)
    )
    if not np.isfinite(loss):
        raise NumericError("click loss is non-finite")
    layer_grads, dx = mlp.backward(params, cache, dscores.ravel())
    return float(loss), mlp.grads_to_net(RankerParams, layer_grads), dx


def rank_documents(scores):
    """1-based document indices in ranked order: descending score, ties by
    original index ascending."""
    scores = np.asarray(scores, dtype=np.float64)
    if np.isnan(scores).any():
        raise NumericError("NaN score cannot be ranked")
    order = np.argsort(-scores, kind="stable")
    return order + 1


def clicked_rank(scores, clicked_index):
    """Rank (1-based) that rank_documents assigns to the clicked document."""
    scores = np.asarray(scores, dtype=np.float64)
    if np.isnan(scores).any():
        raise NumericError("NaN score cannot be ranked")
    c = scores[clicked_index]
    higher = int(np.sum(scores > c))
    tied_before = int(np.sum(scores[:clicked_index] == c))
    return higher + tied_before + 1
