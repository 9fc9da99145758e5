"""Per-document input embedding.

Each document's vector is tanh(W_f . concat(mean query-table rows, mean
doc-table rows, dense features) + b_f).  Bags pool by mean (duplicates count
with multiplicity); an empty bag contributes a zero slot.
"""

import numpy as np

from .backend import kernels as K
from .errors import ShapeError, VocabError
from .packed import doc_rows_for_queries
from .params import EmbedderParams
from .linalg import LayerParams


def _check_ids(ids, vocab, what):
    for i in ids:
        if i < 0 or i >= vocab:
            raise VocabError(f"{what} n-gram id {i} outside vocabulary [0, {vocab})")


def embed(example, params):
    """Embed one query's documents: returns (docs_per_query, embed_dim)."""
    vocab = params.query_table.shape[0]
    _check_ids(example.query_ngram_ids, vocab, "query")
    for doc in example.docs:
        _check_ids(doc.sparse_ngram_ids, params.doc_table.shape[0], "document")

    n = len(example.docs)
    kq = params.query_table.shape[1]
    kd = params.doc_table.shape[1]
    q_vec = np.zeros(kq)
    if example.query_ngram_ids:
        q_vec = params.query_table[np.asarray(example.query_ngram_ids)].mean(axis=0)
    concat = np.zeros((n, kq + kd + example.docs[0].dense_features.shape[0]))
    for i, doc in enumerate(example.docs):
        concat[i, :kq] = q_vec
        if doc.sparse_ngram_ids:
            concat[i, kq : kq + kd] = params.doc_table[np.asarray(doc.sparse_ngram_ids)].mean(axis=0)
        concat[i, kq + kd :] = doc.dense_features
    layer = params.final_layer
    if concat.shape[1] != layer.in_dim:
        raise ShapeError(f"concat width {concat.shape[1]} != final layer in_dim {layer.in_dim}")
    return K.affine_tanh(concat, layer.weight, layer.bias)


def embed_batch(packed, qrows, params):
    """Embed the documents of the selected queries from a packed dataset.

    Returns (x, cache): x is (len(qrows)*N, embed_dim) in query-major row
    order; cache feeds embed_batch_backward.
    """
    n = packed.docs_per_query
    qrows = np.asarray(qrows, dtype=np.int64)
    drows = doc_rows_for_queries(qrows, n)
    kq = params.query_table.shape[1]
    kd = params.doc_table.shape[1]

    q_vecs = K.bag_means(params.query_table, packed.query_ngram_ids, packed.query_ngram_offsets, qrows)
    d_vecs = K.bag_means(params.doc_table, packed.doc_ngram_ids, packed.doc_ngram_offsets, drows)

    concat = np.empty((drows.shape[0], kq + kd + packed.dense.shape[1]))
    concat[:, :kq] = np.repeat(q_vecs, n, axis=0)
    concat[:, kq : kq + kd] = d_vecs
    concat[:, kq + kd :] = packed.dense[drows]

    layer = params.final_layer
    if concat.shape[1] != layer.in_dim:
        raise ShapeError(f"concat width {concat.shape[1]} != final layer in_dim {layer.in_dim}")
    x = K.affine_tanh(concat, layer.weight, layer.bias)
    return x, (concat, x, qrows, drows)


def embed_batch_backward(packed, params, cache, dx):
    """Exact gradients of embed_batch w.r.t. all embedder parameters.

    Table rows never referenced by the batch receive exactly zero gradient.
    """
    concat, x, qrows, drows = cache
    n = packed.docs_per_query
    kq = params.query_table.shape[1]
    kd = params.doc_table.shape[1]
    vocab = params.query_table.shape[0]

    dz = K.tanh_grad(x, np.asarray(dx, dtype=np.float64))
    dw, db, dconcat = K.linear_backward(concat, params.final_layer.weight, dz)

    # the query slot is shared by all N docs of a query: sum their grads
    dq_per_doc = dconcat[:, :kq]
    dq = dq_per_doc.reshape(qrows.shape[0], n, kq).sum(axis=1)
    dquery_table = K.bag_means_backward(
        packed.query_ngram_ids, packed.query_ngram_offsets, qrows, dq, vocab
    )
    ddoc_table = K.bag_means_backward(
        packed.doc_ngram_ids, packed.doc_ngram_offsets, drows, dconcat[:, kq : kq + kd], vocab
    )
    return EmbedderParams(
        query_table=dquery_table,
        doc_table=ddoc_table,
        final_layer=LayerParams(dw, db),
    )


def embed_backward(example, params, upstream):
    """Single-example gradient wrapper around the batched path."""
    from .data import Dataset, CorpusMeta
    from .packed import pack_dataset

    meta = CorpusMeta(
        vocab_size=params.query_table.shape[0],
        dense_dim=example.docs[0].dense_features.shape[0],
        docs_per_query=len(example.docs),
    )
    packed = pack_dataset(Dataset([example], meta))
    _, cache = embed_batch(packed, np.array([0]), params)
    return embed_batch_backward(packed, params, cache, upstream)
