"""Array-of-structs to struct-of-arrays conversion for the training loop.

Datasets are packed once into flat id/offset arrays so a mini-batch step is
pure index arithmetic plus kernel calls.  Documents of query q occupy rows
q*N .. q*N+N-1, in list order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import VocabError


@dataclass
class PackedDataset:
    n_queries: int
    docs_per_query: int
    query_ids: list
    query_ngram_ids: np.ndarray  # i8, flat
    query_ngram_offsets: np.ndarray  # i8, (n_queries + 1,)
    doc_ngram_ids: np.ndarray  # i8, flat
    doc_ngram_offsets: np.ndarray  # i8, (n_docs + 1,)
    dense: np.ndarray  # f8, (n_docs, dense_dim)
    clicked_col: np.ndarray  # i8, clicked doc index within each query
    weights: np.ndarray  # f8, per-query propensity weight
    days: np.ndarray  # i8
    vocab_size: int

    @property
    def n_docs(self):
        return self.n_queries * self.docs_per_query


def pack_dataset(ds):
    """Flatten a validated Dataset into contiguous arrays.

    Raises VocabError if any n-gram id is outside the corpus vocabulary
    (this is the lookup precondition and is enforced once, here).
    """
    n = ds.meta.docs_per_query
    vocab = ds.meta.vocab_size
    nq = len(ds.examples)

    q_ids_flat = []
    q_offsets = np.zeros(nq + 1, dtype=np.int64)
    d_ids_flat = []
    d_offsets = np.zeros(nq * n + 1, dtype=np.int64)
    dense = np.zeros((nq * n, ds.meta.dense_dim))
    clicked = np.zeros(nq, dtype=np.int64)
    weights = np.zeros(nq)
    days = np.zeros(nq, dtype=np.int64)
    query_ids = []

    for qi, ex in enumerate(ds.examples):
        query_ids.append(ex.query_id)
        if any(i >= vocab for i in ex.query_ngram_ids):
            raise VocabError(f"query {ex.query_id}: query n-gram id >= vocab_size {vocab}")
        q_ids_flat.extend(ex.query_ngram_ids)
        q_offsets[qi + 1] = len(q_ids_flat)
        weights[qi] = ex.propensity_weight
        days[qi] = ex.day
        clicked[qi] = ex.clicked_index
        for di, doc in enumerate(ex.docs):
            row = qi * n + di
            if any(i >= vocab for i in doc.sparse_ngram_ids):
                raise VocabError(f"query {ex.query_id}: doc n-gram id >= vocab_size {vocab}")
            d_ids_flat.extend(doc.sparse_ngram_ids)
            d_offsets[row + 1] = len(d_ids_flat)
            dense[row] = doc.dense_features

    return PackedDataset(
        n_queries=nq,
        docs_per_query=n,
        query_ids=query_ids,
        query_ngram_ids=np.array(q_ids_flat, dtype=np.int64),
        query_ngram_offsets=q_offsets,
        doc_ngram_ids=np.array(d_ids_flat, dtype=np.int64),
        doc_ngram_offsets=d_offsets,
        dense=dense,
        clicked_col=clicked,
        weights=weights,
        days=days,
        vocab_size=vocab,
    )


def doc_rows_for_queries(qrows, docs_per_query):
    """Global document row indices for the given query rows, query-major."""
    qrows = np.asarray(qrows, dtype=np.int64)
    return (qrows[:, None] * docs_per_query + np.arange(docs_per_query, dtype=np.int64)).ravel()
