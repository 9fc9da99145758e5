"""Click-log dataset model, JSON Lines serialization, and temporal splitting.

One example is a query with a fixed number of candidate documents, exactly
one of which carries the click.  The per-query propensity weight is the
bias-correction weight of the clicked position.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, SplitError, ValidationError


@dataclass
class CorpusMeta:
    vocab_size: int
    dense_dim: int
    docs_per_query: int = 6

    def to_dict(self):
        return {
            "vocab_size": self.vocab_size,
            "dense_dim": self.dense_dim,
            "docs_per_query": self.docs_per_query,
        }

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - {"vocab_size", "dense_dim", "docs_per_query"}
        if extra:
            raise ValidationError(f"unknown meta keys: {sorted(extra)}")
        return cls(int(d["vocab_size"]), int(d["dense_dim"]), int(d["docs_per_query"]))


@dataclass
class DocumentEntry:
    sparse_ngram_ids: list
    dense_features: np.ndarray
    clicked: bool
    shown_position: int

    def __post_init__(self):
        self.dense_features = np.asarray(self.dense_features, dtype=np.float64)


@dataclass
class QueryExample:
    query_id: str
    query_ngram_ids: list
    docs: list
    domain: str
    day: int
    propensity_weight: float

    @property
    def clicked_index(self):
        """0-based index of the clicked document within docs."""
        for i, d in enumerate(self.docs):
            if d.clicked:
                return i
        raise ValidationError(f"query {self.query_id}: no clicked document")


@dataclass
class Dataset:
    examples: list
    meta: CorpusMeta

    def __len__(self):
        return len(self.examples)

    def validate(self):
        """Check every structural invariant; raises ValidationError naming the query."""
        n = self.meta.docs_per_query
        for ex in self.examples:
            qid = ex.query_id
            if len(ex.docs) != n:
                raise ValidationError(f"query {qid}: expected {n} docs, got {len(ex.docs)}")
            clicks = sum(1 for d in ex.docs if d.clicked)
            if clicks != 1:
                raise ValidationError(f"query {qid}: exactly one click required, got {clicks}")
            positions = sorted(d.shown_position for d in ex.docs)
            if positions != list(range(1, n + 1)):
                raise ValidationError(f"query {qid}: positions must be a permutation of 1..{n}")
            if not (np.isfinite(ex.propensity_weight) and ex.propensity_weight > 0):
                raise ValidationError(f"query {qid}: propensity_weight must be finite and > 0")
            if ex.day < 0:
                raise ValidationError(f"query {qid}: day must be non-negative")
            if any(i < 0 for i in ex.query_ngram_ids):
                raise ValidationError(f"query {qid}: negative query n-gram id")
            for d in ex.docs:
                if d.dense_features.shape != (self.meta.dense_dim,):
                    raise ValidationError(
                        f"query {qid}: dense feature length {d.dense_features.shape[0]} "
                        f"!= corpus dense_dim {self.meta.dense_dim}"
                    )
                if not np.isfinite(d.dense_features).all():
                    raise ValidationError(f"query {qid}: non-finite dense features")
                if any(i < 0 for i in d.sparse_ngram_ids):
                    raise ValidationError(f"query {qid}: negative doc n-gram id")
        return self


def _doc_to_dict(doc):
    return {
        "sparse_ngrams": [int(i) for i in doc.sparse_ngram_ids],
        "dense": [float(v) for v in doc.dense_features],
        "clicked": bool(doc.clicked),
        "position": int(doc.shown_position),
    }


def _example_to_dict(ex):
    return {
        "query_id": ex.query_id,
        "domain": ex.domain,
        "day": int(ex.day),
        "query_ngrams": [int(i) for i in ex.query_ngram_ids],
        "propensity_weight": float(ex.propensity_weight),
        "docs": [_doc_to_dict(d) for d in ex.docs],
    }


def _example_from_dict(obj):
    docs = [
        DocumentEntry(
            sparse_ngram_ids=[int(i) for i in d["sparse_ngrams"]],
            dense_features=np.array(d["dense"], dtype=np.float64),
            clicked=bool(d["clicked"]),
            shown_position=int(d["position"]),
        )
        for d in obj["docs"]
    ]
    return QueryExample(
        query_id=str(obj["query_id"]),
        query_ngram_ids=[int(i) for i in obj["query_ngrams"]],
        docs=docs,
        domain=str(obj["domain"]),
        day=int(obj["day"]),
        propensity_weight=float(obj["propensity_weight"]),
    )


def save_jsonl(ds, path):
    """Write one JSON object per query example."""
    with open(path, "w") as f:
        for ex in ds.examples:
            f.write(json.dumps(_example_to_dict(ex)))
            f.write("\n")


def save_meta(meta, path):
    with open(path, "w") as f:
        json.dump(meta.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def load_meta(path):
    with open(path) as f:
        return CorpusMeta.from_dict(json.load(f))


def load_jsonl(path, meta=None):
    """Load and validate a dataset.

    meta defaults to the meta.json sidecar next to the file (the corpus
    vocabulary size is not recoverable from the examples themselves).
    """
    import os

    if meta is None:
        sidecar = os.path.join(os.path.dirname(os.path.abspath(path)), "meta.json")
        if not os.path.exists(sidecar):
            raise ValidationError(f"no corpus meta given and no sidecar at {sidecar}")
        meta = load_meta(sidecar)
    examples = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                examples.append(_example_from_dict(obj))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ParseError(str(e), line_number=lineno) from e
    return Dataset(examples=examples, meta=meta).validate()


def temporal_split(ds, ratio):
    """Split so every eval example's day strictly exceeds every train day.

    The boundary is the smallest day d* whose cumulative example fraction
    reaches ratio; a day is never split.  If that puts everything in train,
    the boundary backs off one day so eval is nonempty.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0,1), got {ratio}")
    if not ds.examples:
        raise SplitError("cannot split an empty dataset")
    days = sorted({ex.day for ex in ds.examples})
    if len(days) < 2:
        raise SplitError("all examples share one day; no temporal boundary exists")
    total = len(ds.examples)
    counts = {d: 0 for d in days}
    for ex in ds.examples:
        counts[ex.day] += 1
    boundary = days[-2]
    running = 0
    for d in days:
        running += counts[d]
        if running / total >= ratio:
            boundary = min(d, days[-2])
            break
    train = [ex for ex in ds.examples if ex.day <= boundary]
    evl = [ex for ex in ds.examples if ex.day > boundary]
    return Dataset(train, ds.meta), Dataset(evl, ds.meta)
