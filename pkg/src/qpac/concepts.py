"""Finite concept classes, distributions and VC-dimension tooling.

A domain is ``{0, ..., n-1}``. Classifiers are boolean tables over it and
render as bitstrings whose i-th character is the label of point i.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NORM_TOL = 1e-9
VC_GUARD = 20
JUNTA_MAX_VARS = 6
JUNTA_MAX_ROWS = 1 << 20


class Classifier:
    """Total boolean function on a finite domain."""

    __slots__ = ("_table", "_key")

    def __init__(self, table):
        arr = np.asarray(table)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("classifier table must be a non-empty 1-d sequence")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("classifier labels must be 0 or 1")
        self._table = arr.astype(np.uint8)
        self._table.flags.writeable = False
        self._key = self._table.tobytes()

    @classmethod
    def from_bits(cls, bits: str) -> Classifier:
        if set(bits) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {bits!r}")
        return cls([int(ch) for ch in bits])

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def bits(self) -> str:
        return "".join("1" if v else "0" for v in self._table)

    def complement(self) -> Classifier:
        return Classifier(1 - self._table)

    def __len__(self):
        return self._table.size

    def __getitem__(self, x) -> int:
        return int(self._table[x])

    def __call__(self, x) -> int:
        return int(self._table[x])

    def __eq__(self, other):
        return isinstance(other, Classifier) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Classifier({self.bits!r})"


class Distribution:
    """Probability vector over a finite domain."""

    __slots__ = ("probs",)

    def __init__(self, probs):
        p = np.asarray(probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("distribution must be a non-empty 1-d vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("distribution has negative or non-finite mass")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"distribution sums to {p.sum()!r}, not 1")
        p.flags.writeable = False
        self.probs = p

    @classmethod
    def uniform(cls, n: int) -> Distribution:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def delta(cls, n: int, x: int) -> Distribution:
        p = np.zeros(n)
        p[x] = 1.0
        return cls(p)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> Distribution:
        p = rng.dirichlet(np.ones(n))
        return cls(p / p.sum())

    def mass(self, mask: np.ndarray) -> float:
        """Total probability of the points where the boolean ``mask`` holds."""
        return float(np.sum(self.probs[np.asarray(mask, dtype=bool)]))

    def restricted(self, mask: np.ndarray) -> Distribution:
        """Renormalized restriction to the points where ``mask`` holds."""
        p = np.where(mask, self.probs, 0.0)
        total = p.sum()
        if total <= 0:
            raise ValueError("restriction has zero mass")
        return Distribution(p / total)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return f"Distribution({np.array2string(self.probs, precision=4)})"


@dataclass(frozen=True)
class LearningParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        for name in ("epsilon", "delta"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {v}")


class ConceptClass:
    """Finite, duplicate-free set of classifiers on a common domain.

    Members are stored as rows of a ``(len(C), n)`` uint8 array, in
    first-seen order.
    """

    def __init__(self, members):
        rows = [m.table if isinstance(m, Classifier) else np.asarray(m, dtype=np.uint8)
                for m in members]
        if not rows:
            raise ValueError("concept class must be non-empty")
        n = rows[0].size
        if any(r.size != n for r in rows):
            raise ValueError("all concepts must share the same domain")
        table = np.array(rows, dtype=np.uint8)
        _, first = np.unique(table, axis=0, return_index=True)
        table = table[np.sort(first)]
        table.flags.writeable = False
        self.table = table

    @property
    def domain_size(self) -> int:
        return self.table.shape[1]

    @property
    def members(self) -> list[Classifier]:
        return [Classifier(row) for row in self.table]

    def __len__(self):
        return self.table.shape[0]

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i) -> Classifier:
        return Classifier(self.table[i])

    def __contains__(self, c):
        return bool(np.any(np.all(self.table == c.table, axis=1)))

    def index(self, c: Classifier) -> int:
        hits = np.flatnonzero(np.all(self.table == c.table, axis=1))
        if hits.size == 0:
            raise ValueError(f"{c!r} is not in the class")
        return int(hits[0])

    def restrict(self, points) -> set[tuple[int, ...]]:
        """Distinct labellings of ``points`` realized by the class."""
        sub = self.table[:, list(points)]
        return {tuple(int(v) for v in row) for row in np.unique(sub, axis=0)}

    def with_fixed(self, x0: int, value: int = 0) -> ConceptClass:
        """Sub-class of concepts with ``c(x0) == value``."""
        return ConceptClass(self.table[self.table[:, x0] == value])

    @classmethod
    def full(cls, n: int) -> ConceptClass:
        if n > VC_GUARD:
            raise ValueError(f"full class on {n} points is too large to enumerate")
        return cls(list(itertools.product((0, 1), repeat=n)))

    @classmethod
    def point_functions(cls, n: int) -> ConceptClass:
        return cls(np.eye(n, dtype=np.uint8))

    def __repr__(self):
        return f"ConceptClass(size={len(self)}, domain_size={self.domain_size})"


def distance(h1: Classifier, h2: Classifier, dist: Distribution) -> float:
    """Probability under ``dist`` that the two classifiers disagree."""
    if len(h1) != len(h2) or len(h1) != len(dist):
        raise ValueError("classifiers and distribution must share a domain")
    return float(np.sum(dist.probs[h1.table != h2.table]))


def sample(dist: Distribution, rng: np.random.Generator) -> int:
    cdf = np.cumsum(dist.probs)
    return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(cdf) - 1)


def _codes(table: np.ndarray, points) -> np.ndarray:
    # each concept's labelling of `points` packed into an integer
    weights = 1 << np.arange(len(points), dtype=np.int64)
    return table[:, list(points)].astype(np.int64) @ weights


def is_shattered(cls: ConceptClass, points) -> bool:
    points = list(points)
    if len(set(points)) != len(points):
        raise ValueError("points must be distinct")
    if not points:
        return True
    if len(cls) < 2 ** len(points):
        return False
    return np.unique(_codes(cls.table, points)).size == 2 ** len(points)


def vc_dimension(cls: ConceptClass) -> int:
    """Exact VC dimension by level-wise search over shattered sets.

    A set of size k+1 is only tested when all of its k-subsets are
    shattered, since shattering is inherited by subsets.
    """
    n = cls.domain_size
    if n > VC_GUARD:
        raise ValueError(f"domain of size {n} exceeds the exhaustive-search guard {VC_GUARD}")
    level = {()}
    d = 0
    while level:
        nxt = set()
        for ys in level:
            start = ys[-1] + 1 if ys else 0
            for x in range(start, n):
                cand = ys + (x,)
                if any(cand[:i] + cand[i + 1:] not in level for i in range(len(cand) - 1)):
                    continue
                if is_shattered(cls, cand):
                    nxt.add(cand)
        if nxt:
            d += 1
        level = nxt
    return d


def shattered_set(cls: ConceptClass, size: int) -> tuple[int, ...] | None:
    """First shattered set of the given size in lexicographic order, if any."""
    for ys in itertools.combinations(range(cls.domain_size), size):
        if is_shattered(cls, ys):
            return ys
    return None


def perturbed_delta(points, x0: int, epsilon: float, domain_size: int | None = None) -> Distribution:
    """Mass ``1 - 4 epsilon`` on ``x0``, the rest split evenly over ``points - {x0}``."""
    points = sorted(set(points))
    if x0 not in points:
        raise ValueError("x0 must belong to the support set")
    if len(points) < 2:
        raise ValueError("support set needs at least two points")
    if not 0 < epsilon <= 0.25:
        raise ValueError(f"epsilon must lie in (0, 1/4], got {epsilon}")
    n = domain_size if domain_size is not None else max(points) + 1
    d = len(points) - 1
    p = np.zeros(n)
    for y in points:
        p[y] = 4 * epsilon / d
    p[x0] = 1 - 4 * epsilon
    return Distribution(p)


def junta_class(n: int, k: int) -> ConceptClass:
    """All functions on ``{0,1}^n`` depending on at most ``k`` coordinates.

    Point ``x`` of the domain is the integer whose bit ``i`` (LSB first) is
    coordinate ``i``.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n > JUNTA_MAX_VARS or math.comb(n, k) * 2 ** (2**k) > JUNTA_MAX_ROWS:
        raise ValueError(f"junta class with n={n}, k={k} exceeds the enumeration guard")
    xs = np.arange(2**n)
    bits = (xs[:, None] >> np.arange(n)) & 1
    rows = []
    for coords in itertools.combinations(range(n), k):
        # sub-index of every point on the chosen coordinates
        sub = bits[:, list(coords)] @ (1 << np.arange(k)) if k else np.zeros(2**n, dtype=int)
        for truth in itertools.product((0, 1), repeat=2**k):
            rows.append(np.asarray(truth, dtype=np.uint8)[sub])
    return ConceptClass(rows)


def junta_vc_bounds(n: int, k: int) -> tuple[float, float]:
    """``(log2 C(n,k) + 2^k, k log2(e n / k) + 2^k)``; the first never exceeds the second."""
    tight = math.log2(math.comb(n, k)) + 2**k
    loose = (k * math.log2(math.e * n / k) if k else 0.0) + 2**k
    return tight, loose


def load_problem(path) -> tuple[ConceptClass, Distribution | None]:
    """Read ``{"domain_size", "concepts": [bitstrings], "distribution"?}``."""
    doc = json.loads(Path(path).read_text())
    return problem_from_dict(doc)


def problem_from_dict(doc: dict) -> tuple[ConceptClass, Distribution | None]:
    n = int(doc["domain_size"])
    concepts = [Classifier.from_bits(b) for b in doc["concepts"]]
    if any(len(c) != n for c in concepts):
        raise ValueError(f"every concept bitstring must have length {n}")
    dist = None
    if doc.get("distribution") is not None:
        dist = Distribution(doc["distribution"])
        if len(dist) != n:
            raise ValueError(f"distribution must have {n} entries")
    return ConceptClass(concepts), dist


def problem_to_dict(cls: ConceptClass, dist: Distribution | None = None) -> dict:
    doc = {"domain_size": cls.domain_size, "concepts": [c.bits for c in cls]}
    if dist is not None:
        doc["distribution"] = [float(p) for p in dist.probs]
    return doc
