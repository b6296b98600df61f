"""Domain model: game instances, strategies, validation, text I/O, generation.

An instance is a bipartite graph between ``n`` media and ``m`` customers.
Each edge ``uv`` carries two probabilities: ``p[uv]``, the chance that
funding medium ``u`` activates customer ``v``, and ``p_F[uv]``, the chance
that the follower's medium ``u`` flips a customer already won by the
leader.  The leader funds at most ``k_L`` media, the follower at most
``k_F``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np

# Default comparison tolerances used across the package.
FEASIBILITY_TOL = 1e-9
EQUALITY_TOL = 1e-6

Edge = tuple[int, int]


class CapExceededError(RuntimeError):
    """A strategy enumeration would exceed its configured size cap."""


class InstanceFormatError(ValueError):
    """Malformed instance text; remembers the offending 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True, order=True)
class PureStrategy:
    """A budget allocation: the set of funded media, as a sorted index tuple.

    Ordering (and therefore every deterministic tie-break in the package)
    is plain lexicographic comparison of the sorted tuples.
    """

    media: tuple[int, ...] = ()

    @staticmethod
    def of(media: Iterable[int]) -> "PureStrategy":
        return PureStrategy(tuple(sorted(set(int(u) for u in media))))

    @staticmethod
    def empty() -> "PureStrategy":
        return PureStrategy(())

    def __len__(self) -> int:
        return len(self.media)

    def __contains__(self, u: int) -> bool:
        return u in self.media

    def __iter__(self) -> Iterator[int]:
        return iter(self.media)

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        out[list(self.media)] = True
        return out

    def __repr__(self) -> str:
        return "{" + ",".join(f"u{u}" for u in self.media) + "}" if self.media else "{}"


@dataclass(frozen=True)
class MixedStrategy:
    """A finite-support distribution over leader pure strategies."""

    weights: Mapping[PureStrategy, float]

    def __post_init__(self):
        total = 0.0
        for s, w in self.weights.items():
            if w <= 0.0:
                raise ValueError(f"non-positive weight {w} on {s}")
            total += w
        if abs(total - 1.0) > FEASIBILITY_TOL:
            raise ValueError(f"weights sum to {total}, expected 1")

    @staticmethod
    def point_mass(strategy: PureStrategy) -> "MixedStrategy":
        return MixedStrategy({strategy: 1.0})

    @property
    def support(self) -> list[PureStrategy]:
        return sorted(self.weights)

    def max_support_size(self) -> int:
        return max((len(s) for s in self.weights), default=0)

    def __iter__(self) -> Iterator[tuple[PureStrategy, float]]:
        # Deterministic iteration order regardless of insertion history.
        return iter(sorted(self.weights.items()))


@dataclass(frozen=True, eq=False)
class FractionalAllocation:
    """A vector r in [0,1]^n of per-medium funding probabilities."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "r", r)
        if r.ndim != 1:
            raise ValueError("allocation must be a vector")
        if np.any(r < -1e-12) or np.any(r > 1.0 + 1e-12):
            raise ValueError("allocation coordinate outside [0, 1]")

    def total(self) -> float:
        return float(self.r.sum())


@dataclass(frozen=True, eq=False)
class BipartiteInfluenceGame:
    """One game instance; immutable after construction.

    Fields mirror the text format: sizes, edge set, probability maps, and
    budgets.  Derived adjacency views and flat numpy arrays are cached on
    first use and shared by every solver.
    """

    n: int
    m: int
    edges: tuple[Edge, ...]
    p: Mapping[Edge, float]
    p_F: Mapping[Edge, float]
    k_L: int
    k_F: int

    def __post_init__(self):
        edges = tuple(sorted((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "p", dict(self.p))
        object.__setattr__(self, "p_F", dict(self.p_F))

    @staticmethod
    def build(n: int, m: int, edge_rows: Iterable[tuple[int, int, float, float]],
              k_L: int, k_F: int) -> "BipartiteInfluenceGame":
        """Construct from ``(u, v, p, p_F)`` rows."""
        edges, p, p_F = [], {}, {}
        for u, v, pv, pfv in edge_rows:
            e = (int(u), int(v))
            edges.append(e)
            p[e] = float(pv)
            p_F[e] = float(pfv)
        return BipartiteInfluenceGame(n=int(n), m=int(m), edges=tuple(edges),
                                      p=p, p_F=p_F, k_L=int(k_L), k_F=int(k_F))

    # Flat edge arrays, aligned with self.edges order.
    @cached_property
    def edge_media(self) -> np.ndarray:
        return np.array([u for u, _ in self.edges], dtype=np.intp)

    @cached_property
    def edge_customers(self) -> np.ndarray:
        return np.array([v for _, v in self.edges], dtype=np.intp)

    @cached_property
    def edge_p(self) -> np.ndarray:
        return np.array([self.p[e] for e in self.edges], dtype=float)

    @cached_property
    def edge_pf(self) -> np.ndarray:
        return np.array([self.p_F[e] for e in self.edges], dtype=float)

    @cached_property
    def customer_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """N_v: media adjacent to each customer."""
        adj: list[list[int]] = [[] for _ in range(self.m)]
        for u, v in self.edges:
            adj[v].append(u)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def media_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """N_u: customers adjacent to each medium."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
        return tuple(tuple(a) for a in adj)


def validate(game: BipartiteInfluenceGame) -> str | None:
    """Return None when every instance invariant holds, else a description
    of the first violated one.  Violations are values, not exceptions."""
    if game.n < 0 or game.m < 0:
        return "negative media or customer count"
    if not 0 <= game.k_L <= game.n:
        return f"leader budget exceeds media count (k_L={game.k_L}, n={game.n})" \
            if game.k_L > game.n else f"negative leader budget k_L={game.k_L}"
    if not 0 <= game.k_F <= game.n:
        return f"follower budget exceeds media count (k_F={game.k_F}, n={game.n})" \
            if game.k_F > game.n else f"negative follower budget k_F={game.k_F}"
    seen: set[Edge] = set()
    for u, v in game.edges:
        if not (0 <= u < game.n and 0 <= v < game.m):
            return f"edge index out of range ({u}, {v})"
        if (u, v) in seen:
            return f"duplicate edge ({u}, {v})"
        seen.add((u, v))
    for e in game.edges:
        for name, table in (("p", game.p), ("p_F", game.p_F)):
            if e not in table:
                return f"missing {name} value on edge {e}"
            q = table[e]
            if not (0.0 <= q <= 1.0) or not math.isfinite(q):
                return f"probability out of range: {name}{e} = {q}"
    for name, table in (("p", game.p), ("p_F", game.p_F)):
        for e in table:
            if e not in seen:
                return f"{name} value on unknown edge {e}"
    return None


def is_disjoint(game: BipartiteInfluenceGame) -> bool:
    """True when no customer is adjacent to more than one medium.

    Isolated customers count as disjoint; they contribute nothing to any
    utility and do not break the bilinear structure.
    """
    return all(len(nv) <= 1 for nv in game.customer_neighbors)


def allocation_of(x: MixedStrategy, n: int) -> FractionalAllocation:
    """Aggregate a mixed strategy: r_u = total probability of funding u."""
    r = np.zeros(n)
    for s, w in x.weights.items():
        for u in s:
            r[u] += w
    return FractionalAllocation(np.clip(r, 0.0, 1.0))


def iter_subsets(n: int, max_size: int) -> Iterator[tuple[int, ...]]:
    """All subsets of range(n) with at most max_size elements, in
    lexicographic order of the sorted tuples: (), (0,), (0,1), ..."""
    max_size = min(max_size, n)

    def rec(prefix: list[int], start: int) -> Iterator[tuple[int, ...]]:
        yield tuple(prefix)
        if len(prefix) == max_size:
            return
        for u in range(start, n):
            prefix.append(u)
            yield from rec(prefix, u + 1)
            prefix.pop()

    return rec([], 0)


def count_subsets(n: int, max_size: int) -> int:
    return sum(math.comb(n, i) for i in range(min(max_size, n) + 1))


def load_instance(stream: TextIO | Iterable[str]) -> BipartiteInfluenceGame:
    """Parse the line-oriented instance format.

    Lines starting with ``#`` are comments and blank lines are skipped.
    The first data line is ``n m k_L k_F``; every further data line is
    ``u v p pF``.  Probabilities are read as the decimal literals in the
    file, so a save/load round trip is exact.
    """
    header = None
    edges: list[tuple[int, int, float, float]] = []
    seen: set[Edge] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 4:
                raise InstanceFormatError(line_no, "header must be 'n m k_L k_F'")
            try:
                n, m, k_L, k_F = (int(t) for t in tokens)
            except ValueError:
                raise InstanceFormatError(line_no, f"bad integer in header {tokens!r}") from None
            if n < 0 or m < 0:
                raise InstanceFormatError(line_no, "negative size in header")
            if not (0 <= k_L <= n and 0 <= k_F <= n):
                raise InstanceFormatError(line_no, "budget outside [0, n]")
            header = (n, m, k_L, k_F)
            continue
        if len(tokens) != 4:
            raise InstanceFormatError(line_no, "edge line must be 'u v p pF'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
            pv, pfv = float(tokens[2]), float(tokens[3])
        except ValueError:
            raise InstanceFormatError(line_no, f"bad number in edge line {tokens!r}") from None
        n, m, _, _ = header
        if not (0 <= u < n and 0 <= v < m):
            raise InstanceFormatError(line_no, f"edge index out of range ({u}, {v})")
        if (u, v) in seen:
            raise InstanceFormatError(line_no, f"duplicate edge ({u}, {v})")
        if not (0.0 <= pv <= 1.0 and 0.0 <= pfv <= 1.0):
            raise InstanceFormatError(line_no, "probability out of range")
        seen.add((u, v))
        edges.append((u, v, pv, pfv))
    if header is None:
        raise InstanceFormatError(0, "empty instance file")
    game = BipartiteInfluenceGame.build(header[0], header[1], edges, header[2], header[3])
    problem = validate(game)
    if problem is not None:
        raise InstanceFormatError(0, problem)
    return game


def dump_instance(game: BipartiteInfluenceGame, stream: TextIO,
                  comment: str | None = None) -> None:
    """Write the text format; floats use repr so reloads are bit-exact."""
    if comment:
        for line in comment.splitlines():
            stream.write(f"# {line}\n")
    stream.write(f"{game.n} {game.m} {game.k_L} {game.k_F}\n")
    for e in game.edges:
        stream.write(f"{e[0]} {e[1]} {game.p[e]!r} {game.p_F[e]!r}\n")


def generate_instance(n: int, m: int, mean_degree: float,
                      p_dist: tuple[float, float], pf_dist: tuple[float, float],
                      seed: int, k_L: int | None = None,
                      k_F: int | None = None) -> BipartiteInfluenceGame:
    """Seeded synthetic instance with dataset-shaped bipartite topology.

    Every customer gets the same number of neighbors, the rounded mean
    degree (at least 1), drawn uniformly without replacement; edge
    probabilities are drawn from the given uniform ranges.  The output is
    a pure function of the arguments.  Budgets default to k_L=1, k_F=2
    (the benchmark defaults), clamped to the media count.
    """
    for name, (a, b) in (("p", p_dist), ("pf", pf_dist)):
        if not (0.0 <= a <= b <= 1.0):
            raise ValueError(f"{name} distribution bounds must satisfy 0 <= a <= b <= 1, got ({a}, {b})")
    if mean_degree > n:
        raise ValueError(f"mean degree {mean_degree} exceeds media count {n}")
    if n <= 0 and m > 0:
        raise ValueError("cannot attach customers to an empty media set")
    k_L = min(1, n) if k_L is None else k_L
    k_F = min(2, n) if k_F is None else k_F
    degree = max(1, int(round(mean_degree))) if m > 0 else 0
    degree = min(degree, n)
    rng = np.random.default_rng(seed)
    rows = []
    for v in range(m):
        media = rng.choice(n, size=degree, replace=False)
        for u in sorted(int(u) for u in media):
            pv = rng.uniform(p_dist[0], p_dist[1])
            pfv = rng.uniform(pf_dist[0], pf_dist[1])
            rows.append((u, v, pv, pfv))
    game = BipartiteInfluenceGame.build(n, m, rows, k_L, k_F)
    problem = validate(game)
    if problem is not None:  # pragma: no cover - generator keeps invariants
        raise AssertionError(f"generated instance invalid: {problem}")
    return game
