"""Observation layout and candidate interval families.

The band construction works on the distinct covariate values z_1 < ... <
z_d with prefix counts N_j = #{i : x_i <= z_j}.  Candidate intervals
[z_j, z_k] are restricted to those whose number of distinct grid points
k - j + 1 lies in a cardinality set D; the per-interval observation count
N(B) = N_k - N_{j-1} (which includes ties) is what the binomial critical
values are indexed by.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "Grid",
    "CardinalityRule",
    "IntervalFamily",
    "build_grid",
    "expand_rule",
    "build_family",
]


@dataclass(frozen=True)
class Dataset:
    """Observed (x, y) pairs sorted by x, ties in x broken by y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise ValueError("x and y must be 1-d arrays of equal length")
        if len(x) == 0:
            raise ValueError("dataset is empty")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("x and y must be finite")
        if np.any(np.diff(x) < 0):
            raise ValueError("x must be sorted ascending (use Dataset.from_pairs)")
        same_x = x[1:] == x[:-1]
        if np.any(same_x & (y[1:] < y[:-1])):
            raise ValueError("ties in x must be ordered by y (use Dataset.from_pairs)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, x, y) -> "Dataset":
        """Sort pairs by (x, y) and build a Dataset."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        order = np.lexsort((y, x))
        return cls(x[order], y[order])

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Grid:
    """Distinct sorted covariate values with observation prefix counts."""

    z: np.ndarray       # strictly increasing, length d
    prefix: np.ndarray  # int64, length d + 1, prefix[0] = 0, prefix[d] = n

    @property
    def n_distinct(self) -> int:
        return len(self.z)

    @property
    def n(self) -> int:
        return int(self.prefix[-1])


def build_grid(data: Dataset) -> Grid:
    z, counts = np.unique(data.x, return_counts=True)
    prefix = np.zeros(len(z) + 1, dtype=np.int64)
    np.cumsum(counts, out=prefix[1:])
    return Grid(z=z, prefix=prefix)


def _triangular(cap: int) -> list[int]:
    out, step, a = [], 1, 1
    while a <= cap:
        out.append(a)
        a += step
        step += 1
    return out


def _fibonacci(cap: int) -> list[int]:
    out, a, b = [], 1, 2
    while a <= cap:
        out.append(a)
        a, b = b, a + b
    return out


def _pow2(cap: int) -> list[int]:
    out, a = [], 1
    while a <= cap:
        out.append(a)
        a *= 2
    return out


@dataclass(frozen=True)
class CardinalityRule:
    """Which interval cardinalities are admitted.

    variant: "all", "triangular" (1, 2, 4, 7, 11, ...), "fibonacci"
    (1, 2, 3, 5, 8, ...), "pow2" (1, 2, 4, 8, ...) or "explicit".
    cap: "half" admits cardinalities up to ceil(d/2), "full" up to d.
    """

    variant: str = "triangular"
    cap: str = "half"
    values: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.variant not in ("all", "triangular", "fibonacci", "pow2", "explicit"):
            raise ValueError(f"unknown rule variant {self.variant!r}")
        if self.cap not in ("half", "full"):
            raise ValueError(f"cap must be 'half' or 'full', got {self.cap!r}")
        if self.variant == "explicit" and not self.values:
            raise ValueError("explicit rule needs a nonempty value list")

    def cap_value(self, n_distinct: int) -> int:
        return (n_distinct + 1) // 2 if self.cap == "half" else n_distinct

    def label(self) -> str:
        return f"{self.variant}/{self.cap}"


def expand_rule(rule: CardinalityRule, n_distinct: int) -> np.ndarray:
    """The admitted cardinality set D as a sorted int array."""
    if n_distinct < 1:
        raise ValueError("grid must hold at least one point")
    cap = rule.cap_value(n_distinct)
    if rule.variant == "all":
        vals = list(range(1, cap + 1))
    elif rule.variant == "triangular":
        vals = _triangular(cap)
    elif rule.variant == "fibonacci":
        vals = _fibonacci(cap)
    elif rule.variant == "pow2":
        vals = _pow2(cap)
    else:
        vals = sorted(set(int(v) for v in rule.values))
        if vals and (vals[0] < 1 or vals[-1] > n_distinct):
            raise ValueError(f"explicit cardinalities must lie in 1..{n_distinct}")
        if 1 not in vals:
            raise ValueError("cardinality set must contain 1")
        vals = [v for v in vals if v <= cap]
    return np.asarray(vals, dtype=np.int64)


@dataclass(frozen=True)
class IntervalFamily:
    """Candidate intervals, one row per member [z[start], z[stop]].

    count holds the observation count N(B) per member.  card_mask is a
    boolean lookup over cardinalities (index = number of grid points) so
    the band sweep can test membership in O(1).
    """

    start: np.ndarray      # int32, 0-based grid index of left endpoint
    stop: np.ndarray       # int32, inclusive right endpoint
    count: np.ndarray      # int64, N(B)
    cards: np.ndarray      # sorted admitted cardinality set D
    card_mask: np.ndarray  # bool, length n_distinct + 1
    n_distinct: int
    n: int

    @property
    def size(self) -> int:
        return len(self.start)

    def h(self) -> tuple[np.ndarray, np.ndarray]:
        """Multiplicities: (m values, number of members with N(B) = m)."""
        return np.unique(self.count, return_counts=True)


def build_family(grid: Grid, rule: CardinalityRule) -> IntervalFamily:
    d = grid.n_distinct
    cards = expand_rule(rule, d)
    starts, stops = [], []
    for c in cards:
        c = int(c)
        if c > d:
            continue
        js = np.arange(0, d - c + 1, dtype=np.int32)
        starts.append(js)
        stops.append(js + (c - 1))
    start = np.concatenate(starts) if starts else np.empty(0, dtype=np.int32)
    stop = np.concatenate(stops) if stops else np.empty(0, dtype=np.int32)
    count = grid.prefix[stop + 1] - grid.prefix[start]
    mask = np.zeros(d + 1, dtype=bool)
    mask[cards[cards <= d]] = True
    return IntervalFamily(
        start=start,
        stop=stop,
        count=count.astype(np.int64),
        cards=cards,
        card_mask=mask,
        n_distinct=d,
        n=grid.n,
    )
