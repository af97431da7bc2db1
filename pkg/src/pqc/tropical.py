"""Max-plus (tropical) matrices over ℕ ∪ {−∞}.

Addition is ``max``, multiplication is ``+``, the additive unit is −∞ and
the multiplicative unit 0. Matrix product therefore computes maximum path
weights: ``(A ⊙ B)[i,k] = max_j (A[i,j] + B[j,k])``.

Backed by float numpy arrays (−∞ as ``-inf``); all finite entries are
integers and compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEG_INF = float("-inf")


@dataclass(frozen=True)
class TropicalMatrix:
    """An immutable max-plus matrix (possibly with zero rows or columns)."""

    data: np.ndarray  # shape (rows, cols), dtype float

    def __post_init__(self):
        a = np.asarray(self.data, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"tropical matrix must be 2-d, got shape {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @staticmethod
    def build(rows: list[list[float]] | np.ndarray, *, shape=None) -> "TropicalMatrix":
        if shape is not None:
            return TropicalMatrix(np.asarray(rows, dtype=float).reshape(shape))
        return TropicalMatrix(np.asarray(rows, dtype=float))

    @staticmethod
    def zeros(rows: int, cols: int) -> "TropicalMatrix":
        """The tropical zero matrix: all entries −∞."""
        return TropicalMatrix(np.full((rows, cols), NEG_INF))

    @staticmethod
    def eye(n: int) -> "TropicalMatrix":
        """The tropical identity: 0 on the diagonal, −∞ elsewhere."""
        m = np.full((n, n), NEG_INF)
        np.fill_diagonal(m, 0.0)
        return TropicalMatrix(m)

    @staticmethod
    def permutation(perm: tuple[int, ...]) -> "TropicalMatrix":
        """Row i has a single 0 in column perm[i]."""
        n = len(perm)
        m = np.full((n, n), NEG_INF)
        for i, j in enumerate(perm):
            m[i, j] = 0.0
        return TropicalMatrix(m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    def matmul(self, other: "TropicalMatrix") -> "TropicalMatrix":
        a, b = self.data, other.data
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} ⊙ {b.shape}")
        if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
            return TropicalMatrix.zeros(a.shape[0], b.shape[1])
        with np.errstate(invalid="ignore"):
            out = (a[:, :, None] + b[None, :, :]).max(axis=1)
        # -inf + inf never occurs (entries are -inf or finite), but -inf + -inf
        # produces -inf with an invalid-op warning suppressed above.
        return TropicalMatrix(out)

    def pointwise_max(self, other: "TropicalMatrix") -> "TropicalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return TropicalMatrix(np.maximum(self.data, other.data))

    def direct_sum(self, other: "TropicalMatrix") -> "TropicalMatrix":
        """Block-diagonal combination (pads with −∞)."""
        r1, c1 = self.shape
        r2, c2 = other.shape
        out = np.full((r1 + r2, c1 + c2), NEG_INF)
        out[:r1, :c1] = self.data
        out[r1:, c1:] = other.data
        return TropicalMatrix(out)

    def leq(self, other: "TropicalMatrix") -> bool:
        """Pointwise order (−∞ below everything)."""
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return bool(np.all(self.data <= other.data))

    def max_entry(self) -> float:
        if self.data.size == 0:
            return NEG_INF
        return float(self.data.max())

    def __eq__(self, other) -> bool:
        return (isinstance(other, TropicalMatrix)
                and self.shape == other.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def tolists(self) -> list[list[float | str]]:
        """JSON-friendly nested lists with "-inf" sentinels."""
        return [["-inf" if x == NEG_INF else int(x) for x in row]
                for row in self.data]

    @staticmethod
    def fromlists(rows: list[list], rows_n: int, cols_n: int) -> "TropicalMatrix":
        m = np.full((rows_n, cols_n), NEG_INF)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                m[i, j] = NEG_INF if x == "-inf" else float(x)
        return TropicalMatrix(m)

    def __str__(self) -> str:
        return "[" + "; ".join(
            " ".join("-inf" if x == NEG_INF else str(int(x)) for x in row)
            for row in self.data) + "]"
