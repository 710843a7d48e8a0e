"""Finite-field side: witness validation, GF(p) rank, brute-force min-rank,
and the polynomial low-rank witness construction.

Prime fields only, p <= 2^16.  Matrices are kept as tuples of tuples with
values in 0..p-1; elimination is done in plain integer arithmetic, which at
desk scale beats shipping everything through numpy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .stencil import Stencil, StencilError

MAX_PRIME = 1 << 16


class FieldError(StencilError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p > MAX_PRIME:
        raise FieldError(f"prime {p} exceeds the supported limit {MAX_PRIME}")


@dataclass(frozen=True)
class WitnessMatrix:
    """A matrix over GF(p) whose nonzero support must equal the target
    stencil's star pattern."""

    p: int
    entries: tuple[tuple[int, ...], ...]
    target: Stencil

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if len(self.entries) != self.target.m:
            raise FieldError("row count does not match target stencil")
        for row in self.entries:
            if len(row) != self.target.n:
                raise FieldError("column count does not match target stencil")
            for v in row:
                if not 0 <= v < self.p:
                    raise FieldError(f"entry {v} outside GF({self.p})")

    def to_json(self) -> dict:
        return {"p": self.p, "entries": [list(row) for row in self.entries]}


def validate_witness(W: WitnessMatrix) -> tuple[bool, tuple[int, int] | None]:
    """Check support equality in both directions; returns the first violating
    1-based position, if any."""
    H = W.target
    for i in range(H.m):
        for j in range(H.n):
            star = bool(H.rows[i] >> j & 1)
            nonzero = W.entries[i][j] != 0
            if star != nonzero:
                return False, (i + 1, j + 1)
    return True, None


def gf_rank_rows(rows: list[list[int]], p: int) -> int:
    """Rank over GF(p) by Gaussian elimination (rows are modified)."""
    if not rows:
        return 0
    n = len(rows[0])
    rank = 0
    for col in range(n):
        pivot = -1
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                pivot = r
                break
        if pivot < 0:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        prow = rows[rank]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] % p
            if f:
                f = f * inv % p
                rr = rows[r]
                for c in range(col, n):
                    rr[c] = (rr[c] - f * prow[c]) % p
        rank += 1
        if rank == len(rows):
            break
    return rank


def gf_rank(M: WitnessMatrix) -> int:
    """Rank of a witness matrix over its prime field."""
    return gf_rank_rows([list(row) for row in M.entries], M.p)


@dataclass(frozen=True)
class MinrankResult:
    p: int
    value: int
    witness: WitnessMatrix
    exhaustive: bool


def minrank_bruteforce(
    H: Stencil, p: int, budget: int = 2_000_000
) -> MinrankResult:
    """Minimum rank over all GF(p)-witnesses of H by odometer enumeration.

    Star values run over 1..p-1 in row-major odometer order, so the first
    witness attaining the minimum is the lexicographically least one.  The
    budget counts matrices evaluated; exhaustion degrades to best-found.
    """
    _check_prime(p)
    stars = H.stars()
    k = len(stars)
    base = p - 1

    def build(digits: list[int]) -> WitnessMatrix:
        grid = [[0] * H.n for _ in range(H.m)]
        for (i, j), d in zip(stars, digits):
            grid[i - 1][j - 1] = d + 1
        return WitnessMatrix(p, tuple(tuple(r) for r in grid), H)

    digits = [0] * k
    best_val: int | None = None
    best_digits: list[int] | None = None
    evaluated = 0
    exhausted_all = False
    floor_rank = 1 if k else 0
    while True:
        W = build(digits)
        r = gf_rank_rows([list(row) for row in W.entries], p)
        evaluated += 1
        if best_val is None or r < best_val:
            best_val = r
            best_digits = digits.copy()
            if best_val == floor_rank:
                exhausted_all = True  # cannot go lower; enumeration is moot
                break
        # advance the odometer
        pos = k - 1
        while pos >= 0 and digits[pos] == base - 1:
            digits[pos] = 0
            pos -= 1
        if pos < 0:
            exhausted_all = True
            break
        digits[pos] += 1
        if evaluated >= budget:
            break
    assert best_val is not None and best_digits is not None
    return MinrankResult(p, best_val, build(best_digits), exhausted_all)


def low_rank_witness(H: Stencil, p: int) -> WitnessMatrix:
    """The polynomial witness: label column j with a_j = j-1 in GF(p) and set
    entry (i, j) = prod over row-i zero labels a of (a_j - a).

    Requires p >= n.  The result always validates and has rank at most d+1,
    where d is the maximum number of zeros in a row.
    """
    _check_prime(p)
    if p < H.n:
        raise FieldError(f"low-rank witness needs p >= n (p={p}, n={H.n})")
    labels = list(range(H.n))
    grid = []
    for i in range(H.m):
        zero_labels = [labels[j] for j in range(H.n) if not H.rows[i] >> j & 1]
        row = []
        for j in range(H.n):
            v = 1
            for a in zero_labels:
                v = v * (labels[j] - a) % p
            row.append(v % p)
        grid.append(tuple(row))
    return WitnessMatrix(p, tuple(grid), H)


def tensor_witness(W1: WitnessMatrix, W2: WitnessMatrix, target: Stencil) -> WitnessMatrix:
    """Kronecker product of two witnesses; an F-witness of the tensor product
    of their targets (which must be supplied as ``target``)."""
    if W1.p != W2.p:
        raise FieldError("witnesses live over different fields")
    p = W1.p
    grid = []
    for r1 in W1.entries:
        for r2 in W2.entries:
            grid.append(tuple(a * b % p for a in r1 for b in r2))
    return WitnessMatrix(p, tuple(grid), target)
