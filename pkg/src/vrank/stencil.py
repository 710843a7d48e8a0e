"""Stencil data model, serialization, and small combinatorial oracles.

A stencil is an m x n pattern over {0, *} together with integer-tuple labels
on its rows and columns.  Entries are stored as one bitmask per row (bit j
set means a star in column j+1), which keeps sub-stencil extraction,
permutation, and all the search code in the rest of the package cheap.

External indices are 1-based throughout the public API; the bit-level
representation is an internal detail.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

Label = tuple[int, ...]

#: Hard side limit for the star-diagonal counting oracle.
PERMANENT_SIDE_LIMIT = 20


class StencilError(ValueError):
    """Base class for stencil-domain errors."""


class ParseError(StencilError):
    """Base class for stencil parse failures."""


class MalformedHeaderError(ParseError):
    pass


class RaggedRowError(ParseError):
    pass


class IllegalCharacterError(ParseError):
    pass


class DuplicateLabelError(ParseError):
    pass


class SubsetError(StencilError):
    """Out-of-range or duplicate index in a row/column subset."""


class PermutationSizeError(StencilError):
    pass


class OracleLimitError(StencilError):
    """Input exceeds a brute-force oracle's hard size limit."""


def _default_labels(k: int) -> tuple[Label, ...]:
    return tuple((i,) for i in range(1, k + 1))


def _check_labels(labels: tuple[Label, ...], kind: str) -> None:
    if len(set(labels)) != len(labels):
        raise DuplicateLabelError(f"duplicate {kind} labels")
    arities = {len(lab) for lab in labels}
    if len(arities) > 1:
        raise StencilError(f"{kind} label arity is not uniform: {sorted(arities)}")


@dataclass(frozen=True)
class Stencil:
    """An immutable m x n pattern of {0, *} with labeled rows and columns.

    ``rows[i]`` is the star bitmask of row i+1; bit j set means a star at
    column j+1.
    """

    m: int
    n: int
    rows: tuple[int, ...]
    row_labels: tuple[Label, ...]
    col_labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise StencilError("negative dimensions")
        if len(self.rows) != self.m:
            raise StencilError(f"expected {self.m} row masks, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for mask in self.rows:
            if mask & ~full:
                raise StencilError("row mask has bits outside column range")
        if len(self.row_labels) != self.m or len(self.col_labels) != self.n:
            raise StencilError("label count does not match dimensions")
        _check_labels(self.row_labels, "row")
        _check_labels(self.col_labels, "column")

    @staticmethod
    def from_rows(
        masks,
        n: int,
        row_labels=None,
        col_labels=None,
    ) -> "Stencil":
        masks = tuple(int(x) for x in masks)
        m = len(masks)
        rl = tuple(tuple(lab) for lab in row_labels) if row_labels is not None else _default_labels(m)
        cl = tuple(tuple(lab) for lab in col_labels) if col_labels is not None else _default_labels(n)
        return Stencil(m, n, masks, rl, cl)

    @staticmethod
    def from_entries(entries, row_labels=None, col_labels=None) -> "Stencil":
        """Build from a row-major iterable of truthy (star) / falsy (zero) cells."""
        grid = [list(row) for row in entries]
        n = len(grid[0]) if grid else 0
        masks = []
        for row in grid:
            if len(row) != n:
                raise RaggedRowError("ragged entry rows")
            mask = 0
            for j, cell in enumerate(row):
                if cell:
                    mask |= 1 << j
            masks.append(mask)
        return Stencil.from_rows(masks, n, row_labels, col_labels)

    def star(self, i: int, j: int) -> bool:
        """True iff entry (i, j) is a star (1-based)."""
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise SubsetError(f"entry ({i},{j}) out of range")
        return bool(self.rows[i - 1] >> (j - 1) & 1)

    def row_support(self, i: int) -> tuple[int, ...]:
        """1-based columns carrying a star in row i."""
        mask = self.rows[i - 1]
        return tuple(j + 1 for j in range(self.n) if mask >> j & 1)

    def star_count(self) -> int:
        return sum(mask.bit_count() for mask in self.rows)

    def entries(self) -> list[list[bool]]:
        return [[bool(mask >> j & 1) for j in range(self.n)] for mask in self.rows]

    def stars(self) -> list[tuple[int, int]]:
        """All star positions as 1-based (row, col) pairs, row-major."""
        return [
            (i + 1, j + 1)
            for i, mask in enumerate(self.rows)
            for j in range(self.n)
            if mask >> j & 1
        ]

    @property
    def row_arity(self) -> int:
        return len(self.row_labels[0]) if self.m else 0

    @property
    def col_arity(self) -> int:
        return len(self.col_labels[0]) if self.n else 0


@dataclass(frozen=True)
class PermutationPair:
    """A pair of bijections on the rows and columns of a stencil.

    ``row_perm[i-1]`` is the 1-based image of row i.
    """

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]

    def __post_init__(self) -> None:
        for perm in (self.row_perm, self.col_perm):
            if sorted(perm) != list(range(1, len(perm) + 1)):
                raise StencilError(f"not a bijection: {perm}")

    @staticmethod
    def identity(m: int, n: int) -> "PermutationPair":
        return PermutationPair(tuple(range(1, m + 1)), tuple(range(1, n + 1)))

    def inverse(self) -> "PermutationPair":
        def inv(perm):
            out = [0] * len(perm)
            for i, img in enumerate(perm):
                out[img - 1] = i + 1
            return tuple(out)

        return PermutationPair(inv(self.row_perm), inv(self.col_perm))


def permute(H: Stencil, p: PermutationPair) -> Stencil:
    """Reindex ``H`` so that ``result[i, j] = H[row_perm(i), col_perm(j)]``."""
    if len(p.row_perm) != H.m or len(p.col_perm) != H.n:
        raise PermutationSizeError(
            f"permutation sizes ({len(p.row_perm)},{len(p.col_perm)}) "
            f"do not match stencil ({H.m},{H.n})"
        )
    masks = []
    for i in range(H.m):
        src = H.rows[p.row_perm[i] - 1]
        mask = 0
        for j in range(H.n):
            if src >> (p.col_perm[j] - 1) & 1:
                mask |= 1 << j
        masks.append(mask)
    rl = tuple(H.row_labels[p.row_perm[i] - 1] for i in range(H.m))
    cl = tuple(H.col_labels[p.col_perm[j] - 1] for j in range(H.n))
    return Stencil(H.m, H.n, tuple(masks), rl, cl)


def substencil(H: Stencil, row_subset, col_subset) -> Stencil:
    """Restrict ``H`` to the given 1-based rows and columns, in the given order."""
    rows = list(row_subset)
    cols = list(col_subset)
    for i in rows:
        if not 1 <= i <= H.m:
            raise SubsetError(f"row index {i} out of range")
    for j in cols:
        if not 1 <= j <= H.n:
            raise SubsetError(f"column index {j} out of range")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise SubsetError("duplicate index in subset")
    masks = []
    for i in rows:
        src = H.rows[i - 1]
        mask = 0
        for jj, j in enumerate(cols):
            if src >> (j - 1) & 1:
                mask |= 1 << jj
        masks.append(mask)
    rl = tuple(H.row_labels[i - 1] for i in rows)
    cl = tuple(H.col_labels[j - 1] for j in cols)
    return Stencil(len(rows), len(cols), tuple(masks), rl, cl)


def count_star_diagonals(M: Stencil) -> int:
    """Number of permutations pi with all entries (i, pi(i)) stars.

    This is the permanent of the 0/1 pattern, computed by inclusion-exclusion
    over column subsets (Ryser).  It exists purely as a test oracle and
    enforces a hard side limit.
    """
    if M.m != M.n:
        raise StencilError("count_star_diagonals requires a square stencil")
    n = M.n
    if n > PERMANENT_SIDE_LIMIT:
        raise OracleLimitError(f"side {n} exceeds oracle limit {PERMANENT_SIDE_LIMIT}")
    total = 0
    for S in range(1 << n):
        prod = 1
        for row in M.rows:
            prod *= (row & S).bit_count()
            if not prod:
                break
        if (n - S.bit_count()) & 1:
            total -= prod
        else:
            total += prod
    return total


def max_matching_size(H: Stencil) -> int:
    """Maximum bipartite matching of the star pattern (Hopcroft-Karp)."""
    return _hopcroft_karp([mask for mask in H.rows], H.n)


def _hopcroft_karp(masks: list[int], n: int) -> int:
    INF = float("inf")
    m = len(masks)
    adj = [[j for j in range(n) if mask >> j & 1] for mask in masks]
    match_row = [-1] * m
    match_col = [-1] * n
    dist = [INF] * m
    size = 0

    def bfs() -> bool:
        for i in range(m):
            dist[i] = 0 if match_row[i] == -1 else INF
        queue = [i for i in range(m) if match_row[i] == -1]
        found = False
        head = 0
        while head < len(queue):
            i = queue[head]
            head += 1
            for j in adj[i]:
                k = match_col[j]
                if k == -1:
                    found = True
                elif dist[k] is INF:
                    dist[k] = dist[i] + 1
                    queue.append(k)
        return found

    def dfs(i: int) -> bool:
        for j in adj[i]:
            k = match_col[j]
            if k == -1 or (dist[k] == dist[i] + 1 and dfs(k)):
                match_row[i] = j
                match_col[j] = i
                return True
        dist[i] = INF
        return False

    while bfs():
        for i in range(m):
            if match_row[i] == -1 and dfs(i):
                size += 1
    return size


# ---------------------------------------------------------------------------
# Serialization: .stn grid format and labeled JSON.

_GRID_CHARS = {"*": True, "0": False}


def parse_stencil(text: str) -> Stencil:
    """Parse a stencil document: .stn grid or labeled JSON."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return stencil_from_json_doc(json.loads(text))
    lines = [ln.rstrip("\r") for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MalformedHeaderError("empty document")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "stencil":
        raise MalformedHeaderError(f"bad header: {lines[0]!r}")
    try:
        m, n = int(header[1]), int(header[2])
    except ValueError:
        raise MalformedHeaderError(f"non-integer dimensions in header: {lines[0]!r}") from None
    if m < 0 or n < 0:
        raise MalformedHeaderError("negative dimensions in header")
    body = lines[1:]
    if len(body) != m:
        raise RaggedRowError(f"expected {m} rows, got {len(body)}")
    masks = []
    for line in body:
        if len(line) != n:
            raise RaggedRowError(f"row {line!r} does not have {n} characters")
        mask = 0
        for j, ch in enumerate(line):
            if ch not in _GRID_CHARS:
                raise IllegalCharacterError(f"illegal character {ch!r} (only '*' and '0')")
            if _GRID_CHARS[ch]:
                mask |= 1 << j
        masks.append(mask)
    return Stencil.from_rows(masks, n)


def to_grid(H: Stencil) -> str:
    """Canonical .stn text.  Labels are not representable in this format."""
    lines = [f"stencil {H.m} {H.n}"]
    for mask in H.rows:
        lines.append("".join("*" if mask >> j & 1 else "0" for j in range(H.n)))
    return "\n".join(lines) + "\n"


def to_json_doc(H: Stencil) -> dict:
    return {
        "rows": H.m,
        "cols": H.n,
        "row_labels": [list(lab) for lab in H.row_labels],
        "col_labels": [list(lab) for lab in H.col_labels],
        "stars": [[i, j] for i, j in H.stars()],
    }


def stencil_from_json_doc(doc: dict) -> Stencil:
    try:
        m, n = int(doc["rows"]), int(doc["cols"])
    except (KeyError, TypeError, ValueError):
        raise MalformedHeaderError("JSON document missing rows/cols") from None
    rl = doc.get("row_labels")
    cl = doc.get("col_labels")
    masks = [0] * m
    for entry in doc.get("stars", []):
        i, j = int(entry[0]), int(entry[1])
        if not (1 <= i <= m and 1 <= j <= n):
            raise ParseError(f"star ({i},{j}) out of range")
        masks[i - 1] |= 1 << (j - 1)
    return Stencil.from_rows(masks, n, rl, cl)


def write_stencil(H: Stencil, path: str) -> None:
    """Write .json (labeled) or .stn (grid, labels dropped) based on extension."""
    if path.endswith(".json"):
        data = json.dumps(to_json_doc(H), indent=None)
    else:
        data = to_grid(H)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(data)


def read_stencil(path: str) -> Stencil:
    with open(path, "r", encoding="ascii") as fh:
        return parse_stencil(fh.read())
