"""Visible rank: peeling decision procedure, triangularization, exact search, bounds.

The exact solver explores triangular row sequences.  A square sub-stencil has
exactly one star diagonal iff its rows can be ordered r_1..r_k so that each
r_i carries a star in some column outside the supports of r_1..r_{i-1}; the
chosen columns then form the diagonal of a triangular pattern.  The search
therefore branches on "next row", with the union of chosen supports as the
only state, memoizing the best depth at which each union was reached.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .stencil import (
    PermutationPair,
    Stencil,
    StencilError,
    SubsetError,
    max_matching_size,
    permute,
    substencil,
)

DEFAULT_NODE_BUDGET = 5_000_000
#: Exact completion is guaranteed (budget permitting) up to this many columns.
EXACT_SIDE_GUARANTEE = 24

PROV_EXACT = "exact-search"
PROV_MATCHING = "matching"
PROV_ZERO_RECT = "zero-rectangle"


@dataclass(frozen=True)
class DiagonalCertificate:
    """Witness that a square sub-stencil has exactly one star diagonal.

    Applying ``perm_pair`` to ``substencil(H, row_subset, col_subset)`` yields
    an upper-triangular pattern with a star diagonal; ``peel_order`` replays
    the single-star-row peeling on the (unpermuted) sub-stencil, with 1-based
    positions into ``row_subset``/``col_subset``.
    """

    row_subset: tuple[int, ...]
    col_subset: tuple[int, ...]
    perm_pair: PermutationPair
    peel_order: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.row_subset)

    def verify(self, H: Stencil) -> bool:
        r = self.size
        if len(self.col_subset) != r or len(self.peel_order) != r:
            return False
        try:
            sub = substencil(H, self.row_subset, self.col_subset)
            tri = permute(sub, self.perm_pair)
        except StencilError:
            return False
        for i in range(r):
            if not tri.star(i + 1, i + 1):
                return False
            for j in range(1, i + 1):
                if tri.star(i + 1, j):
                    return False
        # Replay the peeling on the sub-stencil.
        col_active = (1 << r) - 1
        row_seen = set()
        for pi, pj in self.peel_order:
            if pi in row_seen or not 1 <= pi <= r or not 1 <= pj <= r:
                return False
            remaining = sub.rows[pi - 1] & col_active
            if remaining != 1 << (pj - 1):
                return False
            row_seen.add(pi)
            col_active &= ~(1 << (pj - 1))
        return col_active == 0

    def to_json(self) -> dict:
        return {
            "rows": list(self.row_subset),
            "cols": list(self.col_subset),
            "row_perm": list(self.perm_pair.row_perm),
            "col_perm": list(self.perm_pair.col_perm),
            "peel_order": [list(p) for p in self.peel_order],
        }

    @staticmethod
    def from_json(doc: dict) -> "DiagonalCertificate":
        return DiagonalCertificate(
            tuple(doc["rows"]),
            tuple(doc["cols"]),
            PermutationPair(tuple(doc["row_perm"]), tuple(doc["col_perm"])),
            tuple((p[0], p[1]) for p in doc["peel_order"]),
        )


EMPTY_CERTIFICATE = DiagonalCertificate((), (), PermutationPair((), ()), ())


@dataclass(frozen=True)
class VrankResult:
    """A visible-rank value bracketed by a certificate and a sound upper bound."""

    lower_bound: int
    upper_bound: int
    certificate: DiagonalCertificate
    upper_provenance: str
    exact: bool

    def to_json(self) -> dict:
        return {
            "lower": self.lower_bound,
            "upper": self.upper_bound,
            "exact": self.exact,
            "upper_provenance": self.upper_provenance,
            "certificate": self.certificate.to_json(),
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json())


def _peel(masks: list[int], r: int) -> list[tuple[int, int]] | None:
    """Peel a square pattern (list of r masks over r columns).

    Returns the 0-based peel order, or None if peeling gets stuck.  Ties are
    broken toward the lowest-index row for determinism.
    """
    col_active = (1 << r) - 1
    row_active = [True] * r
    order: list[tuple[int, int]] = []
    for _ in range(r):
        found = -1
        for i in range(r):
            if row_active[i] and (masks[i] & col_active).bit_count() == 1:
                found = i
                break
        if found < 0:
            return None
        bit = masks[found] & col_active
        order.append((found, bit.bit_length() - 1))
        row_active[found] = False
        col_active &= ~bit
    return order


def is_visibly_full_rank(M: Stencil) -> tuple[bool, DiagonalCertificate | None]:
    """Decide whether the square stencil M has exactly one star diagonal.

    On success also returns a certificate whose permutation pair
    triangularizes M.
    """
    if M.m != M.n:
        raise StencilError("is_visibly_full_rank requires a square stencil")
    order = _peel(list(M.rows), M.n)
    if order is None:
        return False, None
    r = M.n
    # Row peeled first belongs at the bottom of the triangular form.
    row_perm = tuple(order[r - 1 - i][0] + 1 for i in range(r))
    col_perm = tuple(order[r - 1 - j][1] + 1 for j in range(r))
    cert = DiagonalCertificate(
        tuple(range(1, r + 1)),
        tuple(range(1, r + 1)),
        PermutationPair(row_perm, col_perm),
        tuple((i + 1, j + 1) for i, j in order),
    )
    return True, cert


def triangularize(M: Stencil) -> PermutationPair | None:
    """Permutation pair making M upper triangular, or None if M is not
    visibly full rank."""
    ok, cert = is_visibly_full_rank(M)
    return cert.perm_pair if ok else None


def _certificate_from_sequence(H: Stencil, pairs: list[tuple[int, int]]) -> DiagonalCertificate:
    """Build a certificate from a forward triangular sequence.

    ``pairs`` are 0-based (row, col) with each column outside the supports of
    all earlier rows; reversing the order gives an upper-triangular pattern.
    """
    if not pairs:
        return EMPTY_CERTIFICATE
    rows = tuple(r + 1 for r, _ in reversed(pairs))
    cols = tuple(c + 1 for _, c in reversed(pairs))
    sub = substencil(H, rows, cols)
    order = _peel(list(sub.rows), sub.n)
    if order is None:
        raise StencilError("internal error: sequence does not peel")
    return DiagonalCertificate(
        rows,
        cols,
        PermutationPair.identity(len(rows), len(cols)),
        tuple((i + 1, j + 1) for i, j in order),
    )


def greedy_lower_bound(H: Stencil) -> tuple[int, DiagonalCertificate]:
    """Greedy triangular sequence: scan rows by ascending support size, keep a
    row whenever it still has a star in an unblocked column, then block its
    whole support.  For an ell-LRC stencil this yields >= ceil(n/(ell+1))."""
    pairs = _greedy_pairs(H.rows)
    return len(pairs), _certificate_from_sequence(H, pairs)


def _greedy_pairs(masks) -> list[tuple[int, int]]:
    order = sorted(range(len(masks)), key=lambda i: (masks[i].bit_count(), i))
    blocked = 0
    pairs: list[tuple[int, int]] = []
    for i in order:
        fresh = masks[i] & ~blocked
        if fresh:
            pairs.append((i, (fresh & -fresh).bit_length() - 1))
            blocked |= masks[i]
    return pairs


def zero_rectangle_bound(H: Stencil, a_max: int = 3, max_subsets: int = 2_000_000) -> int:
    """Upper bound on vrk: min over a of a + b*(a), where b*(a) is the widest
    all-zero a x b sub-stencil.  Exact at each completed level of a; levels
    whose subset enumeration would blow the budget are skipped."""
    full = (1 << H.n) - 1
    zeros = [full & ~mask for mask in H.rows]
    m = H.m
    best = min(H.m, H.n)
    if m == 0 or H.n == 0:
        return 0
    # level holds (intersection mask, last row index) for every a-subset.
    level = [(zeros[i], i) for i in range(m)]
    spent = m
    a = 1
    while True:
        b_star = max((mask.bit_count() for mask, _ in level), default=0)
        best = min(best, a + b_star)
        if a >= a_max or a >= m or best <= a + 1:
            break
        est = sum(m - i - 1 for _, i in level)
        if spent + est > max_subsets:
            break
        nxt = []
        for mask, i in level:
            if not mask:
                continue
            for j in range(i + 1, m):
                nxt.append((mask & zeros[j], j))
        spent += est
        level = nxt
        a += 1
    return best


def _matching_at_least(cmasks: list[int], target: int) -> bool:
    """True iff the bipartite graph given by the masks has a matching of size
    >= target (Kuhn's algorithm with early exit)."""
    if target <= 0:
        return True
    match_col: dict[int, int] = {}
    row_match: dict[int, int] = {}

    def augment(i: int, seen: int) -> tuple[bool, int]:
        avail = cmasks[i] & ~seen
        while avail:
            bit = avail & -avail
            avail ^= bit
            j = bit.bit_length() - 1
            seen |= bit
            k = match_col.get(j, -1)
            if k == -1:
                match_col[j] = i
                row_match[i] = j
                return True, seen
            ok, seen = augment(k, seen)
            if ok:
                match_col[j] = i
                row_match[i] = j
                return True, seen
        return False, seen

    size = 0
    for i in range(len(cmasks)):
        if size >= target:
            return True
        ok, _ = augment(i, 0)
        if ok:
            size += 1
    return size >= target


def visible_rank_bounds(H: Stencil, a_max: int = 3) -> VrankResult:
    """Cheap sound bracket: greedy lower bound vs min(matching, zero-rectangle)."""
    lb, cert = greedy_lower_bound(H)
    mub = max_matching_size(H)
    zub = zero_rectangle_bound(H, a_max)
    if mub <= zub:
        ub, prov = mub, PROV_MATCHING
    else:
        ub, prov = zub, PROV_ZERO_RECT
    return VrankResult(lb, ub, cert, prov, exact=lb == ub)


def visible_rank_exact(
    H: Stencil,
    node_budget: int = DEFAULT_NODE_BUDGET,
    time_budget: float | None = None,
    initial: DiagonalCertificate | None = None,
) -> VrankResult:
    """Exact visible rank by branch-and-bound over triangular row sequences.

    If the search exhausts its node or time budget the result degrades to a
    sound bracket (``exact=False``) holding the best certificate found.
    ``initial`` may seed the incumbent with a known-valid certificate.
    """
    bounds = visible_rank_bounds(H)
    best = bounds.lower_bound
    best_cert = bounds.certificate
    if initial is not None and initial.size > best:
        best = initial.size
        best_cert = initial
    ub, prov = bounds.upper_bound, bounds.upper_provenance
    if best >= ub:
        return VrankResult(best, best, best_cert, prov, exact=True)

    value, pairs, completed = _urm_search(
        list(H.rows), H.n, best, node_budget, time_budget
    )
    if pairs is not None:
        best = value
        best_cert = _certificate_from_sequence(H, pairs)
    if completed:
        return VrankResult(best, best, best_cert, PROV_EXACT, exact=True)
    return VrankResult(best, ub, best_cert, prov, exact=best == ub)


def _urm_search(
    masks: list[int],
    n: int,
    incumbent: int,
    node_budget: int,
    time_budget: float | None,
) -> tuple[int, list[tuple[int, int]] | None, bool]:
    """Core search.  Returns (best, improving sequence or None, completed)."""
    deadline = time.monotonic() + time_budget if time_budget is not None else None
    # Distinct supports only: a row duplicating another's support can never
    # join the same triangular sequence.
    seen_supports: set[int] = set()
    rows: list[tuple[int, int]] = []  # (mask, original index)
    for idx, mask in enumerate(masks):
        if mask and mask not in seen_supports:
            seen_supports.add(mask)
            rows.append((mask, idx))

    best = incumbent
    best_seq: list[tuple[int, int]] | None = None
    visited: dict[int, int] = {}
    nodes = 0
    aborted = False
    seq: list[tuple[int, int]] = []

    def dfs(B: int, depth: int, cands: list[tuple[int, int]]) -> None:
        nonlocal best, best_seq, nodes, aborted
        if aborted:
            return
        nodes += 1
        if nodes > node_budget or (
            deadline is not None and nodes % 4096 == 0 and time.monotonic() > deadline
        ):
            aborted = True
            return
        if depth > best:
            best = depth
            best_seq = seq.copy()
        prev = visited.get(B)
        if prev is not None and prev >= depth:
            return
        visited[B] = depth
        live = [(mask, idx, mask & ~B) for mask, idx in cands if mask & ~B]
        if not live:
            return
        need = best - depth + 1  # must add at least this many to improve
        free = n - B.bit_count()
        if min(free, len(live)) < need:
            return
        if not _matching_at_least([fresh for _, _, fresh in live], need):
            return
        # Forced move: a candidate adding exactly one fresh column can always
        # be taken first without loss.
        forced = None
        for mask, idx, fresh in live:
            if fresh.bit_count() == 1:
                forced = (mask, idx, fresh)
                break
        if forced is not None:
            mask, idx, fresh = forced
            seq.append((idx, fresh.bit_length() - 1))
            dfs(B | mask, depth + 1, [(mk, ix) for mk, ix, _ in live if ix != idx])
            seq.pop()
            return
        live.sort(key=lambda t: (t[2].bit_count(), t[1]))
        nxt = [(mk, ix) for mk, ix, _ in live]
        for mask, idx, fresh in live:
            if aborted:
                return
            nb = B | mask
            if depth + 1 + (n - nb.bit_count()) <= best:
                continue
            seq.append((idx, (fresh & -fresh).bit_length() - 1))
            dfs(nb, depth + 1, nxt)
            seq.pop()

    dfs(0, 0, rows)
    return best, best_seq, not aborted


def visibly_independent(
    H: Stencil,
    cols,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> bool:
    """True iff the given 1-based columns contain a visibly full rank square
    sub-stencil of matching size."""
    cols = list(cols)
    if len(set(cols)) != len(cols):
        raise SubsetError("duplicate column")
    for j in cols:
        if not 1 <= j <= H.n:
            raise SubsetError(f"column {j} out of range")
    if not cols:
        return True
    sub = substencil(H, range(1, H.m + 1), cols)
    res = visible_rank_exact(sub, node_budget=node_budget)
    if res.lower_bound == len(cols):
        return True
    if res.exact or res.upper_bound < len(cols):
        return False
    raise StencilError("budget exhausted before visible independence was decided")
