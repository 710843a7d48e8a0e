"""Seeded generators and validators for the locality stencil families.

All randomness flows through numpy ``SeedSequence`` substreams keyed by
``[seed, family_tag, coordinates...]``: one stream per row for LRC, per
(column, group) for LCC, and per row group for DRGP and tensor-gap (with
vectorized within-group draws).  Generation is deterministic,
platform-independent, and safe to parallelize across substreams.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .stencil import Stencil, StencilError


class Family(str, enum.Enum):
    LRC = "lrc"
    LCC = "lcc"
    DRGP = "drgp"
    TENSOR_GAP = "tensor-gap"


_TAG = {Family.LRC: 1, Family.LCC: 2, Family.DRGP: 3, Family.TENSOR_GAP: 4}

DEFAULT_DELTA = 0.05


class FamilyParamError(StencilError):
    pass


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of one family instance; ``param`` is ell, q, or t."""

    family: Family
    n: int
    param: int
    delta: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise FamilyParamError("n must be positive")
        if self.family is Family.LRC:
            if not 1 <= self.param <= self.n - 1:
                raise FamilyParamError(f"ell={self.param} out of range for n={self.n}")
        elif self.family is Family.LCC:
            q = self.param
            delta = self.delta if self.delta is not None else DEFAULT_DELTA
            if q < 3:
                raise FamilyParamError("LCC requires q >= 3")
            if not 0 < delta < 1:
                raise FamilyParamError("delta must lie in (0, 1)")
            t = math.floor(delta * self.n)
            if t < 1:
                raise FamilyParamError(f"floor(delta*n) = {t} < 1")
            if q * t > self.n - 1:
                raise FamilyParamError(
                    f"disjoint groups do not fit: q*floor(delta*n) = {q * t} > n-1 = {self.n - 1}"
                )
        else:
            if self.param < 2:
                raise FamilyParamError(f"{self.family.value} requires t >= 2")
            if self.n < 2:
                raise FamilyParamError("n must be at least 2")

    @property
    def groups_per_column(self) -> int:
        if self.family is Family.LCC:
            delta = self.delta if self.delta is not None else DEFAULT_DELTA
            return math.floor(delta * self.n)
        if self.family in (Family.DRGP, Family.TENSOR_GAP):
            return self.param
        return 1


def _rng(seed: int, family: Family, *cell: int) -> np.random.Generator:
    return np.random.default_rng([seed, _TAG[family], *cell])


def gen_lrc(n: int, ell: int, seed: int) -> Stencil:
    """n x n stencil: stars on the diagonal plus ell uniformly sampled other
    stars in each row."""
    FamilyParams(Family.LRC, n, ell, seed=seed)
    masks = []
    for i in range(n):
        rng = _rng(seed, Family.LRC, i + 1)
        others = [j for j in range(n) if j != i]
        picks = rng.choice(n - 1, size=ell, replace=False)
        mask = 1 << i
        for p in picks:
            mask |= 1 << others[int(p)]
        masks.append(mask)
    return Stencil.from_rows(masks, n)


def _group_labels(n: int, t: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, s) for i in range(1, n + 1) for s in range(1, t + 1))


def gen_lcc(n: int, q: int, delta: float, seed: int) -> Stencil:
    """q-LCC stencil with t = floor(delta*n) disjoint q-groups per column.

    Groups are drawn sequentially and uniformly from the shrinking pool of
    columns not yet used by earlier groups of the same column, matching the
    conditional law of uniform disjoint group sampling.
    """
    params = FamilyParams(Family.LCC, n, q, delta=delta, seed=seed)
    t = params.groups_per_column
    masks = []
    for i in range(n):
        pool = [j for j in range(n) if j != i]
        for j in range(t):
            rng = _rng(seed, Family.LCC, i + 1, j + 1)
            picks = sorted(rng.choice(len(pool), size=q, replace=False).tolist(), reverse=True)
            mask = 1 << i
            for p in picks:
                mask |= 1 << pool.pop(int(p))
            masks.append(mask)
    return Stencil.from_rows(masks, n, row_labels=_group_labels(n, t))


def gen_drgp(n: int, t: int, seed: int) -> Stencil:
    """t-DRGP stencil: rows (i, s), stars at (i,s),i; for each i != j exactly
    one uniformly chosen row of group i carries a star in column j.

    One substream per row group i; within it, the star slots for columns
    1..n are a single vectorized draw (the slot at j = i is discarded).
    """
    FamilyParams(Family.DRGP, n, t, seed=seed)
    masks = [0] * (n * t)
    for i in range(n):
        slots = _rng(seed, Family.DRGP, i + 1).integers(t, size=n)
        for s in range(t):
            masks[i * t + s] |= 1 << i
        for j in range(n):
            if j != i:
                masks[i * t + int(slots[j])] |= 1 << j
    return Stencil.from_rows(masks, n, row_labels=_group_labels(n, t))


def gen_tensor_gap(n: int, t: int, seed: int) -> Stencil:
    """Tensor-gap family: rows (i, s); group diagonal all stars; for i != i'
    exactly one uniformly chosen entry of the group column is zero.

    At t = 2 one-zero-of-two coincides with one-star-of-two, so this delegates
    to the DRGP sampler and the two families are pointwise identical.
    """
    FamilyParams(Family.TENSOR_GAP, n, t, seed=seed)
    if t == 2:
        return gen_drgp(n, 2, seed)
    masks = [0] * (n * t)
    for i in range(n):
        slots = _rng(seed, Family.TENSOR_GAP, i + 1).integers(t, size=n)
        for s in range(t):
            masks[i * t + s] |= 1 << i
        for j in range(n):
            if j == i:
                continue
            s_zero = int(slots[j])
            for s in range(t):
                if s != s_zero:
                    masks[i * t + s] |= 1 << j
    return Stencil.from_rows(masks, n, row_labels=_group_labels(n, t))


def generate(params: FamilyParams) -> Stencil:
    if params.family is Family.LRC:
        return gen_lrc(params.n, params.param, params.seed)
    if params.family is Family.LCC:
        delta = params.delta if params.delta is not None else DEFAULT_DELTA
        return gen_lcc(params.n, params.param, delta, params.seed)
    if params.family is Family.DRGP:
        return gen_drgp(params.n, params.param, params.seed)
    return gen_tensor_gap(params.n, params.param, params.seed)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    clause: str | None = None
    where: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return f"violated clause {self.clause!r} at {self.where}"


def _check_group_labels(H: Stencil, n: int, t: int) -> ValidationReport | None:
    if H.n != n:
        return ValidationReport(False, "column count", (H.n,))
    if H.m != n * t or set(H.row_labels) != set(_group_labels(n, t)):
        return ValidationReport(False, "rows labeled by [n] x [t]", (H.m,))
    return None


def validate_family(H: Stencil, params: FamilyParams) -> ValidationReport:
    """Check every clause of the family definition; report the first violated
    clause with its indices (1-based)."""
    fam, n = params.family, params.n

    if fam is Family.LRC:
        ell = params.param
        if H.m != n or H.n != n:
            return ValidationReport(False, "square n x n", (H.m, H.n))
        for i in range(n):
            if not H.rows[i] >> i & 1:
                return ValidationReport(False, "star on the diagonal", (i + 1, i + 1))
            if H.rows[i].bit_count() > ell + 1:
                return ValidationReport(False, "at most ell other stars per row", (i + 1,))
        return ValidationReport(True)

    t = params.groups_per_column
    bad = _check_group_labels(H, n, t)
    if bad is not None:
        return bad
    pos = {lab: idx for idx, lab in enumerate(H.row_labels)}
    group_rows = {i: [H.rows[pos[(i, s)]] for s in range(1, t + 1)] for i in range(1, n + 1)}

    for i in range(1, n + 1):
        for s in range(1, t + 1):
            if not group_rows[i][s - 1] >> (i - 1) & 1:
                return ValidationReport(False, "star at ((i,s), i)", ((i, s), i))

    if fam is Family.TENSOR_GAP:
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == i:
                    continue
                stars = sum(r >> (j - 1) & 1 for r in group_rows[i])
                if stars != t - 1:
                    return ValidationReport(False, "exactly one zero in S_{i,j}", (i, j))
        return ValidationReport(True)

    # LCC and DRGP share the disjoint-groups clause.
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            stars = sum(r >> (j - 1) & 1 for r in group_rows[i])
            if stars > 1:
                return ValidationReport(False, "at most one star in S_{i,j}", (i, j))

    if fam is Family.LCC:
        q = params.param
        for idx, mask in enumerate(H.rows):
            if mask.bit_count() > q + 1:
                return ValidationReport(
                    False, "at most q+1 stars per row", (H.row_labels[idx],)
                )
    return ValidationReport(True)


@dataclass(frozen=True)
class ProbeReport:
    found: bool
    rows: tuple[int, ...] | None
    support_size: int | None
    trials: int


def lcc_zero_rectangle_probe(
    H: Stencil, s: int, k: int, trials: int, seed: int
) -> ProbeReport:
    """Monte Carlo search for s-k rows whose union of supports has size <= s.

    Such a subset witnesses an (s-k) x (n-s) all-zero sub-stencil, capping
    vrk(H) below n-k.  Reports the first hit, or not-found after ``trials``.
    """
    if not s > k >= 1:
        raise FamilyParamError("probe requires s > k >= 1")
    size = s - k
    if size > H.m:
        return ProbeReport(False, None, None, 0)
    rng = np.random.default_rng([seed, 5])
    for trial in range(trials):
        picks = rng.choice(H.m, size=size, replace=False)
        union = 0
        for p in picks:
            union |= H.rows[int(p)]
        if union.bit_count() <= s:
            return ProbeReport(
                True,
                tuple(sorted(int(p) + 1 for p in picks)),
                union.bit_count(),
                trial + 1,
            )
    return ProbeReport(False, None, None, trials)
