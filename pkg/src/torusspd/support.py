"""Support sets of kernels on the torus and the strict positive definiteness test.

A support is a finite set of explicit index pairs, a tail law, and a finite
set of removals.  The real case only stores pairs in the nonnegative
quadrant and is read through its sign-symmetrized view
``{(k, l) : (|k|, |l|) in J}``; the complex case is used as given.

The kernel is strictly positive definite iff the view meets every translate
of every rectangular lattice.  For the three tail laws this is decidable:

* ``MinTail(N)``: always met, since every translate reaches ``[N, oo)^2``.
* ``NoTail``: a finite set is always missed by some translate.
* ``Periodic(m, R)``: a translate avoids the periodic part iff one of the
  square translates ``(j, j') + (MZ, MZ)`` with ``M | m`` does, which is a
  residue computation; finite corrections never change the answer.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .intlat import Coset, Point, Subgroup, avoiding_rect_lattice, lcm

REAL = "real"
COMPLEX = "complex"


class SchemaError(ValueError):
    """Malformed or inconsistent support description."""


@dataclass(frozen=True)
class NoTail:
    pass


@dataclass(frozen=True)
class MinTail:
    N: int


@dataclass(frozen=True)
class Periodic:
    m: int
    residues: frozenset


Tail = NoTail | MinTail | Periodic


def _points(items: Iterable) -> frozenset:
    return frozenset((int(p[0]), int(p[1])) for p in items)


@dataclass(frozen=True)
class SupportSpec:
    mode: str = REAL
    explicit: frozenset = field(default_factory=frozenset)
    removed: frozenset = field(default_factory=frozenset)
    tail: Tail = field(default_factory=NoTail)

    def __post_init__(self):
        object.__setattr__(self, "explicit", _points(self.explicit))
        object.__setattr__(self, "removed", _points(self.removed))
        if self.mode not in (REAL, COMPLEX):
            raise SchemaError(f"unknown mode {self.mode!r}")
        clash = self.explicit & self.removed
        if clash:
            raise SchemaError(f"points both explicit and removed: {sorted(clash)}")
        if self.mode == REAL:
            neg = [p for p in self.explicit | self.removed if min(p) < 0]
            if neg:
                raise SchemaError(f"real-mode support points must be nonnegative: {sorted(neg)}")
        tail = self.tail
        if isinstance(tail, MinTail):
            if tail.N < 0:
                raise SchemaError("MinTail needs N >= 0")
        elif isinstance(tail, Periodic):
            if tail.m < 1:
                raise SchemaError("Periodic needs m >= 1")
            res = _points(tail.residues)
            if any(not (0 <= r < tail.m and 0 <= s < tail.m) for r, s in res):
                raise SchemaError(f"residues must lie in [0, {tail.m})^2")
            object.__setattr__(self, "tail", Periodic(tail.m, res))
        elif not isinstance(tail, NoTail):
            raise SchemaError(f"unknown tail {tail!r}")

    @property
    def period(self) -> int:
        return self.tail.m if isinstance(self.tail, Periodic) else 1

    @property
    def finite_reach(self) -> int:
        """Largest coordinate magnitude among explicit and removed points (-1 if none)."""
        return max((max(abs(k), abs(l)) for k, l in self.explicit | self.removed), default=-1)

    def signs(self) -> list[tuple[int, int]]:
        if self.mode == REAL:
            return [(1, 1), (-1, 1), (1, -1), (-1, -1)]
        return [(1, 1)]

    def to_json(self) -> dict:
        tail = self.tail
        if isinstance(tail, MinTail):
            t = {"kind": "min", "N": tail.N}
        elif isinstance(tail, Periodic):
            t = {"kind": "periodic", "m": tail.m, "residues": [list(r) for r in sorted(tail.residues)]}
        else:
            t = {"kind": "none"}
        return {"mode": self.mode,
                "explicit": [list(p) for p in sorted(self.explicit)],
                "removed": [list(p) for p in sorted(self.removed)],
                "tail": t}

    @classmethod
    def from_json(cls, obj: dict) -> SupportSpec:
        if not isinstance(obj, dict):
            raise SchemaError("support JSON must be an object")
        unknown = set(obj) - {"mode", "explicit", "removed", "tail"}
        if unknown:
            raise SchemaError(f"unknown support fields: {sorted(unknown)}")
        try:
            t = obj.get("tail", {"kind": "none"})
            kind = t["kind"]
            if kind == "none":
                tail = NoTail()
            elif kind == "min":
                tail = MinTail(int(t["N"]))
            elif kind == "periodic":
                tail = Periodic(int(t["m"]), _points(t["residues"]))
            else:
                raise SchemaError(f"unknown tail kind {kind!r}")
            explicit = _pairs(obj.get("explicit", []))
            removed = _pairs(obj.get("removed", []))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"malformed support JSON: {exc}") from exc
        return cls(obj.get("mode", REAL), explicit, removed, tail)


def _pairs(items) -> frozenset:
    out = []
    for p in items:
        if len(p) != 2:
            raise SchemaError(f"expected a pair, got {p!r}")
        out.append((int(p[0]), int(p[1])))
    return frozenset(out)


def _tail_contains(tail: Tail, k: int, l: int) -> bool:
    if isinstance(tail, MinTail):
        return k >= tail.N and l >= tail.N
    if isinstance(tail, Periodic):
        return (k % tail.m, l % tail.m) in tail.residues
    return False


def member(spec: SupportSpec, p: Sequence[int]) -> bool:
    """Membership in the support itself (J_K or I_K)."""
    k, l = int(p[0]), int(p[1])
    if spec.mode == REAL and (k < 0 or l < 0):
        return False
    if (k, l) in spec.removed:
        return False
    return (k, l) in spec.explicit or _tail_contains(spec.tail, k, l)


def in_view(spec: SupportSpec, p: Sequence[int]) -> bool:
    """Membership in the symmetrized view (the support itself in complex mode)."""
    if spec.mode == REAL:
        return member(spec, (abs(p[0]), abs(p[1])))
    return member(spec, p)


class Outcome(enum.Enum):
    STRICTLY_PD = "strictly_pd"
    NOT_STRICTLY_PD = "not_strictly_pd"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression offset + step*Z (offset reduced mod step)."""

    offset: int
    step: int

    def __post_init__(self):
        object.__setattr__(self, "offset", self.offset % self.step)

    def contains(self, k: int) -> bool:
        return (k - self.offset) % self.step == 0

    def to_json(self) -> dict:
        return {"offset": self.offset, "step": self.step}

    def __str__(self) -> str:
        return f"{self.offset}+{self.step}Z"


@dataclass(frozen=True)
class SpdVerdict:
    outcome: Outcome
    witness: Coset | Progression | None = None
    bound: int | None = None

    @property
    def strict(self) -> bool:
        return self.outcome is Outcome.STRICTLY_PD

    def to_json(self) -> dict:
        out = {"outcome": self.outcome.value}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.bound is not None:
            out["bound"] = self.bound
        return out


STRICT = SpdVerdict(Outcome.STRICTLY_PD)


def _divisors(m: int) -> list[int]:
    return [g for g in range(1, m + 1) if m % g == 0]


def _tail_avoided(spec: SupportSpec, coset: Coset) -> bool:
    """True iff the rank-2 coset misses the tail part of the view, exactly.

    In each sign quadrant the tail membership of (e*x, f*y), x, y >= 0,
    depends on (x, y) mod m and coset membership on (x, y) mod the coset's
    square modulus, so one period of the lcm decides it.
    """
    tail = spec.tail
    if isinstance(tail, NoTail):
        return True
    if isinstance(tail, MinTail):
        return False
    L = lcm(coset.group.rect_modulus(), tail.m)
    for ex, ey in spec.signs():
        for x in range(L):
            for y in range(L):
                if (x % tail.m, y % tail.m) in tail.residues and coset.contains((ex * x, ey * y)):
                    return False
    return True


def _finite_hits(spec: SupportSpec, coset: Coset) -> list[Point]:
    """View points coming from explicit entries that fall inside the coset."""
    hits = set()
    for k, l in spec.explicit:
        for ex, ey in spec.signs():
            p = (ex * k, ey * l)
            if coset.contains(p) and in_view(spec, p):
                hits.add(p)
    return sorted(hits)


def coset_avoids_view(spec: SupportSpec, coset: Coset) -> bool:
    """Exact disjointness of a rank-2 coset from the view (residue arithmetic,
    no window)."""
    if coset.group.rank != 2:
        raise ValueError("exact avoidance is only decided for lattice translates")
    return _tail_avoided(spec, coset) and not _finite_hits(spec, coset)


def _square_candidates(spec: SupportSpec) -> Iterator[Coset]:
    # square translates, modulus ascending, first coordinate fastest
    for M in _divisors(spec.period):
        G = Subgroup.rect(M, M)
        for jp in range(M):
            for j in range(M):
                yield Coset((j, jp), G)


def _quadrant_points(coset: Coset) -> Iterator[Point]:
    M = coset.group.rect_modulus()
    r = 0
    while True:
        for v in range(r + 1):
            for u in range(r + 1):
                if max(u, v) == r:
                    yield (coset.offset[0] + M * u, coset.offset[1] + M * v)
        r += 1


def _refine(spec: SupportSpec, coset: Coset) -> Coset:
    """Shrink a tail-avoiding square translate until it also steps over the
    finite part of the view."""
    hits = _finite_hits(spec, coset)
    if not hits:
        return coset
    M = coset.group.a
    others = [Coset((j, jp), coset.group) for j in range(M) for jp in range(M)
              if (j, jp) != coset.offset]
    anchor = next(p for p in _quadrant_points(coset) if p not in hits)
    return avoiding_rect_lattice(others, hits, anchor)


def decide_spd(spec: SupportSpec) -> SpdVerdict:
    """Exact verdict, with a rectangular witness translate when not strictly PD."""
    if isinstance(spec.tail, MinTail):
        return STRICT
    candidates = [C for C in _square_candidates(spec) if _tail_avoided(spec, C)]
    if not candidates:
        return STRICT
    clean = [C for C in candidates if not _finite_hits(spec, C)]
    witness = clean[0] if clean else _refine(spec, candidates[0])
    if not (witness.group.is_rectangular and coset_avoids_view(spec, witness)):
        raise AssertionError(f"witness {witness} fails the exact disjointness check")
    return SpdVerdict(Outcome.NOT_STRICTLY_PD, witness)


def rect_search_order(max_modulus: int) -> Iterator[tuple[int, int]]:
    """Rectangular moduli by max(a, b), the square first within each level."""
    for s in range(1, max_modulus + 1):
        yield s, s
        for a, b in sorted(itertools.chain(((s, t) for t in range(1, s)),
                                           ((t, s) for t in range(1, s)))):
            yield a, b


def decide_spd_bounded(spec: SupportSpec, max_modulus: int, window: int | None = None) -> SpdVerdict:
    """Brute-force oracle over rectangular translates with moduli <= max_modulus.

    Each translate is scanned on the box [-window, window]^2 using plain
    membership.  A translate with no hit is reported only when the box
    provably contains a full period of the pattern beyond the finite
    corrections; a translate counts as robustly hit when one of its hits has
    both coordinates beyond those corrections.  An exhausted search claims
    strict positive definiteness only when completeness is known (min-tail,
    or periodic with m <= max_modulus, all hits robust).
    """
    if max_modulus < 1:
        raise ValueError("max_modulus must be >= 1")
    tail = spec.tail
    F = spec.finite_reach
    N = tail.N if isinstance(tail, MinTail) else 0
    if window is None:
        window = 4 * max_modulus * max(spec.period, N, F + 1, 1)
    W = window
    fragile = False
    for a, b in rect_search_order(max_modulus):
        G = Subgroup.rect(a, b)
        for jp in range(b):
            for j in range(a):
                C = Coset((j, jp), G)
                hit = robust = False
                for k in range(-W + (j + W) % a, W + 1, a):
                    for l in range(-W + (jp + W) % b, W + 1, b):
                        if in_view(spec, (k, l)):
                            hit = True
                            if min(abs(k), abs(l)) > F:
                                robust = True
                                break
                    if robust:
                        break
                if not hit:
                    if isinstance(tail, NoTail) and W >= F:
                        return SpdVerdict(Outcome.NOT_STRICTLY_PD, C)
                    if isinstance(tail, Periodic) and W >= F + max(lcm(a, tail.m), lcm(b, tail.m)):
                        return SpdVerdict(Outcome.NOT_STRICTLY_PD, C)
                    return SpdVerdict(Outcome.UNKNOWN, bound=max_modulus)
                fragile = fragile or not robust
    complete = isinstance(tail, MinTail) or (isinstance(tail, Periodic) and tail.m <= max_modulus)
    if complete and not fragile:
        return STRICT
    return SpdVerdict(Outcome.UNKNOWN, bound=max_modulus)


@dataclass(frozen=True)
class CircleSupport:
    """One-dimensional support J in Z_+ with the same tail taxonomy
    (Periodic residues are integers mod m)."""

    explicit: frozenset = field(default_factory=frozenset)
    removed: frozenset = field(default_factory=frozenset)
    tail: Tail = field(default_factory=NoTail)

    def __post_init__(self):
        object.__setattr__(self, "explicit", frozenset(int(k) for k in self.explicit))
        object.__setattr__(self, "removed", frozenset(int(k) for k in self.removed))
        if self.explicit & self.removed:
            raise SchemaError("points both explicit and removed")
        if any(k < 0 for k in self.explicit | self.removed):
            raise SchemaError("circle support lives in Z_+")
        if isinstance(self.tail, Periodic):
            res = frozenset(int(r) for r in self.tail.residues)
            if self.tail.m < 1 or any(not 0 <= r < self.tail.m for r in res):
                raise SchemaError("bad periodic tail")
            object.__setattr__(self, "tail", Periodic(self.tail.m, res))

    def member(self, k: int) -> bool:
        if k < 0 or k in self.removed:
            return False
        if k in self.explicit:
            return True
        tail = self.tail
        if isinstance(tail, MinTail):
            return k >= tail.N
        if isinstance(tail, Periodic):
            return k % tail.m in tail.residues
        return False

    def in_view(self, k: int) -> bool:
        return self.member(abs(k))


def decide_spd_circle(spec: CircleSupport) -> SpdVerdict:
    """The single-circle criterion: {k : |k| in J} must meet every j + aZ."""
    tail = spec.tail
    if isinstance(tail, MinTail):
        return STRICT
    m = tail.m if isinstance(tail, Periodic) else 1
    candidates = []
    for M in _divisors(m):
        for j in range(M):
            if isinstance(tail, Periodic):
                if any(r % M == (e * j) % M for r in tail.residues for e in (1, -1)):
                    continue
            candidates.append(Progression(j, M))
    if not candidates:
        return STRICT

    def hits(P):
        return [s * k for k in spec.explicit for s in (1, -1) if P.contains(s * k) and spec.in_view(s * k)]

    clean = [P for P in candidates if not hits(P)]
    if clean:
        return SpdVerdict(Outcome.NOT_STRICTLY_PD, clean[0])
    P = candidates[0]
    bad = set(hits(P))
    anchor = next(P.offset + P.step * u for u in itertools.count() if P.offset + P.step * u not in bad)
    t = 1
    while any((x - anchor) % (P.step * t) == 0 for x in bad):
        t += 1
    return SpdVerdict(Outcome.NOT_STRICTLY_PD, Progression(anchor, P.step * t))


def _infinite_quadrant(spec: SupportSpec, coset: Coset, ex: int, ey: int) -> bool:
    # beyond every finite correction and threshold, membership is periodic
    tail = spec.tail
    start = max(spec.finite_reach, tail.N if isinstance(tail, MinTail) else 0) + 1
    L = lcm(coset.group.rect_modulus(), spec.period)
    return any(coset.contains((ex * x, ey * y)) and in_view(spec, (ex * x, ey * y))
               for x in range(start, start + L) for y in range(start, start + L))


def intersection_sampler(spec: SupportSpec, coset: Coset, count: int,
                         norm_cap: int = 10_000) -> list[Point]:
    """The first ``count`` points of view ∩ coset.

    Points are drawn from the first sign quadrant, in the order
    (+,+), (-,+), (+,-), (-,-), where the intersection is infinite; within a
    quadrant they are ordered by max-norm, then lexicographically.
    """
    if coset.group.rank != 2:
        raise ValueError("sampling needs a lattice translate")
    if not decide_spd(spec).strict:
        raise ValueError("intersections are only guaranteed infinite for strictly PD supports")
    quadrant = next((q for q in [(1, 1), (-1, 1), (1, -1), (-1, -1)]
                     if _infinite_quadrant(spec, coset, *q)), None)
    if quadrant is None:
        raise RuntimeError(f"no quadrant with infinite intersection for {coset}: decision bug")
    ex, ey = quadrant
    out: list[Point] = []
    for r in range(norm_cap + 1):
        for x in range(r + 1):
            for y in range(r + 1):
                if max(x, y) != r:
                    continue
                p = (ex * x, ey * y)
                if coset.contains(p) and in_view(spec, p):
                    out.append(p)
                    if len(out) == count:
                        return out
    raise RuntimeError(f"sampler stalled at norm {norm_cap} with {len(out)} of {count} points")
