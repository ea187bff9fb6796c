"""Subgroups and cosets of Z^2.

Every subgroup is stored in a Hermite-style normal form with generator rows
``(a, b)`` and ``(0, d)``::

    trivial   a = 0, b = 0, d = 0
    vertical  a = 0, b = 0, d > 0        (0, d)Z
    rank1     a > 0,        d = 0        (a, b)Z
    full      a > 0, 0 <= b < d          (a, b)Z + (0, d)Z

Membership is then two divisibility checks: ``a | k`` and
``d | l - (k / a) * b`` (with "divides" by 0 read as equality).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Point = tuple[int, int]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) >= 0`` and ``s*a + t*b = g``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def lcm(a: int, b: int) -> int:
    """lcm with the convention lcm(0, x) = 0 (0 is the modulus of equality)."""
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // math.gcd(a, b)


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Solve x = r1 (mod m1), x = r2 (mod m2).

    A modulus of 0 pins x exactly.  Returns ``(x, M)`` describing the solution
    set ``x + M*Z`` (reduced into ``[0, M)`` when ``M > 0``), or None.
    """
    if m1 == 0 and m2 == 0:
        return (r1, 0) if r1 == r2 else None
    if m1 == 0:
        return (r1, 0) if (r1 - r2) % m2 == 0 else None
    if m2 == 0:
        return (r2, 0) if (r2 - r1) % m1 == 0 else None
    g, s, _ = xgcd(m1, m2)
    if (r2 - r1) % g:
        return None
    M = m1 // g * m2
    x = r1 + (r2 - r1) // g * s % (m2 // g) * m1
    return x % M, M


def solve_linear(c: int, r: int, m: int) -> tuple[int, int] | None:
    """Solve c*t = r (mod m) for t; ``m == 0`` means exact equality.

    Returns ``(t0, T)``: solutions are ``t0 + T*Z`` (``T == 0``: unique).
    """
    if m == 0:
        if c == 0:
            return (0, 1) if r == 0 else None
        return (r // c, 0) if r % c == 0 else None
    g = math.gcd(c, m)
    if r % g:
        return None
    T = m // g
    if T == 1:
        return 0, 1
    t0 = (r // g) * pow(c // g, -1, T) % T
    return t0, T


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of Z^2 in normal form; build through the class methods or
    :func:`canonicalize`."""

    a: int = 0
    b: int = 0
    d: int = 0

    def __post_init__(self):
        a, b, d = self.a, self.b, self.d
        ok = a >= 0 and d >= 0
        if a == 0:
            ok = ok and b == 0
        elif d > 0:
            ok = ok and 0 <= b < d
        if not ok:
            raise ValueError(f"not a canonical subgroup: (a, b, d) = {(a, b, d)}")

    @classmethod
    def trivial(cls) -> Subgroup:
        return cls(0, 0, 0)

    @classmethod
    def vertical(cls, b: int) -> Subgroup:
        if b <= 0:
            raise ValueError("vertical subgroup needs b > 0")
        return cls(0, 0, b)

    @classmethod
    def rank1(cls, a: int, b: int) -> Subgroup:
        if a <= 0:
            raise ValueError("rank-1 subgroup needs a > 0")
        return cls(a, b, 0)

    @classmethod
    def full(cls, a: int, b: int, d: int) -> Subgroup:
        if a <= 0 or d <= 0:
            raise ValueError("lattice needs a, d > 0")
        return cls(a, b % d, d)

    @classmethod
    def rect(cls, a: int, b: int) -> Subgroup:
        """The rectangular lattice (aZ, bZ)."""
        return cls.full(a, 0, b)

    @property
    def kind(self) -> str:
        if self.a == 0:
            return "vertical" if self.d else "trivial"
        return "full" if self.d else "rank1"

    @property
    def rank(self) -> int:
        return (self.a > 0) + (self.d > 0)

    @property
    def index(self) -> int | float:
        return self.a * self.d if self.rank == 2 else math.inf

    @property
    def is_rectangular(self) -> bool:
        return self.rank == 2 and self.b == 0

    def generators(self) -> list[Point]:
        gens = []
        if self.a:
            gens.append((self.a, self.b))
        if self.d:
            gens.append((0, self.d))
        return gens

    def contains(self, p: Sequence[int]) -> bool:
        k, l = int(p[0]), int(p[1])
        if self.a == 0:
            if k != 0:
                return False
            rest = l
        else:
            if k % self.a:
                return False
            rest = l - (k // self.a) * self.b
        return rest == 0 if self.d == 0 else rest % self.d == 0

    def __contains__(self, p) -> bool:
        return self.contains(p)

    def rect_modulus(self) -> int:
        """Smallest m > 0 with (mZ, mZ) inside this lattice.

        (m, 0) lies in the group iff a | m and d | (m/a)*b; (0, m) iff d | m.
        The result always divides the index a*d.
        """
        if self.rank != 2:
            raise ValueError("only lattices (rank 2) contain a square lattice")
        step = self.a * (self.d // math.gcd(self.b, self.d))
        return lcm(step, self.d)

    def residues(self, q: int) -> list[Point]:
        """Elements of the group reduced into [0, q)^2, sorted.

        Only meaningful when (qZ, qZ) is contained in the group.
        """
        out = set()
        for p in range(q):
            for s in range(q):
                k, l = p * self.a, p * self.b + s * self.d
                out.add((k % q, l % q))
        return sorted(out)

    def to_json(self) -> list[list[int]]:
        return [list(g) for g in self.generators()]

    def __str__(self) -> str:
        if self.kind == "trivial":
            return "{0}"
        if self.is_rectangular:
            return f"({self.a}Z,{self.d}Z)"
        return "+".join(f"({x},{y})Z" for x, y in self.generators())


def canonicalize(generators: Iterable[Sequence[int]]) -> Subgroup:
    """Normal form of the subgroup generated by ``generators``.

    Column-wise extended gcd: the first coordinates are folded into a single
    pivot row, and every fold contributes its kernel vector to the vertical
    part.
    """
    a, b, d = 0, 0, 0
    for g in generators:
        x, y = int(g[0]), int(g[1])
        if x == 0:
            d = math.gcd(d, y)
            continue
        if a == 0:
            a, b = x, y
            continue
        h, s, t = xgcd(a, x)
        # [[s, t], [x/h, -a/h]] is unimodular; second row kills column one
        d = math.gcd(d, (x * b - a * y) // h)
        a, b = h, s * b + t * y
    if a < 0:
        a, b = -a, -b
    if d:
        b %= d
    return Subgroup(a, b, d)


def contains(S: Subgroup, p: Sequence[int]) -> bool:
    return S.contains(p)


@dataclass(frozen=True)
class Coset:
    """The translate ``offset + group``; the offset is normalized on creation
    so that equal sets compare equal."""

    offset: Point
    group: Subgroup

    def __post_init__(self):
        j, jp = int(self.offset[0]), int(self.offset[1])
        G = self.group
        if G.a:
            p, j = divmod(j, G.a)
            jp -= p * G.b
        if G.d:
            jp %= G.d
        object.__setattr__(self, "offset", (j, jp))

    def contains(self, p: Sequence[int]) -> bool:
        return self.group.contains((p[0] - self.offset[0], p[1] - self.offset[1]))

    def __contains__(self, p) -> bool:
        return self.contains(p)

    def points_in_box(self, lo: int, hi: int) -> Iterator[Point]:
        """All coset points in [lo, hi)^2 (row-major)."""
        for k in range(lo, hi):
            for l in range(lo, hi):
                if self.contains((k, l)):
                    yield (k, l)

    def shifted(self, v: Sequence[int]) -> Coset:
        return Coset((self.offset[0] + v[0], self.offset[1] + v[1]), self.group)

    def negated(self) -> Coset:
        return Coset((-self.offset[0], -self.offset[1]), self.group)

    def to_json(self) -> dict:
        return {"offset": list(self.offset), "gens": self.group.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> Coset:
        try:
            offset = [int(v) for v in obj["offset"]]
            gens = [[int(v) for v in g] for g in obj["gens"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed coset JSON: {obj!r}") from exc
        if len(offset) != 2 or any(len(g) != 2 for g in gens):
            raise ValueError(f"malformed coset JSON: {obj!r}")
        return cls(tuple(offset), canonicalize(gens))

    def __str__(self) -> str:
        return f"{self.offset}+{self.group}"


def coset_intersect(C1: Coset, C2: Coset) -> Coset | None:
    """Exact intersection of two cosets (None when disjoint).

    First coordinate by CRT gives k = k0 + t*A.  On that line each coset
    imposes l = alpha_i + beta_i*t (mod d_i); compatibility of the two
    congruences is a linear congruence in t, and l then follows by CRT.
    """
    (j1, jp1), G1 = C1.offset, C1.group
    (j2, jp2), G2 = C2.offset, C2.group
    first = crt_pair(j1, G1.a, j2, G2.a)
    if first is None:
        return None
    k0, A = first

    def line(j, jp, G):
        if G.a == 0:
            return jp, 0
        return jp + (k0 - j) // G.a * G.b, A // G.a * G.b

    al1, be1 = line(j1, jp1, G1)
    al2, be2 = line(j2, jp2, G2)
    g = math.gcd(G1.d, G2.d)
    sol = solve_linear(be1 - be2, al2 - al1, g)
    if sol is None:
        return None
    t0, T = sol
    base = crt_pair(al1 + be1 * t0, G1.d, al2 + be2 * t0, G2.d)
    step = crt_pair(be1 * T, G1.d, be2 * T, G2.d)
    assert base is not None and step is not None
    l0, D = base
    group = canonicalize([(T * A, step[0]), (0, D)])
    return Coset((k0 + t0 * A, l0), group)


def decompose_to_square(L: Subgroup) -> list[Coset]:
    """Split a lattice into translates of (adZ, adZ).

    The offsets are the lattice points of the window [0, ad)^2; there are
    exactly ad of them.
    """
    if L.rank != 2:
        raise ValueError(f"decomposition needs a rank-2 lattice, got {L.kind}")
    n = L.a * L.d
    square = Subgroup.rect(n, n)
    return [Coset(p, square) for p in itertools.product(range(n), repeat=2) if L.contains(p)]


def _directions() -> Iterator[Point]:
    # primitive-up-to-sign directions by increasing max-norm, then lexicographic
    r = 1
    while True:
        ring = [(x, y) for x in range(0, r + 1) for y in range(-r, r + 1)
                if max(abs(x), abs(y)) == r and (x > 0 or y > 0)]
        yield from sorted(ring)
        r += 1


def _boost(component: Coset, anchor: Point, max_norm: int) -> Coset:
    """Enlarge a rank-1 component to a lattice translate still missing anchor."""
    G = component.group
    (dx, dy), = G.generators()
    rel = component.shifted((-anchor[0], -anchor[1]))
    for alpha, beta in _directions():
        if max(abs(alpha), abs(beta)) > max_norm:
            break
        if alpha * dy - beta * dx == 0:
            continue
        line = Coset((0, 0), canonicalize([(alpha, beta)]))
        if coset_intersect(line, rel) is None:
            return Coset(component.offset, canonicalize([(dx, dy), (alpha, beta)]))
    raise RuntimeError(f"no boosting direction up to max-norm {max_norm} for {component}")


def avoiding_rect_lattice(components: Sequence[Coset], finite_extra: Iterable[Sequence[int]],
                          anchor: Sequence[int], max_norm: int = 64) -> Coset:
    """A square-lattice translate ``anchor + (mZ, mZ)`` missing every component
    and every extra point.

    Rank <= 1 components are first enlarged by a direction whose line through
    the anchor misses them.  m starts as the lcm of the components' square
    moduli and is then multiplied up until no extra point is congruent to
    the anchor.
    """
    anchor = (int(anchor[0]), int(anchor[1]))
    extras = {(int(p[0]), int(p[1])) for p in finite_extra}
    bad = [str(C) for C in components if C.contains(anchor)]
    if anchor in extras:
        bad.append(f"extra point {anchor}")
    if bad:
        raise ValueError(f"anchor {anchor} is covered by: {', '.join(bad)}")

    lattices = []
    for C in components:
        if C.group.rank == 0:
            extras.add(C.offset)
        elif C.group.rank == 1:
            lattices.append(_boost(C, anchor, max_norm))
        else:
            lattices.append(C)

    m = 1
    for C in lattices:
        m = lcm(m, C.group.rect_modulus())
    t = 1
    while any((x - anchor[0]) % (m * t) == 0 and (y - anchor[1]) % (m * t) == 0
              for x, y in extras):
        t += 1
    result = Coset(anchor, Subgroup.rect(m * t, m * t))

    for C in components:
        if coset_intersect(result, C) is not None:
            raise AssertionError(f"{result} meets component {C}")
    for p in extras:
        if result.contains(p):
            raise AssertionError(f"{result} contains extra point {p}")
    return result
