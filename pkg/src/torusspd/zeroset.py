"""Zero sets of exponential sums at rational angles.

For points with angles 2*pi*p/q the double sequence
b[k, l] = sum_mu c_mu e^{i k theta_mu} e^{i l phi_mu} is q-periodic in both
indices, so its zero set is a union of cosets of subgroups containing
(qZ, qZ) and can be read off one period.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .intlat import Coset, Point, Subgroup
from .kernel import TWO_PI, PointConfig


@dataclass(frozen=True, eq=False)
class ExpSumTable:
    q: int
    values: np.ndarray  # values[k, l] for 0 <= k, l < q

    def __getitem__(self, kl) -> complex:
        k, l = kl
        return complex(self.values[k % self.q, l % self.q])


def _character_matrix(q: int, pairs) -> np.ndarray:
    # rows (k, l) row-major over [0, q)^2, columns the points
    P = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    k, l = np.divmod(np.arange(q * q), q)
    e = (np.outer(k, P[:, 0]) + np.outer(l, P[:, 1])) % q
    return np.exp(1j * TWO_PI * e / q)


def build_table(config: PointConfig, c) -> ExpSumTable:
    if config.exact is None:
        raise ValueError("configuration has no exact rational form")
    q, pairs = config.exact
    c = np.asarray(c)
    if len(c) != len(pairs):
        raise ValueError("weights and points differ in length")
    vals = (_character_matrix(q, pairs) @ c).reshape(q, q) if len(c) else np.zeros((q, q), complex)
    table = ExpSumTable(q, vals)
    # periodicity spot check from the float angles at shifted indices
    scale = max(1.0, float(np.sum(np.abs(c))))
    for k, l in [(0, 0), (1, 0), (0, 1), (q - 1, q - 1), (q // 2, (q + 1) // 2)]:
        for sk, sl in [(q, 0), (0, -q), (2 * q, 3 * q)]:
            kk, ll = k + sk, l + sl
            direct = np.sum(c * np.exp(1j * (kk * config.theta + ll * config.phi)))
            if abs(direct - table[kk, ll]) > 1e-12 * scale * max(1, abs(kk) + abs(ll)):
                raise AssertionError(f"table not periodic at {(kk, ll)}")
    return table


@lru_cache(maxsize=None)
def subgroups_containing(q: int) -> tuple[Subgroup, ...]:
    """All subgroups of Z^2 containing (qZ, qZ), largest first."""
    out = []
    for a in range(1, q + 1):
        if q % a:
            continue
        for d in range(1, q + 1):
            if q % d:
                continue
            for b in range(d):
                if ((q // a) * b) % d == 0:
                    out.append(Subgroup.full(a, b, d))
    out.sort(key=lambda G: (G.index, G.a, G.b, G.d))
    return tuple(out)


@dataclass
class ZeroStructure:
    q: int
    zeros: list[Point]
    cosets: list[Coset]

    def covers(self, p) -> bool:
        return any(C.contains(p) for C in self.cosets)

    def to_json(self) -> dict:
        return {"q": self.q, "zeros": [list(z) for z in self.zeros],
                "cosets": [C.to_json() for C in self.cosets]}


def zero_residues(table: ExpSumTable, tol: float = 1e-9) -> list[Point]:
    mags = np.abs(table.values)
    top = float(np.max(mags)) if mags.size else 0.0
    mask = mags <= tol * top
    return [(int(k), int(l)) for k, l in zip(*np.nonzero(mask))]


def detect_structure(table: ExpSumTable, tol: float = 1e-9) -> ZeroStructure:
    """Cover the zero residues greedily by maximal cosets z + H.

    Uncovered zeros are taken in lexicographic order and each gets the
    largest subgroup H (then smallest (a, b, d)) with z + H inside the zero
    set.  Terminates with at most q^2 cosets since H = (qZ, qZ) always fits.
    """
    q = table.q
    zeros = zero_residues(table, tol)
    zset = set(zeros)
    covered: set[Point] = set()
    cosets = []
    for z in zeros:
        if z in covered:
            continue
        for H in subgroups_containing(q):
            pts = {((z[0] + k) % q, (z[1] + l) % q) for k, l in H.residues(q)}
            if pts <= zset:
                cosets.append(Coset(z, H))
                covered |= pts
                break
    return ZeroStructure(q, zeros, cosets)


def verify_not_all_zero(config: PointConfig, c, tol: float = 1e-10) -> bool:
    """Distinct points with nonzero weights never give an identically zero
    sequence.

    The q^2 characters restricted to distinct points have full column rank,
    so least squares recovers c from its own table; the table can only vanish
    when c does.
    """
    if config.exact is None:
        raise ValueError("configuration has no exact rational form")
    config.check_distinct()
    q, pairs = config.exact
    c = np.asarray(c, dtype=complex)
    scale = float(np.sum(np.abs(c)))
    M = _character_matrix(q, pairs)
    b = M @ c if len(c) else np.zeros(q * q, complex)
    if np.linalg.matrix_rank(M) != len(c):
        return False
    rec = np.linalg.lstsq(M, b, rcond=None)[0]
    if np.max(np.abs(rec - c), initial=0.0) > 1e-9 * max(1.0, scale):
        return False
    all_zero = float(np.max(np.abs(b), initial=0.0)) <= tol * scale
    if all_zero:
        return float(np.max(np.abs(c), initial=0.0)) <= tol * max(1.0, scale)
    return True
