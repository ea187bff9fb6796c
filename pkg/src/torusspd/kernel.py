"""Isotropic kernels on the torus as finite double cosine series.

The isotropic part is ``K_r(cos s, cos t) = sum a[k,l] T_k(cos s) T_l(cos t)``
with ``T_k(cos s) = cos(k s)``, so all Gram entries are evaluated from angle
differences and the diagonal is exactly the coefficient sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class DuplicatePointsError(ValueError):
    pass


class NonPositiveCoefficients(ValueError):
    """Fitted coefficients that are clearly negative (data not positive definite)."""

    def __init__(self, offending):
        self.offending = sorted(offending)
        shown = ", ".join(f"{kl}: {v:.3e}" for kl, v in self.offending[:10])
        super().__init__(f"negative coefficients at {shown}")


class AliasingError(ValueError):
    """Energy above the requested degree: the samples do not come from a
    kernel of that degree."""

    def __init__(self, offending):
        self.offending = sorted(offending)
        shown = ", ".join(f"{kl}: {v:.3e}" for kl, v in self.offending[:10])
        super().__init__(f"coefficients above max degree: {shown}")


def _coeff_table(coeffs, allow_negative_index: bool) -> dict:
    table = {}
    items = coeffs.items() if isinstance(coeffs, Mapping) else ((kl, a) for *kl, a in coeffs)
    for kl, a in items:
        k, l = int(kl[0]), int(kl[1])
        if not allow_negative_index and (k < 0 or l < 0):
            raise ValueError(f"coefficient index {(k, l)} must be nonnegative")
        a = float(a)
        if not a >= 0.0 or not math.isfinite(a):
            raise ValueError(f"coefficient a[{k},{l}] = {a} must be finite and nonnegative")
        if a > 0.0:
            table[(k, l)] = table.get((k, l), 0.0) + a
    return dict(sorted(table.items()))


@dataclass(frozen=True, eq=False)
class ChebKernel:
    """Nonnegative coefficient table {(k, l): a} over Z_+^2 (zeros dropped)."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _coeff_table(self.coeffs, False))

    def __eq__(self, other):
        return isinstance(other, ChebKernel) and self.coeffs == other.coeffs

    @property
    def support(self) -> list[tuple[int, int]]:
        return list(self.coeffs)

    @property
    def degree(self) -> tuple[int, int]:
        if not self.coeffs:
            return 0, 0
        return max(k for k, _ in self.coeffs), max(l for _, l in self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": [[k, l, a] for (k, l), a in self.coeffs.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> ChebKernel:
        try:
            rows = [(int(k), int(l), float(a)) for k, l, a in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed kernel JSON: {exc}") from exc
        return cls({(k, l): a for k, l, a in rows})


@dataclass(frozen=True, eq=False)
class LaurentKernel:
    """Complex-circle kernel sum a[k,l] z^k w^l with (k, l) ranging over Z^2."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _coeff_table(self.coeffs, True))

    @property
    def support(self) -> list[tuple[int, int]]:
        return list(self.coeffs)


def schoenberg_norm(kernel: ChebKernel | LaurentKernel) -> float:
    """Sum of the coefficients, i.e. K_r(1, 1)."""
    return math.fsum(kernel.coeffs.values())


def eval_kr_angles(kernel: ChebKernel, dtheta, dphi):
    """K_r at angle differences: sum a[k,l] cos(k*dtheta) cos(l*dphi)."""
    dtheta = np.asarray(dtheta, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    out = np.zeros(np.broadcast(dtheta, dphi).shape)
    for (k, l), a in kernel.coeffs.items():
        out = out + a * np.cos(k * dtheta) * np.cos(l * dphi)
    return out[()] if out.ndim == 0 else out


def _clenshaw(c: np.ndarray, x):
    # sum_k c[k] T_k(x) along the first axis of c
    b1 = np.zeros(np.shape(x))
    b2 = np.zeros(np.shape(x))
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + ck, b1
    return x * b1 - b2 + c[0]


def eval_kr(kernel: ChebKernel, t, s):
    """K_r(t, s) for t, s in [-1, 1] by nested Clenshaw recurrences."""
    K, L = kernel.degree
    C = np.zeros((K + 1, L + 1))
    for (k, l), a in kernel.coeffs.items():
        C[k, l] = a
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    inner = np.array([_clenshaw(C[k], s) for k in range(K + 1)])
    out = _clenshaw(inner, t)
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class PointConfig:
    """Points (theta, phi) on the torus; ``exact = (q, pairs)`` records
    theta = 2*pi*p/q, phi = 2*pi*r/q."""

    angles: np.ndarray
    exact: tuple | None = None

    def __post_init__(self):
        A = np.asarray(self.angles, dtype=float).reshape(-1, 2)
        A.setflags(write=False)
        object.__setattr__(self, "angles", A)
        if self.exact is not None:
            q, pairs = self.exact
            q = int(q)
            if q < 1:
                raise ValueError("exact order q must be positive")
            pairs = tuple((int(p) % q, int(r) % q) for p, r in pairs)
            object.__setattr__(self, "exact", (q, pairs))
            if len(pairs) != len(A):
                raise ValueError("exact form and angles differ in length")
            ref = TWO_PI * np.asarray(pairs, dtype=float).reshape(-1, 2) / q
            if len(A) and np.max(np.abs(np.angle(np.exp(1j * (ref - A))))) > 1e-12:
                raise ValueError("exact form does not reproduce the angles")

    @classmethod
    def from_angles(cls, angles: Iterable[Sequence[float]]) -> PointConfig:
        A = np.mod(np.asarray(list(angles), dtype=float).reshape(-1, 2), TWO_PI)
        return cls(A)

    @classmethod
    def from_exact(cls, q: int, pairs: Iterable[Sequence[int]]) -> PointConfig:
        pairs = [(int(p) % q, int(r) % q) for p, r in pairs]
        A = TWO_PI * np.asarray(pairs, dtype=float).reshape(-1, 2) / q
        return cls(A, (q, tuple(pairs)))

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def theta(self) -> np.ndarray:
        return self.angles[:, 0]

    @property
    def phi(self) -> np.ndarray:
        return self.angles[:, 1]

    def duplicates(self, tol: float = 1e-12) -> list[tuple[int, int]]:
        """Index pairs of coinciding points (exactly, when the exact form is known)."""
        if self.exact is not None:
            seen, dup = {}, []
            for i, pr in enumerate(self.exact[1]):
                if pr in seen:
                    dup.append((seen[pr], i))
                else:
                    seen[pr] = i
            return dup
        z = np.exp(1j * self.angles)
        dup = []
        for i in range(len(z)):
            close = np.max(np.abs(z[i + 1:] - z[i]), axis=1) <= tol if i + 1 < len(z) else []
            dup.extend((i, i + 1 + int(j)) for j in np.flatnonzero(close))
        return dup

    def check_distinct(self) -> None:
        dup = self.duplicates()
        if dup:
            raise DuplicatePointsError(f"coinciding points at indices {dup[:5]}")

    def rotated(self, alpha: float, beta: float) -> PointConfig:
        return PointConfig.from_angles(self.angles + np.array([alpha, beta]))

    def to_json(self) -> dict:
        if self.exact is not None:
            q, pairs = self.exact
            return {"exact": {"q": q, "pairs": [list(p) for p in pairs]}}
        return {"angles": self.angles.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> PointConfig:
        try:
            if "exact" in obj:
                return cls.from_exact(int(obj["exact"]["q"]), obj["exact"]["pairs"])
            return cls.from_angles(obj["angles"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed points JSON: {exc}") from exc


def gram(kernel: ChebKernel, config: PointConfig) -> np.ndarray:
    """Gram matrix A[mu, nu] = K_r at the angle differences of points mu, nu.

    Each unordered pair is summed once, in (k, l)-lexicographic order with
    compensated summation, and mirrored; the diagonal is the coefficient sum.
    """
    config.check_distinct()
    n = len(config)
    kl = np.array(list(kernel.coeffs), dtype=float).reshape(-1, 2)
    a = np.array(list(kernel.coeffs.values()), dtype=float)
    A = np.empty((n, n))
    iu, ju = np.triu_indices(n, 1)
    dt = config.theta[iu] - config.theta[ju]
    dp = config.phi[iu] - config.phi[ju]
    terms = a * np.cos(np.outer(dt, kl[:, 0])) * np.cos(np.outer(dp, kl[:, 1]))
    vals = [math.fsum(row) for row in terms]
    A[iu, ju] = vals
    A[ju, iu] = vals
    np.fill_diagonal(A, schoenberg_norm(kernel))
    return A


def gram_complex(kernel: LaurentKernel, config: PointConfig) -> np.ndarray:
    """Hermitian Gram matrix A[mu, nu] = sum a[k,l] e^{ik(t_mu - t_nu)} e^{il(p_mu - p_nu)}."""
    config.check_distinct()
    kl = np.array(list(kernel.coeffs), dtype=float).reshape(-1, 2)
    a = np.array(list(kernel.coeffs.values()), dtype=float)
    E = np.exp(1j * (np.outer(config.theta, kl[:, 0]) + np.outer(config.phi, kl[:, 1])))
    return (E * a) @ E.conj().T


def sample_grid(kernel: ChebKernel, n: int) -> np.ndarray:
    """K_r on the uniform n x n angle grid theta_i = 2*pi*i/n."""
    g = TWO_PI * np.arange(n) / n
    return eval_kr_angles(kernel, g[:, None], g[None, :])


def fit_coefficients(samples, max_degree: int, neg_tol: float = 1e-8,
                     alias_tol: float = 1e-8, drop_tol: float = 1e-12) -> ChebKernel:
    """Recover the cosine coefficients from samples on a uniform n x n grid.

    Discrete orthogonality of cos(k*theta_i) on n points is exact for
    k, k' <= n/2, so every degree up to n // 2 is resolved.  Anything above
    ``max_degree`` must vanish (an oversampled grid therefore exposes
    aliasing); on the minimal grid n = 2M + 1 higher degrees fold back
    invisibly.
    """
    S = np.asarray(samples, dtype=float)
    n = S.shape[0]
    if S.ndim != 2 or S.shape[1] != n:
        raise ValueError("samples must be a square grid")
    if n < 2 * max_degree + 1:
        raise ValueError(f"grid of {n} points cannot resolve degree {max_degree}")
    top = n // 2
    k = np.arange(top + 1)
    g = TWO_PI * np.arange(n) / n
    C = np.cos(np.outer(k, g))
    w = np.full(top + 1, 2.0 / n)
    w[0] = 1.0 / n
    if n % 2 == 0:
        w[top] = 1.0 / n
    coef = (w[:, None] * w[None, :]) * (C @ S @ C.T)

    scale = max(1.0, float(np.max(np.abs(coef))))
    high = [((i, j), coef[i, j]) for i in range(top + 1) for j in range(top + 1)
            if (i > max_degree or j > max_degree) and abs(coef[i, j]) > alias_tol * scale]
    if high:
        raise AliasingError(high)
    low = coef[:max_degree + 1, :max_degree + 1]
    neg = [((i, j), low[i, j]) for i, j in zip(*np.nonzero(low < -neg_tol * scale))]
    if neg:
        raise NonPositiveCoefficients([((int(i), int(j)), float(v)) for (i, j), v in neg])
    return ChebKernel({(i, j): float(low[i, j]) for i in range(max_degree + 1)
                       for j in range(max_degree + 1) if low[i, j] > drop_tol * scale})
