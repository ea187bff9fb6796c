"""Null witnesses and spectral checks.

A weight vector c annihilates the quadratic form of a kernel exactly when the
two exponential sums sum_mu c_mu e^{i k t_mu} e^{+-i l p_mu} vanish on the
kernel support.  Points on a grid of roots of unity with character-like
weights make those sums vanish everywhere except on a prescribed coset and its
negative, which gives explicit counterexamples to strict positive definiteness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .intlat import Coset, Subgroup, canonicalize, lcm
from .kernel import TWO_PI, ChebKernel, LaurentKernel, PointConfig, gram, gram_complex, schoenberg_norm
from .support import REAL, Periodic, SupportSpec, coset_avoids_view, decide_spd, member

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    pass


class SamplingError(RuntimeError):
    pass


def exp_sums(config: PointConfig, c, k: int, l: int) -> tuple[complex, complex]:
    c = np.asarray(c)
    if len(c) != len(config):
        raise ValueError("weights and points differ in length")
    e = np.exp(1j * k * config.theta)
    f = np.exp(1j * l * config.phi)
    return complex(np.sum(c * e * f)), complex(np.sum(c * e * f.conj()))


def quadratic_form(kernel: ChebKernel, config: PointConfig, c) -> float:
    c = np.asarray(c, dtype=float)
    A = gram(kernel, config)
    return math.fsum((np.outer(c, c) * A).ravel())


def hermitian_form(kernel: LaurentKernel, config: PointConfig, c) -> float:
    # sum_{mu,nu} c_mu A_{mu nu} conj(c_nu) = sum a_kl |sum_mu c_mu e^{i(k t + l p)}|^2
    c = np.asarray(c, dtype=complex)
    A = gram_complex(kernel, config)
    return float(np.real(c @ A @ c.conj()))


def _weight_scale(c) -> float:
    return float(np.sum(np.abs(c)))


@dataclass
class NullCheck:
    ok: bool
    form: float
    max_sum: float
    form_zero: bool
    sums_zero: bool

    def __bool__(self) -> bool:
        return self.ok


def check_null_equivalence(kernel: ChebKernel, config: PointConfig, c, tol: float = 1e-10) -> NullCheck:
    """Compare the quadratic form with the support sums.

    Both sides are classified as zero relative to the weight scale; the
    result is true when the classifications agree.
    """
    s = _weight_scale(c)
    Q = quadratic_form(kernel, config, c)
    sums = [max(abs(x) for x in exp_sums(config, c, k, l)) for k, l in kernel.support]
    max_sum = max(sums, default=0.0)
    form_zero = abs(Q) <= tol * s * s * schoenberg_norm(kernel)
    sums_zero = max_sum <= math.sqrt(tol) * s
    return NullCheck(form_zero == sums_zero, Q, max_sum, form_zero, sums_zero)


def check_null_equivalence_complex(kernel: LaurentKernel, config: PointConfig, c,
                                   tol: float = 1e-10) -> NullCheck:
    c = np.asarray(c, dtype=complex)
    s = _weight_scale(c)
    Q = hermitian_form(kernel, config, c)
    max_sum = max((abs(exp_sums(config, c, k, l)[0]) for k, l in kernel.support), default=0.0)
    form_zero = abs(Q) <= tol * s * s * schoenberg_norm(kernel)
    sums_zero = max_sum <= math.sqrt(tol) * s
    return NullCheck(form_zero == sums_zero, Q, max_sum, form_zero, sums_zero)


def _check_weights(c) -> None:
    if np.max(np.abs(c)) < 1e-9:
        raise AssertionError("constructed weights vanish")


def juru_config(a: int, b: int, j: int, jp: int) -> tuple[PointConfig, np.ndarray]:
    """Grid of a*b roots of unity with weights cos(2 pi (mu j / a + nu j' / b)).

    The exponential sums vanish off (j, j') + (aZ, bZ) and its negative.
    """
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    if (a, b) == (1, 1):
        raise ValueError("(a, b) = (1, 1) admits no witness")
    if not (0 <= j < a and 0 <= jp < b):
        raise ValueError("offset must satisfy 0 <= j < a, 0 <= j' < b")
    q = lcm(a, b)
    sa, sb = q // a, q // b
    pairs, c = [], []
    for mu in range(1, a + 1):
        for nu in range(1, b + 1):
            pairs.append((mu * sa % q, nu * sb % q))
            c.append(math.cos(TWO_PI * ((mu * j * sa + nu * jp * sb) % q) / q))
    c = np.array(c)
    _check_weights(c)
    cfg = PointConfig.from_exact(q, pairs)
    cfg.check_distinct()
    return cfg, c


def general_lattice_config(a: int, b: int, d: int, j: int, jp: int) -> tuple[PointConfig, np.ndarray]:
    """The a*d points with theta = 2 pi (mu - nu b / d) / a, phi = 2 pi nu / d.

    Weights are Re(e^{-2 pi i mu j / a} e^{-2 pi i nu j' / d} e^{2 pi i nu j b / (a d)});
    the sums vanish off (j, j') + (a, b)Z + (0, d)Z and its negative.
    """
    G = Subgroup.full(a, b, d)
    if G.b != b:
        raise ValueError("b must satisfy 0 <= b < d")
    if a * d == 1:
        raise ValueError("the lattice is all of Z^2")
    q = a * d
    pairs, c = [], []
    for mu in range(1, a + 1):
        for nu in range(1, d + 1):
            pairs.append(((mu * d - nu * b) % q, nu * a % q))
            c.append(math.cos(TWO_PI * ((-mu * j * d - nu * jp * a + nu * j * b) % q) / q))
    c = np.array(c)
    _check_weights(c)
    cfg = PointConfig.from_exact(q, pairs)
    cfg.check_distinct()
    return cfg, c


def complex_rect_config(a: int, b: int, j: int, jp: int) -> tuple[PointConfig, np.ndarray]:
    """Grid points with weights e^{-2 pi i (mu j / a + nu j' / b)}: the single
    sum is nonzero only on (j, j') + (aZ, bZ)."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    q = lcm(a, b)
    sa, sb = q // a, q // b
    pairs, c = [], []
    for mu in range(1, a + 1):
        for nu in range(1, b + 1):
            pairs.append((mu * sa % q, nu * sb % q))
            c.append(np.exp(-1j * TWO_PI * ((mu * j * sa + nu * jp * sb) % q) / q))
    return PointConfig.from_exact(q, pairs), np.array(c)


def min_eigen(A) -> float:
    return float(np.min(jacobi_eigenvalues(A)))


def jacobi_eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("matrix must be square")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix must be symmetric")
    fro = np.linalg.norm(A)
    if n < 2 or fro == 0.0:
        return np.diag(A).copy()

    mask = ~np.eye(n, dtype=bool)

    def off(M):
        return float(np.linalg.norm(M[mask]))

    for _ in range(JACOBI_MAX_SWEEPS):
        if off(A) <= JACOBI_TOL * fro:
            return np.diag(A).copy()
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = A[p, r]
                if apr == 0.0:
                    continue
                h = A[r, r] - A[p, p]
                if abs(h) * 1e-18 > abs(apr):
                    t = apr / h
                else:
                    theta = h / (2.0 * apr)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cs = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * cs
                # rotate rows and columns p, r
                Ap, Ar = A[:, p].copy(), A[:, r].copy()
                A[:, p] = cs * Ap - sn * Ar
                A[:, r] = sn * Ap + cs * Ar
                Ap, Ar = A[p, :].copy(), A[r, :].copy()
                A[p, :] = cs * Ap - sn * Ar
                A[r, :] = sn * Ap + cs * Ar
                A[p, r] = A[r, p] = 0.0
    if off(A) <= JACOBI_TOL * fro:
        return np.diag(A).copy()
    raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")


@dataclass
class PositivityReport:
    min_eigenvalue: float | None
    trials: int
    worst_config: PointConfig | None
    eigenvalues: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "trials": self.trials,
            "worst_config": None if self.worst_config is None else self.worst_config.to_json(),
            "per_trial": self.eigenvalues,
        }


def torus_distance(p, q) -> np.ndarray:
    d = np.abs(np.asarray(p) - np.asarray(q)) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return np.hypot(d[..., 0], d[..., 1])


def sample_separated(rng: np.random.Generator, n: int, min_separation: float,
                     max_attempts: int = 20000) -> PointConfig:
    pts = np.empty((0, 2))
    attempts = 0
    while len(pts) < n:
        attempts += 1
        if attempts > max_attempts:
            raise SamplingError(f"could not place {n} points with separation {min_separation}")
        x = rng.uniform(0.0, TWO_PI, size=2)
        if len(pts) == 0 or np.min(torus_distance(pts, x)) >= min_separation:
            pts = np.vstack([pts, x])
    return PointConfig.from_angles(pts)


def verify_spd_empirical(kernel: ChebKernel, n_points: int, trials: int, seed: int,
                         min_separation: float, extra_configs=()) -> PositivityReport:
    """Smallest Gram eigenvalue over random separated configurations.

    Trial t draws from default_rng([seed, t]) so trials are independent of
    each other and of execution order.  ``extra_configs`` are evaluated after
    the random trials.
    """
    # a disc of radius sep/2 around every point must fit in the torus
    if n_points * math.pi * (min_separation / 2) ** 2 > TWO_PI ** 2:
        raise SamplingError("separation infeasible for this many points")
    configs = [sample_separated(np.random.default_rng([seed, t]), n_points, min_separation)
               for t in range(trials)]
    configs.extend(extra_configs)
    if not configs:
        return PositivityReport(None, 0, None)
    eigs = [min_eigen(gram(kernel, cfg)) for cfg in configs]
    worst = int(np.argmin(eigs))
    return PositivityReport(eigs[worst], len(configs), configs[worst], eigs)


@dataclass
class NullWitness:
    config: PointConfig
    c: np.ndarray
    residual: float
    avoided: Coset
    kernel: ChebKernel | LaurentKernel
    scale: float = 1.0

    @property
    def relative_residual(self) -> float:
        return self.residual / self.scale if self.scale else self.residual

    def to_json(self) -> dict:
        if np.iscomplexobj(self.c):
            c = [[float(z.real), float(z.imag)] for z in self.c]
        else:
            c = [float(x) for x in self.c]
        out = {"avoided": self.avoided.to_json(), "points": self.config.angles.tolist(),
               "c": c, "residual": self.residual}
        if self.config.exact is not None:
            out["exact"] = self.config.to_json()["exact"]
        return out


def single_lattice_complement(spec: SupportSpec) -> Coset | None:
    """The complement of the symmetrized periodic tail, when it is a single
    lattice coset that also avoids the finite corrections."""
    tail = spec.tail
    if spec.mode != REAL or not isinstance(tail, Periodic):
        return None
    m = tail.m
    view = {((s * r) % m, (t * u) % m) for r, u in tail.residues for s, t in spec.signs()}
    Z = sorted((r, u) for r in range(m) for u in range(m) if (r, u) not in view)
    if not Z:
        return None
    z0 = Z[0]
    G = canonicalize([((r - z0[0]), (u - z0[1])) for r, u in Z] + [(m, 0), (0, m)])
    C = Coset(z0, G)
    if len(Z) * G.index != m * m:
        return None
    if any(not C.contains(p) for p in Z):
        return None
    if G.index == 1 or not coset_avoids_view(spec, C):
        return None
    return C


def witness_kernel(spec: SupportSpec, window: int):
    if spec.mode == REAL:
        return ChebKernel({(k, l): 1.0 for k in range(window + 1) for l in range(window + 1)
                           if member(spec, (k, l))})
    return LaurentKernel({(k, l): 1.0 for k in range(-window, window + 1)
                          for l in range(-window, window + 1) if member(spec, (k, l))})


def witness_for_support(spec: SupportSpec, window: int | None = None) -> NullWitness | None:
    """Explicit null witness for a support that is not strictly positive
    definite, or None when it is."""
    verdict = decide_spd(spec)
    if verdict.strict:
        return None
    C = single_lattice_complement(spec)
    if C is None:
        C = verdict.witness
    G = C.group
    if window is None:
        window = 2 * (G.rect_modulus() + spec.period)
    K = witness_kernel(spec, window)
    j, jp = C.offset
    if spec.mode == REAL:
        if G.index == 1:
            cfg, c = PointConfig.from_exact(1, [(0, 0)]), np.array([1.0])
        elif G.is_rectangular:
            cfg, c = juru_config(G.a, G.d, j, jp)
        else:
            cfg, c = general_lattice_config(G.a, G.b, G.d, j, jp)
        resid = abs(quadratic_form(K, cfg, c)) if K.coeffs else 0.0
    else:
        cfg, c = complex_rect_config(G.a, G.d, j, jp)
        resid = abs(hermitian_form(K, cfg, c)) if K.coeffs else 0.0
    s = _weight_scale(c)
    return NullWitness(cfg, c, resid, C, K, s * s * max(schoenberg_norm(K), 1.0))
