"""Brute-force references for the combinatorial lemmas behind the kit.

Everything here is exact (integers and fractions) except where the statement
itself involves logarithms; those use certified intervals.  Sizes are capped so
that a careless call cannot run for hours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import HypothesisFailed, ScaleExceeded
from .rigor import interval as iv
from .rigor.interval import CertScalar

THETA_MAX_I = 10_000
BOX_MAX_SIDE = 60


@dataclass(frozen=True)
class ThetaQuery:
    K0: int
    I: int

    def __post_init__(self):
        if self.K0 < 0 or self.I < 0:
            raise ValueError("K0 and I must be non-negative")


@lru_cache(maxsize=64)
def _theta_prefix(K0: int, I: int) -> tuple[int, ...]:
    """Prefix sums of the I smallest weights k+m over pairs with m <= K0."""
    sums = [0]
    n = 0
    while len(sums) <= I:
        layer = min(n + 1, K0 + 1)  # number of pairs (k, m) with k + m = n, m <= K0
        for _ in range(layer):
            if len(sums) > I:
                break
            sums.append(sums[-1] + n)
        n += 1
    return tuple(sums)


def theta_bruteforce(q: ThetaQuery | tuple[int, int]) -> int:
    """Exact minimum of sum(k_i + m_i) over I distinct pairs with m_i <= K0.

    The minimum is attained by taking the I lightest pairs, filled weight layer
    by weight layer.
    """
    if not isinstance(q, ThetaQuery):
        q = ThetaQuery(*q)
    if q.I > THETA_MAX_I:
        raise ScaleExceeded(f"I = {q.I} exceeds the brute-force cap {THETA_MAX_I}")
    return _theta_prefix(q.K0, q.I)[q.I]


def theta_lower_bound_exact(K0: int, I: int) -> Fraction:
    if I < 1 or K0 < 1 or 2 * I < K0 * (K0 + 1):
        raise HypothesisFailed(f"closed form needs K0 >= 1 and I >= K0(K0+1)/2 (K0={K0}, I={I})")
    K0f, If = Fraction(K0), Fraction(I)
    return (If * If / (2 * (K0f + 1))) * (
        1 + (K0f - 1) * (K0f + 1) / If - K0f * (K0f + 2) * (K0f + 1) ** 2 / (12 * If * If)
    )


def theta_lower_bound(q: ThetaQuery | tuple[int, int]) -> CertScalar:
    """Closed-form lower bound for the weight sum (I >= K0(K0+1)/2)."""
    if not isinstance(q, ThetaQuery):
        q = ThetaQuery(*q)
    return CertScalar(theta_lower_bound_exact(q.K0, q.I))


def interpolation_count_check(K: int, L: int, scale: Fraction | int = 1) -> bool:
    """Check KL(N-I) + Theta(K-1, I) >= scale * N^2/(2K) * (...) for all 0 <= I <= N."""
    if not (3 <= K <= 8 and 5 <= L <= 12):
        raise ScaleExceeded("interpolation_count_check is limited to 3 <= K <= 8, 5 <= L <= 12")
    return interpolation_count_worst(K, L, scale)[0]


def interpolation_count_worst(K: int, L: int, scale: Fraction | int = 1) -> tuple[bool, int, Fraction]:
    """Return (holds, I at the smallest slack, that slack)."""
    N = K * (K + 1) * L // 2
    rhs = Fraction(N * N, 2 * K) * (1 + Fraction(2, L) - Fraction(6, K * L) - Fraction(1, 3 * L * L))
    rhs *= Fraction(scale)
    prefix = _theta_prefix(K - 1, N)
    worst_i, worst = 0, None
    for I in range(N + 1):
        slack = K * L * (N - I) + prefix[I] - rhs
        if worst is None or slack < worst:
            worst_i, worst = I, slack
    assert worst is not None
    return worst >= 0, worst_i, worst


def factorial_sum_log(K: int) -> CertScalar:
    """(12 / (K(K-1)(K+1))) * sum_{k<K} (K-k) log(k!) as a certified interval."""
    total = CertScalar(0)
    for j in range(2, K):
        weight = (K - j) * (K - j + 1) // 2  # sum over k = j..K-1 of (K-k)
        total = total + iv.log(CertScalar(j)) * weight
    return total * Fraction(12, K * (K - 1) * (K + 1))


def factorial_bound_check(K: int) -> bool:
    """Certify the factorial-product inequality against 2 log K - 11/3."""
    if not 2 <= K <= 500:
        raise ScaleExceeded("factorial_bound_check is limited to 2 <= K <= 500")
    rhs = 2 * iv.log(CertScalar(K)) - Fraction(11, 3)
    return factorial_sum_log(K).certainly_ge(rhs)


# -- lattice points on planes ----------------------------------------------------------


def _check_box(*sides: int) -> None:
    for s in sides:
        if s < 0:
            raise ValueError("box sides must be non-negative")
        if s > BOX_MAX_SIDE:
            raise ScaleExceeded(f"box side {s} exceeds {BOX_MAX_SIDE}")


def plane_count_bruteforce(A: int, B: int, C: int, Dv: int, X: int, Y: int, Z: int) -> int:
    """Number of integer points of [0,X]x[0,Y]x[0,Z] on A x + B y + C z = Dv."""
    _check_box(X, Y, Z)
    x = np.arange(X + 1, dtype=np.int64)[:, None]
    y = np.arange(Y + 1, dtype=np.int64)[None, :]
    rest = Dv - A * x - B * y
    if C == 0:
        return int(np.count_nonzero(rest == 0)) * (Z + 1)
    ok = rest % C == 0
    z = rest // C
    return int(np.count_nonzero(ok & (z >= 0) & (z <= Z)))


@dataclass(frozen=True)
class PlaneCheck:
    M: int
    part_a: bool
    part_b_applies: bool
    part_b: bool


def plane_check_three(A: int, B: int, C: int, Dv: int, X: int, Y: int, Z: int) -> PlaneCheck:
    """Check both conclusions for a plane with gcd(A,B,C) = 1 and ABC != 0."""
    if A * B * C == 0 or math.gcd(math.gcd(A, B), C) != 1:
        raise HypothesisFailed("needs ABC != 0 and gcd(A, B, C) = 1")
    if min(X, Y, Z) < 1:
        raise HypothesisFailed("box sides must be positive")
    M = plane_count_bruteforce(A, B, C, Dv, X, Y, Z)
    al = math.gcd(B, C)
    part_a = M <= (1 + X // al) * (1 + Y // (abs(C) // al)) and M <= (1 + X // al) * (1 + Z // (abs(B) // al))
    applies = M >= max(X + Y + 1, Y + Z + 1, Z + X + 1)
    part_b = True
    if applies:
        part_b = (
            abs(A) * (M - max(Y, Z)) <= (Y + 1) * (Z + 1)
            and abs(B) * (M - max(X, Z)) <= (X + 1) * (Z + 1)
            and abs(C) * (M - max(X, Y)) <= (X + 1) * (Y + 1)
        )
    return PlaneCheck(M, part_a, applies, part_b)


def plane_check_two(B: int, C: int, Dv: int, X: int, Y: int, Z: int) -> PlaneCheck:
    """Same for the plane B y + C z = Dv (no x term), gcd(B, C) = 1."""
    if B * C == 0 or math.gcd(B, C) != 1:
        raise HypothesisFailed("needs BC != 0 and gcd(B, C) = 1")
    if min(X, Y, Z) < 1:
        raise HypothesisFailed("box sides must be positive")
    M = plane_count_bruteforce(0, B, C, Dv, X, Y, Z)
    part_a = M <= (X + 1) * (1 + Y // abs(C)) and M <= (X + 1) * (1 + Z // abs(B))
    applies = M >= max(X + Y + 1, X + Z + 1)
    part_b = True
    if applies:
        part_b = abs(B) * (M - X) <= (X + 1) * (Z + 1) and abs(C) * (M - X) <= (X + 1) * (Y + 1)
    return PlaneCheck(M, part_a, applies, part_b)


# -- projections of the shifted box ---------------------------------------------------------


@dataclass(frozen=True)
class ProjectionCheck:
    card: int
    max_fibre: int
    threshold: Fraction
    relation_needed: bool
    relation_found: bool
    card_bound_holds: bool


def projection_check(
    b: tuple[int, int, int], R1: int, S1: int, T1: int, chi: Fraction, lam: Fraction, mu: Fraction
) -> ProjectionCheck:
    """Exercise the dichotomy for the set {(r + t b1/b3, s + t b2/b3)}.

    Either every fibre of (x1, x2) -> lam x1 + mu x2 is smaller than the
    threshold (then the image has at least card/threshold elements), or a
    small integer relation u.b = 0 exists.  Both alternatives are verified
    by enumeration.
    """
    b1, b2, b3 = b
    if b3 == 0 or (lam == 0 and mu == 0):
        raise HypothesisFailed("need b3 != 0 and (lam, mu) != (0, 0)")
    _check_box(R1, S1, T1)
    beta1, beta2 = Fraction(b1, b3), Fraction(b2, b3)
    pts = {(r + t * beta1, s + t * beta2) for r in range(R1 + 1) for s in range(S1 + 1) for t in range(T1 + 1)}
    full = (R1 + 1) * (S1 + 1) * (T1 + 1)
    if len(pts) != full:
        raise HypothesisFailed("the shifted box has collisions; cardinality hypothesis fails")
    fibres: dict[Fraction, int] = {}
    for x1, x2 in pts:
        v = lam * x1 + mu * x2
        fibres[v] = fibres.get(v, 0) + 1
    max_fibre = max(fibres.values())
    V = math.sqrt(full)
    thr_float = max(R1 + S1 + 1, S1 + T1 + 1, R1 + T1 + 1, float(chi) * V)
    threshold = Fraction(thr_float)
    needed = max_fibre >= threshold
    found = True
    if needed:
        U1 = (S1 + 1) * (T1 + 1) / (thr_float - max(S1, T1))
        U2 = (R1 + 1) * (T1 + 1) / (thr_float - max(R1, T1))
        U3 = (R1 + 1) * (S1 + 1) / (thr_float - max(R1, S1))
        found = False
        for u1, u2 in product(range(-int(U1), int(U1) + 1), range(-int(U2), int(U2) + 1)):
            num = -(u1 * b1 + u2 * b2)
            if num % b3:
                continue
            u3 = num // b3
            if (u1, u2, u3) != (0, 0, 0) and abs(u3) <= U3 * (1 + 1e-12):
                found = True
                break
    card_ok = len(fibres) * threshold >= full if not needed else True
    return ProjectionCheck(len(fibres), max_fibre, threshold, needed, found, card_ok)


# -- sweeps ----------------------------------------------------------------------------------------


def theta_sweep(K0_max: int = 6, I_max: int = 60) -> tuple[bool, str]:
    """Closed form <= exact minimum wherever it applies, equal at (2, 6)."""
    worst = None
    for K0 in range(1, K0_max + 1):
        for I in range(K0 * (K0 + 1) // 2, I_max + 1):
            gap = theta_bruteforce((K0, I)) - theta_lower_bound_exact(K0, I)
            if gap < 0:
                return False, f"closed form exceeds the minimum at K0={K0}, I={I}"
            worst = gap if worst is None else min(worst, gap)
    tight = theta_lower_bound_exact(2, 6) == theta_bruteforce((2, 6))
    return tight, f"smallest gap {worst}, equality at (2, 6): {tight}"


def interpolation_count_sweep() -> tuple[bool, str]:
    bad = [(K, L) for K in range(3, 9) for L in range(5, 13) if not interpolation_count_check(K, L)]
    return not bad, "all (K, L) in [3,8]x[5,12]" if not bad else f"fails at {bad[:5]}"


def factorial_sweep(K_max: int = 500) -> tuple[bool, str]:
    bad = [K for K in range(2, K_max + 1) if not factorial_bound_check(K)]
    return not bad, f"K = 2..{K_max}" if not bad else f"fails at {bad[:5]}"


def random_plane(rng) -> tuple[int, ...]:
    """A random plane through a lattice point of a random small box."""
    while True:
        A, B, C = (rng.choice([-1, 1]) * rng.randint(1, 7) for _ in range(3))
        if math.gcd(math.gcd(A, B), C) == 1:
            break
    X, Y, Z = (rng.randint(1, 14) for _ in range(3))
    x, y, z = rng.randint(0, X), rng.randint(0, Y), rng.randint(0, Z)
    return A, B, C, A * x + B * y + C * z, X, Y, Z


def plane_sweep(n: int = 10_000, seed: int = 20240611) -> tuple[bool, str]:
    import random

    rng = random.Random(seed)
    applied = 0
    for k in range(n):
        A, B, C, Dv, X, Y, Z = random_plane(rng)
        if k % 2:
            if math.gcd(B, C) != 1:
                continue
            chk = plane_check_two(B, C, Dv - A * rng.randint(0, X), X, Y, Z)
        else:
            chk = plane_check_three(A, B, C, Dv, X, Y, Z)
        applied += chk.part_b_applies
        if not (chk.part_a and chk.part_b):
            return False, f"fails for {(A, B, C, Dv, X, Y, Z)}"
    return True, f"{n} instances, second conclusion exercised {applied} times"


def projection_sweep(n: int = 100, seed: int = 7) -> tuple[bool, str]:
    import random

    rng = random.Random(seed)
    done = 0
    while done < n:
        b = tuple(rng.randint(1, 40) for _ in range(3))
        if math.gcd(math.gcd(b[0], b[1]), b[2]) != 1:
            continue
        R1, S1, T1 = (rng.randint(0, 5) for _ in range(3))
        lam, mu = Fraction(rng.randint(-5, 5), rng.randint(1, 5)), Fraction(rng.randint(-5, 5), rng.randint(1, 5))
        if lam == 0 and mu == 0:
            continue
        try:
            chk = projection_check(b, R1, S1, T1, Fraction(rng.randint(1, 20), 10), lam, mu)
        except HypothesisFailed:
            continue
        if not (chk.card_bound_holds and (chk.relation_found or not chk.relation_needed)):
            return False, f"fails for b={b}, box=({R1},{S1},{T1}), lam={lam}, mu={mu}"
        done += 1
    return True, f"{n} instances"


def recipe_sweep(n: int = 1000, seed: int = 99) -> tuple[bool, str]:
    """Random admissible (a, chi, L, m): the recipe's box sides satisfy every
    zero-estimate condition (exact integer check)."""
    import random

    from .kit import NUM, ZeroData, _recipe, zero_conditions_exact
    from .problem import MultStructure

    rng = random.Random(seed)
    done = 0
    while done < n:
        a = [rng.randint(100, 10**6) / 100 for _ in range(3)]
        chi = Fraction(rng.randint(1, 200), 100)
        L = rng.randint(5, 300)
        m = rng.randint(100, 3000) / 100
        independent = rng.random() < 0.5
        if independent:
            mult = MultStructure("all_independent")
        else:
            mult = MultStructure("one_root_of_unity", rng.randint(1, 3), rng.randint(2, 12))
        q = _recipe(NUM, tuple(a), min(a), float(chi), float(L), m, 2.0, independent)
        K = int(q["K"])
        if K < 3:
            continue
        ints = lambda t: tuple(int(x) for x in t)  # noqa: E731
        data = ZeroData(ints(q["Rk"]), ints(q["Sk"]), ints(q["Tk"]), K, L, chi)
        z = zero_conditions_exact(data, mult)
        if not z.holds:
            failed = [c.name for c in z.conditions if not c.holds]
            return False, f"a={a}, chi={chi}, L={L}, m={m}, {mult}: {failed}"
        done += 1
    return True, f"{n} tuples"


def run_sweeps(quick: bool = False) -> list[tuple[str, bool, str]]:
    """All oracle sweeps as (name, passed, detail)."""
    out = []
    for name, fn in (
        ("weight-sum closed form", lambda: theta_sweep()),
        ("interpolation count inequality", lambda: interpolation_count_sweep()),
        ("factorial product bound", lambda: factorial_sweep(100 if quick else 500)),
        ("lattice points on planes", lambda: plane_sweep(1000 if quick else 10_000)),
        ("projection dichotomy", lambda: projection_sweep(30 if quick else 100)),
        ("recipe sufficiency", lambda: recipe_sweep(200 if quick else 1000)),
    ):
        ok, detail = fn()
        out.append((name, ok, detail))
    return out
