"""Independent oracles used by the tests.

Everything here deliberately avoids the library's own code paths: matrix
traces come from a separate Fricke construction with hand-rolled 2x2
products, primitive counts from a Moebius sieve, and brute-force slope
enumeration from scanning a coordinate box.
"""

import math

import numpy as np

from curvecount import FNChart, MarkovChart, fn_to_markov


def random_chart(rng) -> MarkovChart:
    """A generic cusped-torus chart from a random Fenchel-Nielsen point."""
    l = rng.uniform(0.5, 2.5)
    tau = rng.uniform(-2.0, 2.0)
    return fn_to_markov(FNChart(l, tau))


def _mul(M, N):
    return (
        (M[0][0] * N[0][0] + M[0][1] * N[1][0], M[0][0] * N[0][1] + M[0][1] * N[1][1]),
        (M[1][0] * N[0][0] + M[1][1] * N[1][0], M[1][0] * N[0][1] + M[1][1] * N[1][1]),
    )


def oracle_matrix_trace(p, q, x, y, z):
    """|trace| of the slope word, built letter by letter from a matrix pair.

    Uses its own realization of the triple and explicit word products down
    the Farey path (mediant word = hi-word * lo-word); shares no code with
    the trace recursion it checks.
    """
    zeta = 0.5 * (z + math.sqrt(z * z - 4.0))
    A = ((x, -1.0), (1.0, 0.0))
    B = ((0.0, zeta), (-1.0 / zeta, y))
    if q == 0:
        return abs(A[0][0] + A[1][1])
    if (p, q) == (0, 1):
        return abs(B[0][0] + B[1][1])
    Ainv = ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))
    if p > 0:
        plo, qlo, Wlo, phi, qhi, Whi = 0, 1, B, 1, 0, A
    else:
        plo, qlo, Wlo, phi, qhi, Whi = -1, 0, Ainv, 0, 1, B
    while True:
        pc, qc = plo + phi, qlo + qhi
        Wc = _mul(Whi, Wlo)
        if pc == p and qc == q:
            return abs(Wc[0][0] + Wc[1][1])
        if p * qc - q * pc < 0:
            phi, qhi, Whi = pc, qc, Wc
        else:
            plo, qlo, Wlo = pc, qc, Wc


def canonical_slopes_upto(bound):
    """All canonical slopes with |p| <= bound and q <= bound."""
    out = [(1, 0)]
    for q in range(1, bound + 1):
        for p in range(-bound, bound + 1):
            if math.gcd(abs(p), q) == 1:
                out.append((p, q))
    return out


def brute_force_short_slopes(chart: MarkovChart, max_length, box_radius):
    """Slopes with oracle length <= max_length found by scanning a box."""
    x, y, z = chart.triple()
    tmax = 2.0 * math.cosh(0.5 * max_length)
    found = set()
    for (p, q) in canonical_slopes_upto(int(math.ceil(box_radius))):
        if oracle_matrix_trace(p, q, x, y, z) <= tmax:
            found.add((p, q))
    return found


def mobius_upto(n):
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    primes = []
    is_comp = np.zeros(n + 1, dtype=bool)
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for pr in primes:
            if i * pr > n:
                break
            is_comp[i * pr] = True
            if i % pr == 0:
                mu[i * pr] = 0
                break
            mu[i * pr] = -mu[i]
    return mu


def sieve_primitive_count(t):
    """Primitive pairs with |p|+|q| <= t by Moebius inversion of total counts."""
    big = int(math.floor(t))
    if big < 1:
        return 0
    mu = mobius_upto(big)

    def total(s):
        m = int(math.floor(s))
        return 2 * m * m + 2 * m

    return int(sum(int(mu[d]) * total(t / d) for d in range(1, big + 1)))


def honest_plane_l1_count(t):
    """Nonzero pairs with |p|+|q| <= t by scanning every lattice point."""
    big = int(math.floor(t))
    n = 0
    for p in range(-big, big + 1):
        for q in range(-big, big + 1):
            if (p, q) != (0, 0) and abs(p) + abs(q) <= t:
                n += 1
    return n
