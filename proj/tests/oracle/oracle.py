#!/usr/bin/env python3
"""Independent reference computations for the frozen test values.

Everything here is computed without the C++ code paths: boundaries and
interval functions with mpmath at 50 digits, primes by trial division or a
numpy Eratosthenes sieve, membership by direct brute force, and defects by
an exact rational double sum for small inputs.

Run:  python3 tests/oracle/oracle.py [section...]
"""
import math
import sys
from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 50


def trial_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def eratosthenes(limit):
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if mark[p]:
            mark[p * p :: p] = False
    return mark


def Log(x):
    return max(mpmath.log(x), mpmath.mpf(1))


def Log2(x):
    return Log(Log(x))


def Log3(x):
    return Log(Log2(x))


def boundary(k, c0):
    return mpmath.mpf(k) ** 2 / mpmath.mpf(c0) ** 2


def x_of(k, c0):
    return mpmath.exp(mpmath.exp(boundary(k, c0)))


def interval(x, c0):
    llx = Log2(x)
    k = math.ceil(c0)
    if llx <= boundary(k, c0):
        return None
    while boundary(k + 1, c0) < llx:
        k += 1
    return k


def point(x, c0):
    k = interval(x, c0)
    llx = Log2(x)
    h = llx - boundary(k, c0) + 1
    hk1 = boundary(k + 1, c0) - boundary(k, c0) + 1
    psi = 1 + h * h / hk1
    eps = (h / hk1) ** (mpmath.mpf(k) / mpmath.mpf(c0) ** 2)
    logF = mpmath.log(psi) + 2 * k * mpmath.log(k) - 2 * k * mpmath.log(c0) - mpmath.loggamma(k + 1)
    return dict(k=k, h=h, hk1=hk1, psi=psi, eps=eps, logF=logF, F=mpmath.exp(logF))


def factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def member(n, c0):
    if n < 2:
        return False
    f = factor(n)
    if any(e > 1 for _, e in f):
        return False
    k = interval(n, c0)
    if k is None:
        return False
    log_xk = mpmath.exp(boundary(k, c0))
    large = [p for p, _ in f if mpmath.log(p) > log_xk]
    small = [p for p, _ in f if mpmath.log(p) <= log_xk]
    if not large:
        return len(small) <= k
    if len(large) > 1 or len(small) > k:
        return False
    eps = point(n, c0)["eps"]
    return all(mpmath.log(q) <= eps * log_xk for q in small)


def tao_members(x, c0):
    return [n for n in range(2, x + 1) if member(n, c0)]


def exact_defect(elements):
    S = sum(Fraction(1, n) for n in elements)
    G = sum(Fraction(math.gcd(n, m), n * m) for n in elements for m in elements)
    return S, G / (S * S)


def section_prime():
    mark = eratosthenes(10**6)
    print("pi(1e6) =", int(mark.sum()))
    print("primes in (1e6, 1e6+100] =", [n for n in range(10**6 + 1, 10**6 + 101) if trial_prime(n)])
    print("phi(12) =", sum(1 for a in range(1, 13) if math.gcd(a, 12) == 1))
    print("mertens(10) =", Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 5) + Fraction(1, 7))
    ps = np.nonzero(mark)[0]
    s = math.fsum(1.0 / float(p) for p in ps)
    M = mpmath.mpf("0.2614972128476427837554268386")
    print("mertens(1e6) =", repr(s), " minus loglog - M =", mpmath.nstr(s - mpmath.log(mpmath.log(10**6)) - M, 12))
    print("sum 1/(p-1), p<=1e6 =", repr(math.fsum(1.0 / float(p - 1) for p in ps)))


def section_construction():
    print("Log2(1e8) =", mpmath.nstr(Log2(mpmath.mpf(10) ** 8), 15))
    for c0, ks in ((3, (3, 4)), (5, (5, 6, 7, 8, 9))):
        for k in ks:
            print(f"C0={c0} x_{k} =", mpmath.nstr(x_of(k, c0), 15))
    for c0, x in ((3, 100), (3, 10), (5, 10**6)):
        print(f"C0={c0} x={x} k =", interval(mpmath.mpf(x), c0))
    p = point(mpmath.mpf(100), 3)
    print("point(100, C0=3):", {k: mpmath.nstr(v, 15) for k, v in p.items()})
    p = point(mpmath.mpf(34), 3)
    print("eps(34), C0=3 =", mpmath.nstr(p["eps"], 15), " x_3^eps =", mpmath.nstr(mpmath.exp(p["eps"] * mpmath.e), 15))
    print("A(C0=3) up to 35 =", tao_members(35, 3))


def section_counts():
    for c0 in (3, 4, 5):
        m = tao_members(10**5, c0)
        S = math.fsum(1.0 / n for n in m)
        print(f"C0={c0} |A cap [1,1e5]| = {len(m)}  S = {S!r}")


def section_defect():
    S, e = exact_defect([2, 3])
    print("{2,3}: S =", S, " E gcd =", e)
    S, e = exact_defect([2, 4])
    print("{2,4}: S =", S, " E gcd =", e)
    S, e = exact_defect([6, 10, 15])
    print("{6,10,15}: S =", S, " E gcd =", e, float(e - 1))
    m = tao_members(3000, 5)
    S, e = exact_defect(m)
    print(f"A(C0=5) up to 3000: n={len(m)} S={float(S)!r} defect={float(e - 1)!r}")
    ps = [n for n in range(2, 101) if trial_prime(n)]
    lhs = Fraction(0)

    def dfs(i, prod):
        nonlocal lhs
        lhs += Fraction(1, prod)
        for j in range(i, len(ps)):
            if prod * ps[j] > 100:
                break
            dfs(j + 1, prod * ps[j])

    dfs(0, 1)
    rhs = Fraction(1)
    for p in ps:
        rhs *= Fraction(p + 1, p)
    print("logall primes<=100, x=100: lhs =", float(lhs), " rhs =", float(rhs))
    s = Fraction(1, 6) + Fraction(1, 10) + Fraction(1, 15)
    m = Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 5)
    print("lgr {2,3,5},k=2,x=100: exact =", s, " rhs =", float(m * m / 2), " ratio =", float(s / (m * m / 2)))


def section_fjump():
    # log F(x_k) - log F(x_k^+) for k in k_min+1 .. k_min+100
    for c0 in (3, 4, 5):
        diffs = []
        for k in range(math.ceil(c0) + 1, math.ceil(c0) + 101):
            left = mpmath.log(1 + (boundary(k, c0) - boundary(k - 1, c0) + 1)) + 2 * (k - 1) * mpmath.log(k - 1) \
                - 2 * (k - 1) * mpmath.log(c0) - mpmath.loggamma(k)
            hk1 = boundary(k + 1, c0) - boundary(k, c0) + 1
            right = mpmath.log(1 + 1 / hk1) + 2 * k * mpmath.log(k) - 2 * k * mpmath.log(c0) - mpmath.loggamma(k + 1)
            diffs.append(left - right)
        print(f"C0={c0} jump min = {mpmath.nstr(min(diffs), 15)} max = {mpmath.nstr(max(diffs), 15)}")


def section_trends():
    # Primes: only d = p divides p, so the defect is sum (p-1)/p^2 / S^2.
    mark = eratosthenes(10**7)
    ps = np.nonzero(mark)[0].astype(np.float64)
    for x in (10**5, 10**6, 10**7):
        q = ps[ps <= x]
        S = math.fsum(1.0 / q)
        d = math.fsum((q - 1) / (q * q)) / (S * S)
        print(f"primes x={x}: defect*Log2x = {d * float(Log2(x))!r}")
    # P^[2]: sum over p < q with pq <= x of 1/(pq), normalized by 2/Log2^2 x.
    for x in (10**5, 10**6, 10**7):
        q = ps[ps <= x // 2]
        terms = []
        for i, p in enumerate(q):
            hi = np.searchsorted(q, x / p, side="right")
            if hi <= i + 1:
                break
            terms.extend((1.0 / (p * q[i + 1:hi])).tolist())
        S = math.fsum(terms)
        print(f"P^[2] x={x}: S*2/Log2^2 = {S * 2 / float(Log2(x)) ** 2!r}")


SECTIONS = dict(prime=section_prime, construction=section_construction,
                counts=section_counts, defect=section_defect, fjump=section_fjump,
                trends=section_trends)

if __name__ == "__main__":
    for name in sys.argv[1:] or SECTIONS:
        print(f"== {name}")
        SECTIONS[name]()

