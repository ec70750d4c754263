"""Exact conversion between Gromov-Witten potentials and Gopakumar-Vafa
integer invariants, plus the Bernoulli-number constant-map terms.

The resummation identity reads, with q = e^{2 pi i t} and lambda the string
coupling,

    sum_g lambda^(2g-2) F_g(t)
        = sum_{g,k,d} n_g(d) (1/k) (2 sin(k lambda / 2))^(2g-2) q^(k d).

Expanding (2 sin(u/2))^(2h-2) = sum_g e_h(g) u^(2g-2) with exact rational
e_h(g) and matching powers of lambda and q gives the triangular system

    N_g(d) = sum_{h<=g} e_h(g) sum_{k | d} k^(2g-3) n_h(d/k),

which is solved degree-by-degree, genus-by-genus in either direction.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from gmpy2 import mpq


class IntegralityError(Exception):
    """A converted invariant failed to be an integer."""

    def __init__(self, genus, degree, value):
        super().__init__(f"n_{genus}({degree}) = {value} is not an integer")
        self.genus = genus
        self.degree = degree
        self.value = value


@lru_cache(maxsize=None)
def bernoulli(n: int) -> mpq:
    """Bernoulli number B_n (B_1 = -1/2 convention), by the defining
    recurrence sum_j C(n+1, j) B_j = 0."""
    if n == 0:
        return mpq(1)
    acc = mpq(0)
    for j in range(n):
        acc += comb(n + 1, j) * bernoulli(j)
    return -acc / (n + 1)


def constant_map_term(g: int, chi: int) -> mpq:
    """Degree-zero Gromov-Witten invariant N_g(0) for g >= 2."""
    if g < 2:
        raise ValueError("constant-map term defined for genus >= 2")
    b2g = bernoulli(2 * g)
    b2g2 = bernoulli(2 * g - 2)
    sign = 1 if g % 2 == 0 else -1
    val = abs(b2g * b2g2) / (2 * g * (2 * g - 2) * _factorial(2 * g - 2))
    return mpq(chi, 2) * sign * val


def gap_leading_constant(g: int) -> mpq:
    """|B_2g| / (2g (2g-2)), the conifold leading coefficient for g >= 2."""
    if g < 2:
        raise ValueError("defined for genus >= 2")
    return abs(bernoulli(2 * g)) / (2 * g * (2 * g - 2))


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


@lru_cache(maxsize=None)
def _sine_power_table(max_genus: int) -> tuple:
    """e_h(g) = [u^(2g-2)] (2 sin(u/2))^(2h-2) for 0 <= h <= g <= max_genus.

    Working in t = u^2: (2 sin(u/2))^2 = t * shat(t) with
    shat(t) = sum_m (-1)^m 2 t^m / (2m+2)!, so e_h(g) = [t^(g-h)] shat^(h-1).
    """
    n = max_genus + 1
    shat = [mpq(2 * (-1) ** m, _factorial(2 * m + 2)) for m in range(n + 1)]
    table = {}
    # h = 0: inverse of shat
    inv = [mpq(0)] * (n + 1)
    inv[0] = mpq(1)
    for m in range(1, n + 1):
        inv[m] = -sum(shat[k] * inv[m - k] for k in range(1, m + 1))
    for g in range(0, n):
        table[(0, g)] = inv[g]
    # h >= 1: powers of shat
    power = [mpq(1)] + [mpq(0)] * n
    for h in range(1, n):
        for g in range(h, n):
            table[(h, g)] = power[g - h]
        new = [mpq(0)] * (n + 1)
        for i, a in enumerate(power):
            if a:
                for j in range(0, n + 1 - i):
                    new[i + j] += a * shat[j]
        power = new
    return tuple(sorted(table.items()))


def sine_power_coefficient(h: int, g: int) -> mpq:
    """[lambda^(2g-2)] of (2 sin(lambda/2))^(2h-2)."""
    table = dict(_sine_power_table(max(g, 1)))
    return table.get((h, g), mpq(0))


def _divisors(d: int):
    out = [k for k in range(1, d + 1) if d % k == 0]
    return out


def gv_to_gw(n_table: dict, max_genus: int, max_degree: int) -> dict:
    """Forward resummation: exact N_g(d) from integer n_h(d'), d >= 1."""
    out = {}
    for g in range(max_genus + 1):
        for d in range(1, max_degree + 1):
            acc = mpq(0)
            for h in range(g + 1):
                e = sine_power_coefficient(h, g)
                if not e:
                    continue
                s = mpq(0)
                for k in _divisors(d):
                    nv = n_table.get((h, d // k), 0)
                    if nv:
                        s += mpq(k) ** (2 * g - 3) * nv
                acc += e * s
            out[(g, d)] = acc
    return out


def gw_to_gv(N_table: dict, max_genus: int, max_degree: int, require_integral: bool = True) -> dict:
    """Invert the resummation triangularly; checks integrality of every
    produced invariant unless disabled."""
    n = {}
    for g in range(max_genus + 1):
        for d in range(1, max_degree + 1):
            acc = N_table[(g, d)]
            for h in range(g + 1):
                e = sine_power_coefficient(h, g)
                if not e:
                    continue
                for k in _divisors(d):
                    if h == g and k == 1:
                        continue
                    nv = n.get((h, d // k), 0)
                    if nv:
                        acc -= e * mpq(k) ** (2 * g - 3) * nv
            # e_g(g) = 1 and k = 1: the remaining term is n_g(d) itself
            if require_integral:
                if acc.denominator != 1:
                    raise IntegralityError(g, d, acc)
                acc = int(acc)
            n[(g, d)] = acc
    return n
