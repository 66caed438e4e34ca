# Copyright 2026 The Spectral3 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.

"""Exact integer arithmetic and complete exponential sums.

Everything here is evaluated by direct enumeration; the moduli involved
are small and the results serve as oracles for the Voronoi dual side.
"""

import cmath
import dataclasses
import functools
import logging
import math

import numpy as np
import sympy

from spectral3.errors import PreconditionError

log = logging.getLogger('spectral3.arithmetic')

MAX_MODULUS = 10 ** 4

TWO_PI_I = 2j * math.pi


def e_of(x):
    """Return exp(2 pi i x).

    The argument is reduced mod 1 first so the result has modulus one up
    to rounding even for large x.
    """
    return cmath.exp(TWO_PI_I * math.fmod(x, 1.0))


def e_array(x):
    x = np.asarray(x, dtype=float)
    return np.exp(TWO_PI_I * np.fmod(x, 1.0))


def checkModulus(c, cap=None):
    if cap is None:
        cap = MAX_MODULUS
    if c < 1:
        raise PreconditionError('Modulus must be positive, got %s' % (c,))
    if c > cap:
        raise PreconditionError('Modulus %s exceeds cap %s' % (c, cap))


def mod_inverse(a, m):
    if m == 1:
        return 0
    try:
        return pow(a, -1, m)
    except ValueError:
        raise PreconditionError('%s is not invertible mod %s' % (a, m))


@functools.lru_cache(maxsize=65536)
def factorize(n):
    if n < 1:
        raise PreconditionError('Cannot factor %s' % (n,))
    return tuple(sorted(sympy.factorint(n).items()))


@functools.lru_cache(maxsize=65536)
def divisors(n):
    if n < 1:
        raise PreconditionError('Divisors of %s requested' % (n,))
    return tuple(sympy.divisors(n))


def mobius(n):
    if n < 1:
        raise PreconditionError('mobius is defined for n >= 1, got %s' % (n,))
    result = 1
    for p, k in factorize(n):
        if k > 1:
            return 0
        result = -result
    return result


def euler_phi(n):
    if n < 1:
        raise PreconditionError('phi is defined for n >= 1, got %s' % (n,))
    return int(sympy.totient(n))


def divisor_fn(ell, n):
    """The ell-fold divisor function d_ell(n)."""
    if ell < 1 or n < 1:
        raise PreconditionError('divisor_fn(%s, %s) undefined' % (ell, n))
    result = 1
    for p, k in factorize(n):
        result *= math.comb(k + ell - 1, ell - 1)
    return result


def spf_sieve(n):
    """Smallest-prime-factor table for 0..n."""
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def factor_with_sieve(n, spf):
    out = []
    while n > 1:
        p = int(spf[n])
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out.append((p, k))
    return tuple(out)


def divisor_fn_table(ell, n_max):
    """d_ell(n) for n = 0..n_max (index 0 unused) by repeated convolution."""
    d = np.zeros(n_max + 1, dtype=np.int64)
    d[1:] = 1
    for _ in range(ell - 1):
        d = dirichlet_convolve(d, np.concatenate(([0], np.ones(n_max, dtype=np.int64))))
    return d


def dirichlet_convolve(a, b):
    """Dirichlet convolution of two coefficient arrays indexed from 1."""
    n_max = min(len(a), len(b)) - 1
    dtype = np.result_type(a, b)
    out = np.zeros(n_max + 1, dtype=dtype)
    for d in range(1, n_max + 1):
        if a[d] == 0:
            continue
        out[d::d] += a[d] * b[1:n_max // d + 1]
    return out


def ramanujan_sum(k, r):
    if r < 1:
        raise PreconditionError('ramanujan_sum modulus must be positive')
    g = math.gcd(k, r)
    return sum(d * mobius(r // d) for d in divisors(g))


def units(c):
    x = np.arange(c, dtype=np.int64)
    return x[np.gcd(x, c) == 1]


def inverse_table(c):
    """Inverses of the units mod c, aligned with units(c)."""
    u = units(c)
    return u, np.array([mod_inverse(int(x), c) for x in u], dtype=np.int64)


def kloosterman(a, b, c, cap=None):
    checkModulus(c, cap)
    if c == 1:
        return complex(1.0)
    x, xbar = inverse_table(c)
    phase = ((a % c) * x + (b % c) * xbar) % c
    return complex(np.exp(TWO_PI_I * phase / c).sum())


@dataclasses.dataclass(frozen=True)
class ExpSumParams(object):
    a: int
    n: int
    r: int
    q1: int = 1
    q2: int = 1
    d1: int = 1
    d2: int = 1

    def __post_init__(self):
        for name in ('r', 'q1', 'q2', 'd1', 'd2'):
            if getattr(self, name) < 1:
                raise PreconditionError('%s must be positive' % (name,))
        if (self.q1 * self.r) % self.d1:
            raise PreconditionError('d1=%s does not divide q1*r=%s' % (
                self.d1, self.q1 * self.r))
        if (self.q1 * self.q2 * self.r // self.d1) % self.d2:
            raise PreconditionError('d2=%s does not divide q1*q2*r/d1' % (self.d2,))

    @property
    def inner_modulus(self):
        return self.q1 * self.r // self.d1

    @property
    def outer_modulus(self):
        return self.q1 * self.q2 * self.r // (self.d1 * self.d2)


def hyper_kloosterman(p, cap=None):
    """Kl(a, n, r; q1, q2, d1, d2) by direct enumeration."""
    m1 = p.inner_modulus
    m2 = p.outer_modulus
    checkModulus(m1, cap)
    checkModulus(m2, cap)
    x1, x1bar = inverse_table(m1)
    x2, x2bar = inverse_table(m2)
    # Common denominator for the three fractions.
    L = math.lcm(p.r, m1, m2)
    t1 = (p.d1 * p.a % p.r) * (L // p.r) * x1 % L
    t2 = (np.outer(x1bar, x2) % m1) * (p.d2 * (L // m1) % L) % L
    t3 = (p.n % m2) * (L // m2) * x2bar % L
    phase = (t1[:, None] + t2 + t3[None, :]) % L
    return complex(np.exp(TWO_PI_I * phase / L).sum())


def hyper_kloosterman_table(a, c, q1, q2, d1, d2, cap=None):
    """Kl(a, n, c; q1, q2, d1, d2) for every residue n mod the outer modulus."""
    p = ExpSumParams(a, 0, c, q1, q2, d1, d2)
    m2 = p.outer_modulus
    return np.array([hyper_kloosterman(dataclasses.replace(p, n=n), cap)
                     for n in range(m2)])


class DirichletCharacter(object):
    """A Dirichlet character given by its value table on residues mod q."""

    def __init__(self, modulus, values):
        self.modulus = modulus
        self.values = np.asarray(values, dtype=complex)
        if len(self.values) != modulus:
            raise PreconditionError('Character table length %s != modulus %s' % (
                len(self.values), modulus))

    def __call__(self, n):
        return self.values[n % self.modulus]

    def __repr__(self):
        return '<DirichletCharacter mod %s conductor %s>' % (
            self.modulus, self.conductor())

    def isTrivial(self):
        u = units(self.modulus)
        return np.allclose(self.values[u], 1.0)

    def parity(self):
        return 1 if abs(self(-1) - 1.0) < 1e-9 else -1

    def conductor(self):
        # Smallest d | q with chi constant on {x unit : x = 1 mod d}.
        q = self.modulus
        u = units(q)
        for d in divisors(q):
            kernel = u[(u - 1) % d == 0]
            if np.allclose(self.values[kernel], 1.0):
                return d
        return q

    def isPrimitive(self):
        return self.conductor() == self.modulus


def _prime_power_generator_tables(p, k):
    """Characters mod p**k as (generators, orders, log maps)."""
    q = p ** k
    u = units(q)
    if p == 2:
        if k == 1:
            return []
        tables = []
        # (Z/2^k)^* = <-1> x <5>
        order5 = q // 4 if k >= 2 else 1
        sign_log = {}
        five_log = {}
        for x in u:
            x = int(x)
            s = 0 if x % 4 == 1 else 1
            y = x if s == 0 else (-x) % q
            v = 0
            cur = 1
            while cur != y:
                cur = cur * 5 % q
                v += 1
            sign_log[x] = s
            five_log[x] = v
        tables.append((sign_log, 2))
        if order5 > 1:
            tables.append((five_log, order5))
        return tables
    g = sympy.primitive_root(q)
    order = q - q // p
    dlog = {}
    cur = 1
    for v in range(order):
        dlog[cur] = v
        cur = cur * g % q
    return [(dlog, order)]


def characters_mod(q):
    """All Dirichlet characters mod q, built per prime power and combined by CRT."""
    checkModulus(q)
    if q == 1:
        return [DirichletCharacter(1, [1.0])]
    factors = factorize(q)
    local = []
    for p, k in factors:
        pk = p ** k
        unit_mask = np.gcd(np.arange(pk), pk) == 1
        choices = [np.where(unit_mask, 1.0, 0.0).astype(complex)]
        for dlog, order in _prime_power_generator_tables(p, k):
            new = []
            for base in choices:
                for j in range(order):
                    vals = base.copy()
                    for x, v in dlog.items():
                        vals[x] *= cmath.exp(TWO_PI_I * j * v / order)
                    new.append(vals)
            choices = new
        local.append((pk, choices))
    chars = [np.ones(q, dtype=complex)]
    n = np.arange(q)
    for pk, choices in local:
        new = []
        for base in chars:
            for vals in choices:
                new.append(base * vals[n % pk])
        chars = new
    return [DirichletCharacter(q, c) for c in chars]


def primitive_characters(q):
    return [chi for chi in characters_mod(q) if chi.isPrimitive()]


def gauss_sum(chi):
    if not chi.isPrimitive():
        raise PreconditionError('Gauss sum requested for imprimitive character mod %s' % (
            chi.modulus,))
    q = chi.modulus
    if q == 1:
        return complex(chi.values[0])
    a = np.arange(q)
    return complex((chi.values * np.exp(TWO_PI_I * a / q)).sum())
