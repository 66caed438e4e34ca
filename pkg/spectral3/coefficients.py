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

"""Hecke coefficient towers for GL(2), sym^3, Phi = phi + phi and E4.

Every degree-4 coefficient A(n, l, k) is evaluated from local Satake
parameters through the Jacobi-Trudi determinant; the combinatorial
divisor identities are implemented from their divisor-sum definitions
so they can be checked against that ground truth.
"""

import functools
import hashlib
import logging
import math
import os
import struct
import tempfile
import time

import numpy as np
import sympy

from spectral3 import arithmetic
from spectral3 import report
from spectral3.errors import CoverageError, PreconditionError, SchemaError

log = logging.getLogger('spectral3.coefficients')

KINDS = ('gl2', 'sym3', 'Phi', 'E4')
CACHE_MAGIC = b'S3CT'
CACHE_VERSION = 1
IDENTITIES = ('compare_dirichlet', 'hecke34', 'compare_dirichlet2',
              'lfour_square', 'ltwo_rankin_square', 'e4_square')
MAX_IDENTITY_N = 10 ** 4


def cache_dir():
    return os.environ.get('SPECTRAL3_CACHE_DIR', os.path.join('.', '.cache'))


def complete_homogeneous(params, k_max):
    """h_0, ..., h_k_max of the multiset params."""
    h = np.zeros(k_max + 1, dtype=complex)
    h[0] = 1
    for x in params:
        for k in range(1, k_max + 1):
            h[k] += x * h[k - 1]
    return h


def schur(params, partition):
    """Schur polynomial s_partition(params) by the Jacobi-Trudi identity."""
    partition = tuple(partition) + (0,) * (len(params) - len(partition))
    n = len(partition)
    h = complete_homogeneous(params, partition[0] + n)
    m = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            k = partition[i] - i + j
            if k >= 0:
                m[i, j] = h[k]
    return complex(np.linalg.det(m))


def weyl_dimension(partition):
    """Dimension of the GL(n) representation of highest weight partition."""
    n = len(partition)
    num = 1
    den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= partition[i] - partition[j] + j - i
            den *= j - i
    return num // den


def gl4_partition(k1, k2, k3):
    return (k1 + k2 + k3, k2 + k3, k3, 0)


class CoefficientTable(object):
    """Lazily filled coefficients A(n1, n2, n3) of one automorphic object.

    kind is gl2 (only n2 = n3 = 1), sym3, Phi or E4.  Values are products
    of local Schur polynomials over the primes dividing n1*n2*n3.
    """

    def __init__(self, kind, form=None):
        if kind not in KINDS:
            raise PreconditionError('Unknown coefficient kind %s' % (kind,))
        if kind != 'E4' and form is None:
            raise PreconditionError('Coefficient kind %s needs a form' % (kind,))
        self.log = logging.getLogger('spectral3.coefficients.CoefficientTable')
        self.kind = kind
        self.form = form
        self.cache = {}
        self.local_cache = {}
        self.loaded = 0

    @classmethod
    def cached(cls, kind, form=None):
        """A table primed from its cache file when a valid one exists."""
        table = cls(kind, form)
        path = table.cachePath()
        if os.path.exists(path):
            try:
                table.loaded = table.load(path)
            except (SchemaError, OSError, struct.error, ValueError) as e:
                table.log.warning('Ignoring coefficient cache %s: %s' % (path, e))
                table.cache.clear()
        return table

    def persist(self):
        """Save the memo table if it grew since it was loaded."""
        if len(self.cache) <= self.loaded:
            return None
        try:
            path = self.save()
        except OSError as e:
            self.log.warning('Could not write coefficient cache: %s' % (e,))
            return None
        self.loaded = len(self.cache)
        return path

    @property
    def label(self):
        return self.form.label if self.form is not None else 'E4'

    @property
    def prime_bound(self):
        return self.form.prime_bound if self.form is not None else 0

    def localParams(self, p):
        if self.kind == 'E4':
            return (1.0, 1.0, 1.0, 1.0)
        s = self.form.satake(p)
        a, b = s.alpha, s.beta
        if self.kind == 'gl2':
            return (a, b)
        if self.kind == 'sym3':
            return (a ** 3, a, b, b ** 3)
        return (a, b, a, b)

    def local(self, p, k1, k2=0, k3=0):
        key = (p, k1, k2, k3)
        value = self.local_cache.get(key)
        if value is not None:
            return value
        if self.kind == 'E4':
            value = weyl_dimension(gl4_partition(k1, k2, k3))
        elif self.kind == 'gl2':
            if k2 or k3:
                raise PreconditionError('GL(2) coefficients take a single index')
            value = complete_homogeneous(self.localParams(p), k1)[k1].real
        else:
            value = schur(self.localParams(p), gl4_partition(k1, k2, k3)).real
        self.local_cache[key] = value
        return value

    def __call__(self, n1, n2=1, n3=1):
        key = (n1, n2, n3)
        value = self.cache.get(key)
        if value is not None:
            return value
        if min(key) < 1:
            raise PreconditionError('Coefficient indices must be positive: %s' % (key,))
        exps = {}
        for slot, n in enumerate(key):
            if n == 1:
                continue
            for p, k in arithmetic.factorize(n):
                exps.setdefault(p, [0, 0, 0])[slot] = k
        value = 1
        for p, (k1, k2, k3) in sorted(exps.items()):
            value = value * self.local(p, k1, k2, k3)
        self.cache[key] = value
        return value

    def table(self, n_max):
        """A(n, 1, 1) for n = 0..n_max (index 0 is zero)."""
        dtype = np.int64 if self.kind == 'E4' else float
        out = np.zeros(n_max + 1, dtype=dtype)
        known = [self.cache.get((n, 1, 1)) for n in range(1, n_max + 1)]
        if n_max >= 1 and None not in known:
            out[1:] = known
            return out
        spf = arithmetic.spf_sieve(n_max)
        if n_max >= 1:
            out[1] = 1
        for n in range(2, n_max + 1):
            p = int(spf[n])
            m = n
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out[n] = self.local(p, k) * out[m]
        for n in range(1, n_max + 1):
            self.cache.setdefault((n, 1, 1), out[n].item())
        return out

    def column(self, n_max, ell=1, k=1):
        """A(n, ell, k) for n = 0..n_max as a float array.

        Only the primes of ell*k need the full three-index local factor;
        the rest of n is looked up in table().
        """
        base = self.table(n_max).astype(float)
        if ell == 1 and k == 1:
            return base
        n = np.arange(n_max + 1, dtype=np.int64)
        rest = n.copy()
        factor = np.ones(n_max + 1)
        for p, _ in arithmetic.factorize(ell * k):
            v = np.zeros(n_max + 1, dtype=np.int64)
            tmp = n.copy()
            while True:
                hit = (tmp > 0) & (tmp % p == 0)
                if not hit.any():
                    break
                v[hit] += 1
                tmp[hit] //= p
            rest //= p ** v
            vl = _valuation(ell, p)
            vk = _valuation(k, p)
            local = np.array([self.local(p, j, vl, vk) for j in range(int(v.max()) + 1)],
                             dtype=float)
            factor *= local[v]
        out = factor * base[rest]
        out[0] = 0.0
        return out

    def fingerprint(self):
        if self.form is None:
            return 'e4'
        return hashlib.sha1(repr(self.form.eigenvalues).encode('utf8')).hexdigest()[:12]

    def cachePath(self):
        name = '%s-%s-%s-%s.s3ct' % (self.kind, self.label.replace(os.sep, '_'),
                                     self.prime_bound, self.fingerprint())
        return os.path.join(cache_dir(), name)

    def save(self, path=None):
        """Write the memo table as a binary sidecar file.

        Layout: magic, uint16 version, uint8 kind index, uint32 prime bound,
        uint16 label length, label bytes, uint32 count, then count int64
        index triples and count complex128 values.
        """
        if path is None:
            path = self.cachePath()
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        keys = sorted(self.cache)
        label = self.label.encode('utf8')
        idx = np.array(keys, dtype=np.int64).reshape(-1, 3)
        vals = np.array([complex(self.cache[k]) for k in keys], dtype=np.complex128)
        # Renamed into place; readers never see a partial file.
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or '.', suffix='.tmp')
        with os.fdopen(fd, 'wb') as f:
            f.write(CACHE_MAGIC)
            f.write(struct.pack('<HBIH', CACHE_VERSION, KINDS.index(self.kind),
                                self.prime_bound, len(label)))
            f.write(label)
            f.write(struct.pack('<I', len(keys)))
            f.write(idx.tobytes())
            f.write(vals.tobytes())
        os.replace(tmp, path)
        self.log.debug('Saved %s coefficients to %s' % (len(keys), path))
        return path

    def load(self, path=None):
        if path is None:
            path = self.cachePath()
        with open(path, 'rb') as f:
            data = f.read()
        if data[:4] != CACHE_MAGIC:
            raise SchemaError('%s is not a coefficient cache' % (path,))
        version, kind, bound, label_len = struct.unpack_from('<HBIH', data, 4)
        if version != CACHE_VERSION:
            raise SchemaError('coefficient cache version %s unsupported' % (version,))
        offset = 4 + struct.calcsize('<HBIH')
        label = data[offset:offset + label_len].decode('utf8')
        offset += label_len
        if KINDS[kind] != self.kind or label != self.label or bound != self.prime_bound:
            raise SchemaError('coefficient cache %s belongs to %s/%s/%s' % (
                path, KINDS[kind], label, bound))
        (count,) = struct.unpack_from('<I', data, offset)
        offset += 4
        idx = np.frombuffer(data, dtype=np.int64, count=3 * count, offset=offset)
        offset += idx.nbytes
        vals = np.frombuffer(data, dtype=np.complex128, count=count, offset=offset)
        for key, value in zip(idx.reshape(-1, 3), vals):
            key = tuple(int(x) for x in key)
            self.cache[key] = int(value.real) if self.kind == 'E4' else value.real
        return count


def _valuation(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _checkCoverage(form, *ns):
    for n in ns:
        if n > 1:
            for p, k in arithmetic.factorize(n):
                if p > form.prime_bound:
                    raise CoverageError(p, 'form %s has no Hecke data at p=%s' % (
                        form.label, p))


def _checkPrimeRange(form, n_max):
    nxt = sympy.nextprime(form.prime_bound)
    if nxt <= n_max:
        raise CoverageError(nxt, 'form %s has no Hecke data at p=%s' % (form.label, nxt))


def lambda_gl2(form, n):
    _checkCoverage(form, n)
    value = 1.0
    for p, k in arithmetic.factorize(n) if n > 1 else ():
        lam = form.lam(p)
        prev, cur = 1.0, lam
        for _ in range(k - 1):
            prev, cur = cur, lam * cur - prev
        value *= cur
    return value


def lambda_sym3(form, k, m, n, table=None):
    _checkCoverage(form, k, m, n)
    if table is None:
        table = CoefficientTable('sym3', form)
    return table(k, m, n)


@functools.lru_cache(maxsize=None)
def tau2(m1, m2):
    return sum(arithmetic.divisor_fn(2, k1 * k2)
               for k1 in arithmetic.divisors(m1) for k2 in arithmetic.divisors(m2))


@functools.lru_cache(maxsize=None)
def tau3(m1, m2, m3):
    total = 0
    for n1 in arithmetic.divisors(m1):
        for n2 in arithmetic.divisors(m2):
            for n3 in arithmetic.divisors(m3):
                a, ra = divmod(m2 * n3, n2)
                b, rb = divmod(m1 * n2, n1)
                if ra or rb:
                    continue
                total += tau2(a, b)
    return total


@functools.lru_cache(maxsize=None)
def tau4(m1, m2, m3, m4):
    total = 0
    for d1 in arithmetic.divisors(m1):
        for d2 in arithmetic.divisors(m2):
            for d3 in arithmetic.divisors(m3):
                for d4 in arithmetic.divisors(m4):
                    args = (d1 * m2, d2), (d2 * m3, d3), (d3 * m4, d4)
                    if any(num % den for num, den in args):
                        continue
                    total += tau3(*(num // den for num, den in args))
    return total


def a_phi(form, n, m, lam=None):
    """A_Phi(n, m, 1) for Phi = phi + phi from the divisor-sum formula."""
    if lam is None:
        lam = functools.partial(lambda_gl2, form)
    total = 0.0
    for d in arithmetic.divisors(m):
        ell = m // d
        inner = sum(lam(d * n1) * lam(d * (n // n1)) for n1 in arithmetic.divisors(n))
        total += arithmetic.divisor_fn(2, ell) * inner
    return total


@functools.lru_cache(maxsize=None)
def tau_e4(n, m):
    total = 0
    for d in arithmetic.divisors(m):
        ell = m // d
        inner = sum(arithmetic.divisor_fn(2, d * n1) * arithmetic.divisor_fn(2, d * (n // n1))
                    for n1 in arithmetic.divisors(n))
        total += arithmetic.divisor_fn(2, ell) * inner
    return total


def a_f_general(kind, n, ell, k, form=None):
    """A_F(n, ell, k) for F in {Phi, E4} from the A(., ., 1) coefficients."""
    if kind == 'E4':
        base = tau_e4
    elif kind == 'Phi':
        if form is None:
            raise PreconditionError('kind Phi needs a form')
        _checkCoverage(form, n, ell, k)
        lam = functools.lru_cache(maxsize=None)(functools.partial(lambda_gl2, form))

        def base(x, y):
            return a_phi(form, x, y, lam)
    else:
        raise PreconditionError('a_f_general supports Phi and E4, got %s' % (kind,))
    total = 0
    for d in arithmetic.divisors(math.gcd(k, ell)):
        for e in arithmetic.divisors(math.gcd(d, k // d)):
            for f in arithmetic.divisors(math.gcd(k, n)):
                mu = arithmetic.mobius(d * f) * arithmetic.mobius(e)
                if mu == 0 or k % (d * f * e):
                    continue
                total += mu * base(k // (d * f * e), 1) * base(d * n // (e * f), ell // d)
    return total


def _convolution_power(a, power):
    out = a
    for _ in range(power - 1):
        out = arithmetic.dirichlet_convolve(out, a)
    return out


def _sym3_rhs_cd(table, n_max):
    rhs = np.zeros(n_max + 1)
    for d in range(1, int(round(n_max ** 0.25)) + 2):
        d4 = d ** 4
        for m1 in range(1, int(round((n_max // d4) ** (1 / 3.0))) + 2):
            b1 = d4 * m1 ** 3
            if b1 > n_max:
                break
            for m2 in range(1, int(math.isqrt(n_max // b1)) + 1):
                b2 = b1 * m2 * m2
                for m3 in range(1, n_max // b2 + 1):
                    rhs[b2 * m3] += table(m1, m2, m3) * tau3(m1, m2, m3)
    return rhs


def _sym3_rhs_hecke34(table, n_max):
    rhs = np.zeros(n_max + 1)
    for m3 in range(1, n_max + 1):
        b3 = m3 ** 3
        if b3 > n_max:
            break
        for m2 in range(1, math.isqrt(n_max // b3) + 1):
            b2 = b3 * m2 * m2
            for m1 in range(1, n_max // b2 + 1):
                rhs[b2 * m1] += table(m1, m2, m3) * tau2(m1, m2)
    return rhs


def _sym3_rhs_cd2(table, n_max):
    rhs = np.zeros(n_max + 1)
    for m1 in range(1, n_max + 1):
        b1 = m1 ** 4
        if b1 > n_max:
            break
        for m2 in range(1, n_max + 1):
            b2 = b1 * m2 ** 3
            if b2 > n_max:
                break
            for m3 in range(1, math.isqrt(n_max // b2) + 1):
                b3 = b2 * m3 * m3
                for m4 in range(1, n_max // b3 + 1):
                    rhs[b3 * m4] += table(m2, m3, m4) * tau4(m1, m2, m3, m4)
    return rhs


def _square_rhs(coeff, lam_table, n_max):
    rhs = np.zeros(n_max + 1, dtype=lam_table.dtype)
    for m in range(1, math.isqrt(n_max) + 1):
        for n in range(1, n_max // (m * m) + 1):
            rhs[m * m * n] += coeff(n, m) * lam_table[n]
    return rhs


def verify_identity(which, form=None, n_max=3000, other=None):
    """Evaluate both sides of a coefficient identity for every n <= n_max."""
    if which not in IDENTITIES:
        raise PreconditionError('Unknown identity %s' % (which,))
    if n_max > MAX_IDENTITY_N:
        raise PreconditionError('n_max %s exceeds %s' % (n_max, MAX_IDENTITY_N))
    start = time.time()
    exact = False
    if which in ('compare_dirichlet', 'hecke34', 'compare_dirichlet2'):
        _checkPrimeRange(form, n_max)
        table = CoefficientTable.cached('sym3', form)
        a = table.table(n_max)
        if which == 'compare_dirichlet':
            lhs, rhs = _convolution_power(a, 4), _sym3_rhs_cd(table, n_max)
        elif which == 'hecke34':
            lhs, rhs = _convolution_power(a, 3), _sym3_rhs_hecke34(table, n_max)
        else:
            lhs, rhs = _convolution_power(a, 5), _sym3_rhs_cd2(table, n_max)
        table.persist()
    elif which == 'lfour_square':
        _checkPrimeRange(form, n_max)
        table = CoefficientTable.cached('gl2', form)
        lam = table.table(n_max)
        lhs = _convolution_power(lam, 4)
        rhs = _square_rhs(tau_e4, lam, n_max)
        table.persist()
    elif which == 'ltwo_rankin_square':
        if other is None:
            raise PreconditionError('ltwo_rankin_square needs a second form')
        _checkPrimeRange(form, n_max)
        _checkPrimeRange(other, n_max)
        lam_phi = CoefficientTable('gl2', form).table(n_max)
        lam_j = CoefficientTable('gl2', other).table(n_max)
        # L(s, phi x phi_j) = zeta(2s) * sum lam_phi(n) lam_j(n) n^-s
        rs = np.zeros(n_max + 1)
        for m in range(1, math.isqrt(n_max) + 1):
            rs[m * m::m * m] += (lam_phi * lam_j)[1:n_max // (m * m) + 1]
        lhs = _convolution_power(rs, 2)
        lam_cache = {}

        def lam(n):
            if n not in lam_cache:
                lam_cache[n] = lambda_gl2(form, n)
            return lam_cache[n]

        rhs = _square_rhs(lambda n, m: a_phi(form, n, m, lam), lam_j, n_max)
    else:
        exact = True
        d2 = arithmetic.divisor_fn_table(2, n_max)
        lhs = _convolution_power(arithmetic.divisor_fn_table(4, n_max), 2)
        rhs = _square_rhs(tau_e4, d2, n_max)
    diff = np.abs(lhs[1:] - rhs[1:]).astype(float)
    scaled = diff / (1.0 + np.abs(lhs[1:]).astype(float))
    worst = int(np.argmax(scaled)) + 1
    runtime = time.time() - start
    inputs = {'identity': which, 'n_max': n_max,
              'form': form.label if form is not None else None}
    if other is not None:
        inputs['other'] = other.label
    log.debug('Identity %s up to %s: max error %s at n=%s' % (which, n_max, diff.max(), worst))
    return report.VerificationReport.fromArrays(
        'identity:%s' % (which,), lhs[worst], rhs[worst], float(diff.max()),
        float(scaled.max()), tolerance=0 if exact else 1e-8, inputs=inputs, runtime=runtime,
        truncation={'worst_n': worst})

