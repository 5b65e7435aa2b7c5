"""Finite-field tower F_p < F_q < F_{q^2} with exact, deterministic arithmetic.

A field context represents F_{p^k} as F_p[x]/(f) where f is the first monic
irreducible polynomial of degree k in ascending base-p integer order of its
coefficient vector (constant term least significant).  Elements are length-k
coefficient vectors of residues mod p, constant term first.

Quadratic towers are handled by building F_{q^2} = F_{p^(2k)} as a single
degree-2k extension of F_p; the subfield F_q is the fixed field of the
q-power map, which is F_p-linear and applied through a precomputed matrix.
Cubic towers (used for the trace construction of planar difference sets)
work the same way with the r-power map.
"""

from __future__ import annotations

import functools
from typing import Iterator, Optional

import numpy as np

MAX_DEGREE = 64
MAX_PRIME = 1 << 16


class FieldError(Exception):
    """Base class for field-construction and arithmetic failures."""


class NonPrimeModulus(FieldError):
    pass


class DegreeZero(FieldError):
    pass


class SizeBudgetExceeded(FieldError):
    pass


class ZeroInverse(FieldError):
    pass


class ContextMismatch(FieldError):
    pass


class NotQuadraticExtension(FieldError):
    pass


class NotCubicExtension(FieldError):
    pass


class OrderDoesNotDivide(FieldError):
    pass


class FactorizationBudgetExceeded(FieldError):
    pass


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (dense int64 coefficient arrays, constant first)
# ---------------------------------------------------------------------------


def _poly_trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return a[:1] * 0
    return a[: nz[-1] + 1]


def _poly_mod(a: np.ndarray, f: np.ndarray, p: int) -> np.ndarray:
    """Remainder of a modulo the monic polynomial f, coefficients mod p."""
    a = a.astype(np.int64) % p
    deg_f = len(f) - 1
    a = _poly_trim(a)
    while len(a) - 1 >= deg_f:
        shift = len(a) - 1 - deg_f
        lead = a[-1]
        if lead:
            a[shift : shift + deg_f + 1] = (a[shift : shift + deg_f + 1] - lead * f) % p
        a = _poly_trim(a[:-1])
    out = np.zeros(deg_f, dtype=np.int64)
    out[: len(a)] = a
    return out


def _poly_mulmod(a: np.ndarray, b: np.ndarray, f: np.ndarray, p: int) -> np.ndarray:
    return _poly_mod(np.convolve(a, b), f, p)


def _poly_gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a = _poly_trim(a % p)
    b = _poly_trim(b % p)
    while np.any(b):
        inv_lead = pow(int(b[-1]), p - 2, p)
        bb = (b * inv_lead) % p
        r = a.copy()
        while len(r) >= len(bb) and np.any(r):
            shift = len(r) - len(bb)
            lead = r[-1]
            if lead:
                r[shift:] = (r[shift:] - lead * bb) % p
            r = _poly_trim(r[:-1]) if not r[-1] else _poly_trim(r)
        a, b = bb, _poly_trim(r)
    return a


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _prime_factors_of_degree(k: int) -> list:
    out = []
    m = k
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _frobenius_matrix(f: np.ndarray, p: int) -> np.ndarray:
    """Matrix of e -> e^p on F_p[x]/(f) in the coefficient basis (columns)."""
    k = len(f) - 1
    cols = np.zeros((k, k), dtype=np.int64)
    if k == 1:
        cols[0, 0] = 1
        return cols
    # x^p mod f by square-and-multiply, then x^(i*p) = (x^p)^i
    xp = np.zeros(k, dtype=np.int64)
    xp[0] = 1
    base = np.zeros(k, dtype=np.int64)
    base[1] = 1
    e = p
    while e:
        if e & 1:
            xp = _poly_mulmod(xp, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    cur = np.zeros(k, dtype=np.int64)
    cur[0] = 1
    cols[:, 0] = cur
    for i in range(1, k):
        cur = _poly_mulmod(cur, xp, f, p)
        cols[:, i] = cur
    return cols


def _mat_pow_mod(m: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(m.shape[0], dtype=np.int64)
    base = m % p
    while e:
        if e & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        e >>= 1
    return result


def _is_irreducible(f: np.ndarray, p: int) -> bool:
    """Rabin test: x^(p^k) = x mod f and gcd(x^(p^(k/l)) - x, f) = 1."""
    k = len(f) - 1
    if k == 1:
        return True
    mp = _frobenius_matrix(f, p)
    x_vec = np.zeros(k, dtype=np.int64)
    x_vec[1] = 1
    top = _mat_pow_mod(mp, k, p) @ x_vec % p
    if not np.array_equal(top, x_vec):
        return False
    for ell in _prime_factors_of_degree(k):
        m = k // ell
        v = _mat_pow_mod(mp, m, p) @ x_vec % p
        diff = (v - x_vec) % p
        if not np.any(diff):
            return False
        g = _poly_gcd(diff.copy(), f.copy(), p)
        if len(_poly_trim(g)) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# integer factorization (trial division + Pollard rho with an iteration budget)
# ---------------------------------------------------------------------------

_TRIAL_LIMIT = 100_000
_RHO_ROUNDS = 64
_RHO_ITER_BUDGET = 1 << 22


def _miller_rabin(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> Optional[int]:
    if n % 2 == 0:
        return 2
    for c in range(1, _RHO_ROUNDS + 1):
        x = y = 2
        d = 1
        count = 0
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = _gcd(abs(x - y), n)
            count += 1
            if count > _RHO_ITER_BUDGET:
                d = 1
                break
        if d != 1 and d != n:
            return d
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def factorize(n: int) -> dict:
    """Prime factorization {prime: exponent}; trial division then Pollard rho.

    Raises FactorizationBudgetExceeded when the rho iteration budget runs out
    before the cofactor splits.
    """
    factors: dict = {}
    d = 2
    while d <= _TRIAL_LIMIT and d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _miller_rabin(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        split = _pollard_rho(m)
        if split is None:
            raise FactorizationBudgetExceeded(
                f"could not split composite {m} within the rho budget"
            )
        stack.append(split)
        stack.append(m // split)
    return factors


# ---------------------------------------------------------------------------
# field context and elements
# ---------------------------------------------------------------------------


class FieldElement:
    """Immutable element of a FieldCtx; length-k coefficient vector mod p."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: "FieldCtx", coeffs: np.ndarray):
        self.ctx = ctx
        arr = np.asarray(coeffs, dtype=np.int64) % ctx.p
        if arr.shape != (ctx.deg,):
            raise ValueError(f"expected {ctx.deg} coefficients, got {arr.shape}")
        arr.flags.writeable = False
        self.coeffs = arr

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other)!r}")
        if other.ctx is not self.ctx:
            raise ContextMismatch("elements belong to different field contexts")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.ctx, (self.coeffs + other.coeffs) % self.ctx.p)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.ctx, (self.coeffs - other.coeffs) % self.ctx.p)

    def __neg__(self):
        return FieldElement(self.ctx, (-self.coeffs) % self.ctx.p)

    def __mul__(self, other):
        self._check(other)
        prod = _poly_mod(np.convolve(self.coeffs, other.coeffs), self.ctx.modulus, self.ctx.p)
        return FieldElement(self.ctx, prod)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroInverse("zero has no multiplicative inverse")
        # extended Euclid on (self, modulus) over F_p
        p = self.ctx.p
        f = self.ctx.modulus
        r0, r1 = _poly_trim(self.coeffs.copy()), f.copy()
        s0 = np.array([1], dtype=np.int64)
        s1 = np.array([0], dtype=np.int64)
        while np.any(r1):
            # divide r0 by r1
            q = np.zeros(max(len(r0) - len(r1) + 1, 1), dtype=np.int64)
            r = r0.copy()
            inv_lead = pow(int(r1[-1]), p - 2, p)
            while len(r) >= len(r1) and np.any(r):
                shift = len(r) - len(r1)
                coef = (r[-1] * inv_lead) % p
                q[shift] = coef
                r[shift:] = (r[shift:] - coef * r1) % p
                r = _poly_trim(r)
                if not np.any(r):
                    break
            conv = np.convolve(q, s1) % p
            ln = max(len(s0), len(conv))
            new_s = np.zeros(ln, dtype=np.int64)
            new_s[: len(s0)] += s0
            new_s[: len(conv)] -= conv
            new_s %= p
            r0, r1 = r1, r
            s0, s1 = s1, _poly_trim(new_s)
        # r0 is gcd (a nonzero constant since self != 0 and f irreducible)
        c_inv = pow(int(r0[0]), p - 2, p)
        return FieldElement(self.ctx, _poly_mod(s0 * c_inv, f, p))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("exponent must be an int")
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.ctx is other.ctx and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((id(self.ctx), self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def to_int(self) -> int:
        """Position in the ascending base-p enumeration (constant term first)."""
        val = 0
        for c in reversed(self.coeffs.tolist()):
            val = val * self.ctx.p + int(c)
        return val

    def __repr__(self):
        return f"FieldElement(p={self.ctx.p}, k={self.ctx.deg}, coeffs={self.coeffs.tolist()})"


class FieldCtx:
    """Immutable context for F_{p^k}; construct through build_field()."""

    __slots__ = (
        "p",
        "deg",
        "modulus",
        "red",
        "order",
        "_frob_p",
        "_frob_pow_cache",
        "_order_factors",
        "_primitive",
    )

    def __init__(self, p: int, deg: int, modulus: np.ndarray):
        self.p = p
        self.deg = deg
        modulus = modulus.astype(np.int64)
        modulus.flags.writeable = False
        self.modulus = modulus
        self.order = p**deg
        red = np.zeros((max(deg - 1, 0), deg), dtype=np.int64)
        cur = np.zeros(deg, dtype=np.int64)
        x = np.array([0, 1], dtype=np.int64)
        # x^deg mod f, then successively higher powers
        cur[-1] = 1  # x^(deg-1)
        for j in range(deg - 1):
            cur = _poly_mod(np.convolve(cur, x), modulus, p)
            red[j] = cur
        red.flags.writeable = False
        self.red = red
        self._frob_p = None
        self._frob_pow_cache = {}
        self._order_factors = None
        self._primitive = None

    # -- constructors ------------------------------------------------------

    def element(self, coeffs) -> FieldElement:
        return FieldElement(self, np.asarray(coeffs, dtype=np.int64))

    def zero(self) -> FieldElement:
        return FieldElement(self, np.zeros(self.deg, dtype=np.int64))

    def one(self) -> FieldElement:
        c = np.zeros(self.deg, dtype=np.int64)
        c[0] = 1
        return FieldElement(self, c)

    def scalar(self, n: int) -> FieldElement:
        c = np.zeros(self.deg, dtype=np.int64)
        c[0] = n % self.p
        return FieldElement(self, c)

    def from_int(self, n: int) -> FieldElement:
        """Element at position n in ascending base-p enumeration order."""
        if n < 0 or n >= self.order:
            raise ValueError(f"enumeration index {n} out of range")
        c = np.zeros(self.deg, dtype=np.int64)
        for i in range(self.deg):
            c[i] = n % self.p
            n //= self.p
        return FieldElement(self, c)

    def elements(self) -> Iterator[FieldElement]:
        """All field elements in ascending enumeration order."""
        for n in range(self.order):
            yield self.from_int(n)

    def arith(self, op: str, a: FieldElement, b: Optional[FieldElement] = None) -> FieldElement:
        """String-dispatched arithmetic: add, sub, mul, div, neg, inv."""
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            return a / b
        if op == "neg":
            return -a
        if op == "inv":
            return a.inverse()
        raise ValueError(f"unknown op {op!r}")

    # -- Frobenius machinery -------------------------------------------------

    def frob_p_matrix(self) -> np.ndarray:
        if self._frob_p is None:
            if self.deg == 1:
                m = np.eye(1, dtype=np.int64)
            else:
                m = _frobenius_matrix(self.modulus, self.p)
            m.flags.writeable = False
            self._frob_p = m
        return self._frob_p

    def frob_power_matrix(self, m: int) -> np.ndarray:
        """Matrix of e -> e^(p^m) in the coefficient basis."""
        m = m % self.deg
        if m not in self._frob_pow_cache:
            mat = _mat_pow_mod(self.frob_p_matrix(), m, self.p)
            mat.flags.writeable = False
            self._frob_pow_cache[m] = mat
        return self._frob_pow_cache[m]

    @property
    def subfield_order(self) -> int:
        """q with ctx = F_{q^2}; requires even extension degree."""
        if self.deg % 2 != 0:
            raise NotQuadraticExtension(
                f"F_{self.p}^{self.deg} is not a quadratic extension"
            )
        return self.p ** (self.deg // 2)

    def order_factors(self) -> dict:
        if self._order_factors is None:
            self._order_factors = factorize(self.order - 1)
        return self._order_factors

    def serialize(self) -> dict:
        return {"p": self.p, "k": self.deg, "modulus": self.modulus.tolist()}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.deg}, modulus={self.modulus.tolist()})"


@functools.lru_cache(maxsize=None)
def build_field(p: int, k: int) -> FieldCtx:
    """Construct F_{p^k} with the deterministic smallest-enumeration modulus."""
    if not isinstance(p, int) or not _is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime")
    if k < 1:
        raise DegreeZero(f"extension degree must be >= 1, got {k}")
    if k > MAX_DEGREE or p >= MAX_PRIME:
        raise SizeBudgetExceeded(
            f"supported sizes are degree <= {MAX_DEGREE} over p < 2^16; "
            f"got p={p}, k={k}"
        )
    if k == 1:
        modulus = np.array([0, 1], dtype=np.int64)
        return FieldCtx(p, 1, modulus)
    c = 0
    while True:
        digits = np.zeros(k + 1, dtype=np.int64)
        n = c
        for i in range(k):
            digits[i] = n % p
            n //= p
        if n:
            raise FieldError(f"no irreducible of degree {k} found")  # pragma: no cover
        digits[k] = 1
        if _is_irreducible(digits, p):
            return FieldCtx(p, k, digits)
        c += 1


def frobenius(e: FieldElement) -> FieldElement:
    """The q-power map on F_{q^2} (conjugation); requires even degree."""
    ctx = e.ctx
    if ctx.deg % 2 != 0:
        raise NotQuadraticExtension(
            f"frobenius conjugation needs F_{{q^2}}; degree {ctx.deg} is odd"
        )
    mat = ctx.frob_power_matrix(ctx.deg // 2)
    return FieldElement(ctx, (mat @ e.coeffs) % ctx.p)


def fixed_by_frobenius(e: FieldElement) -> bool:
    """True when e lies in the index-2 subfield F_q of ctx = F_{q^2}."""
    return frobenius(e) == e


def primitive_element(ctx: FieldCtx) -> FieldElement:
    """First multiplicative generator in ascending enumeration order.

    Order is certified by checking alpha^((q-1)/l) != 1 for every prime l
    dividing the group order, which requires factoring it (trial division
    plus Pollard rho; FactorizationBudgetExceeded if the budget runs out).
    """
    if ctx._primitive is not None:
        return ctx._primitive
    m = ctx.order - 1
    if m == 1:
        ctx._primitive = ctx.one()
        return ctx._primitive
    primes = sorted(ctx.order_factors())
    exponents = [m // ell for ell in primes]
    one = ctx.one()
    for n in range(1, ctx.order):
        cand = ctx.from_int(n)
        if cand.is_zero():
            continue
        if all((cand**e) != one for e in exponents):
            ctx._primitive = cand
            return cand
    raise FieldError("no primitive element found")  # pragma: no cover


def root_of_unity(ctx: FieldCtx, n: int) -> FieldElement:
    """Element of exact multiplicative order n (requires n | p^k - 1)."""
    m = ctx.order - 1
    if n < 1 or m % n != 0:
        raise OrderDoesNotDivide(f"{n} does not divide group order {m}")
    alpha = primitive_element(ctx)
    return alpha ** (m // n)


def subfield_trace(e: FieldElement) -> FieldElement:
    """Trace onto the index-3 subfield: e + e^r + e^(r^2) for ctx = F_{r^3}."""
    ctx = e.ctx
    if ctx.deg % 3 != 0:
        raise NotCubicExtension(
            f"trace needs a cubic tower; degree {ctx.deg} is not divisible by 3"
        )
    mr = ctx.frob_power_matrix(ctx.deg // 3)
    c1 = (mr @ e.coeffs) % ctx.p
    c2 = (mr @ c1) % ctx.p
    return FieldElement(ctx, (e.coeffs + c1 + c2) % ctx.p)
