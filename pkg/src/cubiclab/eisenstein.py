"""Exact arithmetic in Z[omega], omega = e^{2πi/3}: norms, primary associates,
the norm-equation solver, and the cubic residue symbol."""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from cubiclab import PrecondError

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*omega with integer a, b."""

    a: int
    b: int

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def conjugate(self) -> "EisensteinInt":
        return EisensteinInt(self.a - self.b, -self.b)

    def __add__(self, other):
        return EisensteinInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other):
        # omega^2 = -1 - omega
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return EisensteinInt(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1 - b1 * b2)

    def is_primary(self) -> bool:
        """Congruent to 1 mod 3, the normalization fixing one associate."""
        return (self.a - 1) % 3 == 0 and self.b % 3 == 0

    def associates(self):
        """The six unit multiples."""
        z = self
        w = EisensteinInt(0, 1) * z  # omega*z
        w2 = EisensteinInt(-1, -1) * z  # omega^2 * z
        return (z, -z, w, -w, w2, -w2)

    def primary_associate(self) -> "EisensteinInt":
        for u in self.associates():
            if u.is_primary():
                return u
        raise ValueError(f"{self} has no primary associate (norm divisible by 3)")

    def to_complex(self) -> complex:
        return self.a + self.b * OMEGA

    def __str__(self):
        return f"{self.a}{self.b:+d}w"


def norm(z: EisensteinInt) -> int:
    return z.norm()


def _divmod_rounded(z: EisensteinInt, w: EisensteinInt):
    """Quotient with coordinates rounded to nearest; remainder has smaller norm."""
    nw = w.norm()
    zc = z * w.conjugate()
    qa = (2 * zc.a + nw) // (2 * nw)
    qb = (2 * zc.b + nw) // (2 * nw)
    q = EisensteinInt(qa, qb)
    return q, z - q * w


def gcd(z: EisensteinInt, w: EisensteinInt) -> EisensteinInt:
    """Euclidean gcd in Z[omega] (defined up to units)."""
    while w.norm() != 0:
        _, r = _divmod_rounded(z, w)
        z, w = w, r
    return z


@dataclass(frozen=True)
class PrimaryPrime:
    """A primary Eisenstein prime together with its rational norm."""

    value: EisensteinInt
    rational_norm: int

    def __post_init__(self):
        if not self.value.is_primary():
            raise ValueError(f"{self.value} is not primary")

    def conjugate(self) -> "PrimaryPrime":
        return PrimaryPrime(self.value.conjugate(), self.rational_norm)


@dataclass(frozen=True)
class CubeRoot:
    """omega^k for k in {0,1,2}, or the zero marker (k is None)."""

    k: int | None

    def __post_init__(self):
        if self.k is not None and self.k not in (0, 1, 2):
            raise ValueError("k must be 0, 1, 2 or None")

    @property
    def is_zero(self) -> bool:
        return self.k is None

    def __mul__(self, other):
        if self.k is None or other.k is None:
            return CubeRoot(None)
        return CubeRoot((self.k + other.k) % 3)

    def __pow__(self, e: int):
        if self.k is None:
            return self if e > 0 else CubeRoot(0)
        return CubeRoot((self.k * e) % 3)

    def conjugate(self):
        if self.k is None:
            return self
        return CubeRoot((-self.k) % 3)

    def to_complex(self) -> complex:
        if self.k is None:
            return 0j
        return cmath.exp(2j * cmath.pi * self.k / 3)

    @property
    def code(self) -> int:
        """Kernel byte code: 0,1,2 for omega^k and 3 for zero."""
        return 3 if self.k is None else self.k


CR_ZERO = CubeRoot(None)
CR_ONE = CubeRoot(0)


def cube_root_of_unity_mod(p: int) -> int:
    """A primitive cube root of unity in Z/p, p ≡ 1 mod 3."""
    e = (p - 1) // 3
    a = 2
    while True:
        t = pow(a, e, p)
        if t != 1 and pow(t, 3, p) == 1:
            return t
        a += 1


def _split_exhaustive(p: int) -> EisensteinInt:
    # a^2 - a*b + b^2 = p, scanned over b; oracle path for small p
    bmax = math.isqrt(4 * p // 3) + 1
    for b in range(bmax + 1):
        disc = 4 * p - 3 * b * b
        if disc < 0:
            break
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for a in ((b + r) // 2, (b - r) // 2):
            z = EisensteinInt(a, b)
            if z.norm() == p:
                return z
    raise ArithmeticError(f"no norm-{p} element found")


@lru_cache(maxsize=200_000)
def split_prime(p: int) -> PrimaryPrime:
    """The canonical primary prime above the split rational prime p ≡ 1 mod 3.

    Canonical choice between the two primary primes pi, pi-bar: positive
    omega-coordinate.  Exhaustive search backs the small range; above it the
    solver descends via gcd(p, omega - t) with t a cube root of unity mod p.
    """
    if not is_prime(p):
        raise PrecondError(f"{p} is not prime")
    if p % 3 != 1:
        raise PrecondError(f"{p} ≢ 1 mod 3 (inert or ramified, does not split)")
    if p <= 10_000:
        z = _split_exhaustive(p)
    else:
        t = cube_root_of_unity_mod(p)
        z = gcd(EisensteinInt(p, 0), EisensteinInt(-t, 1))
        if z.norm() != p:
            raise ArithmeticError(f"descent failed for p={p}")
    z = z.primary_associate()
    if z.b < 0:
        z = z.conjugate()
    return PrimaryPrime(z, p)


def cubic_symbol(m: int, q) -> CubeRoot:
    """(m | q)_3 for q of prime rational norm p ≡ 1 mod 3.

    Reduces mod p with w ≡ omega (mod q), w = -a * b^{-1} mod p, and matches
    m^{(p-1)/3} mod p against {1, w, w^2}.
    """
    z = q.value if isinstance(q, PrimaryPrime) else q
    p = z.norm()
    if p % 3 != 1 or not is_prime(p):
        raise PrecondError(f"norm {p} is not a prime ≡ 1 mod 3")
    if m % p == 0:
        return CR_ZERO
    w = (-z.a * pow(z.b, p - 2, p)) % p
    r = pow(m, (p - 1) // 3, p)
    if r == 1:
        return CubeRoot(0)
    if r == w:
        return CubeRoot(1)
    if r == w * w % p:
        return CubeRoot(2)
    raise ArithmeticError(f"symbol residue {r} matches no cube root mod {p}")


def symbol_totally_multiplicative_check(m1: int, m2: int, q) -> bool:
    return cubic_symbol(m1 * m2, q) == cubic_symbol(m1, q) * cubic_symbol(m2, q)
