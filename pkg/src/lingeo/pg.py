"""Small finite fields and the algebraic projective planes over them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .core import GeometryError, LinearSpace

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16)
MAX_ORDER = 16


class NotPrimePower(GeometryError):
    pass


class OrderTooLarge(GeometryError):
    pass


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise NotPrimePower(f"{q} is not a prime power")
            return p, k
    raise NotPrimePower(f"{q} is not a prime power")


def _poly_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    """Polynomial division over F_p; coefficients ascending, den monic-led."""
    num = list(num)
    inv_lead = pow(den[-1], p - 2, p)
    quot = [0] * max(1, len(num) - len(den) + 1)
    for shift in range(len(num) - len(den), -1, -1):
        coeff = (num[shift + len(den) - 1] * inv_lead) % p
        quot[shift] = coeff
        for i, d in enumerate(den):
            num[shift + i] = (num[shift + i] - coeff * d) % p
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _int_to_poly(value: int, p: int) -> list[int]:
    digits = []
    while value:
        value, digit = divmod(value, p)
        digits.append(digit)
    return digits or [0]


def _is_irreducible(poly: list[int], p: int) -> bool:
    degree = len(poly) - 1
    for d in range(1, degree):
        for enc in range(p**d, 2 * p**d):
            divisor = _int_to_poly(enc, p)
            if divisor[-1] != 1:
                continue
            _, rem = _poly_divmod(poly, divisor, p)
            if rem == [0]:
                return False
    return True


def _least_irreducible(p: int, k: int) -> tuple[int, ...]:
    # Monic degree-k polynomials scanned in ascending integer encoding
    # (base-p digits, constant term least significant).
    for enc in range(p**k, 2 * p**k):
        poly = _int_to_poly(enc, p)
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise GeometryError(f"no irreducible polynomial of degree {k} over F_{p}")


@dataclass(frozen=True)
class FiniteField:
    """The field of order p^k with elements encoded as 0..q-1.

    An element's base-p digits are the coefficients of its polynomial
    representative (constant term first) modulo a fixed irreducible modulus,
    chosen as the lexicographically least one so construction is
    reproducible.
    """

    p: int
    k: int
    q: int
    modulus: tuple[int, ...]
    _add: tuple[tuple[int, ...], ...] = field(repr=False)
    _mul: tuple[tuple[int, ...], ...] = field(repr=False)
    _inv: tuple[int, ...] = field(repr=False)

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self.neg(b)]

    def neg(self, a: int) -> int:
        row = self._add[a]
        return row.index(0)

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("no inverse of 0")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)


def _build_tables(p: int, k: int, modulus: tuple[int, ...]):
    q = p**k

    def to_poly(a: int) -> list[int]:
        digits = _int_to_poly(a, p)
        return digits + [0] * (k - len(digits))

    def from_poly(poly: list[int]) -> int:
        return sum(c * p**i for i, c in enumerate(poly))

    add = tuple(
        tuple(
            from_poly([(x + y) % p for x, y in zip(to_poly(a), to_poly(b))])
            for b in range(q)
        )
        for a in range(q)
    )

    def mul_one(a: int, b: int) -> int:
        pa, pb = to_poly(a), to_poly(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(pa):
            if x:
                for j, y in enumerate(pb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        _, rem = _poly_divmod(prod, list(modulus), p)
        rem = rem + [0] * (k - len(rem))
        return from_poly(rem[:k])

    mul = tuple(tuple(mul_one(a, b) for b in range(q)) for a in range(q))
    inv = [0] * q
    for a in range(1, q):
        inv[a] = mul[a].index(1)
    return add, mul, tuple(inv)


def _self_check(f: FiniteField) -> None:
    # Associativity of multiplication, exhaustively for small orders.
    if f.q > 9:
        return
    for a in f.elements():
        for b in f.elements():
            for c in f.elements():
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))


@lru_cache(maxsize=None)
def gf(q: int) -> FiniteField:
    """The field of order q for a prime power q <= 16."""
    if q > MAX_ORDER:
        raise OrderTooLarge(f"order {q} exceeds the supported maximum {MAX_ORDER}")
    p, k = _factor_prime_power(q)
    modulus = _least_irreducible(p, k)
    add, mul, inv = _build_tables(p, k, modulus)
    f = FiniteField(p=p, k=k, q=q, modulus=modulus, _add=add, _mul=mul, _inv=inv)
    _self_check(f)
    return f


def _normalize(f: FiniteField, vec: tuple[int, int, int]) -> tuple[int, int, int]:
    """Scale so the rightmost nonzero coordinate becomes 1."""
    for i in (2, 1, 0):
        if vec[i] != 0:
            s = f.inv(vec[i])
            return tuple(f.mul(s, x) for x in vec)  # type: ignore[return-value]
    raise ValueError("zero vector has no normalization")


@lru_cache(maxsize=None)
def projective_plane(q: int) -> LinearSpace:
    """The plane over gf(q): q^2+q+1 points and lines, q+1 points per line.

    Points are the 1-dimensional subspaces of the 3-dimensional vector space
    over gf(q), identified by their normalized representative (rightmost
    nonzero coordinate 1) and numbered in sorted order of those triples.
    Lines are the kernels of nonzero linear functionals under the same
    normalization.
    """
    f = gf(q)
    points: set[tuple[int, int, int]] = set()
    for x0 in f.elements():
        for x1 in f.elements():
            for x2 in f.elements():
                if x0 or x1 or x2:
                    points.add(_normalize(f, (x0, x1, x2)))
    reps = sorted(points)
    index = {v: i for i, v in enumerate(reps)}

    def dot(u, v) -> int:
        acc = 0
        for a, b in zip(u, v):
            acc = f.add(acc, f.mul(a, b))
        return acc

    lines = []
    for coeffs in reps:
        lines.append(tuple(sorted(index[v] for v in reps if dot(coeffs, v) == 0)))
    return LinearSpace(len(reps), tuple(sorted(lines)))


def fano_plane() -> LinearSpace:
    """The 7-point plane in its algebraic labelling."""
    return projective_plane(2)
