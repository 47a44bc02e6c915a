"""Arithmetic over GF(2^m) and binary polynomials.

Binary polynomials are plain Python ints: bit ``i`` holds the coefficient of
``x**i``. Field elements are ints in ``[0, 2**m)`` in the polynomial basis.
"""

from __future__ import annotations

# Conventional minimal-weight primitive polynomials, keyed by m.
PRIMITIVE_POLYS = {
    3: 0b1011,          # x^3 + x + 1
    4: 0b10011,         # x^4 + x + 1
    5: 0b100101,        # x^5 + x^2 + 1
    6: 0b1000011,       # x^6 + x + 1
    7: 0b10001001,      # x^7 + x^3 + 1
    8: 0b100011101,     # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,    # x^9 + x^4 + 1
}


class ConfigurationError(ValueError):
    """Raised for unsupported code or field parameters."""


def poly_degree(p: int) -> int:
    """Degree of a binary polynomial; -1 for the zero polynomial."""
    return p.bit_length() - 1


def poly_mul(a: int, b: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = poly_degree(b)
    q = 0
    while poly_degree(a) >= db:
        shift = poly_degree(a) - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def poly_mod(a: int, b: int) -> int:
    return poly_divmod(a, b)[1]


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_lcm(a: int, b: int) -> int:
    return poly_divmod(poly_mul(a, b), poly_gcd(a, b))[0]


def poly_from_bits(bits) -> int:
    """Build a polynomial from coefficients listed lowest degree first."""
    p = 0
    for i, bit in enumerate(bits):
        if int(bit) & 1:
            p |= 1 << i
    return p


def poly_to_bits(p: int, length: int | None = None) -> list[int]:
    n = max(p.bit_length(), 1) if length is None else length
    return [(p >> i) & 1 for i in range(n)]


def poly_str(p: int) -> str:
    if p == 0:
        return "0"
    terms = []
    for i in range(poly_degree(p), -1, -1):
        if (p >> i) & 1:
            terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return " + ".join(terms)


class GaloisField:
    """GF(2^m) with precomputed log/antilog tables.

    Instances are immutable and safe to share between threads or processes.
    """

    __slots__ = ("m", "primitive_poly", "order", "exp_table", "log_table")

    def __init__(self, m: int):
        if m not in PRIMITIVE_POLYS:
            raise ConfigurationError(f"m must be in 3..9, got {m}")
        order = (1 << m) - 1
        prim = PRIMITIVE_POLYS[m]
        # exp table is doubled so products of logs need no modulo
        exp_table = [0] * (2 * order)
        log_table = [-1] * (1 << m)
        x = 1
        for i in range(order):
            exp_table[i] = x
            log_table[x] = i
            x <<= 1
            if x >> m:
                x ^= prim
        for i in range(order, 2 * order):
            exp_table[i] = exp_table[i - order]
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "primitive_poly", prim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "exp_table", tuple(exp_table))
        object.__setattr__(self, "log_table", tuple(log_table))

    def __setattr__(self, name, value):
        raise AttributeError("GaloisField is immutable")

    def __reduce__(self):
        return field_new, (self.m,)

    def __repr__(self) -> str:
        return f"GaloisField(m={self.m}, poly={poly_str(self.primitive_poly)})"

    @property
    def size(self) -> int:
        return self.order + 1

    def alpha_pow(self, k: int) -> int:
        return self.exp_table[k % self.order]

    def log(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("log of zero")
        return self.log_table[x]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[self.log_table[a] + self.log_table[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.exp_table[(self.order - self.log_table[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 1 if k == 0 else 0
        return self.exp_table[(self.log_table[a] * k) % self.order]

    def poly_eval(self, p: int, x: int) -> int:
        """Evaluate the binary polynomial ``p`` at field element ``x`` (Horner)."""
        acc = 0
        for i in range(poly_degree(p), -1, -1):
            acc = self.mul(acc, x) ^ ((p >> i) & 1)
        return acc

    def conjugacy_class(self, power: int) -> list[int]:
        """Exponents {p, 2p, 4p, ...} mod 2^m - 1, in generation order."""
        cls = []
        e = power % self.order
        while e not in cls:
            cls.append(e)
            e = (2 * e) % self.order
        return cls

    def minimal_polynomial(self, power: int) -> int:
        """Minimal polynomial of alpha**power over GF(2)."""
        if not 0 <= power < self.order:
            raise ConfigurationError(f"power must be in [0, {self.order})")
        # product of (x + alpha^e) over the class, with GF(2^m) coefficients
        coeffs = [1]
        for e in self.conjugacy_class(power):
            root = self.exp_table[e]
            nxt = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] ^= c
                nxt[i] ^= self.mul(c, root)
            coeffs = nxt
        if any(c not in (0, 1) for c in coeffs):
            raise ArithmeticError("minimal polynomial has non-binary coefficients")
        return poly_from_bits(coeffs)


_FIELDS: dict[int, GaloisField] = {}


def field_new(m: int) -> GaloisField:
    """Return the (cached) field GF(2^m)."""
    if m not in _FIELDS:
        _FIELDS[m] = GaloisField(m)
    return _FIELDS[m]
