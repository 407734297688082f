"""Exact scalar arithmetic over Q and F_p.

Elements are plain ``Fraction`` objects (rational field) or ints in
``[0, p)`` (prime field); the ``Field`` object carries the operations.
Keeping elements as primitive values makes dense elimination loops cheap.
"""

from __future__ import annotations

from fractions import Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """The ground field: rationals or a prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, p=None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p

    @property
    def is_rational(self):
        return self.p is None

    # -- element constructors ------------------------------------------

    def zero(self):
        return 0 if self.p else Fraction(0)

    def one(self):
        return 1 if self.p else Fraction(1)

    def of_int(self, n: int):
        if self.p:
            return n % self.p
        return Fraction(n)

    def parse(self, s: str):
        """Parse "n" or "n/d" into a field element."""
        s = s.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            if self.p:
                return self.of_int(int(num)) * self.inv(self.of_int(int(den))) % self.p
            return Fraction(int(num), int(den))
        return self.of_int(int(s))

    def format(self, x) -> str:
        if self.p:
            return str(x % self.p)
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    # -- arithmetic ----------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if self.p:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero in F_p")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero rational")
        return 1 / Fraction(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return (a % self.p == 0) if self.p else a == 0

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    # -- misc ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    def to_json(self):
        if self.p is None:
            return {"type": "Q"}
        return {"type": "Fp", "p": self.p}

    @staticmethod
    def from_json(obj) -> "Field":
        if obj.get("type") == "Q":
            return Field()
        if obj.get("type") == "Fp":
            return Field(int(obj["p"]))
        raise ValueError(f"bad field spec {obj!r}")


QQ = Field()
