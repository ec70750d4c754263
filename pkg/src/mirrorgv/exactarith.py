"""Exact coefficient arithmetic: rationals, univariate rational functions, and a
number-field extension Q[a]/(m(a)).

Everything here is integer/rational exact; no floating point value ever enters.
Rationals are gmpy2.mpq.  Polynomials are kept as a rational content times a
primitive integer coefficient vector so that products and gcds run on machine
integers (Gauss's lemma keeps primitive parts closed under multiplication).
"""

from __future__ import annotations

from gmpy2 import gcd as _zgcd
from gmpy2 import lcm as _zlcm
from gmpy2 import mpq, mpz

Rational = mpq

_Z0 = mpz(0)
_Z1 = mpz(1)
_Q0 = mpq(0)
_Q1 = mpq(1)


def rational(p, q=1) -> mpq:
    """Exact rational p/q; raises ZeroDivisionError for q = 0."""
    if q == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return mpq(p, q)


def parse_rational(text: str) -> mpq:
    """Parse 'p/q' or 'p' (the serialization format used throughout)."""
    return mpq(text.strip())


def format_rational(value) -> str:
    """Serialize as 'p/q', omitting '/q' when the denominator is 1."""
    return str(mpq(value))


class _RationalField:
    """Field adapter for mpq coefficients (shared protocol with NumberField)."""

    name = "QQ"
    zero = _Q0
    one = _Q1

    def from_int(self, n) -> mpq:
        return mpq(n)

    def from_rational(self, q) -> mpq:
        return mpq(q)

    def __repr__(self):
        return "QQ"


QQ = _RationalField()


# ---------------------------------------------------------------------------
# integer-primitive polynomial kernel
# ---------------------------------------------------------------------------

def _strip(ints):
    n = len(ints)
    while n and ints[n - 1] == 0:
        n -= 1
    return ints[:n]


def _content(ints):
    g = _Z0
    for c in ints:
        g = _zgcd(g, c)
        if g == 1:
            return _Z1
    return g


def _primitive(ints):
    """Return (content mpz with sign, primitive positive-leading tuple)."""
    ints = _strip(ints)
    if not ints:
        return _Z0, ()
    g = _content(ints)
    if ints[-1] < 0:
        g = -g
    if g == 1:
        return _Z1, tuple(ints)
    return g, tuple(c // g for c in ints)


def _mul_ints(a, b):
    if not a or not b:
        return []
    out = [_Z0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _prem(a, b):
    """Canonical pseudo remainder lc(b)^(deg a - deg b + 1) * a rem b on mpz
    lists (the normalization the subresultant PRS divisions rely on)."""
    r = [mpz(c) for c in a]
    db = len(b) - 1
    lc = b[-1]
    n = len(r) - 1 - db + 1
    if n <= 0:
        return _strip(r)
    while r and len(r) - 1 >= db:
        dr = len(r) - 1
        q = r[-1]
        r = [c * lc for c in r[:-1]]
        for j in range(db):
            r[dr - db + j] -= q * b[j]
        r = _strip(r)
        n -= 1
        if n == 0:
            break
    if n > 0 and r:
        f = lc**n
        r = [c * f for c in r]
    return r


def _gcd_ints(a, b):
    """Primitive gcd of primitive integer polynomials (subresultant PRS)."""
    if not a:
        return list(b)
    if not b:
        return list(a)
    if len(a) < len(b):
        a, b = b, a
    a = list(a)
    b = list(b)
    g, h = _Z1, _Z1
    while True:
        delta = len(a) - len(b)
        r = _prem(a, b)
        if not r:
            _, prim = _primitive(b)
            return list(prim)
        if len(r) == 1:
            return [_Z1]
        a, b = b, [c // (g * h**delta) for c in r]
        g = a[-1]
        h = h * g**delta // h**delta if delta <= 1 else g**delta // h ** (delta - 1)


class Polynomial:
    """Univariate polynomial over Q: rational content times a primitive
    integer coefficient tuple (ascending, positive leading coefficient)."""

    __slots__ = ("content", "prim")

    def __init__(self, coeffs=()):
        ints = []
        den = _Z1
        for c in coeffs:
            q = mpq(c)
            den = _zlcm(den, q.denominator)
            ints.append(q)
        scaled = [mpz(q * den) for q in ints]
        cont, prim = _primitive(scaled)
        self.content = mpq(cont, den)
        self.prim = prim

    @classmethod
    def _raw(cls, content, prim) -> "Polynomial":
        p = object.__new__(cls)
        p.content = content
        p.prim = prim
        return p

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._raw(_Q0, ())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls._raw(_Q1, (_Z1,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls._raw(_Q1, (_Z0, _Z1))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.prim) - 1

    def is_zero(self) -> bool:
        return not self.prim

    def coeff(self, i) -> mpq:
        if i < 0 or i >= len(self.prim):
            return _Q0
        return self.content * self.prim[i]

    def coeffs(self) -> tuple:
        return tuple(self.content * c for c in self.prim)

    def leading(self) -> mpq:
        if not self.prim:
            return _Q0
        return self.content * self.prim[-1]

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.content == other.content and self.prim == other.prim

    def __hash__(self):
        return hash((self.content, self.prim))

    def __bool__(self):
        return bool(self.prim)

    def __neg__(self):
        return Polynomial._raw(-self.content, self.prim)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, mpq)):
                other = Polynomial([other])
            else:
                return NotImplemented
        if not self.prim:
            return other
        if not other.prim:
            return self
        c1, c2 = self.content, other.content
        den = _zlcm(c1.denominator, c2.denominator)
        n1 = c1.numerator * (den // c1.denominator)
        n2 = c2.numerator * (den // c2.denominator)
        la, lb = len(self.prim), len(other.prim)
        out = [_Z0] * max(la, lb)
        for i, c in enumerate(self.prim):
            out[i] += n1 * c
        for i, c in enumerate(other.prim):
            out[i] += n2 * c
        cont, prim = _primitive(out)
        return Polynomial._raw(mpq(cont, den), prim)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, mpq)):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self.prim or not other.prim:
                return Polynomial.zero()
            prim = _mul_ints(self.prim, other.prim)
            return Polynomial._raw(self.content * other.content, tuple(prim))
        q = mpq(other)
        if q == 0:
            return Polynomial.zero()
        return Polynomial._raw(self.content * q, self.prim)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a Polynomial; use RationalFunction")
        result = Polynomial.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "Polynomial":
        if len(self.prim) <= 1:
            return Polynomial.zero()
        ints = [i * c for i, c in enumerate(self.prim)][1:]
        cont, prim = _primitive(ints)
        return Polynomial._raw(self.content * cont, prim)

    def theta(self) -> "Polynomial":
        """x * d/dx."""
        ints = [i * c for i, c in enumerate(self.prim)]
        cont, prim = _primitive(ints)
        return Polynomial._raw(self.content * cont, prim)

    def __call__(self, value):
        """Horner evaluation; works for mpq and for any ring element
        supporting + and * with integers."""
        if not self.prim:
            return _Q0 * 0 if isinstance(value, mpq) else 0 * value
        acc = None
        for c in reversed(self.prim):
            acc = c if acc is None else acc * value + c
        return self.content * acc if isinstance(acc, mpq) else acc * self.content

    def divexact(self, other: "Polynomial") -> "Polynomial":
        """Exact polynomial division; raises ValueError if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Polynomial.zero()
        b = other.prim
        db = len(b) - 1
        if len(self.prim) - 1 < db:
            raise ValueError("not divisible")
        a = [mpq(c) for c in self.prim]
        inv = mpq(1, b[-1])
        quot = [_Q0] * (len(a) - db)
        for k in range(len(quot) - 1, -1, -1):
            c = a[db + k] * inv
            quot[k] = c
            if c:
                for j in range(db + 1):
                    a[k + j] -= c * b[j]
        if any(a):
            raise ValueError("not divisible")
        result = Polynomial(quot)
        return Polynomial._raw(result.content * self.content / other.content, result.prim)

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic-free gcd: primitive with positive leading coefficient."""
        g = _gcd_ints(list(self.prim), list(other.prim))
        cont, prim = _primitive(g)
        return Polynomial._raw(mpq(1), prim)

    def shift(self, c):
        """Coefficients of p(x + c) for any ring element c (Taylor shift),
        returned as a plain list over the element's ring."""
        out = list(self.coeffs())
        n = len(out)
        for k in range(n - 1):
            for j in range(n - 2, k - 1, -1):
                out[j] = out[j] + c * out[j + 1]
        return out

    def __repr__(self):
        if not self.prim:
            return "0"
        parts = []
        for i, c in enumerate(self.prim):
            if not c:
                continue
            q = self.content * c
            if i == 0:
                parts.append(str(q))
            elif i == 1:
                parts.append(f"{q}*x")
            else:
                parts.append(f"{q}*x^{i}")
        return " + ".join(parts)


def polynomial(*coeffs) -> Polynomial:
    """Polynomial from ascending coefficients, e.g. polynomial(1, -57, -289, 1)."""
    if len(coeffs) == 1 and isinstance(coeffs[0], (list, tuple)):
        coeffs = coeffs[0]
    return Polynomial(coeffs)


class RationalFunction:
    """Reduced fraction of Polynomials.  The denominator is primitive with a
    positive integer leading coefficient (its content is the recorded unit,
    folded into the numerator); gcd(num, den) is constant."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Polynomial):
            num = Polynomial([num]) if not isinstance(num, (list, tuple)) else Polynomial(num)
        if den is None:
            den = Polynomial.one()
        elif not isinstance(den, Polynomial):
            den = Polynomial([den]) if not isinstance(den, (list, tuple)) else Polynomial(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = Polynomial.zero()
            self.den = Polynomial.one()
            return
        g = num.gcd(den)
        if g.degree > 0:
            num = num.divexact(g)
            den = den.divexact(g)
        # move all rational content into the numerator
        self.num = Polynomial._raw(num.content / den.content, num.prim)
        self.den = Polynomial._raw(_Q1, den.prim)

    @classmethod
    def _reduced(cls, num, den) -> "RationalFunction":
        rf = object.__new__(cls)
        rf.num = num
        rf.den = den
        return rf

    @classmethod
    def const(cls, q) -> "RationalFunction":
        return cls(Polynomial([q]))

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls(Polynomial.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, mpq)):
            r = self.as_rational_maybe()
            return r is not None and r == mpq(other)
        return NotImplemented

    def as_rational_maybe(self):
        if self.num.degree <= 0 and self.den.degree == 0:
            return self.num.coeff(0) / self.den.coeff(0)
        return None

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self):
        return RationalFunction._reduced(-self.num, self.den)

    @staticmethod
    def _coerce(v):
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, Polynomial):
            return RationalFunction(v)
        return RationalFunction(Polynomial([v]))

    def __add__(self, other):
        other = RationalFunction._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        g = self.den.gcd(other.den)
        if g.degree <= 0:
            num = self.num * other.den + other.num * self.den
            den = self.den * other.den
        else:
            da = self.den.divexact(g)
            db = other.den.divexact(g)
            num = self.num * db + other.num * da
            den = da * other.den
        return RationalFunction(num, den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-RationalFunction._coerce(other))

    def __rsub__(self, other):
        return RationalFunction._coerce(other) + (-self)

    def __mul__(self, other):
        other = RationalFunction._coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction._reduced(Polynomial.zero(), Polynomial.one())
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1 = self.num.divexact(g1) if g1.degree > 0 else self.num
        d2 = other.den.divexact(g1) if g1.degree > 0 else other.den
        n2 = other.num.divexact(g2) if g2.degree > 0 else other.num
        d1 = self.den.divexact(g2) if g2.degree > 0 else self.den
        num = n1 * n2
        den = d1 * d2
        new_num = Polynomial._raw(num.content / den.content, num.prim)
        new_den = Polynomial._raw(_Q1, den.prim)
        return RationalFunction._reduced(new_num, new_den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalFunction._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * RationalFunction(other.den, other.num)

    def __rtruediv__(self, other):
        return RationalFunction._coerce(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return RationalFunction.const(1)
        if n < 0:
            return RationalFunction(self.den, self.num) ** (-n)
        return RationalFunction(self.num**n, self.den**n)

    def derivative(self) -> "RationalFunction":
        num = self.num.derivative() * self.den - self.num * self.den.derivative()
        return RationalFunction(num, self.den * self.den)

    def theta(self) -> "RationalFunction":
        """x * d/dx."""
        num = (self.num.derivative() * self.den - self.num * self.den.derivative()) * Polynomial.x()
        return RationalFunction(num, self.den * self.den)

    def __call__(self, value):
        den = self.den(value)
        if isinstance(den, mpq):
            if den == 0:
                raise ZeroDivisionError("evaluation at a pole")
            return self.num(value) / den
        if not den:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(value) / den

    def serialize(self):
        return {
            "num": [format_rational(c) for c in self.num.coeffs()],
            "den": [format_rational(c) for c in self.den.coeffs()],
        }

    @classmethod
    def deserialize(cls, data) -> "RationalFunction":
        return cls(
            Polynomial([parse_rational(c) for c in data["num"]]),
            Polynomial([parse_rational(c) for c in data["den"]]),
        )

    def __repr__(self):
        if self.den.degree == 0 and self.den.coeff(0) == 1:
            return f"({self.num})"
        return f"({self.num}) / ({self.den})"


# ---------------------------------------------------------------------------
# number field Q[a]/(m(a))
# ---------------------------------------------------------------------------

class NumberField:
    """Q[a]/(m(a)) for a fixed monic integer minimal polynomial m.

    All elements created by a field instance share it structurally; mixing
    elements of distinct fields is a hard error.
    """

    def __init__(self, minpoly):
        coeffs = [mpq(c) for c in minpoly]
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        if self.degree < 1:
            raise ValueError("minimal polynomial must have positive degree")
        # reduction rows: a^k as a vector for k = d .. 2d-2
        d = self.degree
        rows = []
        prev = [-c for c in coeffs[:-1]]  # a^d
        rows.append(tuple(prev))
        for _ in range(d - 2):
            shifted = [_Q0] + prev[:-1]
            top = prev[-1]
            prev = [shifted[i] + top * rows[0][i] for i in range(d)]
            rows.append(tuple(prev))
        self._reduction = rows
        self.name = f"QQ[a]/({self._minpoly_str()})"
        self.zero = AlgebraicNumber(self, (_Q0,) * d)
        self.one = AlgebraicNumber(self, (_Q1,) + (_Q0,) * (d - 1))
        self.gen = AlgebraicNumber(self, tuple(_Q1 if i == 1 else _Q0 for i in range(d))) if d > 1 else self.one

    def _minpoly_str(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.minpoly[i]
            if not c:
                continue
            var = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
            terms.append(f"{format_rational(c)}{'*' if var else ''}{var}")
        return " + ".join(terms)

    def from_int(self, n) -> "AlgebraicNumber":
        return self.from_rational(mpq(n))

    def from_rational(self, q) -> "AlgebraicNumber":
        return AlgebraicNumber(self, (mpq(q),) + (_Q0,) * (self.degree - 1))

    def element(self, coeffs) -> "AlgebraicNumber":
        cs = [mpq(c) for c in coeffs]
        if len(cs) > self.degree:
            raise ValueError("coefficient vector longer than field degree")
        cs += [_Q0] * (self.degree - len(cs))
        return AlgebraicNumber(self, tuple(cs))

    def _reduce(self, conv):
        """Reduce a convolution vector of length <= 2d-1 modulo m(a)."""
        d = self.degree
        out = list(conv[:d]) + [_Q0] * (d - min(d, len(conv)))
        for k in range(d, len(conv)):
            c = conv[k]
            if c:
                row = self._reduction[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return self.name


class AlgebraicNumber:
    """Element of a NumberField, represented by its reduced coefficient vector
    (degree < deg m) over Q."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def _check(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("mixed number fields")
            return other
        return self.field.from_rational(mpq(other))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, mpq)):
            return self.coeffs[0] == other and all(c == 0 for c in self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        return hash((self.field.minpoly, self.coeffs))

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = self._check(other)
        return AlgebraicNumber(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, mpq)):
            q = mpq(other)
            return AlgebraicNumber(self.field, tuple(c * q for c in self.coeffs))
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        d = self.field.degree
        conv = [_Q0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        return AlgebraicNumber(self.field, self.field._reduce(conv))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        """Inverse via the extended Euclidean algorithm in Q[x] mod m."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in number field")
        # r0 = m, r1 = self; track s with r = s * self (mod m)
        r0 = list(self.field.minpoly)
        r1 = list(self.coeffs)
        while r1 and r1[-1] == 0:
            r1.pop()
        s0, s1 = [_Q0], [_Q1]
        while True:
            if not r1:
                raise ZeroDivisionError("element not invertible modulo minpoly")
            if len(r1) == 1:
                inv = 1 / r1[0]
                return self.field.element([c * inv for c in s1])
            q, r = _qdivmod(r0, r1)
            s = _qsub(s0, _qmul(q, s1))
            r0, r1 = r1, r
            s0, s1 = s1, s

    def __truediv__(self, other):
        if isinstance(other, (int, mpq)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / mpq(other))
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def serialize(self):
        return {
            "coeffs": [format_rational(c) for c in self.coeffs],
            "minpoly": [format_rational(c) for c in self.field.minpoly],
        }

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*a")
            else:
                terms.append(f"{c}*a^{i}")
        return " + ".join(terms) if terms else "0"


def _qdivmod(a, b):
    """Division with remainder for mpq coefficient lists (ascending)."""
    r = list(a)
    db = len(b) - 1
    inv = 1 / b[-1]
    q = [_Q0] * max(len(r) - db, 1)
    while len(r) - 1 >= db and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        c = r[-1] * inv
        k = len(r) - 1 - db
        q[k] = c
        for j in range(db + 1):
            r[k + j] -= c * b[j]
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return q, r


def _qmul(a, b):
    if not a or not b:
        return []
    out = [_Q0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _qsub(a, b):
    out = list(a) + [_Q0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    while out and out[-1] == 0:
        out.pop()
    return out
