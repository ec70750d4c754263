"""Truncated Laurent and log-series over an exact coefficient field.

A TruncatedSeries stores the coefficients of var^e for offset <= e < order;
exponents below the offset are known zeros, exponents at or beyond the
truncation order are unknown.  Every operation propagates the truncation
window pessimistically, so a coefficient can be read only when it is actually
determined by the inputs; reading past the window raises TruncationError.

A LogSeries is a vector of TruncatedSeries, entry j multiplying log(var)^j.
"""

from __future__ import annotations

from gmpy2 import mpq


class TruncationError(Exception):
    """Raised when a coefficient at or beyond the truncation order is read."""


class SeriesError(ValueError):
    """Raised on series-domain violations (bad valuation, log divisor, ...)."""


class TruncatedSeries:
    __slots__ = ("field", "var", "offset", "coeffs", "order")

    def __init__(self, field, var: str, offset: int, coeffs, order: int):
        coeffs = list(coeffs)
        if len(coeffs) != order - offset:
            raise ValueError("coefficient window does not match offset/order")
        # normalize: strip known-zero leading coefficients
        k = 0
        while k < len(coeffs) and not coeffs[k]:
            k += 1
        if k == len(coeffs):
            offset = order
            coeffs = []
        elif k:
            offset += k
            coeffs = coeffs[k:]
        self.field = field
        self.var = var
        self.offset = offset
        self.coeffs = tuple(coeffs)
        self.order = order

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field, var, order):
        return cls(field, var, order, (), order)

    @classmethod
    def constant(cls, field, var, value, order):
        if order <= 0:
            return cls.zero(field, var, order)
        value = _lift(field, value)
        return cls(field, var, 0, [value] + [field.zero] * (order - 1), order)

    @classmethod
    def one(cls, field, var, order):
        return cls.constant(field, var, field.one, order)

    @classmethod
    def x_power(cls, field, var, k, order):
        if order <= k:
            return cls.zero(field, var, order)
        return cls(field, var, k, [field.one] + [field.zero] * (order - k - 1), order)

    @classmethod
    def from_terms(cls, field, var, terms, order, offset=None):
        """terms: dict exponent -> coefficient (exponents below `order`)."""
        if not terms:
            return cls.zero(field, var, order)
        lo = min(terms) if offset is None else offset
        lo = min(lo, min(terms))
        coeffs = [field.zero] * (order - lo)
        for e, c in terms.items():
            if e >= order:
                raise ValueError("term beyond truncation order")
            coeffs[e - lo] = _lift(field, c)
        return cls(field, var, lo, coeffs, order)

    # -- basic access -------------------------------------------------------

    def coefficient(self, e: int):
        if e >= self.order:
            raise TruncationError(
                f"coefficient of {self.var}^{e} requested, series only valid below order {self.order}"
            )
        if e < self.offset:
            return self.field.zero
        return self.coeffs[e - self.offset]

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """Exponent of the leading stored coefficient; order if zero-to-order."""
        return self.offset

    def known_exponents(self):
        return range(self.offset, self.order)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.var == other.var
            and self.offset == other.offset
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def same_to_order(self, other: "TruncatedSeries", upto: int | None = None) -> bool:
        """Coefficient-wise equality on the common valid window (tests helper)."""
        n = min(self.order, other.order)
        if upto is not None:
            n = min(n, upto)
        lo = min(self.offset, other.offset)
        return all(self.coefficient(e) == other.coefficient(e) for e in range(lo, n))

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        coeffs = self.coeffs[: max(0, order - self.offset)]
        return TruncatedSeries(self.field, self.var, min(self.offset, order), coeffs, order)

    # -- ring operations ----------------------------------------------------

    def _check_compat(self, other):
        if self.var != other.var:
            raise SeriesError(f"mixed series variables {self.var!r} and {other.var!r}")

    def __neg__(self):
        return TruncatedSeries(self.field, self.var, self.offset, [-c for c in self.coeffs], self.order)

    def __add__(self, other):
        if isinstance(other, (int, mpq)):
            other = TruncatedSeries.constant(self.field, self.var, other, self.order)
        self._check_compat(other)
        order = min(self.order, other.order)
        lo = min(self.offset if self.coeffs else order, other.offset if other.coeffs else order)
        out = [self.field.zero] * (order - lo)
        for src in (self, other):
            for i, c in enumerate(src.coeffs):
                e = src.offset + i
                if e < order:
                    out[e - lo] = out[e - lo] + c
        return TruncatedSeries(self.field, self.var, lo, out, order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, mpq)):
            other = TruncatedSeries.constant(self.field, self.var, other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _lift(self.field, c)
        if not c:
            return TruncatedSeries.zero(self.field, self.var, self.order)
        return TruncatedSeries(self.field, self.var, self.offset, [c * a for a in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, mpq)) or not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check_compat(other)
        if self.is_zero() or other.is_zero():
            lo_a = self.offset if self.coeffs else self.order
            lo_b = other.offset if other.coeffs else other.order
            order = min(self.order + lo_b, other.order + lo_a)
            return TruncatedSeries.zero(self.field, self.var, order)
        order = min(self.order + other.offset, other.order + self.offset)
        lo = self.offset + other.offset
        n = order - lo
        out = [self.field.zero] * n
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(self.field, self.var, lo, out, order)

    __rmul__ = __mul__

    def mul_xpower(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.var, self.offset + k, self.coeffs, self.order + k)

    def inverse(self) -> "TruncatedSeries":
        if self.is_zero():
            raise SeriesError("inverse of a series with no known leading coefficient")
        v = self.offset
        lead = self.coeffs[0]
        lead_inv = _field_inv(self.field, lead)
        n = self.order - 2 * v  # honest validity of the inverse
        if n <= -v:
            raise SeriesError("truncation too short to invert")
        # unit part u: self = lead * x^v * (1 + u)
        out = [self.field.zero] * (n + v)  # exponents -v .. n-1
        out[0] = lead_inv
        for m in range(1, n + v):
            acc = self.field.zero
            for j in range(max(0, m - len(self.coeffs) + 1), m):
                fk = self.coeffs[m - j]
                if fk:
                    acc = acc + fk * out[j]
            out[m] = -(lead_inv * acc)
        return TruncatedSeries(self.field, self.var, -v, out, n)

    def __truediv__(self, other):
        if isinstance(other, (int, mpq)):
            return self.scale(1 / mpq(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        inv = self.inverse()
        return inv.scale(other) if isinstance(other, (int, mpq)) else other * inv

    def __pow__(self, n: int):
        if n == 0:
            return TruncatedSeries.one(self.field, self.var, self.order)
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "TruncatedSeries":
        """d/dvar; the truncation window shrinks by one order."""
        out = [c * (self.offset + i) for i, c in enumerate(self.coeffs)]
        new_order = self.order - 1
        lo = self.offset - 1 if out else new_order
        return TruncatedSeries(self.field, self.var, lo, out, new_order)

    def theta(self, shift=None) -> "TruncatedSeries":
        """(var + shift) d/dvar; plain var*d/dvar when shift is falsy (order kept)."""
        if not shift:
            out = [c * (self.offset + i) for i, c in enumerate(self.coeffs)]
            return TruncatedSeries(self.field, self.var, self.offset, out, self.order)
        d = self.derivative()
        return d.mul_xpower(1) + d.scale(shift)

    def integrate_coeffs(self):
        """Antiderivative with zero constant term; requires no 1/var term."""
        if self.offset <= -1 < self.order and self.coefficient(-1):
            raise SeriesError("cannot integrate a series with a 1/var term")
        out = {}
        for i, c in enumerate(self.coeffs):
            e = self.offset + i
            if c:
                out[e + 1] = c / (e + 1)
        return TruncatedSeries.from_terms(self.field, self.var, out, self.order + 1)

    # -- composition, reversion, exp/log ------------------------------------

    def compose(self, g: "TruncatedSeries") -> "TruncatedSeries":
        """self(g); g must have positive valuation (and be invertible when
        self has negative offset)."""
        if g.is_zero() or g.offset < 1:
            if self.offset >= 0 and g.is_zero():
                return TruncatedSeries.constant(self.field, g.var, self.coefficient(0) if self.order > 0 else self.field.zero, g.order)
            raise SeriesError("composition requires a substituted series of positive valuation")
        tail_order = self.order * g.offset
        acc = TruncatedSeries.zero(self.field, g.var, tail_order)
        pow_cache: dict[int, TruncatedSeries] = {}

        def g_pow(k: int) -> TruncatedSeries:
            if k in pow_cache:
                return pow_cache[k]
            p = g**k
            pow_cache[k] = p
            return p

        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            k = self.offset + i
            if k == 0:
                term = TruncatedSeries.constant(self.field, g.var, c, tail_order)
            else:
                term = g_pow(k).scale(c)
            acc = acc + term
        return acc.truncate(min(acc.order, tail_order))

    def revert(self) -> "TruncatedSeries":
        """Compositional inverse of a series c1*var + O(var^2), c1 invertible.

        Newton iteration at full precision on raw coefficient lists; the
        result is certified by recomposition before being returned.
        """
        if self.offset != 1:
            raise SeriesError("reversion requires valuation exactly 1")
        field = self.field
        n = self.order
        f = [field.zero] * n
        for i, c in enumerate(self.coeffs):
            f[
                self.offset + i
            ] = c
        c1_inv = _field_inv(field, f[1])
        g = [field.zero] * n
        g[1] = c1_inv
        df = [f[k] * k for k in range(1, n)]  # f'(s) coefficients, exponent k-1
        while True:
            fg = _raw_compose(field, f, g, n)
            res = list(fg)
            res[1] = res[1] - field.one
            if not any(res):
                break
            dfg = _raw_compose(field, df, g, n - 1)
            corr = _raw_div(field, res, dfg, n)
            changed = False
            for k in range(n):
                if k < len(corr) and corr[k]:
                    g[k] = g[k] - corr[k]
                    changed = True
            if not changed:
                raise SeriesError("reversion did not converge")
        out = TruncatedSeries(field, self.var, 1, g[1:], n)
        check = self.compose(out)
        if not check.same_to_order(TruncatedSeries.x_power(field, self.var, 1, n)):
            raise SeriesError("reversion verification failed")
        return out

    def exp(self) -> "TruncatedSeries":
        if not self.is_zero() and self.offset < 1:
            raise SeriesError("exp requires zero constant term")
        field = self.field
        n = self.order
        f = [self.coefficient(e) if e >= self.offset else field.zero for e in range(0, max(n, 0))]
        out = [field.zero] * n
        if n <= 0:
            return TruncatedSeries.zero(field, self.var, n)
        out[0] = field.one
        for m in range(1, n):
            acc = field.zero
            for k in range(1, m + 1):
                if f[k]:
                    acc = acc + (f[k] * k) * out[m - k]
            out[m] = acc / m
        return TruncatedSeries(field, self.var, 0, out, n)

    def log(self) -> "TruncatedSeries":
        if self.offset != 0 or self.coeffs[0] != self.field.one:
            raise SeriesError("log requires constant term exactly 1")
        dlog = self.derivative() * self.inverse()
        return dlog.integrate_coeffs().truncate(self.order)

    def map_coefficients(self, fn, field=None):
        field = field or self.field
        return TruncatedSeries(field, self.var, self.offset, [fn(c) for c in self.coeffs], self.order)

    def serialize(self):
        return {
            "variable": self.var,
            "offset": self.offset,
            "truncation_order": self.order,
            "coefficients": [_serialize_coeff(c) for c in self.coeffs],
        }

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:8]):
            if c:
                e = self.offset + i
                terms.append(f"({c})*{self.var}^{e}")
        body = " + ".join(terms) if terms else "0"
        return f"<{body} + O({self.var}^{self.order})>"


def _serialize_coeff(c):
    if isinstance(c, mpq):
        return str(c)
    return c.serialize()


def _lift(field, value):
    if isinstance(value, (int, mpq)):
        return field.from_rational(mpq(value))
    return value


def _field_inv(field, c):
    if isinstance(c, mpq):
        if not c:
            raise SeriesError("leading coefficient not invertible")
        return 1 / c
    return field.one / c


def _raw_compose(field, f, g, n):
    """f(g) mod var^n for dense lists (g[0] must be zero); Horner from the top."""
    acc = [field.zero] * n
    for c in reversed(f):
        # acc = acc * g + c
        acc = _raw_mul(field, acc, g, n)
        acc[0] = acc[0] + c
    return acc

def _raw_mul(field, a, b, n):
    out = [field.zero] * n
    for i, ai in enumerate(a):
        if ai and i < n:
            jmax = min(len(b), n - i)
            for j in range(jmax):
                if b[j]:
                    out[i + j] = out[i + j] + ai * b[j]
    return out


def _raw_div(field, a, b, n):
    """a/b mod var^n for dense lists with b[0] invertible."""
    inv0 = _field_inv(field, b[0])
    out = [field.zero] * n
    for m in range(n):
        acc = a[m] if m < len(a) else field.zero
        for j in range(m):
            if out[j] and m - j < len(b) and b[m - j]:
                acc = acc - out[j] * b[m - j]
        out[m] = acc * inv0 if isinstance(inv0, mpq) else inv0 * acc
    return out


# ---------------------------------------------------------------------------
# polynomial / rational-function evaluation into local coordinates
# ---------------------------------------------------------------------------

def series_from_polynomial(poly, field, var, order, shift=None, invert_var=False):
    """Series of p(x) under one of the coordinate conventions:
    x = var (default), x = var + shift (finite localization), or
    x = 1/var (the large-volume chart at infinity)."""
    coeffs = poly.coeffs() if hasattr(poly, "coeffs") else list(poly)
    if invert_var:
        terms = {-i: _lift(field, c) for i, c in enumerate(coeffs) if c and -i < order}
        return TruncatedSeries.from_terms(field, var, terms, order)
    if shift is not None:
        shifted = poly.shift(shift)
        terms = {i: _lift(field, c) for i, c in enumerate(shifted) if not _is_zero(c) and i < order}
        return TruncatedSeries.from_terms(field, var, terms, order)
    terms = {i: _lift(field, c) for i, c in enumerate(coeffs) if c and i < order}
    return TruncatedSeries.from_terms(field, var, terms, order)


def _is_zero(c):
    if isinstance(c, (int, mpq)):
        return c == 0
    return c.is_zero()


def series_of_ratfunc(rf, field, var, order, shift=None, invert_var=False):
    """Laurent expansion of a RationalFunction in a local coordinate."""
    den = series_from_polynomial(rf.den, field, var, order, shift, invert_var)
    v = max(den.valuation(), 0)
    work = order + 2 * v
    num = series_from_polynomial(rf.num, field, var, work, shift, invert_var)
    den = series_from_polynomial(rf.den, field, var, work, shift, invert_var)
    return (num * den.inverse()).truncate(order)


# ---------------------------------------------------------------------------
# log-series
# ---------------------------------------------------------------------------

class LogSeries:
    """sum_j parts[j] * log(var)^j with a shared variable and field."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("LogSeries needs at least the log^0 part")
        while len(parts) > 1 and parts[-1].is_zero():
            parts.pop()
        self.parts = tuple(parts)

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "LogSeries":
        return cls([s])

    @property
    def field(self):
        return self.parts[0].field

    @property
    def var(self):
        return self.parts[0].var

    @property
    def max_log_power(self) -> int:
        return len(self.parts) - 1

    def part(self, j: int) -> TruncatedSeries:
        if j >= len(self.parts):
            return TruncatedSeries.zero(self.field, self.var, self.parts[0].order)
        return self.parts[j]

    def is_log_free(self) -> bool:
        return len(self.parts) == 1

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            other = LogSeries.from_series(other)
        n = max(len(self.parts), len(other.parts))
        out = []
        for j in range(n):
            a = self.part(j)
            b = other.part(j)
            out.append(a + b)
        return LogSeries(out)

    def __neg__(self):
        return LogSeries([-p for p in self.parts])

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            other = LogSeries.from_series(other)
        return self + (-other)

    def scale(self, c):
        return LogSeries([p.scale(c) for p in self.parts])

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            other = LogSeries.from_series(other)
        if isinstance(other, (int, mpq)):
            return self.scale(other)
        zero_order = min(self.parts[0].order, other.parts[0].order)
        out = [TruncatedSeries.zero(self.field, self.var, zero_order) for _ in range(len(self.parts) + len(other.parts) - 1)]
        for i, a in enumerate(self.parts):
            for j, b in enumerate(other.parts):
                out[i + j] = out[i + j] + a * b
        return LogSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogSeries):
            if not other.is_log_free():
                raise SeriesError("division by a series with a log part")
            other = other.parts[0]
        inv = other.inverse() if isinstance(other, TruncatedSeries) else 1 / mpq(other)
        return LogSeries([p * inv for p in self.parts])

    def theta(self, shift=None, at_infinity=False) -> "LogSeries":
        """Global theta operator in this chart: (var+shift) d/dvar at a finite
        point, or -theta_var at infinity (where log means log var)."""
        parts = self.parts
        out = []
        for j in range(len(parts)):
            if at_infinity:
                term = -parts[j].theta()
                if j + 1 < len(parts):
                    term = term - parts[j + 1].scale(j + 1)
            else:
                term = parts[j].theta(shift)
                if j + 1 < len(parts):
                    bump = parts[j + 1].scale(j + 1)
                    if shift:
                        # (var+shift)/var multiplies the log-derivative term
                        corr = bump + bump.mul_xpower(-1).scale(shift)
                    else:
                        corr = bump
                    term = term + corr
            out.append(term)
        return LogSeries(out)

    def __repr__(self):
        bits = []
        for j, p in enumerate(self.parts):
            if j == 0:
                bits.append(repr(p))
            elif not p.is_zero():
                bits.append(f"log^{j}*{p!r}")
        return " + ".join(bits)
