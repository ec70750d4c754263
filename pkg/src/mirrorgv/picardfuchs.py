"""The Picard-Fuchs operator of the Grassmannian/Pfaffian mirror family and
its Frobenius solution bases.

The operator is a fourth-order Fuchsian operator written in powers of
theta = x d/dx with polynomial coefficients.  Local solution bases are built
at x=0, x=infinity (z=1/x), the three conifold roots of the discriminant
(handled at once over the cubic extension Q[a]/(m)), and the apparent
singular point x=3.  Degenerate indicial roots produce log solutions; free
coefficients at resonant exponents are injected as unknowns and either
resolved by later obstructions or set to zero, which pins every reference
normalization deterministically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from math import comb

from gmpy2 import mpq

from .exactarith import (
    QQ,
    NumberField,
    Polynomial,
    RationalFunction,
    format_rational,
    parse_rational,
    polynomial,
)
from .series import LogSeries, TruncatedSeries


class FrobeniusError(Exception):
    """Unresolvable resonance or non-integral indices in a local solve."""


# ---------------------------------------------------------------------------
# the differential operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaOperator:
    """sum_k coeffs[k](x) * theta_x^k with polynomial coefficients."""

    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def serialize(self):
        return [[format_rational(c) for c in p.coeffs()] for p in self.coeffs]

    @classmethod
    def deserialize(cls, data) -> "ThetaOperator":
        return cls(tuple(Polynomial([parse_rational(c) for c in row]) for row in data))


def _builtin_operator() -> ThetaOperator:
    rows = [
        [0, -45, -2166, 12, -26, 1],
        [0, -306, -9546, 1350, -174, 4],
        [0, -816, -15194, 4706, -478, 6],
        [0, -1020, -10064, 5256, -608, 4],
        [9, -519, -2258, 1686, -295, 1],
    ]
    return ThetaOperator(tuple(polynomial(r) for r in rows))


@dataclass(frozen=True)
class SideData:
    """Topological data of one large-volume side."""

    chi: int
    c2h: int
    h3: int
    h11: int
    f1_exponent: int  # exponent of the local coordinate in the genus-1 gauge factor

    @property
    def genus1_weight(self) -> mpq:
        return mpq(3 + self.h11) - mpq(self.chi, 12)

    @property
    def coord_exponent(self) -> mpq:
        return mpq(-1) - mpq(self.c2h, 12)


@dataclass(frozen=True)
class CYModel:
    operator: ThetaOperator
    yukawa: RationalFunction  # C_xxx(x)
    discriminant: Polynomial
    minpoly: tuple  # monic integer coefficients, ascending
    apparent_point: mpq
    sides: dict

    @classmethod
    def builtin(cls) -> "CYModel":
        dis = polynomial(1, -57, -289, 1)
        yukawa = RationalFunction(polynomial(42, -14), Polynomial([0, 0, 0, 1]) * dis)
        return cls(
            operator=_builtin_operator(),
            yukawa=yukawa,
            discriminant=dis,
            minpoly=(1, -57, -289, 1),
            apparent_point=mpq(3),
            sides={
                "x": SideData(chi=-98, c2h=84, h3=42, h11=1, f1_exponent=0),
                "z": SideData(chi=-98, c2h=56, h3=14, h11=1, f1_exponent=1),
            },
        )

    def conifold_field(self) -> NumberField:
        return NumberField(self.minpoly)

    def x3_cubed_yukawa(self) -> RationalFunction:
        """x^3 * C_xxx as a rational function (regular at x=0)."""
        return self.yukawa * RationalFunction(Polynomial([0, 0, 0, 1]))

    def to_json(self) -> dict:
        return {
            "operator": self.operator.serialize(),
            "yukawa": self.yukawa.serialize(),
            "discriminant": [format_rational(c) for c in self.discriminant.coeffs()],
            "minpoly": [int(c) for c in self.minpoly],
            "apparent_point": format_rational(self.apparent_point),
            "sides": {
                k: {
                    "chi": s.chi,
                    "c2h": s.c2h,
                    "h3": s.h3,
                    "h11": s.h11,
                    "f1_exponent": s.f1_exponent,
                }
                for k, s in self.sides.items()
            },
        }

    @classmethod
    def from_json(cls, data) -> "CYModel":
        return cls(
            operator=ThetaOperator.deserialize(data["operator"]),
            yukawa=RationalFunction.deserialize(data["yukawa"]),
            discriminant=Polynomial([parse_rational(c) for c in data["discriminant"]]),
            minpoly=tuple(int(c) for c in data["minpoly"]),
            apparent_point=parse_rational(data["apparent_point"]),
            sides={k: SideData(**s) for k, s in data["sides"].items()},
        )

    def model_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def b_reduction_coeffs(model: CYModel) -> tuple:
    """(r1, r2, r3, r4) with B4 + r1 B3 + r2 B2 + r3 B1 + r4 = 0, read off the
    operator acting on the K-potential exponential."""
    a = model.operator.coeffs
    lead = RationalFunction(a[-1])
    return tuple(RationalFunction(a[len(a) - 2 - i]) / lead for i in range(len(a) - 1))


# ---------------------------------------------------------------------------
# localization
# ---------------------------------------------------------------------------

@dataclass
class LocalOperator:
    """Operator in delta = s d/ds form at a local coordinate: sum_j b_j(s) delta^j.

    bcoeffs[j] is the ascending coefficient list of b_j(s) over `field`.
    """

    field: object
    var: str
    label: str
    shift: object  # x = var + shift (None means var is x itself or 1/x)
    at_infinity: bool
    bcoeffs: list

    @property
    def order(self) -> int:
        return len(self.bcoeffs) - 1

    def max_s_degree(self) -> int:
        return max(len(row) for row in self.bcoeffs) - 1


def _beta_eval(L: LocalOperator, k: int, n: int, deriv: int = 0):
    """beta^(deriv)_k(n) computed straightforwardly (clear version)."""
    field = L.field
    acc = field.zero
    for j in range(deriv, L.order + 1):
        row = L.bcoeffs[j]
        if k >= len(row):
            continue
        c = row[k]
        if not c:
            continue
        fall = 1
        for t in range(deriv):
            fall *= j - t
        acc = acc + c * (fall * n ** (j - deriv) if j > deriv else fall)
    return acc


# field-coefficient polynomial helpers (ascending lists)

def _fp_strip(a):
    while a and not a[-1]:
        a.pop()
    return a


def _fp_add(field, a, b):
    out = list(a) + [field.zero] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _fp_strip(out)


def _fp_mul(field, a, b):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    return _fp_strip(out)


def _fp_diff(field, a):
    return _fp_strip([a[i] * i for i in range(1, len(a))])


def _weyl_mul(field, A: dict, B: dict) -> dict:
    """Product of differential operators sum p_m(s) (d/ds)^m."""
    out: dict[int, list] = {}
    for m, p in A.items():
        for n, q in B.items():
            qi = list(q)
            for i in range(m + 1):
                if qi:
                    term = [c * comb(m, i) for c in qi]
                    key = m - i + n
                    out[key] = _fp_add(field, out.get(key, []), _fp_mul(field, p, term))
                qi = _fp_diff(field, qi)
                if not qi:
                    break
    return {k: v for k, v in out.items() if v}


def _stirling_first(m: int) -> list:
    """Signed Stirling numbers: x(x-1)...(x-m+1) = sum_j s(m,j) x^j."""
    poly = [1]
    for t in range(m):
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] += c
            new[i] -= t * c
        poly = new
    return poly


def localize_operator(model: CYModel, point, field=None) -> LocalOperator:
    """Local delta-form of the operator.

    point: "zero", "infinity", "apparent", or "conifold".  The conifold
    localization works over Q[a]/(m) with x = a + s, covering all three
    discriminant roots at once.
    """
    op = model.operator
    if point == "zero":
        b = [[mpq(c) for c in p.coeffs()] for p in op.coeffs]
        return LocalOperator(QQ, "x", "zero", None, False, b)
    if point == "infinity":
        deg = max(p.degree for p in op.coeffs)
        b = []
        for j, p in enumerate(op.coeffs):
            cs = list(p.coeffs()) + [mpq(0)] * (deg - p.degree)
            rev = [mpq(c) for c in reversed(cs)]
            if j % 2:
                rev = [-c for c in rev]
            b.append(rev)
        return LocalOperator(QQ, "z", "infinity", None, True, b)
    if point == "apparent":
        return _localize_finite(model, mpq(model.apparent_point), QQ, "apparent")
    if point == "conifold":
        fld = field or model.conifold_field()
        return _localize_finite(model, fld.gen, fld, "conifold")
    # arbitrary finite rational point (flagged ordinary unless singular)
    return _localize_finite(model, mpq(point), QQ, "ordinary")


def _localize_finite(model: CYModel, c, field, label: str) -> LocalOperator:
    op = model.operator
    one = field.one
    T = {1: [c, one]}  # (s + c) d/ds
    powers = [{0: [one]}]
    for _ in range(op.order):
        powers.append(_weyl_mul(field, powers[-1], T))
    total: dict[int, list] = {}
    for k, a_k in enumerate(op.coeffs):
        if a_k.is_zero():
            continue
        shifted = [_as_field(field, v) for v in a_k.shift(c)]
        shifted = _fp_strip(shifted)
        for m, p in powers[k].items():
            total[m] = _fp_add(field, total.get(m, []), _fp_mul(field, shifted, p))
    order = op.order
    # normalize by the smallest power s^t with all s^(t-m) q_m(s) polynomial,
    # so the indicial polynomial does not degenerate (t < order exactly when
    # the leading coefficient vanishes at the point, as at singular points)
    def s_order(p):
        for i, cc in enumerate(p):
            if not _fz(cc):
                return i
        return None

    t = 0
    for m, p in total.items():
        v = s_order(p)
        if v is not None:
            t = max(t, m - v)
    bcoeffs = [[] for _ in range(order + 1)]
    for m, p in total.items():
        if s_order(p) is None:
            continue
        if t >= m:
            lifted = [field.zero] * (t - m) + list(p)
        else:
            drop = m - t
            if any(not _fz(cc) for cc in p[:drop]):
                raise FrobeniusError(f"localization at {label}: not a regular singular point")
            lifted = list(p[drop:])
        stirling = _stirling_first(m)
        for j, s1 in enumerate(stirling):
            if s1:
                bcoeffs[j] = _fp_add(field, bcoeffs[j], [cc * s1 for cc in lifted])
    return LocalOperator(field, "s", label, c, False, bcoeffs)


def _as_field(field, v):
    if isinstance(v, (int, mpq)):
        return field.from_rational(mpq(v))
    return v


def indicial_roots(L: LocalOperator, search=range(-8, 24)) -> list:
    """Integer indicial roots with multiplicity; non-integer roots are an error."""
    field = L.field
    beta0 = [row[0] if row else field.zero for row in L.bcoeffs]

    def eval_poly(coeffs, n):
        acc = field.zero
        for c in reversed(coeffs):
            acc = acc * n + c
        return acc

    def derive(coeffs):
        return [coeffs[i] * i for i in range(1, len(coeffs))]

    roots = []
    total = 0
    coeffs = list(beta0)
    for n in search:
        nval = field.from_int(n)
        if not _fz(eval_poly(coeffs, nval)):
            continue
        mult = 1
        d = derive(coeffs)
        while d and _fz(eval_poly(d, nval)):
            mult += 1
            d = derive(d)
        roots.extend([n] * mult)
        total += mult
    if total != L.order:
        raise FrobeniusError(
            f"indicial polynomial at {L.label} has {total} integer roots with multiplicity, expected {L.order}"
        )
    return sorted(roots)


def _fz(v) -> bool:
    if isinstance(v, (int, mpq)):
        return v == 0
    return v.is_zero()


# ---------------------------------------------------------------------------
# affine scalars for the forward recurrence
# ---------------------------------------------------------------------------

class _Affine:
    """const + sum lin[k] * unknown_k over a coefficient field."""

    __slots__ = ("const", "lin")

    def __init__(self, const, lin=None):
        self.const = const
        self.lin = lin or {}

    def __add__(self, other):
        if not isinstance(other, _Affine):
            return _Affine(self.const + other, dict(self.lin))
        lin = dict(self.lin)
        for k, c in other.lin.items():
            cur = lin.get(k)
            s = c if cur is None else cur + c
            if _fz(s):
                lin.pop(k, None)
            else:
                lin[k] = s
        return _Affine(self.const + other.const, lin)

    def __sub__(self, other):
        return self + other.scale(-1) if isinstance(other, _Affine) else _Affine(self.const - other, dict(self.lin))

    def scale(self, c):
        zero = (c == 0) if isinstance(c, (int, mpq)) else c.is_zero()
        if zero:
            return _Affine(self.const * 0)
        return _Affine(self.const * c, {k: v * c for k, v in self.lin.items()})

    def is_zero(self) -> bool:
        return _fz(self.const) and not self.lin

    def substitute(self, resolved: dict) -> "_Affine":
        out = _Affine(self.const, {})
        for k, c in self.lin.items():
            if k in resolved:
                out = out + resolved[k].scale(c)
            else:
                out = out + _Affine(self.const * 0, {k: c})
        return out


class _SolveEnv:
    """Unknown counter and resolution map shared by one solution tower."""

    def __init__(self, field):
        self.field = field
        self.counter = 0
        self.resolved: dict[int, _Affine] = {}

    def fresh(self) -> _Affine:
        k = self.counter
        self.counter += 1
        return _Affine(self.field.zero, {k: self.field.one})

    def resolve(self, aff: _Affine, where: str):
        """Force aff == 0 by solving for one of its unknowns."""
        aff = aff.substitute(self.resolved)
        if aff.is_zero():
            return
        if not aff.lin:
            raise FrobeniusError(f"unresolvable obstruction at {where}")
        k = max(aff.lin)
        c = aff.lin[k]
        rest = _Affine(aff.const, {j: v for j, v in aff.lin.items() if j != k})
        inv = self.field.one / c if not isinstance(c, mpq) else 1 / c
        value = rest.scale(inv).scale(-1)
        # keep resolution map normalized (no resolved unknowns on the right)
        self.resolved[k] = value.substitute(self.resolved)
        for j in list(self.resolved):
            self.resolved[j] = self.resolved[j].substitute(self.resolved)

    def finalize(self, aff: _Affine):
        aff = aff.substitute(self.resolved)
        return aff.const  # unresolved unknowns default to zero


def _apply_operator_affine(L: LocalOperator, u: list, deriv: int, nmax: int) -> list:
    """(deriv-th delta-derivative of L) applied to affine coefficient list u."""
    field = L.field
    kmax = L.max_s_degree()
    out = [_Affine(field.zero) for _ in range(nmax)]
    for n in range(nmax):
        acc = _Affine(field.zero)
        for k in range(0, min(kmax, n) + 1):
            coeff = _beta_eval(L, k, n - k, deriv)
            if not _fz(coeff):
                acc = acc + u[n - k].scale(coeff)
        out[n] = acc
    return out


def _forward_solve(L: LocalOperator, env: _SolveEnv, rho: int, rhs: list, nmax: int, lead=None) -> list:
    """Solve L(w) = -rhs for w with valuation >= rho, injecting unknowns at
    resonant exponents; returns affine coefficients (exponents 0..nmax-1)."""
    field = L.field
    kmax = L.max_s_degree()
    w = [_Affine(field.zero) for _ in range(nmax)]
    for n in range(rho, nmax):
        acc = _Affine(field.zero)
        for k in range(1, min(kmax, n - rho) + 1):
            coeff = _beta_eval(L, k, n - k)
            if not _fz(coeff):
                acc = acc + w[n - k].scale(coeff)
        acc = acc + rhs[n]
        pivot = _beta_eval(L, 0, n)
        if _fz(pivot):
            if n == rho and lead is not None:
                env.resolve(acc, f"exponent {n} (leading)")
                w[n] = _Affine(lead)
            else:
                env.resolve(acc, f"exponent {n}")
                w[n] = env.fresh()
        else:
            inv = field.one / pivot if not isinstance(pivot, mpq) else 1 / pivot
            w[n] = acc.scale(inv).scale(-1)
    return w


def _zero_rhs(field, nmax):
    return [_Affine(field.zero) for _ in range(nmax)]


# ---------------------------------------------------------------------------
# Frobenius bases
# ---------------------------------------------------------------------------

@dataclass
class FrobeniusBasis:
    point: str
    field: object
    indices: list
    solutions: list  # LogSeries, ordered by (index, log power)
    local_operator: LocalOperator
    towers: list | None = None  # (index, log power, multiplicity) per solution
    normalized: bool = False


def frobenius_basis(L: LocalOperator, order: int) -> FrobeniusBasis:
    """One solution per indicial root counted with multiplicity; repeated
    roots produce log-towers whose free resonant coefficients are resolved by
    obstructions, the remainder pinned to zero."""
    field = L.field
    roots = indicial_roots(L)
    nmax = order
    solutions = []
    distinct = sorted(set(roots))
    for rho in distinct:
        mult = roots.count(rho)
        env = _SolveEnv(field)
        # deepest ladder first: top power solution shared by the whole tower
        ladders = {}
        base = _forward_solve(L, env, rho, _zero_rhs(field, nmax), nmax, lead=field.one)
        for depth in range(mult - 1, -1, -1):
            u = {depth: base}
            for j in range(depth - 1, -1, -1):
                rhs = [_Affine(field.zero) for _ in range(nmax)]
                for i in range(1, depth - j + 1):
                    img = _apply_operator_affine(L, u[j + i], i, nmax)
                    cji = comb(j + i, i)
                    for n in range(nmax):
                        rhs[n] = rhs[n] + img[n].scale(field.from_int(cji))
                u[j] = _forward_solve(L, env, 0, rhs, nmax)
            ladders[depth] = u
        for depth in range(mult):
            u = ladders[depth]
            parts = []
            for j in range(depth + 1):
                vals = [env.finalize(a) for a in u[j]]
                parts.append(TruncatedSeries(field, L.var, 0, vals, nmax))
            solutions.append((rho, depth, mult, LogSeries(parts)))
    solutions.sort(key=lambda t: (t[0], t[1]))
    return FrobeniusBasis(
        point=L.label,
        field=field,
        indices=roots,
        solutions=[s for _, _, _, s in solutions],
        local_operator=L,
        towers=[(rho, depth, mult) for rho, depth, mult, _ in solutions],
    )


def apply_local_operator(L: LocalOperator, w: LogSeries) -> LogSeries:
    """L applied to a log-series (for annihilation checks)."""
    field = L.field
    parts = w.parts
    order0 = parts[0].order
    out = []
    for m in range(len(parts)):
        acc = TruncatedSeries.zero(field, L.var, order0)
        for i in range(0, len(parts) - m):
            u = parts[m + i]
            img = _apply_operator_series(L, u, i)
            acc = acc + img.scale(comb(m + i, i))
        out.append(acc)
    return LogSeries(out)


def _apply_operator_series(L: LocalOperator, u: TruncatedSeries, deriv: int) -> TruncatedSeries:
    field = L.field
    acc = TruncatedSeries.zero(field, L.var, u.order)
    for j in range(deriv, L.order + 1):
        row = L.bcoeffs[j]
        if not row:
            continue
        fall = 1
        for t in range(deriv):
            fall *= j - t
        d = u
        for _ in range(j - deriv):
            d = d.theta()
        terms = {i: c for i, c in enumerate(row) if not _fz(c) and i < u.order}
        poly_series = TruncatedSeries.from_terms(field, L.var, terms, u.order)
        acc = acc + poly_series * d.scale(fall)
    return acc


def normalize_frobenius(basis: FrobeniusBasis) -> FrobeniusBasis:
    """Pin the basis to the reference conventions.

    x=0 / z=0: fundamental period plus the linear-log partner whose series
    part has no coefficient at the leading exponent (already produced by the
    solver, so this is a re-echelon no-op there).
    conifold: vanishing-cycle period w1 = s + ..., w0 = 1 + O(s^3) by
    eliminating the s and s^2 coefficients, w2 = s^2 + O(s^3).
    x=3: echelon against higher-index solutions at every resonant exponent.
    """
    sols = list(basis.solutions)
    idx = basis.indices
    towers = basis.towers or [(None, 1 if not s.is_log_free() else 0, 1) for s in sols]
    # echelon-reduce the power (log-free) solutions against the ones of
    # strictly larger leading exponent, clearing low exponents first so a
    # later subtraction cannot disturb an already-cleared coefficient.
    # Log-multipliers (the power solution heading a log tower) are pinned by
    # the existence of their log partner and must not be re-combined.
    powers = [(i, s) for i, s in enumerate(sols) if s.is_log_free()]
    by_lead = sorted(powers, key=lambda t: t[1].parts[0].valuation(), reverse=True)
    reduced: list[TruncatedSeries] = []
    for pos, sol in by_lead:
        series = sol.parts[0]
        lead = series.valuation()
        lead_c = series.coefficient(lead)
        if lead_c != basis.field.one:
            series = series.scale(_inv(basis.field, lead_c))
        is_log_multiplier = towers[pos][2] > 1
        if not is_log_multiplier:
            for rser in sorted(reduced, key=lambda s: s.valuation()):
                rv = rser.valuation()
                if lead < rv < series.order:
                    c = series.coefficient(rv)
                    if not _fz(c):
                        series = series - rser.scale(c)
        reduced.append(series)
        sols[pos] = LogSeries([series])
    out = FrobeniusBasis(
        point=basis.point,
        field=basis.field,
        indices=idx,
        solutions=sols,
        local_operator=basis.local_operator,
        towers=basis.towers,
        normalized=True,
    )
    return out


def _inv(field, c):
    return 1 / c if isinstance(c, mpq) else field.one / c


def fuchs_index_sum(model: CYModel) -> int:
    """Sum of all indicial roots over the six singular points; the Fuchs
    relation fixes it to (order choose 2) * (points - 2) = 24."""
    total = 0
    for point in ("zero", "infinity", "apparent"):
        total += sum(indicial_roots(localize_operator(model, point)))
    con = indicial_roots(localize_operator(model, "conifold"))
    total += sum(con) * (len(model.minpoly) - 1)
    return total
