"""The genus >= 2 engine: polynomial ring of the anomaly equation,
propagators, the genus recursion, and the ambiguity-fixing conditions.

Everything lives in Q(x)[A1, B1, B2, B3], where A1, B1, B2, B3 are the
log-derivative generators of the non-holomorphic data.  theta_x acts inside
the ring through

    theta B_k = B_{k+1} - B1 B_k,   theta A1 = A2 - A1^2,

with B4 eliminated by the operator relation and A2 by the special-geometry
reduction A2 = -4 B2 - 2 B1 (A1 - B1 - 1) + theta log(x C) (A1 + 2 B1 + 4) + r(x).

After the change of variables

    B1 = u, A1 = v1 - 2u - 1, B2 = v2 + u v1,
    B3 = v3 + u ((2 + Lg) v1 - v2 + 3 Lg + r - 1),   Lg := theta log(x C),

the genus-g potential P is a u-free polynomial in v1, v2, v3 and is obtained
by integrating its three partial derivatives, which the lower-genus data
determine as the coefficients of 1, u, u^2 of half the anomaly combination
P2^(g-1) + sum P1^(g-r) P1^(r).  The integration constant is fixed by P = 0
at the common zero of the three propagators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from gmpy2 import mpq

from .exactarith import Polynomial, RationalFunction, polynomial
from .gvbridge import gap_leading_constant, constant_map_term, sine_power_coefficient
from .linsolve import UnderdeterminedSystemError, solve_unique, residual
from .mirrormaps import Frame, build_frame
from .picardfuchs import CYModel, b_reduction_coeffs
from .series import TruncatedSeries

log = logging.getLogger(__name__)


class RingError(Exception):
    """Integrability or structural failure inside the polynomial ring."""


RF0 = RationalFunction.const(0)
RF1 = RationalFunction.const(1)


class RingElement:
    """Polynomial in four generators over Q(x) (sparse monomial map)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mon, c in terms.items():
                if not c.is_zero():
                    self.terms[mon] = c

    @classmethod
    def constant(cls, rf) -> "RingElement":
        if not isinstance(rf, RationalFunction):
            rf = RationalFunction.const(rf)
        return cls({(0, 0, 0, 0): rf})

    @classmethod
    def gen(cls, i: int) -> "RingElement":
        mon = tuple(1 if j == i else 0 for j in range(4))
        return cls({mon: RF1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.terms == other.terms

    def __neg__(self):
        return RingElement({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, mpq, RationalFunction)):
            other = RingElement.constant(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            cur = out.get(m)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        el = RingElement.__new__(RingElement)
        el.terms = out
        return el

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, mpq, RationalFunction)):
            other = RingElement.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, mpq, RationalFunction)):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                c = c1 * c2
                cur = out.get(m)
                s = c if cur is None else cur + c
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        el = RingElement.__new__(RingElement)
        el.terms = out
        return el

    __rmul__ = __mul__

    def scale(self, rf) -> "RingElement":
        if not isinstance(rf, RationalFunction):
            rf = RationalFunction.const(rf)
        if rf.is_zero():
            return RingElement()
        return RingElement({m: c * rf for m, c in self.terms.items()})

    def pd(self, i: int) -> "RingElement":
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                mm = tuple(mm)
                add = c * e
                cur = out.get(mm)
                out[mm] = add if cur is None else cur + add
        return RingElement(out)

    def map_coeffs(self, fn) -> "RingElement":
        return RingElement({m: fn(c) for m, c in self.terms.items()})

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self.terms), default=0)

    def coefficient_of(self, i: int, e: int) -> "RingElement":
        """Coefficient of gen_i^e as a ring element in the other generators."""
        out = {}
        for m, c in self.terms.items():
            if m[i] == e:
                mm = list(m)
                mm[i] = 0
                out[tuple(mm)] = c
        return RingElement(out)

    def subst(self, images: list, pow_cache: dict | None = None) -> "RingElement":
        """Replace generator i by images[i] (RingElements)."""
        if pow_cache is None:
            pow_cache = {}

        def power(i, e):
            if e == 0:
                return None
            key = (i, e)
            hit = pow_cache.get(key)
            if hit is not None:
                return hit
            if e == 1:
                p = images[i]
            else:
                p = power(i, e - 1) * images[i]
            pow_cache[key] = p
            return p

        acc = RingElement()
        for m, c in self.terms.items():
            term = RingElement.constant(c)
            for i, e in enumerate(m):
                p = power(i, e)
                if p is not None:
                    term = term * p
            acc = acc + term
        return acc

    def eval_rf(self, values: list) -> RationalFunction:
        """Evaluate at rational-function values of the generators."""
        acc = RF0
        pow_cache: dict = {}

        def power(i, e):
            if e == 0:
                return RF1
            key = (i, e)
            if key in pow_cache:
                return pow_cache[key]
            p = power(i, e - 1) * values[i]
            pow_cache[key] = p
            return p

        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            acc = acc + t
        return acc

    def eval_series(self, vals: list, coeff_map, order: int) -> TruncatedSeries:
        """Evaluate at series values of the generators; coefficients are
        mapped into the chart by coeff_map."""
        field = vals[0].field
        var = vals[0].var
        acc = TruncatedSeries.zero(field, var, order)
        pow_cache: dict = {}

        def power(i, e):
            if e == 0:
                return None
            key = (i, e)
            if key in pow_cache:
                return pow_cache[key]
            p = vals[i] if e == 1 else power(i, e - 1) * vals[i]
            pow_cache[key] = p
            return p

        for m, c in self.terms.items():
            t = coeff_map(c)
            for i, e in enumerate(m):
                p = power(i, e)
                if p is not None:
                    t = t * p
            acc = acc + t
        return acc

    def __repr__(self):
        if not self.terms:
            return "0"
        names = ("g0", "g1", "g2", "g3")
        bits = []
        for m, c in sorted(self.terms.items()):
            mon = "*".join(f"{names[i]}^{e}" for i, e in enumerate(m) if e)
            bits.append(f"[{c}]{'*' + mon if mon else ''}")
        return " + ".join(bits)

    def serialize(self):
        return [
            {"monomial": list(m), "coeff": c.serialize()}
            for m, c in sorted(self.terms.items())
        ]

    @classmethod
    def deserialize(cls, data) -> "RingElement":
        return cls(
            {
                tuple(item["monomial"]): RationalFunction.deserialize(item["coeff"])
                for item in data
            }
        )


# generator positions: AB chart (A1, B1, B2, B3); uv chart (u, v1, v2, v3)
A1g = RingElement.gen(0)
B1g = RingElement.gen(1)
B2g = RingElement.gen(2)
B3g = RingElement.gen(3)
Ug = RingElement.gen(0)
V1g = RingElement.gen(1)
V2g = RingElement.gen(2)
V3g = RingElement.gen(3)


def derive_r_of_x(model: CYModel, frame_x: Frame | None = None) -> RationalFunction:
    """The special-geometry reduction function r(x), derived from the x-side
    series data and certified against its closed form."""
    order = 12
    fx = frame_x or build_frame(model, "x", order)
    A1 = fx.A1
    B1, B2, _ = fx.B
    A2 = A1.theta() + A1 * A1
    xC = model.yukawa * RationalFunction.x()
    L_rf = xC.theta() / xC
    Ls = fx.map_rf(L_rf, order)
    r_series = A2 + B2.scale(4) + (B1 * (A1 - B1 - 1)).scale(2) - Ls * (A1 + B1.scale(2) + 4)
    # fit r = c0 + c1/(x-3) + (c2 + c3 x + c4 x^2)/dis by matching low orders
    x_minus_3 = polynomial(-3, 1)
    dis = model.discriminant
    basis = [
        RationalFunction(Polynomial.one()),
        RationalFunction(Polynomial.one(), x_minus_3),
        RationalFunction(Polynomial.one(), dis),
        RationalFunction(Polynomial.x(), dis),
        RationalFunction(Polynomial([0, 0, 1]), dis),
    ]
    cols = [fx.map_rf(b, order) for b in basis]
    rows = []
    for e in range(len(basis)):
        rows.append(
            (f"x^{e}", [c.coefficient(e) for c in cols], r_series.coefficient(e))
        )
    sol = solve_unique(rows)
    derived = RF0
    for c, b in zip(sol, basis):
        derived = derived + b * c
    closed = (
        RationalFunction.const(11)
        - RationalFunction(Polynomial([36]), x_minus_3 * 7)
        - RationalFunction(polynomial(10, -331, -751) * 4, dis * 7)
    )
    if derived != closed:
        raise RingError("derived r(x) does not match its closed form")
    check = r_series - fx.map_rf(derived, order)
    if not check.is_zero():
        raise RingError("special-geometry reduction residual is nonzero")
    return derived


@dataclass
class PropagatorFrame:
    Sxx: RingElement
    Sx: RingElement
    S: RingElement
    r_of_x: RationalFunction
    vanishing_point: tuple  # (v1*, v2*, v3*) rational functions
    H1: RationalFunction
    H2: RationalFunction


class YYStructure:
    """Model-derived ring data: reduction functions, theta action, propagators,
    chart changes, and the genus-1 seed."""

    def __init__(self, model: CYModel, frame_x: Frame | None = None):
        self.model = model
        self.C = model.yukawa
        self.x3C = model.x3_cubed_yukawa()
        xC = self.C * RationalFunction.x()
        self.xC = xC
        self.L = xC.theta() / xC
        self.r = derive_r_of_x(model, frame_x)
        self.rred = b_reduction_coeffs(model)

        W = A1g + B1g.scale(2) + 4
        self.A2_img = (
            B2g.scale(-4)
            - (B1g * (A1g - B1g - 1)).scale(2)
            + W.scale(self.L)
            + RingElement.constant(self.r)
        )
        r1, r2, r3, r4 = self.rred
        B4_img = -(B3g.scale(r1) + B2g.scale(r2) + B1g.scale(r3) + RingElement.constant(r4))
        self.theta_imgs = [
            self.A2_img - A1g * A1g,
            B2g - B1g * B1g,
            B3g - B1g * B2g,
            B4_img - B1g * B3g,
        ]

        two_plus_L = self.L + mpq(2)
        w3 = V1g.scale(two_plus_L) - V2g + RingElement.constant(self.L * 3 + self.r - 1)
        self.ab_to_uv_imgs = [  # images of A1, B1, B2, B3 in the uv chart
            V1g - Ug.scale(2) - 1,
            Ug,
            V2g + Ug * V1g,
            V3g + Ug * w3,
        ]
        v1_ab = A1g + B1g.scale(2) + 1
        v2_ab = B2g - B1g * v1_ab
        w3_ab = v1_ab.scale(two_plus_L) - v2_ab + RingElement.constant(self.L * 3 + self.r - 1)
        self.uv_to_ab_imgs = [B1g, v1_ab, v2_ab, B3g - B1g * w3_ab]
        self._uv_pow_cache: dict = {}
        self._ab_pow_cache: dict = {}

        self.propagators = self._build_propagators()

    # -- chart plumbing -----------------------------------------------------

    def theta_ab(self, el: RingElement) -> RingElement:
        out = RingElement()
        for m, c in el.terms.items():
            base = RingElement({m: c.theta()})
            out = out + base
            for i, e in enumerate(m):
                if e:
                    mm = list(m)
                    mm[i] = e - 1
                    out = out + (RingElement({tuple(mm): c * e}) * self.theta_imgs[i])
        return out

    def to_uv(self, el: RingElement) -> RingElement:
        return el.subst(self.ab_to_uv_imgs, self._uv_pow_cache)

    def to_ab(self, el: RingElement) -> RingElement:
        return el.subst(self.uv_to_ab_imgs, self._ab_pow_cache)

    # -- propagators ----------------------------------------------------------

    def cov_xD(self, el: RingElement, weight: int, upper: int) -> RingElement:
        """x * D_x on a ring element of the given line-bundle weight carrying
        `upper` upper tangent indices (lower indices count negatively)."""
        out = self.theta_ab(el)
        if weight:
            out = out - (B1g * el).scale(weight)
        if upper:
            out = out + (A1g * el).scale(upper)
        return out

    def _build_propagators(self) -> PropagatorFrame:
        inv_xC = RF1 / self.xC
        inv_x2C = RF1 / (self.xC * RationalFunction.x())
        W = A1g + B1g.scale(2) + 4
        Sxx = W.scale(-inv_xC)
        Sx_direct = (B1g.scale(3) + B2g + 2).scale(inv_x2C)
        H1 = (self.r - 12) * inv_x2C * mpq(1, 2)
        H2 = -H1 / RationalFunction.x()
        inv_x = RF1 / RationalFunction.x()
        DxSxx = self.cov_xD(Sxx, weight=-2, upper=2).scale(inv_x)
        Sx_built = DxSxx.scale(mpq(1, 2)) + (Sxx * Sxx).scale(self.C / 2) + RingElement.constant(H1)
        if not (Sx_built - Sx_direct).is_zero():
            raise RingError("the two propagator constructions of S^x disagree")
        Sx = Sx_direct
        DxSx = self.cov_xD(Sx, weight=-2, upper=1).scale(inv_x)
        Kx = B1g.scale(-inv_x)
        S = (
            Kx.scale(H1)
            + DxSx.scale(mpq(1, 2))
            + (Sxx * Sx).scale(self.C / 2)
            + RingElement.constant(H2)
        )
        # vanishing point on the u = 0 slice
        S_uv = self.to_uv(S)
        zero = RingElement()
        sub = S_uv.subst([zero, RingElement.constant(mpq(-3)), RingElement.constant(mpq(-2)), V3g])
        c1 = sub.coefficient_of(3, 1)
        c0 = sub.coefficient_of(3, 0)
        if c1.degree_in(3) or any(sum(m) for m in c1.terms) or sub.degree_in(3) > 1:
            raise RingError("propagator S is not linear in v3 on the slice")
        v3_star = -(c0.terms.get((0, 0, 0, 0), RF0) / c1.terms.get((0, 0, 0, 0)))
        # sanity: Sxx, Sx in the uv chart have the expected closed forms
        Sxx_uv = self.to_uv(Sxx)
        expect = (V1g + 3).scale(-inv_xC)
        if not (Sxx_uv - expect).is_zero():
            raise RingError("S^xx in the uv chart has an unexpected form")
        Sx_uv = self.to_uv(Sx)
        expect_x = (V2g + 2 + Ug * (V1g + 3)).scale(inv_x2C)
        if not (Sx_uv - expect_x).is_zero():
            raise RingError("S^x in the uv chart has an unexpected form")
        return PropagatorFrame(
            Sxx=Sxx,
            Sx=Sx,
            S=S,
            r_of_x=self.r,
            vanishing_point=(RationalFunction.const(-3), RationalFunction.const(-2), v3_star),
            H1=H1,
            H2=H2,
        )

    # -- genus-1 seed ---------------------------------------------------------

    def P1_genus1(self) -> RingElement:
        side = self.model.sides["x"]
        dis = RationalFunction(self.model.discriminant)
        theta_log_dis = dis.theta() / dis
        const = RationalFunction.const(side.coord_exponent) - theta_log_dis * mpq(1, 6)
        el = -A1g - B1g.scale(RationalFunction.const(side.genus1_weight)) + RingElement.constant(const)
        return el.scale(mpq(1, 2))

    def u_independence_defect(self, el_uv: RingElement) -> RingElement:
        """The first anomaly constraint evaluated on a uv-chart element; zero
        for every admissible potential (certifies the chart change)."""
        P_ab = self.to_ab(el_uv)
        dA1 = P_ab.pd(0)
        dB1 = P_ab.pd(1)
        dB2 = P_ab.pd(2)
        dB3 = P_ab.pd(3)
        c2 = 1 + A1g + B1g.scale(2)
        c3 = self.A2_img + A1g.scale(2) + B1g.scale(3) + B2g.scale(3) + (A1g * B1g).scale(3) + 1
        return dA1.scale(2) - (dB1 + c2 * dB2 + c3 * dB3)


# ---------------------------------------------------------------------------
# affine rational scalars (for condition rows linear in the f_g unknowns)
# ---------------------------------------------------------------------------

class AffineQ:
    """const + sum lin[j] * unknown_j over Q."""

    __slots__ = ("const", "lin")

    def __init__(self, const=mpq(0), lin=None):
        self.const = mpq(const)
        self.lin = dict(lin) if lin else {}

    def __add__(self, other):
        if not isinstance(other, AffineQ):
            return AffineQ(self.const + mpq(other), self.lin)
        lin = dict(self.lin)
        for j, c in other.lin.items():
            s = lin.get(j, mpq(0)) + c
            if s:
                lin[j] = s
            else:
                lin.pop(j, None)
        return AffineQ(self.const + other.const, lin)

    def __sub__(self, other):
        return self + other.scale(-1) if isinstance(other, AffineQ) else AffineQ(self.const - mpq(other), self.lin)

    def scale(self, c):
        c = mpq(c)
        if not c:
            return AffineQ()
        return AffineQ(self.const * c, {j: v * c for j, v in self.lin.items()})

    def row(self, nunknowns):
        return [self.lin.get(j, mpq(0)) for j in range(nunknowns)]

    def value_at(self, sol):
        return self.const + sum((c * sol[j] for j, c in self.lin.items()), mpq(0))


def _component(value, idx):
    """idx-th rational component of a coefficient (trivial over Q)."""
    if isinstance(value, mpq):
        return value if idx == 0 else mpq(0)
    return value.coeffs[idx]


# ---------------------------------------------------------------------------
# condition schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenusSchedule:
    vanishing_x: tuple
    vanishing_z: tuple
    constant_terms: bool = True
    x3_rows: bool = False
    greedy_fill: bool = True

    def to_json(self):
        return {
            "vanishing_x": list(self.vanishing_x),
            "vanishing_z": list(self.vanishing_z),
            "constant_terms": self.constant_terms,
            "x3_rows": self.x3_rows,
            "greedy_fill": self.greedy_fill,
        }

    @classmethod
    def from_json(cls, data) -> "GenusSchedule":
        return cls(
            vanishing_x=tuple(data["vanishing_x"]),
            vanishing_z=tuple(data["vanishing_z"]),
            constant_terms=bool(data.get("constant_terms", True)),
            x3_rows=bool(data.get("x3_rows", False)),
            greedy_fill=bool(data.get("greedy_fill", True)),
        )


def default_genus_schedule(g: int) -> GenusSchedule:
    """Low-degree vanishing assumptions: the worked genus-2/3 sets, then the
    (2g-3)-degree rule with greedy extension for higher genus."""
    if g == 2:
        return GenusSchedule(vanishing_x=(1, 2, 3, 4), vanishing_z=(1, 2))
    if g == 3:
        return GenusSchedule(vanishing_x=(1, 2, 3, 4, 5), vanishing_z=(1, 2))
    return GenusSchedule(vanishing_x=tuple(range(1, 2 * g - 2)), vanishing_z=(1, 2))


@dataclass
class AmbiguitySystem:
    genus: int
    unknowns: list
    rows: list  # (label, coeffs, rhs) used to solve
    extra_rows: list  # verification-only rows
    greedy_added: list
    solution: list | None = None


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------

class AnomalySolver:
    """Integrates the genus recursion and fixes the holomorphic ambiguities.

    State grows genus by genus: P[g] (uv chart), solved f_g, the squared
    conifold normalization kappa = k_U^2 (fixed at genus 2), and the exact
    Gromov-Witten tables of both sides.
    """

    def __init__(
        self,
        model: CYModel,
        q_order: int = 26,
        s_order: int | None = None,
        max_genus: int = 5,
        max_degree_x: int = 18,
        max_degree_z: int = 13,
        schedules: dict | None = None,
        zero_cells=None,
    ):
        self.model = model
        self.q_order = q_order
        self.s_order = s_order or (2 * max_genus + 10)
        self.max_genus = max_genus
        self.max_degree_x = max_degree_x
        self.max_degree_z = max_degree_z
        self.schedules = schedules or {}
        self.zero_cells = zero_cells or (lambda side, g: set())

        self.frames: dict = {}
        self.yy = YYStructure(model, self.frame("x"))
        self.P: dict[int, RingElement] = {}
        self._p1ab: dict[int, RingElement] = {}
        self._p2ab: dict[int, RingElement] = {}
        self._vlimits: dict = {}
        self.fg_solution: dict[int, dict] = {}
        self.fg_rf: dict[int, RationalFunction] = {}
        self._n_cache: dict = {}
        self.kappa = None  # k_U^2 in the conifold field
        self.systems: dict[int, AmbiguitySystem] = {}
        self.solved_series: dict[int, dict] = {}
        self.N = {"x": {}, "z": {}}  # (g, d) -> mpq
        self.gap_reports: dict[int, dict] = {}
        self.x3_reports: dict[int, list] = {}

    # -- frames ---------------------------------------------------------------

    def frame(self, key: str) -> Frame:
        if key not in self.frames:
            point = {"x": "x", "z": "z", "con": "conifold", "x3": "x3"}[key]
            order = self.q_order if key in ("x", "z") else self.s_order
            log.info("building %s frame at order %d", key, order)
            self.frames[key] = build_frame(self.model, point, order)
        return self.frames[key]

    def v_limits(self, key: str):
        if key not in self._vlimits:
            fr = self.frame(key)
            A1 = fr.A1
            B1, B2, B3 = fr.B
            Ls = fr.map_rf(self.yy.L)
            rs = fr.map_rf(self.yy.r)
            v1 = A1 + B1.scale(2) + 1
            v2 = B2 - B1 * v1
            w3 = (Ls + 2) * v1 - v2 + Ls.scale(3) + rs - 1
            v3 = B3 - B1 * w3
            self._vlimits[key] = [B1, v1, v2, v3]
        return self._vlimits[key]

    # -- ring recursion ---------------------------------------------------------

    def P1ab(self, h: int) -> RingElement:
        if h not in self._p1ab:
            if h == 1:
                self._p1ab[1] = self.yy.P1_genus1()
            else:
                # the full potential includes the solved ambiguity:
                # P_0 = (x^3 C)^(h-1) F^(h) = P^(h) + (x^3 C)^(h-1) f_h
                if h not in self.fg_rf:
                    raise RingError(f"genus {h} ambiguity must be solved before raising")
                Pab = self.yy.to_ab(self.P[h]) + RingElement.constant(
                    self.yy.x3C ** (h - 1) * self.fg_rf[h]
                )
                self._p1ab[h] = self._raise(Pab, h, 0)
        return self._p1ab[h]

    def P2ab(self, h: int) -> RingElement:
        if h not in self._p2ab:
            self._p2ab[h] = self._raise(self.P1ab(h), h, 1)
        return self._p2ab[h]

    def _raise(self, P_ab: RingElement, h: int, n: int) -> RingElement:
        out = self.yy.theta_ab(P_ab)
        if h != 1:
            wterm = B1g.scale(2) - RingElement.constant(self.yy.L + 2)
            out = out + (wterm * P_ab).scale(h - 1)
        if n:
            out = out - ((A1g + 1) * P_ab).scale(n)
        return out

    def integrate_Pg(self, g: int) -> RingElement:
        """Solve the three-partial system for P^(g) and fix its constant by
        vanishing at the propagator zero."""
        if g in self.P:
            return self.P[g]
        if g < 2:
            raise ValueError("recursion starts at genus 2")
        log.info("integrating P^(%d)", g)
        rhs = self.P2ab(g - 1)
        for r_ in range(1, g):
            rhs = rhs + self.P1ab(g - r_) * self.P1ab(r_)
        rhs = rhs.scale(mpq(1, 2))
        rhs_uv = self.yy.to_uv(rhs)
        if rhs_uv.degree_in(0) > 2:
            raise RingError(f"genus {g}: anomaly right-hand side has u-degree > 2")
        Q = [rhs_uv.coefficient_of(0, e) for e in range(3)]
        two_plus_L = RationalFunction.const(2) + self.yy.L
        f1 = -Q[0]
        f3 = Q[2]
        f2 = Q[1] - Q[2].scale(two_plus_L)
        pairs = [(f1.pd(2), f2.pd(1)), (f1.pd(3), f3.pd(1)), (f2.pd(3), f3.pd(2))]
        for a, b in pairs:
            if not (a - b).is_zero():
                raise RingError(f"genus {g}: anomaly equation fails integrability")
        # homotopy integration: P_d = F_d / d for the degree-d part of
        # F = v1 f1 + v2 f2 + v3 f3
        F = V1g * f1 + V2g * f2 + V3g * f3
        parts: dict[int, dict] = {}
        for m, c in F.terms.items():
            d = sum(m)
            parts.setdefault(d, {})[m] = c
        P = RingElement()
        for d, terms in parts.items():
            if d == 0:
                if terms:
                    raise RingError(f"genus {g}: gradient field has a constant part")
                continue
            P = P + RingElement(terms).scale(mpq(1, d))
        for i, f in ((1, f1), (2, f2), (3, f3)):
            if not (P.pd(i) - f).is_zero():
                raise RingError(f"genus {g}: potential reconstruction failed")
        v_star = self.yy.propagators.vanishing_point
        const = P.eval_rf([RF0, *v_star])
        P = P - RingElement.constant(const)
        # decisive verification in the original chart
        defect = self.yy.to_ab(P).pd(0) + rhs
        if not defect.is_zero():
            raise RingError(f"genus {g}: d P / d A1 does not match the anomaly equation")
        self.P[g] = P
        return P

    # -- topological limits -----------------------------------------------------

    def ambiguity_basis(self, g: int):
        """(name, rational function) pairs spanning the f_g ansatz."""
        xpoly = Polynomial.x()
        out = []
        for i in range(2 * g - 1):
            out.append((f"a{i}", RationalFunction(xpoly**i)))
        pole3 = polynomial(-3, 1) ** (2 * g - 2)
        for i in range(2 * g - 2):
            out.append((f"b{i}", RationalFunction(xpoly**i, pole3)))
        poled = self.model.discriminant ** (2 * g - 2)
        for i in range(6 * g - 6):
            out.append((f"c{i}", RationalFunction(xpoly**i, poled)))
        return out

    def components(self, g: int) -> dict:
        """Per frame, the list [F_g(P-part), F_g(basis_1), ...] of flat-
        coordinate series whose affine combination with the unknowns is F_g."""
        P = self.integrate_Pg(g)
        basis = self.ambiguity_basis(g)
        out = {}
        for key in ("x", "z", "con", "x3"):
            fr = self.frame(key)
            vl = self.v_limits(key)
            pref = fr.map_rf(self.yy.x3C) ** (1 - g)
            pser = P.eval_series(vl, lambda rf: fr.map_rf(rf), fr.order)
            G = pref * pser
            comps = [G] + [fr.map_rf(rf) for _, rf in basis]
            w = fr.w0 ** (2 * g - 2)
            comps = [fr.to_flat(w * c) for c in comps]
            if key in ("x", "z"):
                for c in comps:
                    if not c.is_zero() and c.valuation() < 0:
                        raise RingError(f"genus {g}: {key}-side potential has a pole in q")
            out[key] = comps
        return out

    @staticmethod
    def _affine_at(comps, e: int, comp_idx: int = 0) -> AffineQ:
        const = _component(comps[0].coefficient(e), comp_idx)
        lin = {}
        for j, c in enumerate(comps[1:]):
            v = _component(c.coefficient(e), comp_idx)
            if v:
                lin[j] = v
        return AffineQ(const, lin)

    def affine_gw(self, comps, g: int, dmax: int) -> dict:
        return {d: self._affine_at(comps, d) for d in range(1, dmax + 1)}

    def affine_gv(self, side: str, aff_N: dict, g: int) -> dict:
        """Triangular GV inversion with the genus-g layer kept affine."""
        out: dict[int, AffineQ] = {}
        for d in sorted(aff_N):
            acc = aff_N[d]
            for h in range(g + 1):
                e = sine_power_coefficient(h, g)
                if not e:
                    continue
                for k in range(1, d + 1):
                    if d % k:
                        continue
                    if h == g:
                        if k == 1:
                            continue
                        acc = acc - out[d // k].scale(e * mpq(k) ** (2 * g - 3))
                    else:
                        nv = self.n_value(side, h, d // k)
                        if nv:
                            acc = acc - AffineQ(e * mpq(k) ** (2 * g - 3) * nv)
            out[d] = acc
        return out

    # -- conditions and solving ---------------------------------------------------

    def assemble_conditions(self, g: int) -> AmbiguitySystem:
        comps = self.components(g)
        basis = self.ambiguity_basis(g)
        m = len(basis)
        fld = self.frame("con").field
        ncomp = fld.degree
        chi = self.model.sides["x"].chi
        rows = []
        extra = []

        # (i) conifold gap rows: 1/V^k coefficients vanish, k = 1 .. 2g-3
        for k in range(1, 2 * g - 2):
            for ci in range(ncomp):
                aff = self._affine_at(comps["con"], -k, ci)
                rows.append(((f"gap", k, ci), aff.row(m), -aff.const))
        # (ii) leading conifold coefficient (needs kappa, known for g >= 3)
        lead_rows = []
        lead_c = gap_leading_constant(g)
        if g >= 3:
            if self.kappa is None:
                raise RingError("kappa must be fixed at genus 2 before higher genus")
            target = self.kappa ** (g - 1) * lead_c
            for ci in range(ncomp):
                aff = self._affine_at(comps["con"], -(2 * g - 2), ci)
                lead_rows.append((("leading", ci), aff.row(m), _component(target, ci) - aff.const))
            rows.extend(lead_rows)
        # (iii) constant-map terms
        sched = self.schedules.get(g) or default_genus_schedule(g)
        cmap = constant_map_term(g, chi)
        if sched.constant_terms:
            for key in ("x", "z"):
                aff = self._affine_at(comps[key], 0)
                rows.append((("constant", key), aff.row(m), cmap - aff.const))
        # (iv) low-degree vanishing
        aff_n = {}
        for key, dmax in (("x", self.max_degree_x), ("z", self.max_degree_z)):
            aff_N = self.affine_gw(comps[key], g, dmax)
            aff_n[key] = self.affine_gv(key, aff_N, g)
        for key, dlist in (("x", sched.vanishing_x), ("z", sched.vanishing_z)):
            for d in dlist:
                aff = aff_n[key][d]
                rows.append((("vanish", key, d), aff.row(m), -aff.const))
        # (v) x=3 regularity rows
        x3_rows = []
        for k in range(1, 2 * g - 1):
            aff = self._affine_at(comps["x3"], -k)
            x3_rows.append((("x3", k), aff.row(m), -aff.const))
        if sched.x3_rows:
            rows.extend(x3_rows)
        else:
            extra.extend(x3_rows)

        # greedy fill from known-zero reference cells
        greedy_added = []
        if sched.greedy_fill:
            candidates = []
            for d in range(1, max(self.max_degree_x, self.max_degree_z) + 1):
                for key in ("x", "z"):
                    dmax = self.max_degree_x if key == "x" else self.max_degree_z
                    if d > dmax or d in (sched.vanishing_x if key == "x" else sched.vanishing_z):
                        continue
                    if d in self.zero_cells(key, g):
                        candidates.append((key, d))
            while True:
                try:
                    solve_unique(rows)
                    break
                except UnderdeterminedSystemError:
                    if not candidates:
                        raise
                    key, d = candidates.pop(0)
                    aff = aff_n[key][d]
                    rows.append((("vanish", key, d), aff.row(m), -aff.const))
                    greedy_added.append((key, d))
        self._aff_n = aff_n  # kept for table extraction after solving
        self._comps = comps
        return AmbiguitySystem(
            genus=g,
            unknowns=[name for name, _ in basis],
            rows=rows,
            extra_rows=extra,
            greedy_added=greedy_added,
        )

    def solve_genus(self, g: int) -> dict:
        """Integrate, assemble, solve, verify, and extend the tables."""
        system = self.assemble_conditions(g)
        sol = solve_unique(system.rows)
        system.solution = sol
        self.systems[g] = system
        basis = self.ambiguity_basis(g)
        self.fg_solution[g] = {name: v for (name, _), v in zip(basis, sol)}
        fg = RF0
        for (name, rf), v in zip(basis, sol):
            if v:
                fg = fg + rf * v
        self.fg_rf[g] = fg

        comps = self._comps
        fld = self.frame("con").field
        # solved series per frame
        solved = {}
        for key, cs in comps.items():
            acc = cs[0]
            for j, c in enumerate(cs[1:]):
                if sol[j]:
                    acc = acc + c.scale(sol[j])
            solved[key] = acc
        self.solved_series[g] = solved
        # kappa from the genus-2 leading conifold coefficient
        if g == 2:
            e2 = solved["con"].coefficient(-2)
            self.kappa = e2 * (1 / gap_leading_constant(2))
        # gap verification
        gaps = {}
        for k in range(1, 2 * g - 2):
            gaps[k] = solved["con"].coefficient(-k)
        lead = solved["con"].coefficient(-(2 * g - 2))
        target = self.kappa ** (g - 1) * gap_leading_constant(g)
        self.gap_reports[g] = {
            "gaps_zero": all(v.is_zero() for v in gaps.values()),
            "leading_matches": lead == target,
        }
        if not self.gap_reports[g]["gaps_zero"]:
            raise RingError(f"genus {g}: gap condition violated after solving")
        if not self.gap_reports[g]["leading_matches"]:
            raise RingError(f"genus {g}: conifold leading coefficient mismatch")
        # x=3 regularity (verification even when unused)
        self.x3_reports[g] = [solved["x3"].coefficient(-k) for k in range(1, 2 * g - 1)]
        bad = [label for label, res in residual(system.extra_rows, sol) if res]
        if bad:
            raise RingError(f"genus {g}: unused condition rows violated: {bad}")
        # tables
        for key, dmax in (("x", self.max_degree_x), ("z", self.max_degree_z)):
            for d in range(1, dmax + 1):
                self.N[key][(g, d)] = solved[key].coefficient(d)
        self._finish_genus(g)
        return self.fg_solution[g]

    # -- public driver ----------------------------------------------------------

    def initialize_low_genus(self):
        """Genus-0/1 potentials and integer invariants for both sides."""
        from .mirrormaps import genus0_gw, genus1_gw
        from .gvbridge import gw_to_gv

        self._n_cache = {}
        for key, dmax in (("x", self.max_degree_x), ("z", self.max_degree_z)):
            fr = self.frame(key)
            N0 = genus0_gw(self.model, fr, dmax)
            N1 = genus1_gw(self.model, fr, dmax)
            for d in range(1, dmax + 1):
                self.N[key][(0, d)] = N0[d]
                self.N[key][(1, d)] = N1[d]
            Nt = {(0, d): N0[d] for d in N0} | {(1, d): N1[d] for d in N1}
            self._n_cache[key] = gw_to_gv(Nt, 1, dmax)

    def _finish_genus(self, g: int):
        """Convert the new genus layer to integer invariants (integrality is
        asserted by the conversion) and record them for later genera."""
        from .gvbridge import gw_to_gv

        for key, dmax in (("x", self.max_degree_x), ("z", self.max_degree_z)):
            Nall = {
                (h, d): self.N[key][(h, d)] for h in range(g + 1) for d in range(1, dmax + 1)
            }
            n = gw_to_gv(Nall, g, dmax)
            self._n_cache[key].update({(g, d): n[(g, d)] for d in range(1, dmax + 1)})

    def gv_table(self, side: str) -> dict:
        """(g, d) -> integer invariant for everything solved so far."""
        return dict(self._n_cache[side])

    def gw_table(self, side: str) -> dict:
        return dict(self.N[side])

    def run(self):
        """Full pipeline: genus 0/1 seed, then the recursion up to max_genus."""
        self.initialize_low_genus()
        for g in range(2, self.max_genus + 1):
            log.info("solving genus %d", g)
            self.solve_genus(g)
        return self

    def n_value(self, side: str, h: int, d: int):
        """Integer invariant of an already-solved genus layer."""
        if d < 1:
            return 0
        table = self._n_cache.get(side)
        if table is None or (h, d) not in table:
            raise RingError(f"missing lower-genus invariant n_{h}({d}) on side {side}")
        return table[(h, d)]


def feynman_genus2(yy: YYStructure) -> RingElement:
    """The explicit two-loop diagram sum for the genus-2 potential (minus its
    holomorphic ambiguity), used as an independent check of the recursion."""
    chi = yy.model.sides["x"].chi
    C = yy.C
    inv_x = RF1 / RationalFunction.x()
    F03 = RingElement.constant(C)
    F04 = yy.cov_xD(F03, weight=2, upper=-3).scale(inv_x)
    F11 = yy.P1_genus1().scale(inv_x)
    F21 = yy.cov_xD(F11, weight=0, upper=-1).scale(inv_x)
    p = yy.propagators
    Sxx, Sx, S = p.Sxx, p.Sx, p.S
    chi24 = mpq(chi, 24)
    out = (Sxx * Sxx * Sxx).scale(C * C * mpq(5, 24))
    out = out - (Sxx * Sxx * F04).scale(mpq(1, 8))
    out = out - (Sxx * Sxx * F11).scale(C * mpq(1, 2))
    out = out + (Sxx * F11 * F11).scale(mpq(1, 2))
    out = out + (Sxx * F21).scale(mpq(1, 2))
    out = out + (Sx * F11).scale(chi24)
    out = out - (Sx * Sxx).scale(C * chi24 / 2)
    out = out + S.scale(chi24 * (chi24 - 1))
    return out
