"""Topological-limit frames at the four singular point types, mirror maps,
quantum Yukawa couplings, and the genus-0/1 invariants.

A frame packages the local data the higher-genus recursion consumes: the
weight series w0, the generator limits A1 and B_k of the polynomial ring, the
map used to re-expand local potentials in the flat coordinate (q, q~, the
rescaled conifold coordinate, or the x=3 coordinate), and an evaluator taking
rational functions of x into the local chart.

The complexified Kahler parameter only ever appears through q = e^{2 pi i t},
so no transcendental constant enters: all exported data are exact rationals
(or elements of the conifold number field).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .exactarith import QQ, RationalFunction
from .picardfuchs import (
    CYModel,
    FrobeniusBasis,
    frobenius_basis,
    localize_operator,
    normalize_frobenius,
)
from .series import SeriesError, TruncatedSeries, series_of_ratfunc


@dataclass
class Frame:
    label: str  # "x" | "z" | "conifold" | "x3"
    field: object
    var: str
    order: int
    w0: TruncatedSeries
    A1: TruncatedSeries
    B: tuple  # (B1, B2, B3)
    basis: FrobeniusBasis
    # chart data for map_rf
    shift: object = None
    invert_var: bool = False
    # recomposition target: x(q), z(q~), s(V), s(U)
    coord: TruncatedSeries | None = None
    coord_var: str = ""
    # large-volume extras
    side_key: str | None = None
    unit_of_coord: TruncatedSeries | None = None  # x(q)/q as a unit series
    D: TruncatedSeries | None = None  # x * dt/dx (a unit series in the chart)
    _rf_cache: dict = dc_field(default_factory=dict)

    def map_rf(self, rf: RationalFunction, order: int | None = None) -> TruncatedSeries:
        """Laurent expansion of a rational function of x in this chart."""
        order = order or self.order
        key = (rf, order)
        hit = self._rf_cache.get(key)
        if hit is not None:
            return hit
        out = series_of_ratfunc(rf, self.field, self.var, order, shift=self.shift, invert_var=self.invert_var)
        self._rf_cache[key] = out
        return out

    def theta_local(self, f: TruncatedSeries) -> TruncatedSeries:
        """The global theta operator expressed in this chart."""
        if self.invert_var:
            return -f.theta()
        return f.theta(self.shift)

    def to_flat(self, f: TruncatedSeries) -> TruncatedSeries:
        """Re-expand a local series in the flat coordinate of the frame."""
        return f.compose(self.coord)


def _log_tower(basis: FrobeniusBasis):
    """(w0, h) with the log solution log(var) * w0 + h at a maximally
    unipotent point."""
    w0 = basis.solutions[0].parts[0]
    W1 = basis.solutions[1]
    if W1.max_log_power != 1:
        raise SeriesError("expected a linear-log solution")
    return w0, W1.parts[0]


def build_frame(model: CYModel, point: str, order: int) -> Frame:
    """Frame at "x", "z", "conifold", or "x3"."""
    if point == "x":
        L = localize_operator(model, "zero")
        basis = normalize_frobenius(frobenius_basis(L, order))
        w0, h = _log_tower(basis)
        E = h / w0
        D = E.theta() + 1  # x dt/dx
        A1 = D.theta() / D - 1
        B = _b_limits(w0, lambda f: f.theta())
        qx = TruncatedSeries.x_power(QQ, "x", 1, order) * E.exp()
        xq = qx.revert()
        xq = TruncatedSeries(QQ, "q", xq.offset, xq.coeffs, xq.order)
        unit = xq.mul_xpower(-1)
        return Frame(
            label="x", field=QQ, var="x", order=order, w0=w0, A1=A1, B=B, basis=basis,
            coord=xq, coord_var="q", side_key="x", unit_of_coord=unit, D=D,
        )
    if point == "z":
        L = localize_operator(model, "infinity")
        basis = normalize_frobenius(frobenius_basis(L, order))
        w0, h = _log_tower(basis)
        E = h / w0
        D = E.theta() + 1  # z dt~/dz
        A1 = -(D.theta() / D) - 1
        B = _b_limits(w0, lambda f: -f.theta())
        qz = TruncatedSeries.x_power(QQ, "z", 1, order) * E.exp()
        zq = qz.revert()
        zq = TruncatedSeries(QQ, "qt", zq.offset, zq.coeffs, zq.order)
        unit = zq.mul_xpower(-1)
        return Frame(
            label="z", field=QQ, var="z", order=order, w0=w0, A1=A1, B=B, basis=basis,
            invert_var=True, coord=zq, coord_var="qt", side_key="z", unit_of_coord=unit, D=D,
        )
    if point == "conifold":
        L = localize_operator(model, "conifold")
        basis = normalize_frobenius(frobenius_basis(L, order))
        fld = basis.field
        alpha = fld.gen
        w0 = basis.solutions[0].parts[0]
        w1 = basis.solutions[1].parts[0]
        T = w1 / w0  # = k_U * U
        sV = T.revert()
        sV = TruncatedSeries(fld, "V", sV.offset, sV.coeffs, sV.order)
        Tp = T.derivative()
        A1 = Tp.theta(alpha) / Tp
        B = _b_limits(w0, lambda f: f.theta(alpha))
        return Frame(
            label="conifold", field=fld, var="s", order=order, w0=w0, A1=A1, B=B,
            basis=basis, shift=alpha, coord=sV, coord_var="V",
        )
    if point == "x3":
        L = localize_operator(model, "apparent")
        basis = normalize_frobenius(frobenius_basis(L, order))
        c = mpq(model.apparent_point)
        w0 = basis.solutions[0].parts[0]
        w1 = basis.solutions[1].parts[0]
        T = w1 / w0  # = U
        sU = T.revert()
        sU = TruncatedSeries(QQ, "U", sU.offset, sU.coeffs, sU.order)
        Tp = T.derivative()
        A1 = Tp.theta(c) / Tp
        B = _b_limits(w0, lambda f: f.theta(c))
        return Frame(
            label="x3", field=QQ, var="s", order=order, w0=w0, A1=A1, B=B,
            basis=basis, shift=c, coord=sU, coord_var="U",
        )
    raise ValueError(f"unknown frame point {point!r}")


def _b_limits(w0: TruncatedSeries, theta) -> tuple:
    inv = w0.inverse()
    out = []
    f = w0
    for _ in range(3):
        f = theta(f)
        out.append(f * inv)
    return tuple(out)


# ---------------------------------------------------------------------------
# genus 0
# ---------------------------------------------------------------------------

def local_cubed_yukawa(model: CYModel, frame: Frame) -> TruncatedSeries:
    """Series of (coordinate^3 * Yukawa) in the frame's chart: x^3 C_xxx on
    the x side, z^3 C_zzz on the z side (which is -(x^3 C_xxx)|_{x=1/z})."""
    s = frame.map_rf(model.x3_cubed_yukawa())
    if frame.label == "z":
        return -s
    return s


def quantum_yukawa(model: CYModel, frame: Frame) -> TruncatedSeries:
    """Triple-log-derivative of the genus-0 potential as a q-series; its
    leading term is the triple intersection number of the side."""
    if frame.side_key is None:
        raise ValueError("quantum Yukawa needs a large-volume frame")
    c3 = local_cubed_yukawa(model, frame)
    K_local = c3 * frame.w0.inverse() ** 2 * frame.D.inverse() ** 3
    if frame.label == "z":
        # w0 ~ z: the z^2 pole of z^3 C_zzz cancels the w0^2 zero
        pass
    return frame.to_flat(K_local)


def genus0_gw(model: CYModel, frame: Frame, max_degree: int) -> dict:
    """N_0(d) = [q^d] K / d^3 for d >= 1."""
    K = quantum_yukawa(model, frame)
    out = {}
    for d in range(1, max_degree + 1):
        out[d] = K.coefficient(d) / d**3
    return out


# ---------------------------------------------------------------------------
# genus 1
# ---------------------------------------------------------------------------

def _local_discriminant(model: CYModel, frame: Frame) -> tuple:
    """(integer power of the coordinate, unit series u with u(0)=1) of the
    side-local discriminant: dis(x) on the x side, z^deg * dis(1/z) (the
    reversed-coefficient polynomial) on the z side."""
    s = frame.map_rf(RationalFunction(model.discriminant))
    v = s.valuation()
    if frame.label == "z":
        v += model.discriminant.degree
    unit = s.mul_xpower(-s.valuation())
    lead = unit.coefficient(0)
    if lead != 1:
        # absorb the leading constant; it drops under theta of the log
        unit = unit.scale(1 / lead)
    return v, unit


def genus1_theta_potential(model: CYModel, frame: Frame) -> TruncatedSeries:
    """theta_q of the genus-1 potential as a q-series.

    The potential itself contains log q and additive constants (including the
    2 pi i normalizations); only its theta_q derivative is exported, and in it
    every constant cancels exactly.
    """
    side = model.sides[frame.side_key]
    A = side.genus1_weight
    ce = side.coord_exponent
    # F1 = 1/2 log{ (f1/w0)^A (dx/dt) dis^{-1/6} x^ce }
    # with x the side coordinate; split off log-coordinate powers exactly.
    coord_log_coeff = A * side.f1_exponent + 1 + ce  # from f1^A, dx/dt ~ x/D, x^ce
    dis_pow, dis_unit = _local_discriminant(model, frame)
    coord_log_coeff = coord_log_coeff - mpq(dis_pow, 6)
    unit_log = (
        frame.w0.mul_xpower(-frame.w0.valuation()).log().scale(-A)
        - frame.D.log()
        - dis_unit.log().scale(mpq(1, 6))
    )
    coord_log_coeff = coord_log_coeff - A * frame.w0.valuation()
    # theta_q log coord(q) = 1 + theta_q log(unit_of_coord)
    th_unit = frame.to_flat(unit_log).theta()
    th_coord = frame.unit_of_coord.log().theta() + 1
    return (th_coord.scale(coord_log_coeff) + th_unit).scale(mpq(1, 2))


def genus1_gw(model: CYModel, frame: Frame, max_degree: int) -> dict:
    """N_1(d) = [q^d] theta_q F1 / d."""
    th = genus1_theta_potential(model, frame)
    return {d: th.coefficient(d) / d for d in range(1, max_degree + 1)}


def genus1_gluing_residual(model: CYModel, order: int = 16) -> TruncatedSeries:
    """theta_z of (x-side genus-1 form glued to the z chart) minus theta_z of
    the z-side genus-1 form; identically zero to truncation order.

    The gluing substitutes x = 1/z and swaps in the z-side fundamental period
    and mirror map, exactly as the two sides share one global section.
    """
    zf = build_frame(model, "z", order)
    side_x = model.sides["x"]
    side_z = model.sides["z"]
    A = side_x.genus1_weight
    # glued x-side form: 1/2 log{ (1/w~0)^A (dx/dt~) dis(1/z)^{-1/6} (1/z)^{ce_x} }
    w0_unit = zf.w0.mul_xpower(-1)
    dis_z = zf.map_rf(RationalFunction(model.discriminant))
    v = dis_z.valuation()
    dis_unit = dis_z.mul_xpower(-v)
    dis_unit = dis_unit.scale(1 / dis_unit.coefficient(0))
    # dx/dt~ = (dx/dz)(dz/dt~) = (-z^-2)(z/D~): log z coefficient -1, unit 1/D~
    logz_coeff = -A - 1 - mpq(v, 6) - side_x.coord_exponent
    glued = w0_unit.log().scale(-A) - zf.D.log() - dis_unit.log().scale(mpq(1, 6))
    lhs = glued.theta() + TruncatedSeries.constant(QQ, "z", logz_coeff, glued.order)

    # native z-side form
    Az = side_z.genus1_weight
    ce_z = side_z.coord_exponent
    disz_pow, disz_unit = _local_discriminant(model, zf)
    logz_coeff_rhs = Az * side_z.f1_exponent + 1 + ce_z - mpq(disz_pow, 6) - Az * 1
    rhs_unit = w0_unit.log().scale(-Az) - zf.D.log() - disz_unit.log().scale(mpq(1, 6))
    rhs = rhs_unit.theta() + TruncatedSeries.constant(QQ, "z", logz_coeff_rhs, rhs_unit.order)
    return (lhs - rhs).scale(mpq(1, 2))
