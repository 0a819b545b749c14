"""Spectral-curve families and their resolved local data.

Two families of genus-zero spectral curves are built in uniformised form,
with x(zeta) rational and y = zeta/x:

* half Seiberg-Witten:  x = -Lam^r / prod_a (Q_a - zeta),
* CDO:                  x = -Lam^r prod_a (P_a + zeta) / prod_a (Q_a - zeta),

plus a generic rational family for coordinate-independence tests.  Building a
curve locates the simple ramification points (zeros of dx away from poles of
y dx), verifies simplicity, and exposes the local deck involutions and the
branch expansions of the uniformiser in the coordinate 1/x at each pole of x.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .scalars import (EXACTQ, BigC, Poly, RatF, RootFindingError, find_roots)
from .series import Series, expand_ratf_at


class CurveError(ValueError):
    """Parameter set violates the family's admissibility conditions."""


@dataclass(frozen=True)
class HalfSW:
    r: int
    Q: tuple
    lam: object  # Lambda

    def describe(self):
        return {"family": "half-sw", "r": self.r,
                "q": [str(q) for q in self.Q], "lambda": str(self.lam)}


@dataclass(frozen=True)
class CDO:
    r: int
    P: tuple
    Q: tuple
    lam: object

    def describe(self):
        return {"family": "cdo", "r": self.r, "p": [str(p) for p in self.P],
                "q": [str(q) for q in self.Q], "lambda": str(self.lam)}


@dataclass(frozen=True)
class GenericRational:
    """x as a rational function of the uniformiser; y defaults to zeta/x."""
    x_num: tuple
    x_den: tuple
    y_num: tuple = None
    y_den: tuple = None

    def describe(self):
        return {"family": "generic", "x_num": [str(c) for c in self.x_num],
                "x_den": [str(c) for c in self.x_den]}


@dataclass
class Sheet:
    """A pole of x: the center of a sheet of the covering near x = infinity."""
    index: int            # 1-based sheet label
    at_infinity: bool     # the CDO zeta = infinity sheet
    center: object        # Q_a for finite sheets, None for the infinity sheet
    residue: object       # residue of omega_{0,1} = y dx at the pole


class SpectralCurve:
    """Resolved spectral curve: x, y, ramification data, local expansions.

    Immutable after construction; local series are cached per requested order.
    """

    def __init__(self, family, backend, x, y, ram, sheets, a_consts):
        self.family = family
        self.backend = backend
        self.x = x                     # RatF in zeta
        self.y = y                     # RatF in zeta
        self.dx = _ratf_deriv(x)
        self.ram = list(ram)           # ramification points (scalar payloads)
        self.sheets = list(sheets)
        self.a_consts = list(a_consts)  # A_a with x ~ -A_a/(zeta - Q_a)
        self._deck_cache = {}
        self._branch_cache = {}
        self._loc_cache = {}
        self.fingerprint = self._fingerprint()

    # -- identity ----------------------------------------------------------

    def _fingerprint(self):
        blob = repr((self.family.describe(), getattr(self.backend, "key", None)))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def describe(self):
        d = dict(self.family.describe())
        d["backend"] = self.backend.kind
        if isinstance(self.backend, BigC):
            d["precision_bits"] = self.backend.prec
        d["ram_count"] = len(self.ram)
        return d

    @property
    def nsheets(self):
        return len(self.sheets)

    # -- local data at ramification points ----------------------------------

    def x_series_at(self, rho_idx, order, var="t"):
        key = ("x", rho_idx, order, var)
        if key not in self._loc_cache:
            self._loc_cache[key] = expand_ratf_at(
                self.x, self.ram[rho_idx], order, self.backend, var)
        return self._loc_cache[key]

    def y_series_at(self, rho_idx, order, var="t"):
        key = ("y", rho_idx, order, var)
        if key not in self._loc_cache:
            self._loc_cache[key] = expand_ratf_at(
                self.y, self.ram[rho_idx], order, self.backend, var)
        return self._loc_cache[key]

    def deck_involution(self, rho_idx, order, var="t"):
        """Series s(t) with sigma(rho + t) = rho + s(t), s(t) = -t + O(t^2).

        Solves x(rho + s) = x(rho + t) on the non-identity branch by Newton
        iteration on series.
        """
        key = (rho_idx, order, var)
        if key in self._deck_cache:
            return self._deck_cache[key]
        b = self.backend
        # seed Newton from the deepest previously computed solution so that
        # growing the order costs one or two refinement steps, not a restart
        known = 1
        seed = None
        for (ri, past, v), ser in self._deck_cache.items():
            if ri == rho_idx and v == var and past < order and past > known:
                known, seed = past, ser
        import math
        steps = max(1, math.ceil(math.log2(max(order, 2) / known)))
        work = order + 2 * (steps + 2)
        xs = self.x_series_at(rho_idx, work + 2, var)
        x0 = xs.coeff(0)
        f = xs - Series.const(b, var, x0, xs.order)      # valuation 2 at simple ram
        if f.is_identically_zero() or f.val != 2:
            raise CurveError(
                f"ramification point #{rho_idx} is not simple (dx zero of order "
                f"{f.val - 1 if f.coeffs else 'inf'})")
        fp = f.deriv()
        if seed is None:
            s = Series.from_coeffs(b, var, 1, [-b.one] + [b.zero] * (work - 1))
        else:
            s = Series(b, var, seed.val,
                       list(seed.coeffs) + [b.zero] * (work - seed.order), work)
        while known < order:
            known = min(2 * known, order)
            num = f.compose(s) - f.truncated(s.order)
            den = fp.compose(s)
            delta = num * den.reciprocal()
            s = (s - delta).truncated(min(s.order, delta.order))
        s = s.truncated(order)
        self._deck_cache[key] = s
        return s

    def branch_series(self, sheet_index, order):
        """Expansion of the uniformiser on sheet a in eps = 1/x.

        Finite sheets return zeta_a(eps) with zeta_a(0) = Q_a.  The CDO
        infinity sheet returns u(eps) with u = 1/zeta, u(0) = 0.  Both satisfy
        x = 1/eps identically to the guaranteed order.
        """
        key = (sheet_index, order)
        if key in self._branch_cache:
            return self._branch_cache[key]
        b = self.backend
        sheet = self.sheets[sheet_index - 1]
        invx = RatF_like_inv(self.x)
        if sheet.at_infinity:
            # w = 1/zeta; expand 1/x(1/w) around w = 0
            loc = _ratf_at_inverse_coordinate(self.x, b)
            ser = expand_ratf_at(RatF_like_inv(loc), b.zero, order + 1, b, "w")
        else:
            ser = expand_ratf_at(invx, sheet.center, order + 1, b, "w")
        if ser.is_identically_zero() or ser.val != 1:
            raise CurveError(f"sheet {sheet_index}: 1/x does not have a simple zero")
        rev = ser.revert()
        out = Series(b, "eps", rev.val, rev.coeffs, rev.order)
        self._branch_cache[key] = out
        return out

    def sheet_center(self, sheet_index):
        return self.sheets[sheet_index - 1].center


def _ratf_deriv(f: RatF) -> RatF:
    num = f.num.deriv() * f.den - f.num * f.den.deriv()
    return RatFGeneric(num, f.den * f.den)


def RatFGeneric(num, den):
    """RatF pair without gcd reduction (payloads may be inexact)."""
    r = RatF.__new__(RatF)
    r.num = num
    r.den = den
    return r


def RatF_like_inv(f):
    if not f.num:
        raise ZeroDivisionError("inverting zero rational function")
    return RatFGeneric(f.den, f.num)


def _ratf_at_inverse_coordinate(f, backend):
    """f(1/w) rewritten as a rational function of w."""
    n, d = f.num, f.den
    deg = max(n.degree, d.degree)
    ncs = [backend.zero] * (deg + 1)
    dcs = [backend.zero] * (deg + 1)
    for i, c in enumerate(n.coeffs):
        ncs[deg - i] = c
    for i, c in enumerate(d.coeffs):
        dcs[deg - i] = c
    return RatFGeneric(Poly(ncs, backend.is_zero), Poly(dcs, backend.is_zero))


# ---------------------------------------------------------------------------
# building


def _poly_from_roots(roots, backend, sign=1):
    """prod (root_a - zeta) if sign=+1, prod (root_a + zeta) if sign=-1."""
    out = Poly([backend.one])
    for r in roots:
        out = out * Poly([r, -backend.one if sign > 0 else backend.one])
    return out


def build_curve(family, backend=EXACTQ, check=True):
    """Resolve a curve family over the given backend.

    Verifies the family invariants: pairwise-distinct charges, nonzero scale,
    and simple ramification away from the poles of x (checked, not assumed).
    """
    with backend.context():
        return _build_curve(family, backend, check)


def _build_curve(family, backend, check):
    b = backend
    if isinstance(family, HalfSW):
        r, Q, lam = family.r, list(family.Q), family.lam
        if r < 2:
            raise CurveError("rank must be at least 2")
        if len(Q) != r:
            raise CurveError("need exactly r charges")
        _require_distinct(Q, b, "charges")
        if b.is_zero(lam):
            raise CurveError("the scale must be nonzero")
        lam_r = _power(lam, r)
        den = _poly_from_roots(Q, b)                   # prod (Q_a - zeta)
        x = RatFGeneric(Poly([-lam_r]), den)
        y = RatFGeneric(Poly([b.zero, -b.one]) * den, Poly([lam_r]))
        ram_poly = den.deriv()
        roots, resid = find_roots(ram_poly.coeffs, b)
        if resid.degree > 0:
            raise RootFindingError(
                "ramification points are irrational over this backend; "
                "use the arbitrary-precision backend")
        ram = []
        for root, mult in roots:
            if mult != 1:
                raise CurveError("degenerate (non-simple) ramification point")
            ram.append(root)
        if len(ram) != r - 1:
            raise CurveError(f"expected {r-1} simple ramification points, got {len(ram)}")
        sheets = [Sheet(a + 1, False, Q[a], -Q[a]) for a in range(r)]
        a_consts = [_neg_div(lam_r, _prod([Q[c] - Q[a] for c in range(r) if c != a], b), b)
                    for a in range(r)]
    elif isinstance(family, CDO):
        r, P, Q, lam = family.r, list(family.P), list(family.Q), family.lam
        if r < 2:
            raise CurveError("rank must be at least 2")
        if len(P) != r or len(Q) != r - 1:
            raise CurveError("need r mass parameters and r-1 charges")
        _require_distinct(Q, b, "charges")
        for qa in Q:
            for pb in P:
                if b.is_zero(qa - pb):
                    raise CurveError("parameter set violates Q_a != P_b")
                if b.is_zero(qa + pb):
                    raise CurveError("Q_a = -P_b makes x drop degree")
        if b.is_zero(lam):
            raise CurveError("the scale must be nonzero")
        lam_r = _power(lam, r)
        num = _poly_from_roots(P, b, sign=-1)          # prod (P_a + zeta)
        den = _poly_from_roots(Q, b)                   # prod (Q_a - zeta)
        x = RatFGeneric(num.scale(-lam_r), den)
        y = RatFGeneric(Poly([b.zero, -b.one]) * den, num.scale(lam_r))
        ram_poly = num.deriv() * den - num * den.deriv()
        roots, resid = find_roots(ram_poly.coeffs, b)
        if resid.degree > 0:
            raise RootFindingError(
                "ramification points are irrational over this backend; "
                "use the arbitrary-precision backend")
        ram = []
        for root, mult in roots:
            if mult != 1:
                raise CurveError("parameter set has a non-simple ramification point")
            for qa in Q:
                if b.is_zero(root - qa):
                    raise CurveError("ramification point collides with a pole of x")
            ram.append(root)
        if len(ram) != 2 * r - 2:
            raise CurveError(f"expected {2*r-2} simple ramification points, got {len(ram)}")
        sheets = [Sheet(a + 1, False, Q[a], -Q[a]) for a in range(r - 1)]
        inf_res = _sum([p for p in P], b) + _sum([q for q in Q], b)
        sheets.append(Sheet(r, True, None, inf_res))
        a_consts = [_neg_div(lam_r * _prod([P[c] + Q[a] for c in range(r)], b),
                             _prod([Q[c] - Q[a] for c in range(r - 1) if c != a], b), b)
                    for a in range(r - 1)]
        a_consts.append(None)
    elif isinstance(family, GenericRational):
        x = RatFGeneric(Poly(list(family.x_num), b.is_zero), Poly(list(family.x_den), b.is_zero))
        if family.y_num is not None:
            y = RatFGeneric(Poly(list(family.y_num), b.is_zero), Poly(list(family.y_den), b.is_zero))
        else:
            y = RatFGeneric(Poly([b.zero, b.one]) * x.den, x.num)
        dx = _ratf_deriv(x)
        roots, resid = find_roots(dx.num.coeffs, b)
        if resid.degree > 0:
            raise RootFindingError("irrational ramification over this backend")
        ram = []
        for root, mult in roots:
            if mult != 1:
                raise CurveError("degenerate (non-simple) ramification point")
            if b.is_zero(x.den(root)):
                continue  # pole of x, not a branch point of the finite part
            if b.is_zero(y.den(root)):
                continue  # pole of omega_{0,1}: excluded from the recursion
            ram.append(root)
        sheets = []
        a_consts = []
        curve = SpectralCurve(family, b, x, y, ram, sheets, a_consts)
        if check:
            for i in range(len(ram)):
                curve.deck_involution(i, 6)
        return curve
    else:
        raise CurveError(f"unknown family {family!r}")

    curve = SpectralCurve(family, b, x, y, ram, sheets, a_consts)
    if check:
        _verify_curve(curve)
    return curve


def _verify_curve(curve):
    b = curve.backend
    # simple ramification: dx simple zero, d2x != 0 there (via deck involutions)
    for i in range(len(curve.ram)):
        for j in range(i + 1, len(curve.ram)):
            if b.is_zero(curve.ram[i] - curve.ram[j]):
                raise CurveError("two ramification points coincide")
        curve.deck_involution(i, 4)
    # residues of omega_{0,1} at the finite poles of x
    for sheet in curve.sheets:
        if sheet.at_infinity:
            continue
        res = omega01_residue_at_pole(curve, sheet.center)
        if not _is_small(res - sheet.residue, b):
            raise CurveError(
                f"omega_{{0,1}} residue at sheet {sheet.index} is {res}, "
                f"expected {sheet.residue}")


def omega01_residue_at_pole(curve, center):
    """Residue in zeta of y dx at a simple pole of x located at ``center``."""
    b = curve.backend
    ser_y = expand_ratf_at(curve.y, center, 2, b)
    ser_dx = expand_ratf_at(curve.dx, center, 2, b)
    return (ser_y * ser_dx).coeff(-1)


def _is_small(v, backend):
    return backend.is_zero(v)


def _require_distinct(vals, backend, label):
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if backend.is_zero(vals[i] - vals[j]):
                raise CurveError(f"{label} must be pairwise distinct")


def _prod(vals, backend):
    out = backend.one
    for v in vals:
        out = out * v
    return out


def _sum(vals, backend):
    out = backend.zero
    for v in vals:
        out = out + v
    return out


def _power(x, k):
    out = None
    for _ in range(k):
        out = x if out is None else out * x
    return out


def _neg_div(num, den, backend):
    return -(num / den)


# ---------------------------------------------------------------------------
# parameter parsing


def parse_family(kind, backend, r=None, q=None, p=None, lam=None,
                 x_num=None, x_den=None):
    """Build a family descriptor from string parameters (exact fractions or
    decimal strings, per the external interface)."""
    if kind == "half-sw":
        Q = tuple(backend.parse(s) for s in q)
        return HalfSW(int(r), Q, backend.parse(lam))
    if kind == "cdo":
        Q = tuple(backend.parse(s) for s in q)
        P = tuple(backend.parse(s) for s in p)
        return CDO(int(r), P, Q, backend.parse(lam))
    if kind == "generic":
        return GenericRational(tuple(backend.parse(s) for s in x_num),
                               tuple(backend.parse(s) for s in x_den))
    raise CurveError(f"unknown family kind {kind!r}")
