"""Scalar arithmetic backends and exact polynomial/rational-function kernels.

Three backends share one arithmetic contract:

* ``ExactQ``       -- arbitrary-size rationals (``fractions.Fraction``),
* ``ExactQIndet``  -- rational functions of one named indeterminate over Q,
  used for computations with parameters shifted by a formal variable,
* ``BigC``         -- arbitrary-precision complex numbers (mpmath) with a
  declared working precision in bits.

Scalars are stored as raw payloads (Fraction, :class:`RatF`, ``mpmath.mpc``);
all three types support the Python arithmetic operators, so series and
polynomial code is backend-agnostic.  Mixing payloads of different backends
in one expression is an error, enforced where containers meet
(:func:`check_same_backend`).
"""

from __future__ import annotations

import contextlib
from fractions import Fraction

import mpmath


class BackendMismatch(TypeError):
    """Two values from different scalar backends met in one expression."""


class OrderError(ArithmeticError):
    """A coefficient was requested beyond the guaranteed truncation order."""


class RootFindingError(ArithmeticError):
    """Root isolation failed (clustered roots or unsupported field)."""


def parse_rational(text) -> Fraction:
    """Parse "p/q", integer, or terminating-decimal strings into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


# ---------------------------------------------------------------------------
# polynomials over a generic coefficient field


class Poly:
    """Dense univariate polynomial over any payload field.

    Coefficients are listed low degree first.  The zero polynomial has an
    empty coefficient list.  ``is_zero`` decides coefficient vanishing; it is
    exact for rational payloads and tolerance-based for floating payloads,
    supplied by the owning backend.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, is_zero=None):
        if is_zero is not None:
            while coeffs and is_zero(coeffs[-1]):
                coeffs = coeffs[:-1]
        else:
            while coeffs and not coeffs[-1]:
                coeffs = coeffs[:-1]
        self.coeffs = list(coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(map(str, self.coeffs)))

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
        return Poly(out)

    def scale(self, s):
        return Poly([c * s for c in self.coeffs])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def deriv(self):
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift(self, a):
        """Return p(x + a) via repeated synthetic division by (x - a)."""
        out = []
        work = list(self.coeffs)
        while work:
            quot = [0] * (len(work) - 1)
            carry = 0
            for i in reversed(range(1, len(work))):
                carry = work[i] + carry * a
                quot[i - 1] = carry
            out.append(work[0] + carry * a if len(work) > 1 else work[0])
            work = quot
        return Poly(out)

    def divmod(self, other, is_zero=None):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        if is_zero is None:
            is_zero = lambda c: not c
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly([]), Poly(rem, is_zero)
        quot = [0] * (dq + 1)
        lead = other.coeffs[-1]
        for i in reversed(range(dq + 1)):
            if len(rem) < len(other.coeffs) + i:
                continue
            c = rem[len(other.coeffs) + i - 1] / lead
            quot[i] = c
            for j, oc in enumerate(other.coeffs):
                rem[i + j] = rem[i + j] - c * oc
            rem = rem[: len(other.coeffs) + i - 1]
        return Poly(quot, is_zero), Poly(rem, is_zero)

    def monic(self, is_zero=None):
        if not self:
            return self
        lead = self.coeffs[-1]
        return Poly([c / lead for c in self.coeffs], is_zero)


def poly_gcd(a: Poly, b: Poly, is_zero=None) -> Poly:
    """Monic Euclidean gcd; valid over exact coefficient fields."""
    while b:
        a, b = b, a.divmod(b, is_zero)[1]
    return a.monic(is_zero)


class RatF:
    """Rational function num/den over Fraction coefficients, kept coprime.

    Instances double as the scalar payload of the ExactQIndet backend, so
    they implement full field arithmetic including mixed operations with
    Fraction and int.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if isinstance(num, (int, Fraction)):
            num = Poly([Fraction(num)])
        if den is None:
            den = Poly([Fraction(1)])
        elif isinstance(den, (int, Fraction)):
            den = Poly([Fraction(den)])
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce and num:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
            lead = den.coeffs[-1]
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        elif not num:
            den = Poly([Fraction(1)])
        self.num = num
        self.den = den

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RatF):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise BackendMismatch(f"cannot coerce {type(x).__name__} into Q(indet)")

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        try:
            other = RatF.coerce(other)
        except BackendMismatch:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = RatF.coerce(other)
        return RatF(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatF(self.num.scale(-1), self.den, reduce=False)

    def __sub__(self, other):
        return self + (-RatF.coerce(other))

    def __rsub__(self, other):
        return RatF.coerce(other) + (-self)

    def __mul__(self, other):
        other = RatF.coerce(other)
        return RatF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatF.coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatF(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatF.coerce(other) / self

    def __pow__(self, k):
        out = RatF(1)
        base = self
        if k < 0:
            base, k = RatF(1) / self, -k
        for _ in range(k):
            out = out * base
        return out

    def eval(self, x):
        d = self.den(x)
        if not d:
            raise ZeroDivisionError("pole of rational function")
        return self.num(x) / d

    def taylor(self, order, at=Fraction(0)):
        """Coefficients of the expansion around ``at`` up to ``order``; the
        denominator must not vanish there."""
        num = self.num.shift(at)
        den = self.den.shift(at)
        if not den.coeffs or not den.coeffs[0]:
            raise ZeroDivisionError("expansion at a pole")
        out = []
        ncs = num.coeffs + [Fraction(0)] * (order + 1)
        dcs = den.coeffs + [Fraction(0)] * (order + 1)
        d0 = dcs[0]
        for k in range(order + 1):
            acc = ncs[k] if k < len(num.coeffs) else Fraction(0)
            for j in range(1, k + 1):
                if j < len(den.coeffs):
                    acc -= dcs[j] * out[k - j]
            out.append(acc / d0)
        return out

    def __repr__(self):
        def side(p):
            terms = []
            for i, c in enumerate(p.coeffs):
                if not c:
                    continue
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append(f"{c}*h" if c != 1 else "h")
                else:
                    terms.append(f"{c}*h^{i}" if c != 1 else f"h^{i}")
            return " + ".join(terms) if terms else "0"

        if self.den.degree == 0 and self.den.coeffs == [Fraction(1)]:
            return side(self.num)
        return f"({side(self.num)})/({side(self.den)})"


# ---------------------------------------------------------------------------
# backends


class ExactQ:
    """Exact rational arithmetic on fractions.Fraction payloads."""

    kind = "exactq"

    @property
    def key(self):
        return ("Q",)

    zero = Fraction(0)
    one = Fraction(1)

    def parse(self, text):
        return parse_rational(text)

    def from_fraction(self, q):
        return Fraction(q)

    def is_zero(self, x):
        return x == 0

    def context(self):
        return contextlib.nullcontext()

    def to_json(self, x):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)

    def __repr__(self):
        return "ExactQ"


class ExactQIndet:
    """Rational functions of one named indeterminate over the rationals."""

    kind = "exactqindet"

    def __init__(self, name="h"):
        self.name = name

    @property
    def key(self):
        return ("Qindet", self.name)

    @property
    def zero(self):
        return RatF(0)

    @property
    def one(self):
        return RatF(1)

    @property
    def gen(self):
        return RatF(Poly([Fraction(0), Fraction(1)]))

    def parse(self, text):
        return RatF(parse_rational(text))

    def from_fraction(self, q):
        return RatF(Fraction(q))

    def is_zero(self, x):
        return not RatF.coerce(x)

    def context(self):
        return contextlib.nullcontext()

    def to_json(self, x):
        return repr(RatF.coerce(x))

    def __repr__(self):
        return f"ExactQIndet({self.name!r})"


class BigC:
    """Arbitrary-precision complex arithmetic at a fixed working precision.

    Operations run under an mpmath context carrying ``prec`` bits plus guard
    digits; ``is_zero`` uses a tolerance of 2^(-3 prec/4) so that structural
    cancellations are recognised without masking genuine small values at the
    declared precision.
    """

    kind = "bigc"

    def __init__(self, prec=256):
        self.prec = int(prec)
        self._tol = mpmath.mpf(2) ** (-(3 * self.prec // 4))

    @property
    def key(self):
        return ("C", self.prec)

    @property
    def zero(self):
        return mpmath.mpc(0)

    @property
    def one(self):
        return mpmath.mpc(1)

    def parse(self, text):
        with self.context():
            if isinstance(text, (int, Fraction)):
                q = Fraction(text)
                return mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)
            s = str(text).strip()
            if "/" in s:
                q = Fraction(s)
                return mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)
            return mpmath.mpc(mpmath.mpf(s))

    def from_fraction(self, q):
        with self.context():
            return mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)

    def is_zero(self, x):
        return abs(x) <= self._tol

    def context(self):
        return mpmath.workprec(self.prec + 16)

    def to_json(self, x):
        x = mpmath.mpc(x)
        return [mpmath.nstr(x.real, self.prec // 3, strip_zeros=False),
                mpmath.nstr(x.imag, self.prec // 3, strip_zeros=False),
                self.prec]

    def __repr__(self):
        return f"BigC({self.prec})"


EXACTQ = ExactQ()


def check_same_backend(a, b):
    if a.key != b.key:
        raise BackendMismatch(f"backend mismatch: {a!r} vs {b!r}")


def payload_is_zero(x, backend):
    """Zero test dispatching on payload shape (scalars or nested series)."""
    if hasattr(x, "is_identically_zero"):
        return x.is_identically_zero()
    return backend.is_zero(x)


# ---------------------------------------------------------------------------
# root finding


def _rational_roots(coeffs):
    """All rational roots (with multiplicity) of a Fraction polynomial,
    plus the residual factor with no rational roots."""
    p = Poly(list(coeffs))
    if not p:
        raise RootFindingError("zero polynomial")
    # strip roots at 0
    roots = []
    while p.coeffs and not p.coeffs[0]:
        roots.append(Fraction(0))
        p = Poly(p.coeffs[1:])
    # clear denominators to integer coefficients
    denom_lcm = 1
    for c in p.coeffs:
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in p.coeffs]
    content = 0
    for c in ints:
        content = _gcd(content, abs(c))
    if content > 1:
        ints = [c // content for c in ints]
    p = Poly([Fraction(c) for c in ints])
    while p.degree >= 1:
        found = None
        a0, an = ints[0], ints[-1]
        for r in _divisors(abs(a0)):
            for s in _divisors(abs(an)):
                for sign in (1, -1):
                    cand = Fraction(sign * r, s)
                    if p(cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        lin = Poly([-found, Fraction(1)])
        p = p.divmod(lin)[0]
        ints = [c for c in p.coeffs]
        # renormalise to integers for the next pass
        denom_lcm = 1
        for c in p.coeffs:
            denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
        ints = [int(c * denom_lcm) for c in p.coeffs]
        if not ints:
            break
    grouped = {}
    for r in roots:
        grouped[r] = grouped.get(r, 0) + 1
    return sorted(grouped.items()), p


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    if n == 0:
        return [0]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def find_roots(coeffs, backend):
    """Roots of a univariate polynomial given low-first coefficients.

    Returns ``(roots, residual)`` where roots is a list of (root,
    multiplicity) pairs.  ExactQ reports every rational root exactly and the
    residual rational-root-free factor; BigC returns all complex roots with
    certified residuals and pairwise separation; ExactQIndet handles degrees
    up to two when the discriminant is a perfect square in Q(indet).
    """
    if isinstance(backend, ExactQ):
        return _rational_roots([Fraction(c) for c in coeffs])
    if isinstance(backend, ExactQIndet):
        cs = [RatF.coerce(c) for c in coeffs]
        while cs and backend.is_zero(cs[-1]):
            cs.pop()
        if not cs:
            raise RootFindingError("zero polynomial")
        deg = len(cs) - 1
        if deg == 0:
            return [], Poly([cs[0]])
        if deg == 1:
            return [(-cs[0] / cs[1], 1)], Poly([backend.one])
        if deg == 2:
            a, b, c = cs[2], cs[1], cs[0]
            disc = b * b - 4 * a * c
            root = _ratf_sqrt(disc)
            if root is None:
                raise RootFindingError("irrational ramification data over Q(indet)")
            r1 = (-b + root) / (2 * a)
            r2 = (-b - root) / (2 * a)
            if r1 == r2:
                return [(r1, 2)], Poly([backend.one])
            return [(r1, 1), (r2, 1)], Poly([backend.one])
        raise RootFindingError("degree > 2 over Q(indet) is unsupported")
    if isinstance(backend, BigC):
        with self_context(backend):
            cs = [mpmath.mpc(c) for c in coeffs]
            while cs and backend.is_zero(cs[-1]):
                cs.pop()
            if not cs:
                raise RootFindingError("zero polynomial")
            if len(cs) == 1:
                return [], Poly([cs[0]])
            rts = mpmath.polyroots(list(reversed(cs)), maxsteps=200, extraprec=backend.prec)
            tol = mpmath.mpf(2) ** (-(backend.prec // 2))
            scale = max(abs(c) for c in cs)
            pol = Poly(cs)
            for r in rts:
                if abs(pol(r)) > tol * scale * max(1, abs(r)) ** len(cs):
                    raise RootFindingError(f"uncertified root {r}")
            for i in range(len(rts)):
                for j in range(i + 1, len(rts)):
                    if abs(rts[i] - rts[j]) < tol:
                        raise RootFindingError(
                            "root cluster tighter than tolerance; raise precision "
                            "or reject the parameter set")
            return [(mpmath.mpc(r), 1) for r in rts], Poly([backend.one])
    raise BackendMismatch(f"unknown backend {backend!r}")


def self_context(backend):
    return backend.context()


def _ratf_sqrt(f: RatF):
    """Exact square root in Q(indet) when it exists, else None."""
    if not f:
        return RatF(0)
    num = _poly_sqrt(f.num)
    den = _poly_sqrt(f.den)
    if num is None or den is None:
        return None
    return RatF(num, den)


def _poly_sqrt(p: Poly):
    if not p:
        return Poly([])
    if p.degree % 2:
        return None
    lead = p.coeffs[-1]
    if lead < 0:
        return None
    import math

    def frac_sqrt(q):
        if q < 0:
            return None
        rn = math.isqrt(q.numerator)
        rd = math.isqrt(q.denominator)
        if rn * rn == q.numerator and rd * rd == q.denominator:
            return Fraction(rn, rd)
        return None

    lead_rt = frac_sqrt(lead)
    if lead_rt is None:
        return None
    half = p.degree // 2
    out = [Fraction(0)] * (half + 1)
    out[half] = lead_rt
    for i in reversed(range(half)):
        # match coefficient of degree i + half
        acc = p.coeffs[i + half]
        for j in range(i + 1, half):
            if 0 <= i + half - j <= half:
                acc -= out[j] * out[i + half - j]
        out[i] = acc / (2 * lead_rt)
    cand = Poly(out)
    if cand * cand == p:
        return cand
    return None
