"""Truncated Laurent series with explicit guaranteed-order bookkeeping.

Every series knows the highest exponent whose coefficient it can vouch for;
coefficients beyond it are *unknown*, not zero.  Arithmetic propagates orders
by the worst-case rule and raises :class:`~toprec.scalars.OrderError` rather
than silently emitting unjustified coefficients.

The same class doubles as the hbar-grading container (a Laurent series whose
coefficients may themselves be Series), and :class:`MSeries` provides the
small multivariate engine used by the fiberwise constraint checks: one
distinguished Laurent variable plus jointly-truncated power-series variables.
"""

from __future__ import annotations

from .scalars import OrderError, BackendMismatch, check_same_backend, payload_is_zero


class Series:
    """Laurent series sum_{k=val}^{order} c_k var^k with guaranteed order.

    ``coeffs[i]`` is the coefficient of ``var**(val+i)``; the list always has
    length ``order - val + 1``.  A series that is zero up to its order has an
    empty coefficient list and ``val = order + 1``.
    """

    __slots__ = ("backend", "var", "val", "coeffs", "order")

    def __init__(self, backend, var, val, coeffs, order):
        coeffs = list(coeffs)
        if len(coeffs) != order - val + 1:
            raise ValueError("coefficient window does not match declared orders")
        while coeffs and payload_is_zero(coeffs[0], backend):
            coeffs.pop(0)
            val += 1
        self.backend = backend
        self.var = var
        self.val = val if coeffs else order + 1
        self.coeffs = coeffs
        self.order = order

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, backend, var, order):
        return cls(backend, var, order + 1, [], order)

    @classmethod
    def const(cls, backend, var, value, order):
        return cls(backend, var, 0, [value] + [backend.zero] * order, order)

    @classmethod
    def gen(cls, backend, var, order):
        """The series "var" itself, known through ``order``."""
        return cls(backend, var, 1, [backend.one] + [backend.zero] * (order - 1), order)

    @classmethod
    def from_coeffs(cls, backend, var, val, coeffs, order=None):
        if order is None:
            order = val + len(coeffs) - 1
        return cls(backend, var, val, coeffs, order)

    # -- inspection --------------------------------------------------------

    def is_identically_zero(self):
        return not self.coeffs

    def __bool__(self):
        return not self.is_identically_zero()

    def coeff(self, k):
        """Coefficient of var^k; raises if k exceeds the guaranteed order."""
        if k > self.order:
            raise OrderError(
                f"coefficient of {self.var}^{k} requested but only guaranteed "
                f"through {self.var}^{self.order}")
        if not self.coeffs or k < self.val:
            return self.backend.zero
        return self.coeffs[k - self.val]

    def known_coeff_items(self):
        return [(self.val + i, c) for i, c in enumerate(self.coeffs)]

    def __repr__(self):
        terms = ", ".join(f"{self.var}^{k}: {c}" for k, c in self.known_coeff_items()
                          if not payload_is_zero(c, self.backend))
        return f"Series({terms or '0'} + O({self.var}^{self.order + 1}))"

    def _check(self, other):
        if not isinstance(other, Series):
            raise BackendMismatch(f"cannot combine Series with {type(other).__name__}")
        if self.var != other.var:
            raise BackendMismatch(f"coordinate mismatch: {self.var} vs {other.var}")
        check_same_backend(self.backend, other.backend)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        self._check(other)
        order = min(self.order, other.order)
        if self.is_identically_zero():
            return other.truncated(order)
        if other.is_identically_zero():
            return self.truncated(order)
        val = min(self.val, other.val)
        coeffs = []
        for k in range(val, order + 1):
            a = self.coeffs[k - self.val] if self.val <= k <= self.order and k - self.val < len(self.coeffs) else self.backend.zero
            b = other.coeffs[k - other.val] if other.val <= k <= other.order and k - other.val < len(other.coeffs) else self.backend.zero
            coeffs.append(a + b)
        return Series(self.backend, self.var, val, coeffs, order)

    def __neg__(self):
        return Series(self.backend, self.var, self.val, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        self._check(other)
        if self.is_identically_zero() or other.is_identically_zero():
            # order of the product window still obeys the worst-case rule
            va = self.val if self.coeffs else self.order + 1
            vb = other.val if other.coeffs else other.order + 1
            return Series.zero(self.backend, self.var,
                               min(self.order + vb, other.order + va))
        order = min(self.order + other.val, other.order + self.val)
        val = self.val + other.val
        n = order - val + 1
        coeffs = [self.backend.zero] * n
        for i, a in enumerate(self.coeffs):
            if payload_is_zero(a, self.backend):
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= n:
                    break
                coeffs[i + j] = coeffs[i + j] + a * b
        return Series(self.backend, self.var, val, coeffs, order)

    def mul_window(self, other, hi):
        """Product truncated to exponents <= hi (cheaper than full __mul__)."""
        self._check(other)
        if self.is_identically_zero() or other.is_identically_zero():
            va = self.val if self.coeffs else self.order + 1
            vb = other.val if other.coeffs else other.order + 1
            return Series.zero(self.backend, self.var,
                               min(self.order + vb, other.order + va, hi))
        order = min(self.order + other.val, other.order + self.val, hi)
        val = self.val + other.val
        if val > order:
            return Series.zero(self.backend, self.var, order)
        n = order - val + 1
        coeffs = [self.backend.zero] * n
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            if payload_is_zero(a, self.backend):
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                coeffs[i + j] = coeffs[i + j] + a * b
        return Series(self.backend, self.var, val, coeffs, order)

    def scale(self, s):
        return Series(self.backend, self.var, self.val,
                      [c * s for c in self.coeffs], self.order)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by var^k."""
        return Series(self.backend, self.var, self.val + k, list(self.coeffs),
                      self.order + k)

    def truncated(self, order):
        if order >= self.order:
            if order > self.order:
                raise OrderError("cannot extend a series beyond its guaranteed order")
            return self
        if self.is_identically_zero() or self.val > order:
            return Series.zero(self.backend, self.var, order)
        return Series(self.backend, self.var, self.val,
                      self.coeffs[: order - self.val + 1], order)

    def reciprocal(self):
        """Multiplicative inverse; the leading coefficient must be invertible."""
        if self.is_identically_zero():
            raise ZeroDivisionError("reciprocal of identically-zero series")
        v = self.val
        lead = self.coeffs[0]
        rel_order = self.order - v          # relative order of the unit part
        inv_lead = self.backend.one / lead if not hasattr(lead, "is_identically_zero") else lead.reciprocal()
        # u = self / lead / var^v - 1 has valuation >= 1
        unit = [c * inv_lead for c in self.coeffs]
        out = [self.backend.zero] * (rel_order + 1)
        out[0] = self.backend.one
        # sequential inversion: out * unit = 1 mod var^{rel_order+1}
        for k in range(1, rel_order + 1):
            acc = self.backend.zero
            for j in range(1, k + 1):
                if j < len(unit):
                    acc = acc + unit[j] * out[k - j]
            out[k] = -acc
        out = [c * inv_lead for c in out]
        return Series(self.backend, self.var, -v, out, rel_order - v)

    def __truediv__(self, other):
        return self * other.reciprocal()

    def power(self, k):
        if k < 0:
            return self.reciprocal().power(-k)
        if k == 0:
            return Series.const(self.backend, self.var, self.backend.one, self.order)
        acc = self
        for _ in range(k - 1):
            acc = acc * self
        return acc

    def compose(self, inner):
        """self(inner(var)); inner must have valuation >= 1."""
        self._check_compose(inner)
        if inner.coeffs and inner.val < 1:
            raise OrderError("composition requires inner valuation >= 1")
        vb = inner.val if inner.coeffs else inner.order + 1
        order = min(inner.order, (self.order + 1) * max(vb, 1) - 1)
        if self.is_identically_zero():
            return Series.zero(self.backend, self.var, order)
        if self.val < 0:
            raise OrderError("Laurent composition is not supported; split off the "
                             "polar part first")
        # Horner from the top
        acc = Series.zero(self.backend, self.var, order)
        innert = inner.truncated(order)
        for k in range(self.order, self.val - 1, -1):
            acc = (acc * innert).truncated(order)
            c = self.coeffs[k - self.val]
            if not payload_is_zero(c, self.backend):
                acc = acc + Series.const(self.backend, self.var, c, order)
        for _ in range(self.val):
            acc = (acc * innert).truncated(order)
        return acc.truncated(order)

    def _check_compose(self, inner):
        check_same_backend(self.backend, inner.backend)

    def revert(self):
        """Compositional inverse of a series with valuation exactly 1."""
        if self.is_identically_zero() or self.val != 1:
            raise OrderError("reversion requires valuation exactly 1")
        order = self.order
        import math
        pad = 2 * max(4, int(math.log2(max(order, 2))) + 2)
        work = order + pad
        b = self.backend
        f = Series(b, self.var, self.val,
                   list(self.coeffs) + [b.zero] * pad, work)
        # Padding with zeros overstates f's order; harmless for reversion to
        # the original order since coefficients beyond it never feed back into
        # the low-order part of the inverse (inner valuation is 1).
        c1 = self.coeffs[0]
        inv_c1 = b.one / c1 if not hasattr(c1, "is_identically_zero") else c1.reciprocal()
        g = Series(b, self.var, 1, [inv_c1] + [b.zero] * (work - 1), work)
        x = Series.gen(b, self.var, work)
        fprime = f.deriv()
        known = 1
        while known < order:
            known = min(2 * known, order)
            delta = (f.compose(g) - x.truncated(g.order)) * fprime.compose(g).reciprocal()
            g = (g - delta).truncated(min(g.order, delta.order))
        return g.truncated(order)

    def deriv(self):
        if self.is_identically_zero():
            return Series.zero(self.backend, self.var, self.order - 1)
        out = {}
        for k, c in self.known_coeff_items():
            if k != 0:
                out[k - 1] = c * k
        lo = min(out) if out else self.order
        window = [out.get(k, self.backend.zero) for k in range(lo, self.order)]
        return Series(self.backend, self.var, lo, window, self.order - 1)

    def antideriv(self):
        """Term-wise antiderivative with zero constant; no var^{-1} term allowed."""
        out = {}
        for k, c in self.known_coeff_items():
            if k == -1:
                if not payload_is_zero(c, self.backend):
                    raise OrderError("antiderivative of a series with a residue term")
                continue
            out[k + 1] = c * (self.backend.one / (k + 1))
        order = self.order + 1
        if not out:
            return Series.zero(self.backend, self.var, order)
        lo = min(out)
        window = [out.get(k, self.backend.zero) for k in range(lo, order + 1)]
        return Series(self.backend, self.var, lo, window, order)

    def eval_at(self, point):
        """Sum the known window at a numeric point (no tail estimate)."""
        acc = self.backend.zero
        for k, c in self.known_coeff_items():
            acc = acc + c * point ** k
        return acc

    def map_coeffs(self, fn):
        return Series(self.backend, self.var, self.val,
                      [fn(c) for c in self.coeffs], self.order)


def series_exp(s: Series) -> Series:
    """exp of a series with valuation >= 1 (so the sum is x-adically finite)."""
    if s.coeffs and s.val < 1:
        raise OrderError("series_exp requires valuation >= 1")
    order = s.order
    one = s.backend.one
    out = Series.const(s.backend, s.var, one, order)
    term = Series.const(s.backend, s.var, one, order)
    for k in range(1, order + 1):
        term = (term * s).truncated(order).scale(one / k)
        if term.is_identically_zero():
            break
        out = out + term
    return out.truncated(order)


def series_log1p(s: Series) -> Series:
    """log(1 + s) for s with valuation >= 1."""
    if s.coeffs and s.val < 1:
        raise OrderError("series_log1p requires valuation >= 1")
    order = s.order
    one = s.backend.one
    out = Series.zero(s.backend, s.var, order)
    term = None
    sign = 1
    for k in range(1, order + 1):
        term = s if term is None else (term * s).truncated(order)
        if term.is_identically_zero():
            break
        out = out + term.scale((one if sign > 0 else -one) / k)
        sign = -sign
    return out.truncated(order)


def expand_ratf_at(ratf, center, order, backend, var="t"):
    """Laurent expansion of a rational function p/q around ``center``.

    Works at regular points and poles; the result's valuation reflects the
    pole order.  ``center`` is a scalar payload of the backend.
    """
    num = ratf.num.shift(center)
    den = ratf.den.shift(center)
    nz = lambda c: not backend.is_zero(c)
    vnum = 0
    while vnum < len(num.coeffs) and not nz(num.coeffs[vnum]):
        vnum += 1
    if vnum == len(num.coeffs):
        return Series.zero(backend, var, order)
    vden = 0
    while vden < len(den.coeffs) and not nz(den.coeffs[vden]):
        vden += 1
    val = vnum - vden
    rel = order - val
    nser = Series(backend, var, 0, (num.coeffs[vnum:] + [backend.zero] * (rel + 1))[: rel + 1], rel)
    dser = Series(backend, var, 0, (den.coeffs[vden:] + [backend.zero] * (rel + 1))[: rel + 1], rel)
    out = nser * dser.reciprocal()
    return out.shift(val).truncated(order)


# ---------------------------------------------------------------------------
# multivariate series: one Laurent variable v plus power-series variables u_i


class MSeries:
    """Series in a Laurent variable and n jointly-truncated u-variables.

    Keys are ``(v_exponent, u_1, ..., u_n)``.  Guarantees carried:

    * ``v_order``: coefficients with v-exponent above it are unknown;
    * ``u_order``: coefficients with total u-degree above it are unknown;
    * ``balance``: proven lower bound for (v_exponent + total u-degree),
      which bounds how deep the Laurent tail can reach at fixed u-degree.
    """

    __slots__ = ("backend", "n", "terms", "v_order", "u_order", "balance")

    def __init__(self, backend, n, terms, v_order, u_order, balance):
        self.backend = backend
        self.n = n
        self.terms = {k: c for k, c in terms.items() if not backend.is_zero(c)}
        for k in self.terms:
            if k[0] + sum(k[1:]) < balance:
                raise OrderError("term violates declared balance bound")
            if k[0] > v_order or sum(k[1:]) > u_order:
                raise OrderError("term outside declared truncation window")
        self.v_order = v_order
        self.u_order = u_order
        self.balance = balance

    @classmethod
    def zero(cls, backend, n, v_order, u_order, balance=0):
        return cls(backend, n, {}, v_order, u_order, balance)

    @classmethod
    def const(cls, backend, n, value, v_order, u_order):
        key = (0,) + (0,) * n
        return cls(backend, n, {key: value}, v_order, u_order, 0)

    @classmethod
    def from_univariate(cls, series: Series, n, slot, v_order, u_order):
        """Lift a univariate series into variable ``slot`` (0 = v, i>=1 = u_i)."""
        terms = {}
        balance = 0
        for k, c in series.known_coeff_items():
            if series.backend.is_zero(c):
                continue
            key = [0] * (n + 1)
            key[slot] = k
            if slot == 0:
                if k > v_order:
                    continue
            else:
                if k < 0:
                    raise OrderError("u-variables are power-series variables")
                if k > u_order:
                    continue
            terms[tuple(key)] = c
            balance = min(balance, key[0] + sum(key[1:]))
        vo = v_order if slot != 0 else min(v_order, series.order)
        uo = u_order if slot == 0 else min(u_order, series.order)
        return cls(series.backend, n, terms, vo, uo, balance)

    def _vval(self):
        return min((k[0] for k in self.terms), default=0)

    def _uval(self):
        return min((sum(k[1:]) for k in self.terms), default=0)

    def __add__(self, other):
        check_same_backend(self.backend, other.backend)
        if self.n != other.n:
            raise BackendMismatch("u-variable count mismatch")
        v_order = min(self.v_order, other.v_order)
        u_order = min(self.u_order, other.u_order)
        balance = min(self.balance, other.balance)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, self.backend.zero) + c
        terms = {k: c for k, c in terms.items()
                 if k[0] <= v_order and sum(k[1:]) <= u_order}
        return MSeries(self.backend, self.n, terms, v_order, u_order, balance)

    def __neg__(self):
        return MSeries(self.backend, self.n, {k: -c for k, c in self.terms.items()},
                       self.v_order, self.u_order, self.balance)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return MSeries(self.backend, self.n, {k: c * s for k, c in self.terms.items()},
                       self.v_order, self.u_order, self.balance)

    def __mul__(self, other):
        check_same_backend(self.backend, other.backend)
        if self.n != other.n:
            raise BackendMismatch("u-variable count mismatch")
        v_order = min(self.v_order + other._vval(), other.v_order + self._vval())
        u_order = min(self.u_order + other._uval(), other.u_order + self._uval())
        balance = self.balance + other.balance
        terms = {}
        z = self.backend.zero
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                if key[0] > v_order or sum(key[1:]) > u_order:
                    continue
                terms[key] = terms.get(key, z) + ca * cb
        return MSeries(self.backend, self.n, terms, v_order, u_order, balance)

    def v_coefficients(self):
        """Map v-exponent -> dict of u-multidegree -> coefficient."""
        out = {}
        for k, c in self.terms.items():
            out.setdefault(k[0], {})[k[1:]] = c
        return out
