"""Whittaker-vector coefficients from correlator tables.

The coefficients are the 1/x-expansion coefficients of the correlators at the
poles of x: pull each variable back along the branch of the uniformiser over
x = infinity on the requested sheet and read off iterated-residue
coefficients,

    Phi_{g,n}[a; k] = (-1)^n Res ... Res  omega_{g,n} * prod x(zeta_i)^{k_i},

with the singular parts of the unstable (0,1) and (0,2) correlators removed
before extraction.  Because x y = zeta on these curves, the pullback of
y dx = zeta dln x along a branch is exactly -zeta(eps)/eps with eps = 1/x,
which keeps the (0,1) data in closed form.
"""

from __future__ import annotations

from .scalars import OrderError
from .series import Series
from .recursion import correlator


class WhittakerTable:
    """Map (g, n, sheets, k-exponents) -> coefficient, symmetric in slots."""

    def __init__(self, curve):
        self.curve = curve
        self.entries = {}

    @staticmethod
    def _canon(sheets, ks):
        pairs = sorted(zip(sheets, ks))
        return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)

    def put(self, g, sheets, ks, value):
        sh, kk = self._canon(sheets, ks)
        self.entries[(g, sh, kk)] = value

    def get(self, g, sheets, ks):
        sh, kk = self._canon(sheets, ks)
        return self.entries.get((g, sh, kk))

    def to_json(self):
        b = self.curve.backend
        items = []
        for (g, sh, kk) in sorted(self.entries):
            items.append({"g": g, "sheets": list(sh), "k": list(kk),
                          "value": b.to_json(self.entries[(g, sh, kk)])})
        return {"family": self.curve.describe(), "entries": items}


# ---------------------------------------------------------------------------
# branch pullbacks


class SheetData:
    """Cached pullback series along one branch over x = infinity.

    All series are in eps = 1/x.  ``w`` is the branch displacement (zeta - Q_a
    on finite sheets, u = 1/zeta on the infinity sheet) and ``pull(label)`` is
    the pullback of the pole-basis 1-form d(zeta)/(zeta-rho)^k divided by
    d(eps).
    """

    def __init__(self, curve, sheet_index, order):
        self.curve = curve
        self.sheet_index = sheet_index
        self.order = order
        self.sheet = curve.sheets[sheet_index - 1]
        self.w = curve.branch_series(sheet_index, order + 2)
        self.wp = self.w.deriv()
        self._pulls = {}
        self._recips = {}

    def _recip_power(self, tag, base_series, k):
        key = (tag, k)
        if key in self._recips:
            return self._recips[key]
        if k == 1:
            out = base_series.reciprocal()
        else:
            out = self._recip_power(tag, base_series, k - 1) * \
                self._recip_power(tag, base_series, 1)
        self._recips[key] = out
        return out

    def pull(self, label):
        """Pullback of d(zeta)/(zeta - rho_j)^k along the branch, over d(eps)."""
        if label in self._pulls:
            return self._pulls[label]
        b = self.curve.backend
        j, k = label
        rho = self.curve.ram[j]
        if not self.sheet.at_infinity:
            base = Series.const(b, "eps", self.sheet.center - rho, self.w.order) + self.w
            out = self._recip_power(("f", j), base, k) * self.wp
        else:
            # zeta = 1/u: d zeta/(zeta-rho)^k = -u^{k-2} du/(1 - rho u)^k
            one_minus = Series.const(b, "eps", b.one, self.w.order) - self.w.scale(rho)
            out = self._recip_power(("i", j), one_minus, k) * self.wp
            out = out * self.w.power(k - 2) if k >= 2 else \
                out * self.w.reciprocal()
            out = -out
        self._pulls[label] = out
        return out

    def omega01_regular(self):
        """Pullback of omega_{0,1}/d(eps) minus its singular sheet data.

        Finite sheets drop Q_a/eps; the infinity sheet also drops the
        second-order pole carried by the exponential prefactor data.
        """
        b = self.curve.backend
        if not self.sheet.at_infinity:
            # -(Q_a + w)/eps + Q_a/eps = -w/eps
            return -(self.w.shift(-1))
        # -zeta(eps)/eps = -1/(u(eps) eps);  subtract -c/eps^2 - J0/eps with
        # c = coefficient of the hbar^{-1} x prefactor, J0 = -(sum P + sum Q)
        inv_u = self.w.reciprocal()
        full = -(inv_u.shift(-1))
        c = self.exp_prefactor_coeff()  # omega01 ~ (1/c) dx + ... at infinity
        j0 = self.sheet.residue         # zeta-residue of omega01 is +(|P|+|Q|)
        sing = Series.from_coeffs(b, "eps", -2, [-c, j0] +
                                  [b.zero] * (full.order + 2))
        return full - sing.truncated(full.order)

    def exp_prefactor_coeff(self):
        """1/c with x ~ c zeta at infinity, i.e. the (-Lambda)^{-r} carried by
        the exponential prefactor of the infinity-sheet wave function."""
        b = self.curve.backend
        return b.one / self.w.coeff(1)  # u(eps) = c eps + ..., c = (-Lambda)^r

    def omega01_x_coefficient(self, k):
        """Coefficient of dx/x^{k+1} in omega_{0,1} on this sheet (k >= 1)."""
        reg = self.omega01_regular()
        return -reg.coeff(k - 1)


def sheet_data(curve, sheet_index, order):
    cache = getattr(curve, "_sheet_data_cache", None)
    if cache is None:
        cache = {}
        curve._sheet_data_cache = cache
    sd = cache.get(sheet_index)
    if sd is None or sd.order < order:
        sd = SheetData(curve, sheet_index, order)
        cache[sheet_index] = sd
    return sd


# ---------------------------------------------------------------------------
# bivariate helper for the regularised (0,2) data


class BiSeries:
    """Truncated bivariate power series in (e1, e2), total degree <= order."""

    def __init__(self, backend, terms, order):
        self.backend = backend
        self.order = order
        self.terms = {k: v for k, v in terms.items()
                      if not backend.is_zero(v) and k[0] + k[1] <= order}

    @classmethod
    def from_univar(cls, ser, slot, order):
        terms = {}
        for k, c in ser.known_coeff_items():
            if k < 0:
                raise OrderError("BiSeries requires power series input")
            key = (k, 0) if slot == 0 else (0, k)
            terms[key] = c
        return cls(ser.backend, terms, min(order, ser.order))

    def __add__(self, other):
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, self.backend.zero) + v
        return BiSeries(self.backend, terms, order)

    def __sub__(self, other):
        return self + other.scale(-self.backend.one)

    def scale(self, s):
        return BiSeries(self.backend, {k: v * s for k, v in self.terms.items()},
                        self.order)

    def __mul__(self, other):
        order = min(self.order + other.valuation(), other.order + self.valuation())
        terms = {}
        z = self.backend.zero
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                if i1 + i2 + j1 + j2 > order:
                    continue
                key = (i1 + i2, j1 + j2)
                terms[key] = terms.get(key, z) + a * b
        return BiSeries(self.backend, terms, order)

    def valuation(self):
        return min((i + j for (i, j) in self.terms), default=self.order + 1)

    def reciprocal(self):
        c0 = self.terms.get((0, 0))
        if c0 is None or self.backend.is_zero(c0):
            raise ZeroDivisionError("bivariate reciprocal needs a unit")
        inv0 = self.backend.one / c0
        u = (self - BiSeries(self.backend, {(0, 0): c0}, self.order)).scale(inv0)
        out = BiSeries(self.backend, {(0, 0): self.backend.one}, self.order)
        term = BiSeries(self.backend, {(0, 0): self.backend.one}, self.order)
        for _ in range(self.order):
            term = term * u
            if not term.terms:
                break
            out = out + term.scale(-self.backend.one if _ % 2 == 0 else self.backend.one)
        return out.scale(inv0)

    def coeff(self, i, j):
        if i + j > self.order:
            raise OrderError("bivariate coefficient beyond guaranteed order")
        return self.terms.get((i, j), self.backend.zero)

    def divide_diag(self):
        """Exact division by (e1 - e2); the input must vanish on the diagonal.

        Solves (e1 - e2) q = p coefficientwise: p[i,j] = q[i-1,j] - q[i,j-1].
        """
        b = self.backend
        q = {}
        order = self.order - 1

        def getq(i, j):
            return q.get((i, j), b.zero)

        for total in range(0, self.order + 1):
            for i in range(total, -1, -1):
                j = total - i
                # self[i,j] = q[i-1,j] - q[i,j-1]
                if i >= 1:
                    val = self.terms.get((i, j), b.zero) + getq(i, j - 1)
                    q[(i - 1, j)] = val
        # check consistency: rows with i = 0 must satisfy the relation too
        for total in range(0, self.order + 1):
            j = total
            lhs = self.terms.get((0, j), b.zero)
            rhs = -getq(0, j - 1)
            if not b.is_zero(lhs - rhs):
                raise OrderError("bivariate division: input does not vanish "
                                 "on the diagonal")
        return BiSeries(b, q, order)


def omega02_regularised(curve, sheet_a, sheet_b, order):
    """Pullback of omega_{0,2} minus the same-sheet singular part, as a
    BiSeries in (eps_1, eps_2) of total order ``order``."""
    b = curve.backend
    sda = sheet_data(curve, sheet_a, order + 4)
    sdb = sheet_data(curve, sheet_b, order + 4)
    wa = BiSeries.from_univar(sda.w.truncated(order + 2), 0, order + 2)
    wb = BiSeries.from_univar(sdb.w.truncated(order + 2), 1, order + 2)
    wpa = BiSeries.from_univar(sda.wp.truncated(order + 1), 0, order + 1)
    wpb = BiSeries.from_univar(sdb.wp.truncated(order + 1), 1, order + 1)
    if sheet_a == sheet_b:
        # (w(e1)-w(e2)) = (e1-e2) h;  omega02-pullback = w'(e1)w'(e2)/( (e1-e2)h )^2
        diff = wa - wb
        h = diff.divide_diag()
        hinv = h.reciprocal()
        hinv2 = hinv * hinv
        num = wpa * wpb * hinv2
        # subtract 1/(e1-e2)^2: regularised = (num - 1)/(e1-e2)^2
        one = BiSeries(b, {(0, 0): b.one}, num.order)
        red = (num - one).divide_diag().divide_diag()
        return red
    ca = sda.sheet.center
    cb = sdb.sheet.center
    if sda.sheet.at_infinity or sdb.sheet.at_infinity:
        # work with u = 1/zeta on the infinity side: omega02 is Moebius
        # invariant, d(1/u1)d(1/u2)/((1/u1)-(1/u2))^2 = du1 du2/(u1-u2)^2,
        # so mixed sheets need zeta_a vs 1/u_b
        if sda.sheet.at_infinity and sdb.sheet.at_infinity:
            raise ValueError("only one infinity sheet exists")
        if sda.sheet.at_infinity:
            return omega02_regularised(curve, sheet_b, sheet_a, order).transpose()
        # a finite, b infinite: zeta_b = 1/u_b:
        # 1/(zeta_a - 1/u_b)^2 * zeta_a' * d(1/u_b)/de2
        # = u_b^2/(zeta_a u_b - 1)^2 * zeta_a' * (-u_b'/u_b^2)
        za = BiSeries(b, {(0, 0): ca}, order + 2) + wa
        ub = wb
        upb = wpb
        denom = za * ub - BiSeries(b, {(0, 0): b.one}, order + 2)
        inv = denom.reciprocal()
        out = wpa * upb * inv * inv
        return out.scale(-b.one)
    za = BiSeries(b, {(0, 0): ca}, order + 2) + wa
    zb = BiSeries(b, {(0, 0): cb}, order + 2) + wb
    diff = za - zb
    inv = diff.reciprocal()
    return wpa * wpb * inv * inv


def _bs_transpose(self):
    return BiSeries(self.backend, {(j, i): v for (i, j), v in self.terms.items()},
                    self.order)


BiSeries.transpose = _bs_transpose


# ---------------------------------------------------------------------------
# coefficient extraction


def phi_entry(curve, cache, g, sheets, ks):
    """One Whittaker coefficient Phi_{g,n}[sheets; ks] (stable and unstable)."""
    b = curve.backend
    n = len(sheets)
    with b.context():
        if (g, n) == (0, 1):
            sd = sheet_data(curve, sheets[0], ks[0] + 2)
            return -sd.omega01_regular().coeff(ks[0] - 1)
        if (g, n) == (0, 2):
            reg = omega02_regularised(curve, sheets[0], sheets[1],
                                      ks[0] + ks[1])
            return reg.coeff(ks[0] - 1, ks[1] - 1)
        table = correlator(curve, g, n, cache)
        order = max(ks) + 2
        sds = [sheet_data(curve, a, order) for a in sheets]
        acc = b.zero
        from .recursion import _distinct_permutations
        for key, c in table.terms.items():
            for perm in _distinct_permutations(key):
                term = c
                dead = False
                for lab, sd, k in zip(perm, sds, ks):
                    coeff = sd.pull(lab).coeff(k - 1)
                    if b.is_zero(coeff):
                        dead = True
                        break
                    term = term * coeff
                if not dead:
                    acc = acc + term
        return acc * (-b.one if n % 2 else b.one)


def phi_table(curve, cache, g, n, k_max):
    """All coefficients with exponents up to k_max, over all sheet tuples."""
    from itertools import combinations_with_replacement, product
    out = WhittakerTable(curve)
    nsheets = curve.nsheets
    for sheets in combinations_with_replacement(range(1, nsheets + 1), n):
        for ks in product(range(1, k_max + 1), repeat=n):
            if list(zip(sheets, ks)) != sorted(zip(sheets, ks)):
                continue
            val = phi_entry(curve, cache, g, sheets, ks)
            if not curve.backend.is_zero(val):
                out.put(g, sheets, ks, val)
    return out


def phi_diagonal_aggregates(curve, cache, g, n, sheet, wmax):
    """Sums over exponent tuples at fixed total weight on one sheet:
    out[w] = sum_{k_1+...+k_n = w} Phi_{g,n}[sheet..sheet; k], 1 <= w <= wmax.

    These are exactly the coefficients needed by the principal
    specialisation; the diagonal sum is a single-variable convolution of the
    slot pullback series.
    """
    b = curve.backend
    with b.context():
        out = {}
        if (g, n) == (0, 1):
            sd = sheet_data(curve, sheet, wmax + 2)
            reg = sd.omega01_regular()
            for w in range(1, wmax + 1):
                out[w] = -reg.coeff(w - 1)
            return out
        if (g, n) == (0, 2):
            reg = omega02_regularised(curve, sheet, sheet, wmax)
            for w in range(2, wmax + 1):
                acc = b.zero
                for k1 in range(1, w):
                    acc = acc + reg.coeff(k1 - 1, w - k1 - 1)
                out[w] = acc
            return out
        if wmax < n:
            return out
        table = correlator(curve, g, n, cache)
        sd = sheet_data(curve, sheet, wmax + 2)
        from .recursion import _distinct_permutations
        acc = Series.zero(b, "eps", wmax - n)
        for key, c in table.terms.items():
            # same-variable product computes the diagonal convolution
            for perm in _distinct_permutations(key):
                prod = Series.const(b, "eps", c, wmax - n)
                for lab in perm:
                    prod = prod.mul_window(sd.pull(lab), wmax - n)
                acc = acc + prod
        sign = -b.one if n % 2 else b.one
        for w in range(n, wmax + 1):
            val = acc.coeff(w - n) * sign
            if not b.is_zero(val):
                out[w] = val
        return out
