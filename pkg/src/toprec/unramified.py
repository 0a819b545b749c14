"""The unramified-cover recursion: an independent route to the coefficients.

The finite-scale coefficients can also be produced without ever touching the
ramification points, by solving the graded Whittaker constraints directly on
the disjoint union of r punctured discs (the fibre of x over infinity).
Correlators here carry half-integer genus (doubled integers internally) and a
grading parameter T; the coefficients F_{g,n}[a;k] vanish when r(k_1+...+k_n)
exceeds 2g, which keeps every table finite.

The extraction formula divides the hat-combination sums by the exact
first-order data prod_{b != a}(Q_b - Q_a) (dx/x)^{r-1}; the projections are
coefficient windows in v = 1/x.  The homogeneity relation then converts the
graded coefficients to the finite-scale ones:

    Phi_{g,n}[a;k] = Lambda^{r |k|} F_{g + |k| r/2, n}[a;k] at T = 1.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement

from .scalars import OrderError
from .series import MSeries
from .constraints import omega_combination


BIG = 10 ** 9  # sentinel order for exactly-known (complete) series


class UnramifiedBlocks:
    """Correlator blocks on the unramified cover: w_{0,1} is exactly
    Q_a dx/x, w_{0,2} is purely diagonal, and stable blocks come from the
    memoised F-tables.

    Everything here is known in closed form or as a finite table, so the
    blocks carry sentinel guaranteed orders; only the diagonal second-order
    part is truncated (in the spectator degree).
    """

    def __init__(self, engine, u_order, nu):
        self.engine = engine
        self.b = engine.backend
        self.v_order = BIG
        self.u_order = u_order
        self.nu = nu
        self.genus_step = 1  # half-integer genera allowed

    def phi01(self, sheet, slot):
        b = self.b
        key = (0,) + (0,) * self.nu
        return MSeries(b, self.nu, {key: self.engine.Q[sheet - 1]}, BIG, BIG, 0)

    def phi02_fiber_fiber(self, sheet_a, sheet_b):
        # distinct sheets of one fibre never meet the diagonal pole
        return MSeries.zero(self.b, self.nu, BIG, BIG)

    def phi02_fiber_ext(self, sheet_a, sheet_b, uslot):
        b = self.b
        if sheet_a != sheet_b:
            return MSeries.zero(b, self.nu, BIG, BIG)
        terms = {}
        for m in range(0, self.u_order):
            key = [0] * (self.nu + 1)
            key[0] = -(m + 1)
            key[uslot] = m + 1
            terms[tuple(key)] = b.one * (m + 1)
        return MSeries(b, self.nu, terms, BIG, self.u_order, 0)

    def stable_block(self, g2, fiber_sheets, ext):
        b = self.b
        m = len(fiber_sheets) + len(ext)
        table = self.engine.table(g2, m)
        terms = {}
        slots = [(0, a) for a in fiber_sheets] + \
                [(uslot, a) for uslot, a in sorted(ext.items())]
        sheets = tuple(s for _, s in slots)
        for ks, val in self.engine.columns(g2, sheets):
            key = [0] * (self.nu + 1)
            for (sl, _), k in zip(slots, ks):
                key[sl] += k
            key = tuple(key)
            terms[key] = terms.get(key, b.zero) + val
        return MSeries(b, self.nu, terms, BIG, BIG, 0)


class UnramifiedCorrelators:
    """Memoised F-tables of the graded constraints for a half Seiberg-Witten
    charge vector Q over any scalar backend."""

    def __init__(self, r, Q, backend, T=None):
        if len(Q) != r:
            raise ValueError("need exactly r charges")
        self.r = r
        self.Q = list(Q)
        self.backend = backend
        self.T = backend.one if T is None else T
        self._tables = {}
        self._columns = {}

    # -- table access --------------------------------------------------------

    def table(self, g2, m):
        """dict[(sheets, ks) canonical] -> value for w_{g2/2, m}; empty when
        the correlator vanishes or is unstable."""
        if g2 - 2 + m <= 0 or g2 < 0:
            return {}
        key = (g2, m)
        if key not in self._tables:
            self._tables[key] = None  # cycle guard
            self._tables[key] = self._compute(g2, m)
        if self._tables[key] is None:
            raise OrderError("unramified recursion cycled; grading broken")
        return self._tables[key]

    def columns(self, g2, sheets):
        """All (ks, value) with the given ordered sheet assignment."""
        key = (g2, sheets)
        if key not in self._columns:
            m = len(sheets)
            out = []
            budget = g2 // self.r
            if budget >= m:
                for ks in _bounded_tuples(m, budget):
                    val = self.lookup(g2, sheets, ks)
                    if val is not None and not self.backend.is_zero(val):
                        out.append((ks, val))
            self._columns[key] = out
        return self._columns[key]

    def lookup(self, g2, sheets, ks):
        tab = self.table(g2, len(sheets))
        pairs = tuple(sorted(zip(sheets, ks)))
        return tab.get(pairs)

    def coefficient(self, g2, sheets, ks):
        val = self.lookup(g2, sheets, ks)
        return self.backend.zero if val is None else val

    # -- the recursion -------------------------------------------------------

    def _compute(self, g2, m):
        b = self.backend
        n = m - 1
        budget = g2 // self.r
        if budget < m:
            return {}
        kw = budget + 1  # one past the vanishing bound, asserted zero below
        found = {}
        for ext in combinations_with_replacement(range(1, self.r + 1), n):
            for a in range(1, self.r + 1):
                ms = self._extract(g2, a, ext, kw)
                vc = ms.v_coefficients()
                for v, row in vc.items():
                    for udeg, val in row.items():
                        if b.is_zero(val):
                            continue
                        if v < 1:
                            raise OrderError(
                                f"unramified extraction produced a stray "
                                f"x^{-v} term at ({g2},{m})")
                        ks = (v,) + udeg
                        if self.r * sum(ks) > g2:
                            raise OrderError(
                                f"vanishing bound violated at ({g2},{m}): "
                                f"k = {ks}, value {val}")
                        sheets = (a,) + ext
                        pairs = tuple(sorted(zip(sheets, ks)))
                        if pairs in found:
                            if not b.is_zero(found[pairs] - val):
                                raise OrderError(
                                    f"unramified table ({g2},{m}) symmetry "
                                    f"mismatch at {pairs}")
                        else:
                            found[pairs] = val
        return found

    def _extract(self, g2, a, ext_sheets, kw):
        """hat-w_{g2/2, 1+n} on first-slot sheet a as an MSeries in (v; u)."""
        b = self.backend
        n = len(ext_sheets)
        blocks = UnramifiedBlocks(self, kw, n)
        acc = MSeries.zero(b, n, BIG, kw)
        Qa = self.Q[a - 1]
        for i in range(1, self.r + 1):
            zsum = MSeries.zero(b, n, BIG, kw)
            for Z in combinations(range(1, self.r + 1), i):
                zsum = zsum + omega_combination(blocks, g2, Z, ext_sheets,
                                                hat=True)
            proj = _keep_v_positive(zsum)
            scal = _pow(-Qa, self.r - i, b)
            acc = acc - proj.scale(scal)
        if g2 == self.r and n == 0:
            acc = acc + MSeries(b, 0, {(1,): self.T}, BIG, kw, 0)
        denom = b.one
        for c in range(self.r):
            if c != a - 1:
                denom = denom * (self.Q[c] - Qa)
        return acc.scale(b.one / denom)


def _keep_v_positive(ms):
    terms = {k: v for k, v in ms.terms.items() if k[0] >= 1}
    return MSeries(ms.backend, ms.n, terms, ms.v_order, ms.u_order,
                   min((k[0] + sum(k[1:]) for k in terms), default=0))


def _bounded_tuples(m, budget):
    """All k-tuples of length m with k_i >= 1 and sum <= budget."""
    if m == 0:
        yield ()
        return
    for first in range(1, budget - m + 2):
        for rest in _bounded_tuples(m - 1, budget - first):
            yield (first,) + rest


def _pow(x, k, b):
    out = b.one
    for _ in range(k):
        out = out * x
    return out


# ---------------------------------------------------------------------------
# the homogeneity bridge to the finite-scale coefficients


def phi_from_unramified(engine, lam, g, sheets, ks):
    """Phi_{g,n}[sheets; ks] via the graded recursion and homogeneity."""
    b = engine.backend
    total = sum(ks)
    g2 = 2 * g + engine.r * total
    val = engine.coefficient(g2, tuple(sheets), tuple(ks))
    lam_pow = _pow(lam, engine.r * total, b)
    return val * lam_pow
