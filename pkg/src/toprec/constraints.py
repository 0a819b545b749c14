"""Fiberwise symmetric-mode combinations and their constraint checks.

The correlators assemble into combinations Omega_{g,i;n}: sums over set
partitions of i points in a common fibre of x, with n spectator variables,
weighted by products of correlators whose genus defect matches g.  Summed
over all i-element subsets of the fibre, these combinations are constrained
to have no deep 1/x tail beyond an explicit source term; the check below
expands everything in v = 1/x(z) and u_j = 1/x(w_j) (region |x(z)| < |x(w_j)|)
and asserts the forbidden window vanishes coefficient by coefficient.

All series here are normalised by (dx/x) per fibre slot and (dx_j/x_j) per
spectator slot, which turns the projection windows into plain coefficient
windows in v.
"""

from __future__ import annotations

from itertools import combinations

from .curves import CDO, HalfSW
from .recursion import CheckReport, correlator
from .series import MSeries, Series
from .whittaker import BiSeries, omega02_regularised, sheet_data


def set_partitions(items):
    """All partitions of a list of distinct items into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def compositions(total, parts, step=1):
    """Compositions of ``total`` into ``parts`` nonnegative multiples of step."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 0 and total % step == 0:
            yield (total,)
        return
    for head in range(0, total + 1, step):
        for tail in compositions(total - head, parts - 1, step):
            yield (head,) + tail


def assignments(n, nblocks):
    """All maps [n] -> blocks as tuples of block indices."""
    if n == 0:
        yield ()
        return
    for rest in assignments(n - 1, nblocks):
        for b in range(nblocks):
            yield rest + (b,)


class RamifiedBlocks:
    """Correlator blocks for the finite-scale Whittaker combinations, built
    from the ramified recursion's tables by branch pullback."""

    def __init__(self, curve, cache, v_order, u_order, nu):
        self.curve = curve
        self.cache = cache
        self.v_order = v_order
        self.u_order = u_order
        self.nu = nu
        self.b = curve.backend
        self.genus_step = 2  # doubled-integer genera: integers only

    def _slot_series(self, sheet, label, order):
        sd = sheet_data(self.curve, sheet, order + 2)
        return sd.pull(label).truncated(order - 1).shift(1)

    def phi01(self, sheet, slot):
        """phi_{0,1} block (normalised): the uniformiser on the branch."""
        b = self.b
        order = self.v_order if slot == 0 else self.u_order
        sd = sheet_data(self.curve, sheet, order + 4)
        if not sd.sheet.at_infinity:
            ser = Series.const(b, "y", sd.sheet.center, order) + \
                Series(b, "y", sd.w.val, list(sd.w.coeffs), sd.w.order).truncated(order)
        else:
            u = Series(b, "y", sd.w.val, list(sd.w.coeffs), sd.w.order)
            ser = u.reciprocal().truncated(order)
        return MSeries.from_univariate(ser, self.nu, slot, self.v_order, self.u_order)

    def phi02_fiber_fiber(self, sheet_a, sheet_b):
        """Both slots in the fibre (distinct sheets): diagonal convolution."""
        b = self.b
        order = self.v_order
        reg = omega02_regularised(self.curve, sheet_a, sheet_b, order)
        diag = {}
        for (i, j), val in reg.terms.items():
            w = i + j + 2
            if w <= order:
                diag[w] = diag.get(w, b.zero) + val
        lo = min(diag, default=order + 1)
        ser = Series(b, "y", lo,
                     [diag.get(k, b.zero) for k in range(lo, order + 1)], order)
        return MSeries.from_univariate(ser, self.nu, 0, self.v_order, self.u_order)

    def phi02_fiber_ext(self, sheet_a, sheet_b, uslot):
        """One fibre slot, one spectator slot; includes the singular part on
        equal sheets, expanded with |x(z)| < |x(w)|."""
        b = self.b
        reg = omega02_regularised(self.curve, sheet_a, sheet_b,
                                  self.v_order + self.u_order)
        terms = {}
        for (i, j), val in reg.terms.items():
            kv, ku = i + 1, j + 1
            if kv <= self.v_order and ku <= self.u_order:
                key = [0] * (self.nu + 1)
                key[0] = kv
                key[uslot] = ku
                terms[tuple(key)] = val
        out = MSeries(b, self.nu, terms, self.v_order, self.u_order, 0)
        if sheet_a == sheet_b:
            sing = {}
            for m in range(0, self.u_order):
                key = [0] * (self.nu + 1)
                key[0] = -(m + 1)
                key[uslot] = m + 1
                sing[tuple(key)] = b.one * (m + 1)
            out = out + MSeries(b, self.nu, sing, self.v_order, self.u_order, 0)
        return out

    def stable_block(self, g2, fiber_sheets, ext):
        """Block for a stable correlator; ``ext`` maps u-slot -> sheet.

        Returns None when the genus is fractional (these vanish identically
        at finite scale) or the correlator is out of range.
        """
        b = self.b
        if g2 % 2:
            return None
        g = g2 // 2
        m = len(fiber_sheets) + len(ext)
        if 2 * g - 2 + m <= 0:
            raise ValueError("stable_block called on an unstable case")
        table = correlator(self.curve, g, m, self.cache)
        sign = -b.one if m % 2 else b.one
        out = MSeries.zero(b, self.nu, self.v_order, self.u_order)
        slots = [(0, a) for a in fiber_sheets] + \
                [(uslot, a) for uslot, a in sorted(ext.items())]
        from .recursion import _distinct_permutations
        for key, c in table.terms.items():
            for perm in _distinct_permutations(key):
                acc = MSeries.const(b, self.nu, c * sign, self.v_order, self.u_order)
                for lab, (uslot, sheet) in zip(perm, slots):
                    order = self.v_order if uslot == 0 else self.u_order
                    ser = self._slot_series(sheet, lab, order)
                    acc = acc * MSeries.from_univariate(
                        ser, self.nu, uslot, self.v_order, self.u_order)
                    if not acc.terms:
                        break
                out = out + acc
        return out


def omega_combination(blocks, g2, fiber_sheets, ext_sheets, hat=False):
    """Omega_{g,i;n}(Z; w) over the given fibre sheets.

    With ``hat`` the terms containing the top correlator phi_{g,1+n} are
    removed.  Those are exactly the all-singleton terms in which one point
    carries every spectator and the whole genus (its block complexity then
    equals the target's, which is also why they must not be constructed when
    the combination feeds the recursion for that very correlator).  For the
    scalar g = 0, n = 0 case the removal counts the product of first-order
    parts i times, leaving (1 - i) copies.
    """
    b = blocks.b
    n = len(ext_sheets)
    i = len(fiber_sheets)
    out = MSeries.zero(b, blocks.nu, blocks.v_order, blocks.u_order)
    for part in set_partitions(list(range(i))):
        nb = len(part)
        # genus constraint i + sum(g_L - 1) = g, doubled: sum g2_L = g2 - 2(i - nb)
        total2 = g2 - 2 * (i - nb)
        if total2 < 0:
            continue
        for assign in assignments(n, nb):
            exts = [{} for _ in range(nb)]
            for j, bi in enumerate(assign):
                exts[bi][j + 1] = ext_sheets[j]
            for gset in compositions(total2, nb, blocks.genus_step):
                if hat and nb == i and _has_top_block(gset, assign, g2, n, nb):
                    continue
                term = None
                dead = False
                for bi, block_items in enumerate(part):
                    fib = [fiber_sheets[x] for x in block_items]
                    ms = _block_value(blocks, gset[bi], fib, exts[bi])
                    if ms is None:
                        dead = True
                        break
                    term = ms if term is None else term * ms
                    if not term.terms:
                        dead = True
                        break
                if not dead and term is not None:
                    out = out + term
    if hat and g2 == 0 and n == 0:
        corr = None
        for l in range(i):
            f = blocks.phi01(fiber_sheets[l], 0)
            corr = f if corr is None else corr * f
        out = out + corr.scale(b.one * (1 - i))
    return out


def _has_top_block(gset, assign, g2, n, nb):
    """One singleton block carries all spectators and the whole genus."""
    if n > 0:
        carriers = set(assign)
        if len(carriers) != 1:
            return False
        top = next(iter(carriers))
        return gset[top] == g2 and all(
            gg == 0 for bi, gg in enumerate(gset) if bi != top)
    if g2 == 0:
        return True  # every all-singleton term is a product of first orders
    return any(gset[bi] == g2 and all(g == 0 for j, g in enumerate(gset) if j != bi)
               for bi in range(nb))


def _block_value(blocks, g2, fib, ext):
    m = len(fib) + len(ext)
    if g2 == 0 and m == 1:
        if ext:
            # a lone spectator block cannot occur: blocks contain fibre slots
            raise ValueError("spectator-only block")
        return blocks.phi01(fib[0], 0)
    if g2 == 0 and m == 2:
        if len(fib) == 2:
            return blocks.phi02_fiber_fiber(fib[0], fib[1])
        uslot, sheet_b = next(iter(ext.items()))
        return blocks.phi02_fiber_ext(fib[0], sheet_b, uslot)
    # stability in the doubled grading: g2 - 2 + m > 0
    if g2 - 2 + m <= 0:
        return None
    return blocks.stable_block(g2, fib, ext)


def w_constraint_check(curve, cache, g, n, i, depth=10, u_order=4,
                       ext_sheets=None):
    """Check one fibrewise constraint instance at genus g with n spectators.

    Forms sum_{#Z=i} Omega_{g,i;n}(Z; w) as a series in v = 1/x(z), subtracts
    the explicit source, and asserts every coefficient in the forbidden
    window vanishes (depth powers of v, all spectator degrees up to u_order).
    """
    b = curve.backend
    is_cdo = isinstance(curve.family, CDO)
    if ext_sheets is None:
        ext_sheets = tuple((j % curve.nsheets) + 1 for j in range(n))
    report = CheckReport(
        f"w-constraints g={g} n={n} i={i} depth={depth} sheets={ext_sheets}")
    with b.context():
        v_order = depth + 2
        blocks = RamifiedBlocks(curve, cache, v_order, u_order, n)
        total = MSeries.zero(b, n, v_order, u_order)
        for Z in combinations(range(1, curve.nsheets + 1), i):
            total = total + omega_combination(blocks, 2 * g, Z, ext_sheets)
        total = total - _source(curve, b, g, n, i, v_order, u_order)
        # forbidden window: powers of v deeper than the allowed tail; the
        # scalar (g,n) = (0,0) identity is exact, so its whole window binds
        window_lo = 0 if is_cdo else 1
        if (g, n) == (0, 0):
            window_lo = -i
        vc = total.v_coefficients()
        for v in range(window_lo, depth + 1):
            for udeg, val in sorted(vc.get(v, {}).items()):
                ok = b.is_zero(val)
                report.record(ok, {"v_power": v, "u_degrees": list(udeg),
                                   "value": str(val)})
            report.checked += 1
    return report


def _source(curve, b, g, n, i, v_order, u_order):
    """The explicit right-hand side of the constraint in the normalised
    variables (nonzero only for the scalar g = n = 0 instances)."""
    out = MSeries.zero(b, n, v_order, u_order)
    if n != 0 or g != 0:
        return out
    fam = curve.family
    if isinstance(fam, HalfSW):
        Q = list(fam.Q)
        key0 = (0,) + (0,) * n
        out = out + MSeries(b, n, {key0: _esym(Q, i, b)}, v_order, u_order, 0)
        if i == fam.r:
            lam_r = _pow(fam.lam, fam.r)
            out = out + MSeries(b, n, {(1,) + (0,) * n: lam_r}, v_order, u_order, 0)
        return out
    if isinstance(fam, CDO):
        P, Q = list(fam.P), list(fam.Q)
        sgn_i = -b.one if i % 2 else b.one
        key0 = (0,) + (0,) * n
        out = out + MSeries(b, n, {key0: _esym(P, i, b) * sgn_i}, v_order, u_order, 0)
        sgn_r = -b.one if fam.r % 2 else b.one
        lam_r = _pow(fam.lam, fam.r)
        c = _esym(Q, i - 1, b) * sgn_r * (b.one / lam_r)
        if not b.is_zero(c):
            out = out + MSeries(b, n, {(-1,) + (0,) * n: c}, v_order, u_order, -1)
        return out
    raise ValueError("constraint sources are defined for the two named families")


def _esym(vals, k, b):
    if k < 0 or k > len(vals):
        return b.zero
    from itertools import combinations as combs
    acc = b.zero
    for sub in combs(vals, k):
        term = b.one
        for v in sub:
            term = term * v
        acc = acc + term
    return acc


def _pow(x, k):
    out = None
    for _ in range(k):
        out = x if out is None else out * x
    return out
