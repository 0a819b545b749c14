"""Weighted single Hurwitz numbers by brute force in the symmetric group.

Disconnected counts come from a central-element computation: multiply the
weight series evaluated at beta times the Jucys-Murphy elements, hit the
result with a conjugacy-class sum, and read the identity coefficient at the
calibrated beta exponent.  Connected numbers follow by inclusion-exclusion
over splittings of the ramification profile.

The printed sources for this construction leave three discrete conventions
ambiguous (the range of the Jucys-Murphy product, the beta exponent as a
function of genus/degree/parts, and the automorphism normalisation of the
profile).  ``calibrate_bridge`` resolves all three by exact matching against
the topological-recursion side at Q_1 = 0 and then verifies the calibrated
oracle on a disjoint, larger range.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import comb, factorial

from .scalars import EXACTQ
from .recursion import CheckReport


# -- permutations as tuples: p[i] is the image of i -------------------------


def identity_perm(d):
    return tuple(range(d))

def compose(p, q):
    """(p o q)(i) = p(q(i))."""
    return tuple(p[q[i]] for i in range(len(p)))

def transposition(d, i, j):
    img = list(range(d))
    img[i], img[j] = j, i
    return tuple(img)

def cycle_type(p):
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            ln += 1
        out.append(ln)
    return tuple(sorted(out, reverse=True))


class WeightSeries:
    """The weight generating series: exp, a factored rational function, or an
    explicit Taylor list; the constant term must not vanish."""

    def __init__(self, kind, num_roots=(), den_roots=(), taylor=None,
                 backend=EXACTQ):
        self.kind = kind
        self.backend = backend
        self.num_roots = list(num_roots)   # G has factors (root + zeta)
        self.den_roots = list(den_roots)   # and 1/(root - zeta)
        self._taylor = taylor

    @classmethod
    def exp(cls, backend=EXACTQ):
        return cls("exp", backend=backend)

    @classmethod
    def rational(cls, num_roots, den_roots, backend=EXACTQ):
        return cls("rational", num_roots, den_roots, backend=backend)

    def describe(self):
        if self.kind == "exp":
            return {"kind": "exp"}
        return {"kind": "rational",
                "num_roots": [str(r) for r in self.num_roots],
                "den_roots": [str(r) for r in self.den_roots]}

    def taylor(self, order):
        """Coefficients G_0..G_order of the expansion at zero."""
        b = self.backend
        if self.kind == "exp":
            return [b.one * Fraction(1, factorial(m)) for m in range(order + 1)]
        if self._taylor is not None:
            return list(self._taylor[: order + 1])
        coeffs = [b.one] + [b.zero] * order
        for root in self.num_roots:          # multiply by (root + zeta)
            nxt = [coeffs[m] * root + (coeffs[m - 1] if m else b.zero)
                   for m in range(order + 1)]
            coeffs = nxt
        for root in self.den_roots:          # multiply by 1/(root - zeta)
            if b.is_zero(root):
                raise ZeroDivisionError("weight series with vanishing G_0")
            inv = b.one / root
            nxt = []
            prev = b.zero
            for m in range(order + 1):
                cur = (coeffs[m] + prev) * inv
                nxt.append(cur)
                prev = cur
            coeffs = nxt
        if b.is_zero(coeffs[0]):
            raise ZeroDivisionError("weight series with vanishing G_0")
        return coeffs


# -- the group-algebra product ------------------------------------------------


class GroupAlgebra:
    """Dense elements of C[S_d] with beta-polynomial coefficients."""

    MAX_DEGREE = 7

    def __init__(self, d, backend=EXACTQ):
        if d > self.MAX_DEGREE:
            raise ValueError(f"degree {d} exceeds the designed bound "
                             f"{self.MAX_DEGREE}")
        self.d = d
        self.backend = backend
        self.perms = sorted(permutations(range(d)))
        self.index = {p: i for i, p in enumerate(self.perms)}

    def jm_weight_product(self, G: WeightSeries, b_max, include_first=True):
        """prod_i G(beta J_i) truncated at beta^b_max.

        ``include_first`` keeps the i = 1 slot, whose Jucys-Murphy element is
        zero, contributing a G(0) factor; the alternative drops it.  Elements
        are dicts permutation -> list of beta coefficients.
        """
        b = self.backend
        G_taylor = G.taylor(b_max)
        elem = {identity_perm(self.d): _poly_one(b, b_max)}
        start = 1 if include_first else 2
        for i in range(start, self.d + 1):
            elem = self._mul_G_of_JM(elem, i, G_taylor, b_max)
        return elem

    def _mul_G_of_JM(self, elem, i, G_taylor, b_max):
        """elem <- elem * sum_m G_m beta^m J_i^m with J_i = sum_{j<i} (j i)."""
        b = self.backend
        out = {}
        # powers of J_i act by repeated right-multiplication
        cur = elem
        for m in range(b_max + 1):
            gm = G_taylor[m]
            if not b.is_zero(gm):
                for p, poly in cur.items():
                    tgt = out.setdefault(p, _poly_zero(b, b_max))
                    for e, c in enumerate(poly):
                        if e + m <= b_max and not b.is_zero(c):
                            tgt[e + m] = tgt[e + m] + c * gm
            if m == b_max:
                break
            nxt = {}
            for p, poly in cur.items():
                for j in range(i - 1):
                    q = compose(p, transposition(self.d, j, i - 1))
                    tgt = nxt.setdefault(q, _poly_zero(b, b_max))
                    for e, c in enumerate(poly):
                        if not b.is_zero(c):
                            tgt[e] = tgt[e] + c
            cur = nxt
        return out

    def class_sum_coefficient(self, elem, mu, b_exp):
        """(1/d!) [beta^b_exp . id] C_mu * elem for the class of type mu."""
        b = self.backend
        target = tuple(sorted(mu, reverse=True))
        acc = b.zero
        for p, poly in elem.items():
            if cycle_type(p) == target and b_exp < len(poly):
                # [id] C_mu X = sum over sigma in C_mu of X[sigma^{-1}];
                # inverses preserve cycle type, so sum X over the class
                acc = acc + poly[b_exp]
        return acc * Fraction(1, factorial(self.d))


def _poly_zero(b, n):
    return [b.zero] * (n + 1)


def _poly_one(b, n):
    out = _poly_zero(b, n)
    out[0] = b.one
    return out


# -- disconnected and connected numbers ---------------------------------------


class HurwitzConventions:
    """The three calibrated discrete choices."""

    JM_RANGES = ("j1_to_jdm1", "j2_to_jd", "j1_to_jd")
    EXPONENTS = ("chi_plus_n_minus_d", "minus_chi_plus_n_plus_d")
    AUTS = ("parts_and_mults", "mults_only")

    def __init__(self, jm_range="j1_to_jd", exponent="minus_chi_plus_n_plus_d",
                 aut="mults_only"):
        self.jm_range = jm_range
        self.exponent = exponent
        self.aut = aut

    def beta_exponent(self, g, mu):
        d, n = sum(mu), len(mu)
        chi = 2 - 2 * g
        if self.exponent == "chi_plus_n_minus_d":
            return chi + n - d
        return -chi + n + d

    def aut_factor(self, mu):
        mults = {}
        for part in mu:
            mults[part] = mults.get(part, 0) + 1
        out = 1
        for part, m in mults.items():
            out *= factorial(m)
            if self.aut == "parts_and_mults":
                out *= part ** m
        return out

    def describe(self):
        return {"jm_range": self.jm_range, "beta_exponent": self.exponent,
                "aut_normalisation": self.aut}


class HurwitzEngine:
    """Weighted Hurwitz numbers for one weight series under fixed conventions."""

    def __init__(self, G: WeightSeries, conventions=None, backend=EXACTQ):
        self.G = G
        self.conv = conventions or HurwitzConventions()
        self.backend = backend
        self._products = {}
        self._connected = {}

    def _product(self, d, b_max):
        key = (d, b_max, self.conv.jm_range)
        if key not in self._products:
            alg = GroupAlgebra(d, self.backend)
            if self.conv.jm_range == "j1_to_jdm1":
                elem = {identity_perm(d): _poly_one(self.backend, b_max)}
                G_taylor = self.G.taylor(b_max)
                for i in range(1, d):
                    elem = alg._mul_G_of_JM(elem, i, G_taylor, b_max)
            elif self.conv.jm_range == "j2_to_jd":
                elem = alg.jm_weight_product(self.G, b_max, include_first=False)
            else:
                elem = alg.jm_weight_product(self.G, b_max, include_first=True)
            self._products[key] = (alg, elem)
        return self._products[key]

    def disconnected(self, mu, b_exp):
        """H^bullet at an explicit beta exponent (class-sum normalisation)."""
        d = sum(mu)
        if b_exp < 0:
            return self.backend.zero
        alg, elem = self._product(d, b_exp)
        return alg.class_sum_coefficient(elem, mu, b_exp)

    def _disconnected_labelled(self, mu, b_exp):
        """Cycle-labelled disconnected count: the class-sum value times the
        number of ways to label equal cycles, prod_i m_i!.  Only in this
        normalisation does the exponential formula hold profilewise, because
        a labelled cover decomposes uniquely into labelled components."""
        return self.disconnected(mu, b_exp) * _mults_factorial(mu)

    def _connected_labelled(self, mu, b_exp):
        mu = tuple(mu)
        key = (mu, b_exp)
        if key in self._connected:
            return self._connected[key]
        n = len(mu)
        total = self._disconnected_labelled(mu, b_exp)
        # subtract contributions where the piece carrying index 0 is a proper
        # connected component and the rest is arbitrary
        for submask in range(0, 1 << (n - 1)) if n > 1 else []:
            piece = [0] + [j + 1 for j in range(n - 1) if submask >> j & 1]
            rest = [j + 1 for j in range(n - 1) if not submask >> j & 1]
            if not rest:
                continue
            mu1 = tuple(mu[j] for j in piece)
            mu2 = tuple(mu[j] for j in rest)
            for b1 in range(0, b_exp + 1):
                c1 = self._connected_labelled(mu1, b1)
                if self.backend.is_zero(c1):
                    continue
                c2 = self._disconnected_labelled(mu2, b_exp - b1)
                total = total - c1 * c2
        self._connected[key] = total
        return total

    def connected_profile(self, mu, b_exp):
        """Connected number at a beta exponent, class-sum normalisation."""
        fac = _mults_factorial(mu)
        return self._connected_labelled(tuple(mu), b_exp) * Fraction(1, fac)

    def connected(self, g, mu):
        """The genus-g connected weighted Hurwitz number of profile mu."""
        b_exp = self.conv.beta_exponent(g, mu)
        if b_exp < 0:
            return self.backend.zero
        return self.connected_profile(tuple(mu), b_exp)


def _mults_factorial(mu):
    mults = {}
    for part in mu:
        mults[part] = mults.get(part, 0) + 1
    out = 1
    for m in mults.values():
        out *= factorial(m)
    return out


# -- the independent enumeration oracle for the exponential weight -----------


def simple_hurwitz_enumeration(d, mu, g):
    """Classical simple Hurwitz number by explicit monodromy enumeration:
    tuples of b transpositions whose product lies in the class of mu and
    generates a transitive group, weighted 1/(d! b!).

    This is the exponential-weight specialisation computed without any
    group-algebra machinery, used as the independent cross-check.
    """
    assert sum(mu) == d
    n = len(mu)
    b_count = d + n - 2 + 2 * g
    if b_count < 0:
        return Fraction(0)
    target = tuple(sorted(mu, reverse=True))
    trans = [transposition(d, i, j) for i in range(d) for j in range(i + 1, d)]
    count = 0

    def union_find_transitive(taus):
        parent = list(range(d))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in taus:
            moved = [i for i in range(d) if t[i] != i]
            a, bb = moved[0], moved[1]
            ra, rb = find(a), find(bb)
            if ra != rb:
                parent[ra] = rb
        roots = {find(i) for i in range(d)}
        return len(roots) == 1

    from itertools import product as iproduct
    for taus in iproduct(trans, repeat=b_count):
        p = identity_perm(d)
        for t in taus:
            p = compose(p, t)
        if cycle_type(p) != target:
            continue
        if not union_find_transitive(taus):
            continue
        count += 1
    return Fraction(count, factorial(d) * factorial(b_count))


# -- calibration against the recursion side -----------------------------------


def partitions_up_to(dmax):
    """All partitions mu (as sorted tuples) with 1 <= sum(mu) <= dmax."""
    out = []

    def rec(remaining, maxpart, cur):
        if remaining == 0:
            out.append(tuple(sorted(cur, reverse=True)))
            return
        for p in range(min(remaining, maxpart), 0, -1):
            rec(remaining - p, p, cur + [p])

    for d in range(1, dmax + 1):
        rec(d, d, [])
    return out


def calibrate_bridge(phi_lookup, G, lam, r, g_max=2, calib_sum=3,
                     verify_sum=5, backend=EXACTQ):
    """Resolve the three conventions against the recursion side, then verify.

    ``phi_lookup(g, mu)`` must return the coefficient with all slots on the
    sheet whose charge was set to zero.  Returns (conventions, report); the
    report covers the disjoint verification range calib_sum < |mu| <= verify_sum.
    """
    b = backend
    report = CheckReport(f"hurwitz-bridge r={r} g<={g_max} |mu|<={verify_sum}")
    calib_set = [(g, mu) for mu in partitions_up_to(calib_sum)
                 for g in range(0, g_max + 1)]
    verify_set = [(g, mu) for mu in partitions_up_to(verify_sum)
                  if sum(mu) > calib_sum for g in range(0, g_max + 1)]

    lam_pow = {}

    def lampow(k):
        if k not in lam_pow:
            acc = b.one
            for _ in range(r * k):
                acc = acc * lam
            lam_pow[k] = acc
        return lam_pow[k]

    winners = []
    for jm in HurwitzConventions.JM_RANGES:
        for expn in HurwitzConventions.EXPONENTS:
            for aut in HurwitzConventions.AUTS:
                conv = HurwitzConventions(jm, expn, aut)
                eng = HurwitzEngine(G, conv, backend=b)
                ok = True
                for g, mu in calib_set:
                    lhs = phi_lookup(g, mu)
                    parts_prod = 1
                    for p in mu:
                        parts_prod *= p
                    rhs = eng.connected(g, mu) * (parts_prod *
                                                  conv.aut_factor(mu)) * lampow(sum(mu))
                    if not b.is_zero(lhs - rhs):
                        ok = False
                        break
                if ok:
                    winners.append(conv)
    if not winners:
        raise ArithmeticError(
            "no convention assignment matches the calibration range; this "
            "signals an implementation bug, not a tuning failure")
    conv = winners[0]
    eng = HurwitzEngine(G, conv, backend=b)
    for g, mu in verify_set:
        lhs = phi_lookup(g, mu)
        parts_prod = 1
        for p in mu:
            parts_prod *= p
        rhs = eng.connected(g, mu) * (parts_prod * conv.aut_factor(mu)) * \
            lampow(sum(mu))
        ok = b.is_zero(lhs - rhs)
        report.record(ok, {"g": g, "mu": list(mu), "tr_side": str(lhs),
                           "hurwitz_side": str(rhs)})
    record = {"conventions": conv.describe(),
              "all_matching_conventions": [w.describe() for w in winners],
              "calibration_points": len(calib_set),
              "verification": report.to_json()}
    return conv, eng, record, report
