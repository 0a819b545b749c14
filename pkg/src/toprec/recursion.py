"""Ramified topological recursion on genus-zero spectral curves.

Correlators are symmetric n-differentials with poles only at the simple
ramification points; they are stored exactly as coefficient tables over the
pole basis d(zeta)/(zeta - rho)^k per variable.  The residue at each
ramification point is extracted by local series arithmetic: the recursion
kernel and the bracketed quadratic terms are expanded in t = zeta - rho and
the t^{-1} coefficient is read off, so every stored coefficient is justified
by the guaranteed-order bookkeeping of the series layer.
"""

from __future__ import annotations

import json
import os
import hashlib
from itertools import combinations

from .scalars import OrderError
from .series import Series

# a label is (rho_index, pole_order); a table key is a sorted tuple of labels


class MultiDiff:
    """Symmetric n-differential as a pole-basis coefficient table.

    ``terms[key] = c`` means the differential contains the monomials
    ``c * prod_i d(zeta_i)/(zeta_i - rho_{j_i})^{k_i}`` for every ordering of
    the multiset ``key``; keys are stored sorted.
    """

    def __init__(self, g, n, backend, terms=None):
        self.g = g
        self.n = n
        self.backend = backend
        self.terms = {}
        if terms:
            for key, val in terms.items():
                self.add(key, val)

    def add(self, key, val):
        key = tuple(sorted(key))
        cur = self.terms.get(key)
        new = val if cur is None else cur + val
        if self.backend.is_zero(new):
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    def value(self, key):
        return self.terms.get(tuple(sorted(key)), self.backend.zero)

    def max_order(self):
        return max((k for key in self.terms for (_, k) in key), default=0)

    def is_symmetric_table(self):
        return True  # canonical storage is symmetric by construction

    def scale(self, s):
        out = MultiDiff(self.g, self.n, self.backend)
        for k, v in self.terms.items():
            out.terms[k] = v * s
        return out

    def __len__(self):
        return len(self.terms)

    # -- serialisation -----------------------------------------------------

    def to_json(self, curve):
        terms = []
        for key in sorted(self.terms):
            terms.append({
                "slots": [{"rho": r, "order": k} for (r, k) in key],
                "value": self.backend.to_json(self.terms[key]),
            })
        return {"g": self.g, "n": self.n,
                "ram_points": [str(r) for r in curve.ram],
                "terms": terms}

    @classmethod
    def from_json(cls, data, backend):
        out = cls(data["g"], data["n"], backend)
        for item in data["terms"]:
            key = tuple((s["rho"], s["order"]) for s in item["slots"])
            val = item["value"]
            if isinstance(val, list):
                with backend.context():
                    import mpmath
                    out.terms[tuple(sorted(key))] = mpmath.mpc(mpmath.mpf(val[0]),
                                                               mpmath.mpf(val[1]))
            else:
                out.terms[tuple(sorted(key))] = backend.parse(val)
        return out


class CorrelatorCache:
    """Deterministic memo for correlator tables, optionally disk-backed.

    Entries are keyed by (curve fingerprint, g, n); on disk each entry is a
    JSON file named by the key fingerprint, so identical configurations share
    work across runs and a corrupted file is confined to its own key.
    """

    def __init__(self, directory=None):
        self.mem = {}
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, curve, g, n):
        tag = hashlib.sha256(f"{curve.fingerprint}:{g}:{n}".encode()).hexdigest()[:24]
        return os.path.join(self.directory, f"corr_{tag}.json")

    def get(self, curve, g, n):
        key = (curve.fingerprint, g, n)
        if key in self.mem:
            return self.mem[key]
        if self.directory:
            path = self._path(curve, g, n)
            if os.path.exists(path):
                with open(path) as fh:
                    table = MultiDiff.from_json(json.load(fh), curve.backend)
                self.mem[key] = table
                return table
        return None

    def put(self, curve, g, n, table):
        key = (curve.fingerprint, g, n)
        self.mem[key] = table
        if self.directory:
            with open(self._path(curve, g, n), "w") as fh:
                json.dump(table.to_json(curve), fh, sort_keys=True)


# ---------------------------------------------------------------------------
# local data at one ramification point


def local_data(curve, rho_idx, order):
    """Per-curve cache of LocalData, grown to the largest requested order."""
    cache = getattr(curve, "_local_data_cache", None)
    if cache is None:
        cache = {}
        curve._local_data_cache = cache
    loc = cache.get(rho_idx)
    if loc is None or loc.order < order:
        loc = LocalData(curve, rho_idx, order)
        cache[rho_idx] = loc
    return loc


class LocalData:
    """Series data at one ramification point, at a fixed working order."""

    def __init__(self, curve, rho_idx, order):
        b = curve.backend
        self.curve = curve
        self.rho_idx = rho_idx
        self.order = order
        self.rho = curve.ram[rho_idx]
        self.s = curve.deck_involution(rho_idx, order)           # sigma - rho
        self.sp = self.s.deriv()
        xs = curve.x_series_at(rho_idx, order + 2)
        ys = curve.y_series_at(rho_idx, order + 2)
        xp = xs.deriv()
        ysig = _compose_pad(ys, self.s, order)
        denom = (ys.truncated(ysig.order) - ysig) * xp.truncated(ysig.order)
        self.recip_denom = denom.reciprocal()
        self._spowers = {}
        self._basis = {}
        self._basis_sig = {}
        self._kernels = {}
        self._pairs = {}
        self._omega01 = None

    def s_power(self, k):
        if k not in self._spowers:
            if k == 0:
                out = Series.const(self.curve.backend, "t",
                                   self.curve.backend.one, self.s.order)
            elif k == 1:
                out = self.s
            elif k == -1:
                out = self.s.reciprocal()
            elif k > 0:
                out = self.s_power(k - 1) * self.s
            else:
                out = self.s_power(k + 1) * self.s_power(-1)
            self._spowers[k] = out
        return self._spowers[k]

    def basis(self, label):
        """Series of 1/(zeta - rho_j)^k at zeta = rho + t (function part)."""
        if label in self._basis:
            return self._basis[label]
        b = self.curve.backend
        j, k = label
        if j == self.rho_idx:
            out = Series.from_coeffs(b, "t", -k,
                                     [b.one] + [b.zero] * (self.order + k))
        else:
            # coefficient_m = C(-k, m) base^{-k-m} with base = rho - rho_j
            base = self.rho - self.curve.ram[j]
            inv = b.one / base
            coeffs = []
            cur = _power(inv, k)
            fac = b.one
            for m in range(self.order + 1):
                coeffs.append(fac * cur)
                fac = fac * (-(k + m)) * (b.one / (m + 1))
                cur = cur * inv
            out = Series.from_coeffs(b, "t", 0, coeffs)
        self._basis[label] = out
        return out

    def basis_sig(self, label):
        """Pullback of the basis 1-form along sigma: (basis o s) * s'(t)."""
        if label in self._basis_sig:
            return self._basis_sig[label]
        b = self.curve.backend
        j, k = label
        if j == self.rho_idx:
            out = self.s_power(-k) * self.sp
        else:
            out = self._shift_recip_power(("sig", j), k) * self.sp
        self._basis_sig[label] = out
        return out

    def _shift_recip_power(self, tag, k):
        """Powers of 1/(base + s(t)) (tag 'sig') or 1/(base - s(t)) cached
        incrementally; base encodes the distance to the other pole."""
        key = (tag, k)
        if key in self._pairs:
            return self._pairs[key]
        if k == 1:
            b = self.curve.backend
            kind, j = tag
            base = self.rho - self.curve.ram[j]
            lin = Series.const(b, "t", base, self.s.order) + self.s
            out = lin.reciprocal()
        else:
            out = self._shift_recip_power(tag, k - 1) * self._shift_recip_power(tag, 1)
        self._pairs[key] = out
        return out

    def pair(self, la, lb):
        """basis(la) * basis_sig(lb) windowed to nonpositive exponents."""
        key = (la, lb)
        if key not in self._pairs:
            self._pairs[key] = self.basis(la).mul_window(self.basis_sig(lb), 0)
        return self._pairs[key]

    def omega01(self):
        """Series of y(zeta) x'(zeta) at rho (the function part of y dx)."""
        if self._omega01 is None:
            xs = self.curve.x_series_at(self.rho_idx, self.order + 2)
            ys = self.curve.y_series_at(self.rho_idx, self.order + 2)
            self._omega01 = (ys * xs.deriv()).truncated(self.order)
        return self._omega01

    def omega01_sig(self):
        """Pullback of y dx along sigma (function part, includes s')."""
        ys = self.curve.y_series_at(self.rho_idx, self.order + 2)
        xs = self.curve.x_series_at(self.rho_idx, self.order + 2)
        ysig = _compose_pad(ys, self.s, self.order)
        xpsig = _compose_pad(xs.deriv(), self.s, self.order)
        return ysig * xpsig * self.sp

    def omega02_diag(self):
        """omega_{0,2}(zeta, sigma(zeta)) function part: s'(t)/(t - s(t))^2."""
        b = self.curve.backend
        t = Series.gen(b, "t", self.s.order)
        diff = t - self.s
        return self.sp * diff.power(2).reciprocal()

    def kernel(self, k0):
        """Kernel coefficient for output pole order k0 at this point:
        (1/2) (t^{k0-1} - s(t)^{k0-1}) / ((y - y o sigma) x')."""
        if k0 in self._kernels:
            return self._kernels[k0]
        b = self.curve.backend
        spow = self.s_power(k0 - 1)
        top = min(self.order + 1, spow.order)
        tpow = Series.from_coeffs(b, "t", k0 - 1,
                                  [b.one] + [b.zero] * (top - (k0 - 1)))
        num = (tpow - spow.truncated(top)).scale(b.one / 2)
        out = num * self.recip_denom
        self._kernels[k0] = out
        return out


def _compose_pad(f, inner, order):
    return f.compose(inner.truncated(min(inner.order, order)))


def _power(x, k):
    out = None
    for _ in range(k):
        out = x if out is None else out * x
    return out


# ---------------------------------------------------------------------------
# the recursion


def correlator(curve, g, n, cache=None, _depth=0):
    """The symmetric correlator table for (g, n); 2g - 2 + n > 0.

    The unstable cases (0,1) and (0,2) have closed forms and are not stored
    as tables; requesting them raises ValueError.
    """
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable correlators have closed forms; use the "
                         "dedicated evaluators")
    if cache is None:
        cache = CorrelatorCache()
    hit = cache.get(curve, g, n)
    if hit is not None:
        return hit
    with curve.backend.context():
        table = _compute_correlator(curve, g, n, cache)
    cache.put(curve, g, n, table)
    return table


def _compute_correlator(curve, g, n, cache):
    b = curve.backend
    out = MultiDiff(g, n, b)
    next_ext = n - 1  # externals of the recursion step

    # child tables (memoised through the cache)
    def child(gg, mm):
        if 2 * gg - 2 + mm <= 0:
            return None
        return correlator(curve, gg, mm, cache)

    kmax_child = 2
    part_a = child(g - 1, n + 1) if g >= 1 else None
    if part_a is not None:
        kmax_child = max(kmax_child, part_a.max_order())
    split_tables = {}
    for g1 in range(g + 1):
        for j1 in range(next_ext + 1):
            g2, j2 = g - g1, next_ext - j1
            stable1 = 2 * g1 - 2 + (1 + j1) > 0
            stable2 = 2 * g2 - 2 + (1 + j2) > 0
            # "no omega_{0,1}" exclusion: a factor must be stable or the
            # fundamental bi-differential
            ok1 = stable1 or (g1, 1 + j1) == (0, 2)
            ok2 = stable2 or (g2, 1 + j2) == (0, 2)
            if not ok1 or not ok2:
                continue
            t1 = child(g1, 1 + j1)
            t2 = child(g2, 1 + j2)
            split_tables[(g1, j1)] = (t1, t2)
            for t in (t1, t2):
                if t is not None:
                    kmax_child = max(kmax_child, t.max_order())

    order = 2 * kmax_child + 8
    kcap = 2 * kmax_child + 6
    # slotted[(label0, mu)] = coefficient of the ordered monomial with the
    # recursion variable carrying label0; the final table keeps one value per
    # unordered key after checking that all orderings agree (symmetry of the
    # output is a theorem about the recursion, so it is asserted, not assumed)
    slotted = {}
    for ri in range(len(curve.ram)):
        loc = local_data(curve, ri, order)
        brackets = _assemble_brackets(curve, loc, g, next_ext, part_a,
                                      split_tables, kcap)
        for mu, w in brackets.items():
            if w.is_identically_zero():
                continue
            for k0 in range(1, 2 - w.val + 1):
                ker = loc.kernel(k0)
                res = _residue_product(ker, w, b)
                if b.is_zero(res):
                    continue
                if k0 == 1:
                    raise OrderError(
                        f"nonzero residue of correlator ({g},{n}) at "
                        f"ramification point {ri}; recursion inconsistent")
                slotted[((ri, k0), mu)] = res
    _fuse_symmetric(slotted, out, b, g, n)
    return out


def _fuse_symmetric(slotted, out, backend, g, n):
    grouped = {}
    for (l0, mu), val in slotted.items():
        key = tuple(sorted((l0,) + mu))
        grouped.setdefault(key, {})[(l0, mu)] = val
    for key, found in grouped.items():
        ref = next(iter(found.values()))
        for dec in _single_extractions(key):
            got = found.get(dec, backend.zero)
            if not backend.is_zero(got - ref):
                raise OrderError(
                    f"correlator ({g},{n}) failed the symmetry consistency "
                    f"check at key {key}: {got} vs {ref}")
        out.terms[key] = ref


def _residue_product(a: Series, w: Series, backend):
    """Coefficient of t^{-1} in a * w without forming the full product."""
    acc = backend.zero
    if a.is_identically_zero() or w.is_identically_zero():
        return acc
    # need index -1 = i + j with i in a's window, j in w's window;
    # also check the claimed orders actually cover the pairing
    if a.order + w.val < -1 or w.order + a.val < -1:
        raise OrderError("windows too narrow for residue extraction")
    for i, ca in a.known_coeff_items():
        j = -1 - i
        if w.val <= j <= w.order:
            cb = w.coeffs[j - w.val] if j - w.val < len(w.coeffs) else backend.zero
            acc = acc + ca * cb
    return acc


def _assemble_brackets(curve, loc, g, next_ext, part_a, split_tables, kcap):
    """Map from sorted external-label tuples to bracket t-series."""
    b = curve.backend
    brackets = {}

    def bump(mu, ser):
        if ser.is_identically_zero():
            return
        cur = brackets.get(mu)
        brackets[mu] = ser if cur is None else cur + ser

    # -- part A: omega_{g-1, 2+next_ext}(zeta, sigma zeta, externals)
    if g >= 1:
        if (g - 1, 2 + next_ext) == (0, 2):
            bump((), loc.omega02_diag())
        elif part_a is not None:
            for key, c in part_a.terms.items():
                for (la, lb, rest) in _ordered_pair_extractions(key):
                    bump(rest, loc.pair(la, lb).scale(c))

    # -- part B: splits over genus and external subsets
    half_fns = {}

    def half_factors(table, gg, jj, sigma_side):
        """dict: external multiset -> t-series for omega_{gg,1+jj} with the
        first slot on the (sigma-)residue branch."""
        memo_key = (gg, jj, sigma_side)
        if memo_key in half_fns:
            return half_fns[memo_key]
        out = {}
        if (gg, 1 + jj) == (0, 2):
            # closed form omega_{0,2}(residue slot, one external)
            for k in range(2, min(kcap, loc.order + 2) + 1):
                if sigma_side:
                    ser = loc.s_power(k - 2) * loc.sp
                else:
                    ser = Series.from_coeffs(
                        b, "t", k - 2, [b.one] + [b.zero] * (loc.order - (k - 2)))
                ser = ser.scale(b.one * (k - 1))
                lab = ((loc.rho_idx, k),)
                cur = out.get(lab)
                out[lab] = ser if cur is None else cur + ser
        elif table is not None:
            for key, c in table.terms.items():
                for (la, rest) in _single_extractions(key):
                    ser = (loc.basis_sig(la) if sigma_side else loc.basis(la)).scale(c)
                    cur = out.get(rest)
                    out[rest] = ser if cur is None else cur + ser
        half_fns[memo_key] = out
        return out

    for (g1, j1), (t1, t2) in split_tables.items():
        g2, j2 = g - g1, next_ext - j1
        f1 = half_factors(t1, g1, j1, False)
        f2 = half_factors(t2, g2, j2, True)
        if not f1 or not f2:
            continue
        for mu1, s1 in f1.items():
            for mu2, s2 in f2.items():
                weight = _merge_count(mu1, mu2)
                mu = tuple(sorted(mu1 + mu2))
                ser = s1.mul_window(s2, 0)
                bump(mu, ser if weight == 1 else ser.scale(b.one * weight))
    return brackets


def _ordered_pair_extractions(key):
    """Distinct (label_a, label_b, remaining sorted tuple) from a multiset."""
    out = []
    seen = set()
    for i in range(len(key)):
        for j in range(len(key)):
            if i == j:
                continue
            la, lb = key[i], key[j]
            rest = tuple(sorted(key[m] for m in range(len(key)) if m not in (i, j)))
            sig = (la, lb, rest)
            if sig in seen:
                continue
            seen.add(sig)
            out.append(sig)
    return out


def _single_extractions(key):
    out = []
    seen = set()
    for i in range(len(key)):
        la = key[i]
        rest = tuple(sorted(key[m] for m in range(len(key)) if m != i))
        sig = (la, rest)
        if sig in seen:
            continue
        seen.add(sig)
        out.append(sig)
    return out


def _merge_count(mu1, mu2):
    """Number of ways to split positions of the merged multiset realising
    (mu1, mu2): product of binomials over distinct labels."""
    from math import comb
    merged = {}
    for l in mu1:
        merged[l] = merged.get(l, 0) + 1
    ones = dict(merged)
    for l in mu2:
        merged[l] = merged.get(l, 0) + 1
    out = 1
    for l, tot in merged.items():
        out *= comb(tot, ones.get(l, 0))
    return out


# ---------------------------------------------------------------------------
# evaluation helpers


def numeric_basis(curve, label, z):
    """Value of 1/(z - rho_j)^k at a numeric point."""
    j, k = label
    return _power(curve.backend.one / (z - curve.ram[j]), k)


def eval_series_slot0(curve, table, loc, sigma_side, points):
    """Evaluate a table with slot 0 on the (sigma-)branch at rho and the
    remaining slots at numeric points (includes d(sigma zeta)/dt on the sigma
    side; external differentials are left off, matching a fixed dz gauge)."""
    b = curve.backend
    acc = Series.zero(b, "t", loc.order)
    npts = len(points)
    for key, c in table.terms.items():
        assert len(key) == 1 + npts
        for perm in _distinct_permutations(key):
            l0 = perm[0]
            ser = loc.basis_sig(l0) if sigma_side else loc.basis(l0)
            scal = c
            for lab, z in zip(perm[1:], points):
                scal = scal * numeric_basis(curve, lab, z)
            acc = acc + ser.scale(scal)
    return acc


def eval_at_points(curve, table, points):
    """Fully numeric evaluation (external differentials left off)."""
    b = curve.backend
    acc = b.zero
    for key, c in table.terms.items():
        for perm in _distinct_permutations(key):
            term = c
            for lab, z in zip(perm, points):
                term = term * numeric_basis(curve, lab, z)
            acc = acc + term
    return acc


def _distinct_permutations(key):
    from itertools import permutations
    return sorted(set(permutations(key)))


# ---------------------------------------------------------------------------
# loop equations


class CheckReport:
    """Outcome of a verification run: pass/fail plus offending coefficients."""

    def __init__(self, name):
        self.name = name
        self.failures = []
        self.checked = 0

    def record(self, ok, context):
        self.checked += 1
        if not ok:
            self.failures.append(context)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {"check": self.name, "passed": self.passed,
                "coefficients_checked": self.checked,
                "failures": self.failures[:50]}

    def __repr__(self):
        status = "pass" if self.passed else "FAIL"
        return f"<{self.name}: {status} ({self.checked} coefficients)>"


def omega01_series(curve, loc):
    return loc.omega01()


def verify_loop_equations(curve, cache, g, n, rho_idx=None, points=None,
                          order=None):
    """Linear and quadratic loop equations for omega_{g,1+n} at each
    ramification point, with the n spectator variables at generic sample
    points; also asserts the no-residue property of the stored tables.

    Returns a CheckReport listing any offending (rho, order) coefficients.
    """
    b = curve.backend
    report = CheckReport(f"loop-equations g={g} n={n}")
    with b.context():
        table = correlator(curve, g, 1 + n, cache)
        for key in table.terms:
            for (_, k) in key:
                report.record(k >= 2, {"reason": "residue at ramification point",
                                       "order": k})
        if points is None:
            points = _default_points(curve, n)
        kmax = max(table.max_order(), 4)
        if order is None:
            order = 2 * kmax + 8
        rhos = range(len(curve.ram)) if rho_idx is None else [rho_idx]
        for ri in rhos:
            loc = local_data(curve, ri, order)
            lin = eval_series_slot0(curve, table, loc, False, points) + \
                eval_series_slot0(curve, table, loc, True, points)
            _assert_regular(lin, b, report, {"check": "linear", "rho": ri})

            quad = _quadratic_combination(curve, cache, loc, g, n, points)
            _assert_regular(quad, b, report, {"check": "quadratic", "rho": ri})
    return report


def _assert_regular(ser, backend, report, ctx):
    for k, c in ser.known_coeff_items():
        if k >= 0:
            break
        ok = backend.is_zero(c)
        report.record(ok, dict(ctx, order=k, value=str(c)) if not ok else ctx)


def _quadratic_combination(curve, cache, loc, g, n, points):
    b = curve.backend
    acc = Series.zero(b, "t", loc.order)

    def stable_table(gg, mm):
        return correlator(curve, gg, mm, cache) if 2 * gg - 2 + mm > 0 else None

    # omega_{g-1, 2+n}(zeta, sigma zeta, points)
    if g >= 1:
        if (g - 1, 2 + n) == (0, 2):
            acc = acc + loc.omega02_diag()
        else:
            ta = stable_table(g - 1, 2 + n)
            for key, c in ta.terms.items():
                for (la, lb, rest) in _ordered_pair_extractions(key):
                    for perm in _distinct_permutations(rest):
                        scal = c
                        for lab, z in zip(perm, points):
                            scal = scal * numeric_basis(curve, lab, z)
                        acc = acc + (loc.basis(la) * loc.basis_sig(lb)).scale(scal)

    # splits including the unstable factors
    for g1 in range(g + 1):
        g2 = g - g1
        for idx in range(1 << n):
            j1 = [i for i in range(n) if idx >> i & 1]
            j2 = [i for i in range(n) if not idx >> i & 1]
            f1 = _half_eval(curve, cache, loc, g1, [points[i] for i in j1], False)
            f2 = _half_eval(curve, cache, loc, g2, [points[i] for i in j2], True)
            if f1 is None or f2 is None:
                continue
            acc = acc + f1 * f2
    return acc


def _half_eval(curve, cache, loc, gg, pts, sigma_side):
    """omega_{gg, 1+len(pts)} with the first slot on the local branch."""
    b = curve.backend
    m = 1 + len(pts)
    if (gg, m) == (0, 1):
        return loc.omega01_sig() if sigma_side else loc.omega01()
    if (gg, m) == (0, 2):
        z = pts[0]
        base = z - loc.rho
        inv = b.one / base
        # 1/(z - rho - t)^2 expanded in t (or with t -> s(t), times s')
        coeffs = []
        cur = inv * inv
        for mm in range(loc.order + 1):
            coeffs.append((mm + 1) * cur)
            cur = cur * inv
        ser = Series.from_coeffs(b, "t", 0, coeffs)
        if sigma_side:
            ser = _compose_numeric_pole(loc, z, 2) * loc.sp
        return ser
    if 2 * gg - 2 + m <= 0:
        return None
    table = correlator(curve, gg, m, cache)
    return eval_series_slot0(curve, table, loc, sigma_side, pts)


def _compose_numeric_pole(loc, z, k):
    """Series of 1/(z - rho - s(t))^k in t."""
    b = loc.curve.backend
    base = z - loc.rho
    inv = b.one / base
    acc = Series.zero(b, "t", loc.order)
    spow = Series.const(b, "t", b.one, loc.order)
    cur = _power(inv, k)
    fac = b.one
    for m in range(loc.order + 1):
        if m:
            spow = (spow * loc.s).truncated(loc.order)
            if spow.is_identically_zero():
                break
        acc = acc + spow.scale(fac * cur)
        fac = fac * (b.one * (k + m)) * (b.one / (m + 1))
        cur = cur * inv
    return acc


def _default_points(curve, n):
    """Generic exact sample points away from ramification and poles."""
    b = curve.backend
    pts = []
    cand = 3
    from fractions import Fraction
    while len(pts) < n:
        z = b.parse(Fraction(cand, 7))
        bad = any(b.is_zero(z - r) for r in curve.ram)
        bad = bad or b.is_zero(curve.x.den(z))
        if not bad:
            pts.append(z)
        cand += 5
    return pts
