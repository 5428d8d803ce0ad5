"""Exact arithmetic with algebraic numbers over towers of extensions of Q.

A tower is a chain Q = K_0 < K_1 < ... < K_h where each K_{j+1} is
K_j[T]/(f_j) for a monic square-free f_j, together with a certified complex
box isolating the intended root of f_j.  Because the f_j are only known to
be square-free (not irreducible), the quotients are etale algebras rather
than fields; zero tests and inversions lazily discover factorizations and
replace f_j by the factor whose root stays inside the stored box.  All
facts established before such a refinement remain true afterwards, so
callers never need to re-run earlier decisions.

Element representation: depth 0 is a plain Fraction; depth t >= 1 is a list
of depth-(t-1) elements (coefficients of powers of the level-(t-1)
generator, lowest first).  Lists are never mutated in place; every
operation builds fresh ones.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .boxes import Box, RealInterval
from .config import refine_cap
from .errors import PrecisionExhaustedError
from .polynomials import UniPoly, _as_rational

__all__ = [
    "AlgebraicNumber",
    "FieldTower",
    "field_op",
    "minimal_polynomial",
    "rational_number",
    "rational_nth_root",
    "rational_sqrt",
    "roots_with_multiplicity",
]

# crossing offsets used when a bisection line might pass through a root;
# denominators are odd so dyadic subdivision points never repeat a line
_CROSS = (
    Fraction(1, 2),
    Fraction(9, 19),
    Fraction(10, 23),
    Fraction(25, 53),
    Fraction(13, 29),
    Fraction(31, 61),
)

# whole-plane grid offsets for root isolation attempts, in units of the
# root bound; chosen with odd prime denominators so subdivision lines
# (dyadic fractions of the shifted frame) avoid axis-aligned root patterns
_SHIFTS = (
    (Fraction(1, 11), Fraction(1, 7)),
    (Fraction(1, 13), Fraction(-1, 19)),
    (Fraction(-1, 17), Fraction(1, 23)),
    (Fraction(2, 29), Fraction(-1, 31)),
    (Fraction(-2, 37), Fraction(3, 41)),
    (Fraction(3, 43), Fraction(-2, 47)),
    (Fraction(-3, 53), Fraction(2, 59)),
    (Fraction(5, 61), Fraction(3, 67)),
)


class _RefineStall(Exception):
    """Internal: box refinement needs tighter coefficient enclosures."""


class _Level:
    __slots__ = ("poly", "box")

    def __init__(self, poly: list, box: Box):
        self.poly = poly
        self.box = box


class FieldTower:
    """Mutable chain of monic square-free extensions with isolating boxes."""

    def __init__(self):
        self.levels: list[_Level] = []
        self._prec = 0

    @property
    def height(self) -> int:
        return len(self.levels)

    def clone(self) -> "FieldTower":
        t = FieldTower()
        # element lists are never mutated, so sharing them is safe
        t.levels = [_Level(lvl.poly, lvl.box) for lvl in self.levels]
        t._prec = self._prec
        return t

    def extend(self, poly: list, box: Box) -> int:
        """Append a level defined by a monic tower polynomial and a root box.

        ``poly`` has coefficients at the current top depth, lowest first,
        with leading coefficient exactly one.  Returns the new depth.
        """
        if len(poly) < 2:
            raise ValueError("defining polynomial must have degree >= 1")
        self.levels.append(_Level(list(poly), box))
        self._prec = 0
        return len(self.levels)

    def degree_product(self, depth: int | None = None) -> int:
        d = 1
        n = self.height if depth is None else depth
        for lvl in self.levels[:n]:
            d *= len(lvl.poly) - 1
        return d

    # ---- enclosure machinery ----

    def box_raw(self, depth: int, e) -> Box:
        """Enclosure of an element from the boxes currently on file."""
        e = el_reduce(self, depth, e)
        if depth == 0:
            return Box.point(e)
        if not e:
            return Box.point(0)
        g = self.levels[depth - 1].box
        acc = self.box_raw(depth - 1, e[-1])
        for c in reversed(e[:-1]):
            acc = acc * g + self.box_raw(depth - 1, c)
        return acc

    def ensure_prec(self, bits: int) -> None:
        """Refine every generator box to width at most 2^-bits."""
        if bits <= self._prec:
            return
        cap = refine_cap()
        extra = 32
        for _ in range(cap):
            try:
                for j in range(len(self.levels)):
                    margin = extra * (len(self.levels) - j)
                    self._refine_level(j, bits + margin)
                self._prec = bits
                return
            except _RefineStall:
                extra *= 2
        raise PrecisionExhaustedError(
            f"could not refine tower boxes to 2^-{bits}"
        )

    def _refine_level(self, j: int, tbits: int) -> None:
        lvl = self.levels[j]
        target = Fraction(1, 1 << tbits)
        if lvl.box.width <= target:
            return
        cboxes = [self.box_raw(j, c) for c in lvl.poly]
        dboxes = [cboxes[i].scale(i) for i in range(1, len(cboxes))]
        b = lvl.box
        cap = refine_cap()
        rounds = 0
        while b.width > target:
            rounds += 1
            if rounds > cap:
                raise PrecisionExhaustedError(
                    f"refinement cap hit at tower level {j}"
                )
            moved = False
            fp = _horner_box(dboxes, b)
            if not fp.contains_zero():
                m = Box.point(b.re.mid, b.im.mid)
                fm = _horner_box(cboxes, m)
                n = m - fm / fp
                b2 = n.intersect(b)
                if b2 is not None and b2.width < b.width * Fraction(7, 8):
                    b = b2.round_out(tbits + 24)
                    moved = True
            if not moved:
                off = _CROSS[rounds % len(_CROSS)]
                cre = b.re.lo + b.re.width * off
                cim = b.im.lo + b.im.width * off
                alive = [
                    s
                    for s in b.subdivide(cre, cim)
                    if _horner_box(cboxes, s).contains_zero()
                ]
                if len(alive) == 1:
                    b = alive[0].round_out(tbits + 24)
                else:
                    lvl.box = b
                    raise _RefineStall
            lvl.box = b


# ---------------------------------------------------------------------------
# element operations (depth 0 = Fraction, depth t = list of depth t-1)


def el_zero(depth: int):
    return Fraction(0) if depth == 0 else []


def el_one(depth: int):
    return Fraction(1) if depth == 0 else [el_one(depth - 1)]


def el_from_rational(depth: int, r):
    r = _as_rational(r)
    return r if depth == 0 else [el_from_rational(depth - 1, r)]


def el_lift(e, from_depth: int, to_depth: int):
    for _ in range(to_depth - from_depth):
        e = [e]
    return e


def el_reduce(tw: FieldTower, depth: int, e):
    """Canonical representative with degree below the defining polynomial."""
    if depth == 0:
        return e
    f = tw.levels[depth - 1].poly
    n = len(f) - 1
    e = [el_reduce(tw, depth - 1, c) for c in e]
    if len(e) <= n:
        return e
    # long division by the monic f, keeping only the remainder
    e = list(e)
    for k in range(len(e) - 1, n - 1, -1):
        c = e[k]
        if _is_structural_zero(depth - 1, c):
            continue
        for i in range(n):
            e[k - n + i] = el_sub(
                depth - 1, e[k - n + i], el_mul_raw(tw, depth - 1, c, f[i])
            )
        e[k] = el_zero(depth - 1)
    return [el_reduce(tw, depth - 1, c) for c in e[:n]]


def _is_structural_zero(depth: int, e) -> bool:
    if depth == 0:
        return e == 0
    return all(_is_structural_zero(depth - 1, c) for c in e)


def el_add(depth: int, a, b):
    if depth == 0:
        return a + b
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else el_zero(depth - 1)
        y = b[i] if i < len(b) else el_zero(depth - 1)
        out.append(el_add(depth - 1, x, y))
    return out


def el_neg(depth: int, a):
    if depth == 0:
        return -a
    return [el_neg(depth - 1, c) for c in a]


def el_sub(depth: int, a, b):
    return el_add(depth, a, el_neg(depth, b))


def el_mul_raw(tw: FieldTower, depth: int, a, b):
    """Product without the final reduction (used inside el_reduce)."""
    if depth == 0:
        return a * b
    if not a or not b:
        return []
    out = [el_zero(depth - 1) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if _is_structural_zero(depth - 1, x):
            continue
        for j, y in enumerate(b):
            out[i + j] = el_add(
                depth - 1, out[i + j], el_mul_raw(tw, depth - 1, x, y)
            )
    return out


def el_mul(tw: FieldTower, depth: int, a, b):
    if depth == 0:
        return a * b
    return el_reduce(tw, depth, el_mul_raw(tw, depth, a, b))


def el_scale(depth: int, a, r: Fraction):
    if depth == 0:
        return a * r
    return [el_scale(depth - 1, c, r) for c in a]


def el_pow(tw: FieldTower, depth: int, a, k: int):
    out = el_one(depth)
    base = a
    while k > 0:
        if k & 1:
            out = el_mul(tw, depth, out, base)
        k >>= 1
        if k:
            base = el_mul(tw, depth, base, base)
    return out


def el_is_zero(tw: FieldTower, depth: int, e) -> bool:
    if depth == 0:
        return e == 0
    e = el_reduce(tw, depth, e)
    a = _tp_trim(tw, depth - 1, list(e))
    if not a:
        return True
    if len(a) == 1:
        return False
    f = tw.levels[depth - 1].poly
    g = _tp_gcd_monic(tw, depth - 1, a, f)
    if len(g) == 1:
        return False
    q = _tp_exact_div(tw, depth - 1, f, g)
    if tw_choose_is_root(tw, depth - 1, g, q):
        _replace_poly(tw, depth - 1, g)
        return True
    _replace_poly(tw, depth - 1, q)
    return False


def el_inv(tw: FieldTower, depth: int, e):
    if depth == 0:
        if e == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / e
    e = el_reduce(tw, depth, e)
    a = _tp_trim(tw, depth - 1, list(e))
    if not a:
        raise ZeroDivisionError("inverse of zero")
    if len(a) == 1:
        return [el_inv(tw, depth - 1, a[0])]
    while True:
        f = tw.levels[depth - 1].poly
        g, s = _tp_half_ext_gcd(tw, depth - 1, a, f)
        if len(g) == 1:
            return el_reduce(tw, depth, s)
        q = _tp_exact_div(tw, depth - 1, f, g)
        if tw_choose_is_root(tw, depth - 1, g, q):
            _replace_poly(tw, depth - 1, g)
            raise ZeroDivisionError("element vanished on branch refinement")
        _replace_poly(tw, depth - 1, q)
        a = _tp_trim(tw, depth - 1, a)
        if not a:
            raise ZeroDivisionError("element vanished on branch refinement")
        if len(a) == 1:
            return [el_inv(tw, depth - 1, a[0])]


def el_div(tw: FieldTower, depth: int, a, b):
    return el_mul(tw, depth, a, el_inv(tw, depth, b))


def el_to_rational(tw: FieldTower, depth: int, e) -> Fraction | None:
    if depth == 0:
        return e
    e = el_reduce(tw, depth, e)
    for c in e[1:]:
        if not el_is_zero(tw, depth - 1, c):
            return None
    if not e:
        return Fraction(0)
    return el_to_rational(tw, depth - 1, e[0])


def el_box(tw: FieldTower, depth: int, e, bits: int) -> Box:
    """Enclosure of width at most 2^-bits (exact point for rationals)."""
    target = Fraction(1, 1 << bits)
    want = max(bits + 16, 48)
    for _ in range(refine_cap()):
        b = tw.box_raw(depth, e)
        if b.width <= target:
            return b
        tw.ensure_prec(want)
        want = want * 2
    raise PrecisionExhaustedError("element enclosure did not converge")


def _replace_poly(tw: FieldTower, j: int, poly: list) -> None:
    tw.levels[j].poly = list(poly)


def tw_choose_is_root(tw: FieldTower, j: int, d: list, q: list) -> bool:
    """True when level j's generator is a root of d rather than of q."""
    bits = max(tw._prec, 32)
    for _ in range(refine_cap()):
        b = tw.levels[j].box
        dv = _horner_box([tw.box_raw(j, c) for c in d], b)
        qv = _horner_box([tw.box_raw(j, c) for c in q], b)
        dz = dv.contains_zero()
        qz = qv.contains_zero()
        if dz != qz:
            return dz
        if not dz and not qz:
            raise PrecisionExhaustedError(
                "isolating box lost the generator root"
            )
        bits *= 2
        tw.ensure_prec(bits)
    raise PrecisionExhaustedError("branch selection did not converge")


# ---------------------------------------------------------------------------
# polynomials with tower-element coefficients (plain lists, lowest first)


def _tp_trim(tw: FieldTower, depth: int, p: list) -> list:
    p = list(p)
    while p and el_is_zero(tw, depth, p[-1]):
        p.pop()
    return p


def _tp_add(depth: int, a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else el_zero(depth)
        y = b[i] if i < len(b) else el_zero(depth)
        out.append(el_add(depth, x, y))
    return out


def _tp_sub(depth: int, a: list, b: list) -> list:
    return _tp_add(depth, a, [el_neg(depth, c) for c in b])


def _tp_mul(tw: FieldTower, depth: int, a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [el_zero(depth) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = el_add(depth, out[i + j], el_mul(tw, depth, x, y))
    return out


def _tp_scale(tw: FieldTower, depth: int, a: list, c) -> list:
    return [el_mul(tw, depth, x, c) for x in a]


def _tp_derivative(depth: int, p: list) -> list:
    return [el_scale(depth, p[i], Fraction(i)) for i in range(1, len(p))]


def _tp_divmod(tw: FieldTower, depth: int, a: list, b: list):
    b = _tp_trim(tw, depth, b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    binv = el_inv(tw, depth, b[-1])
    r = list(a)
    q = [el_zero(depth) for _ in range(max(0, len(a) - len(b) + 1))]
    for k in range(len(a) - len(b), -1, -1):
        c = el_mul(tw, depth, r[k + len(b) - 1], binv)
        q[k] = c
        for i in range(len(b)):
            r[k + i] = el_sub(depth, r[k + i], el_mul(tw, depth, c, b[i]))
    return q, _tp_trim(tw, depth, r[: len(b) - 1])


def _tp_exact_div(tw: FieldTower, depth: int, a: list, b: list) -> list:
    q, r = _tp_divmod(tw, depth, a, b)
    if r:
        raise ArithmeticError("division was not exact")
    return q


def _tp_monic(tw: FieldTower, depth: int, p: list) -> list:
    p = _tp_trim(tw, depth, p)
    if not p:
        return p
    inv = el_inv(tw, depth, p[-1])
    out = [el_mul(tw, depth, c, inv) for c in p[:-1]]
    out.append(el_one(depth))
    return out


def _tp_gcd_monic(tw: FieldTower, depth: int, a: list, b: list) -> list:
    a = _tp_trim(tw, depth, a)
    b = _tp_trim(tw, depth, b)
    while b:
        _, r = _tp_divmod(tw, depth, a, b)
        a, b = b, r
    return _tp_monic(tw, depth, a)


def _tp_half_ext_gcd(tw: FieldTower, depth: int, a: list, b: list):
    """Monic g = gcd(a, b) and s with s*a = g (mod b)."""
    r0, r1 = _tp_trim(tw, depth, a), _tp_trim(tw, depth, b)
    s0, s1 = [el_one(depth)], []
    while r1:
        q, r = _tp_divmod(tw, depth, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _tp_sub(depth, s0, _tp_mul(tw, depth, q, s1))
    inv = el_inv(tw, depth, r0[-1])
    g = [el_mul(tw, depth, c, inv) for c in r0[:-1]] + [el_one(depth)]
    s = [el_mul(tw, depth, c, inv) for c in s0]
    return g, s


def _tp_eval(tw: FieldTower, depth: int, p: list, x):
    acc = el_zero(depth)
    for c in reversed(p):
        acc = el_add(depth, el_mul(tw, depth, acc, x), c)
    return acc


def tp_squarefree_monic(tw: FieldTower, depth: int, p: list):
    """Yun decomposition of a monic polynomial: list of (factor, mult)."""
    dp = _tp_derivative(depth, p)
    a = _tp_gcd_monic(tw, depth, p, dp)
    b = _tp_exact_div(tw, depth, p, a)
    c = _tp_exact_div(tw, depth, dp, a)
    out = []
    i = 1
    while len(b) > 1:
        t = _tp_sub(depth, c, _tp_derivative(depth, b))
        g = _tp_gcd_monic(tw, depth, b, _tp_trim(tw, depth, t))
        if len(g) > 1:
            out.append((g, i))
        b = _tp_exact_div(tw, depth, b, g)
        c = _tp_exact_div(tw, depth, _tp_trim(tw, depth, t), g)
        i += 1
        if i > len(p) + 1:
            raise ArithmeticError("square-free decomposition did not settle")
    return out


# ---------------------------------------------------------------------------
# certified root isolation


def _horner_box(cboxes: list[Box], b: Box) -> Box:
    if not cboxes:
        return Box.point(0)
    acc = cboxes[-1]
    for c in reversed(cboxes[:-1]):
        acc = acc * b + c
    return acc


def isolate_roots(tw: FieldTower, depth: int, p: list) -> list[Box]:
    """Disjoint certified boxes, one per distinct root of monic square-free p."""
    p = _tp_trim(tw, depth, p)
    n = len(p) - 1
    if n < 1:
        return []
    if n == 1:
        root = el_neg(depth, p[0])
        return [el_box(tw, depth, root, 48)]
    for attempt in range(32):
        prec = 64 << (attempt // 4)
        shift = _SHIFTS[attempt % len(_SHIFTS)]
        try:
            boxes = _isolate_attempt(tw, depth, p, n, prec, shift)
        except PrecisionExhaustedError:
            raise
        if boxes is not None:
            return boxes
    raise PrecisionExhaustedError(
        f"root isolation failed for degree {n} polynomial"
    )


# Fixed-point complex boxes for the isolation inner loop: a box is a
# 4-tuple (re_lo, re_hi, im_lo, im_hi) of integers at an implicit scale
# 2^-S.  Multiplication rounds outward via floor/ceil shifts, so every
# enclosure stays certified while all arithmetic runs on native ints.


def _fx_floor(x: Fraction, sc: int) -> int:
    return (x.numerator * sc) // x.denominator


def _fx_ceil(x: Fraction, sc: int) -> int:
    return -((-x.numerator * sc) // x.denominator)


def _fb_from_box(b: Box, sc: int) -> tuple[int, int, int, int]:
    return (
        _fx_floor(b.re.lo, sc),
        _fx_ceil(b.re.hi, sc),
        _fx_floor(b.im.lo, sc),
        _fx_ceil(b.im.hi, sc),
    )


def _fb_to_box(b: tuple, sc: int) -> Box:
    rl, rh, il, ih = b
    return Box(
        RealInterval(Fraction(rl, sc), Fraction(rh, sc)),
        RealInterval(Fraction(il, sc), Fraction(ih, sc)),
    )


def _fb_add(a: tuple, b: tuple) -> tuple:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def _fb_sub(a: tuple, b: tuple) -> tuple:
    return (a[0] - b[1], a[1] - b[0], a[2] - b[3], a[3] - b[2])


def _imm(alo, ahi, blo, bhi):
    ps = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
    return min(ps), max(ps)


def _fb_mul(a: tuple, b: tuple, s: int) -> tuple:
    arl, arh, ail, aih = a
    brl, brh, bil, bih = b
    p1l, p1h = _imm(arl, arh, brl, brh)
    p2l, p2h = _imm(ail, aih, bil, bih)
    p3l, p3h = _imm(arl, arh, bil, bih)
    p4l, p4h = _imm(ail, aih, brl, brh)
    rl, rh = p1l - p2h, p1h - p2l
    il, ih = p3l + p4l, p3h + p4h
    return (rl >> s, -((-rh) >> s), il >> s, -((-ih) >> s))


def _isq(lo, hi):
    if lo >= 0:
        return lo * lo, hi * hi
    if hi <= 0:
        return hi * hi, lo * lo
    m = max(-lo, hi)
    return 0, m * m


def _fb_recip(b: tuple, s: int) -> tuple:
    rl, rh, il, ih = b
    q1l, q1h = _isq(rl, rh)
    q2l, q2h = _isq(il, ih)
    alo, ahi = q1l + q2l, q1h + q2h  # |z|^2 at scale 2s
    if alo <= 0:
        raise ZeroDivisionError("box reciprocal straddles zero")
    q = 1 << (4 * s)
    inv_lo = q // ahi
    inv_hi = -((-q) // alo)  # 1/|z|^2 at scale 2s
    # conj(z) / |z|^2
    c1l, c1h = _imm(rl, rh, inv_lo, inv_hi)
    c2l, c2h = _imm(-ih, -il, inv_lo, inv_hi)
    sh = 2 * s
    return (c1l >> sh, -((-c1h) >> sh), c2l >> sh, -((-c2h) >> sh))


def _fb_has_zero(b: tuple) -> bool:
    return b[0] <= 0 <= b[1] and b[2] <= 0 <= b[3]


def _fb_width(b: tuple) -> int:
    return max(b[1] - b[0], b[3] - b[2])


def _fb_mid_point(b: tuple) -> tuple:
    rm = (b[0] + b[1]) >> 1
    im = (b[2] + b[3]) >> 1
    return (rm, rm, im, im)


def _fb_strictly_inside(a: tuple, b: tuple) -> bool:
    return b[0] < a[0] and a[1] < b[1] and b[2] < a[2] and a[3] < b[3]


def _fb_intersect(a: tuple, b: tuple) -> tuple | None:
    rl, rh = max(a[0], b[0]), min(a[1], b[1])
    il, ih = max(a[2], b[2]), min(a[3], b[3])
    if rl > rh or il > ih:
        return None
    return (rl, rh, il, ih)


def _fb_disjoint(a: tuple, b: tuple) -> bool:
    return a[1] < b[0] or b[1] < a[0] or a[3] < b[2] or b[3] < a[2]


def _fb_horner(cs: list[tuple], b: tuple, s: int) -> tuple:
    acc = cs[-1]
    for c in reversed(cs[:-1]):
        acc = _fb_add(_fb_mul(acc, b, s), c)
    return acc


def _fb_newton_step(cfix, dfix, b: tuple, s: int) -> tuple | None:
    """One interval Newton step; None when the derivative box straddles 0."""
    fp = _fb_horner(dfix, b, s)
    if _fb_has_zero(fp):
        return None
    m = _fb_mid_point(b)
    fm = _fb_horner(cfix, m, s)
    return _fb_sub(m, _fb_mul(fm, _fb_recip(fp, s), s))


def _fb_tighten(cfix, dfix, b: tuple, s: int, rounds: int, target: int) -> tuple:
    for _ in range(rounds):
        if _fb_width(b) <= target:
            break
        k = _fb_newton_step(cfix, dfix, b, s)
        if k is None:
            break
        b2 = _fb_intersect(k, b)
        if b2 is None or _fb_width(b2) >= _fb_width(b):
            break
        b = b2
    return b


def _isolate_attempt(tw, depth, p, n, prec, shift):
    s = prec + 32
    sc = 1 << s
    cfix = [_fb_from_box(el_box(tw, depth, c, prec), sc) for c in p]
    dfix = [
        (b[0] * i, b[1] * i, b[2] * i, b[3] * i)
        for i, b in enumerate(cfix)
    ][1:]
    r_units = sc + max(
        max(abs(b[0]), abs(b[1])) + max(abs(b[2]), abs(b[3]))
        for b in cfix[:-1]
    )
    sre = (r_units * shift[0].numerator) // shift[0].denominator
    sim = (r_units * shift[1].numerator) // shift[1].denominator
    # r_units is the Cauchy bound; 3/2 of it still covers every root
    # after the recentering shift (|shift| <= 1/7) while subdividing a
    # box 4x smaller in area than the naive doubling
    half = (3 * r_units) >> 1
    queue = [(sre - half, sre + half, sim - half, sim + half)]
    certified: list[tuple] = []
    min_width = max(1, r_units >> (prec // 2))
    # high-degree circles of roots (w-th roots of a constant) keep the
    # exclusion test busy; degree 8 alone needs ~10^4 cells
    budget = 4000 + 2400 * n
    cells = 0
    while queue:
        cells += 1
        if cells > budget:
            return None
        b = queue.pop()
        if not _fb_has_zero(_fb_horner(cfix, b, s)):
            continue
        k = _fb_newton_step(cfix, dfix, b, s)
        if k is not None and _fb_strictly_inside(k, b):
            k = _fb_tighten(
                cfix, dfix, k, s,
                rounds=64,
                target=max(1, _fb_width(b) >> 20),
            )
            certified.append(k)
            continue
        if _fb_width(b) < min_width:
            return None
        rm = (b[0] + b[1]) >> 1
        im = (b[2] + b[3]) >> 1
        queue.extend((
            (b[0], rm, b[2], im),
            (rm, b[1], b[2], im),
            (b[0], rm, im, b[3]),
            (rm, b[1], im, b[3]),
        ))
    # deduplicate boxes that certified the same root from adjacent cells
    roots: list[tuple] = []
    for k in certified:
        merged = False
        for i, kv in enumerate(roots):
            if _fb_disjoint(k, kv):
                continue
            k2 = _fb_tighten(cfix, dfix, k, s, 48,
                             max(1, _fb_width(k) >> 30))
            kv2 = _fb_tighten(cfix, dfix, kv, s, 48,
                              max(1, _fb_width(kv) >> 30))
            roots[i] = kv2
            if _fb_disjoint(k2, kv2):
                k = k2
            else:
                merged = True
                break
        if not merged:
            roots.append(k)
    if len(roots) != n:
        return None
    return [_fb_to_box(k, sc) for k in roots]


# ---------------------------------------------------------------------------
# rational helpers


def rational_sqrt(r) -> Fraction | None:
    """Exact square root of a rational, or None."""
    r = _as_rational(r)
    if r < 0:
        return None
    sn = math.isqrt(r.numerator)
    sd = math.isqrt(r.denominator)
    if sn * sn == r.numerator and sd * sd == r.denominator:
        return Fraction(sn, sd)
    return None


def _int_nth_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    if n in (0, 1):
        return n
    lo, hi = 0, 1
    while hi**k <= n:
        hi <<= 1
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid
    return lo if lo**k == n else None


def rational_nth_root(r, k: int) -> Fraction | None:
    """Exact real k-th root of a rational when one exists, else None."""
    r = _as_rational(r)
    if k <= 0:
        raise ValueError("root index must be positive")
    neg = r < 0
    if neg and k % 2 == 0:
        return None
    rn = _int_nth_root(abs(r.numerator), k)
    rd = _int_nth_root(r.denominator, k)
    if rn is None or rd is None:
        return None
    out = Fraction(rn, rd)
    return -out if neg else out


def _bounded_divisors(n: int, limit: int = 400) -> list[int] | None:
    """Positive divisors of |n|, or None when enumeration looks too big."""
    n = abs(n)
    if n == 0:
        return None
    factors: dict[int, int] = {}
    m = n
    d = 2
    while d * d <= m and d < 100000:
        while m % d == 0:
            factors[d] = factors.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        if m > 10**12:
            return None
        factors[m] = factors.get(m, 0) + 1
    divs = [1]
    for pfac, mult in factors.items():
        divs = [dd * pfac**e for dd in divs for e in range(mult + 1)]
        if len(divs) > limit:
            return None
    return sorted(divs)


def _rational_root_candidates(p: UniPoly) -> list[Fraction]:
    den = 1
    for c in p.c:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.c]
    a0 = ints[0]
    an = ints[-1]
    d0 = _bounded_divisors(a0)
    d1 = _bounded_divisors(an)
    if d0 is None or d1 is None:
        return []
    out = set()
    for num in d0:
        for dq in d1:
            out.add(Fraction(num, dq))
            out.add(Fraction(-num, dq))
    return sorted(out)


# ---------------------------------------------------------------------------
# public number type


class AlgebraicNumber:
    """Element of a tower, with enclosure and exact-decision support."""

    __slots__ = ("tower", "depth", "rep", "_box", "_box_bits")

    def __init__(self, tower: FieldTower, depth: int, rep):
        self.tower = tower
        self.depth = depth
        self.rep = rep
        self._box = None
        self._box_bits = -1

    @staticmethod
    def generator(tower: FieldTower) -> "AlgebraicNumber":
        d = tower.height
        if d == 0:
            raise ValueError("tower has no extension levels")
        rep = [el_zero(d - 1), el_one(d - 1)]
        return AlgebraicNumber(tower, d, rep)

    @property
    def precision(self) -> int:
        return self._box_bits

    @property
    def isolating_box(self) -> Box:
        return self.box(48)

    def box(self, bits: int = 48) -> Box:
        if self._box is None or self._box_bits < bits:
            self._box = el_box(self.tower, self.depth, self.rep, bits)
            self._box_bits = bits
        return self._box

    def is_zero(self) -> bool:
        return el_is_zero(self.tower, self.depth, self.rep)

    def as_rational(self) -> Fraction | None:
        return el_to_rational(self.tower, self.depth, self.rep)

    def is_rational(self) -> bool:
        return self.as_rational() is not None

    def __add__(self, other):
        return field_op(self, _coerce(self, other), "add")

    def __radd__(self, other):
        return field_op(_coerce(self, other), self, "add")

    def __sub__(self, other):
        return field_op(self, _coerce(self, other), "sub")

    def __rsub__(self, other):
        return field_op(_coerce(self, other), self, "sub")

    def __mul__(self, other):
        return field_op(self, _coerce(self, other), "mul")

    def __rmul__(self, other):
        return field_op(_coerce(self, other), self, "mul")

    def __truediv__(self, other):
        return field_op(self, _coerce(self, other), "div")

    def __rtruediv__(self, other):
        return field_op(_coerce(self, other), self, "div")

    def __neg__(self):
        return AlgebraicNumber(
            self.tower, self.depth, el_neg(self.depth, self.rep)
        )

    def pow(self, k: int) -> "AlgebraicNumber":
        return AlgebraicNumber(
            self.tower, self.depth, el_pow(self.tower, self.depth, self.rep, k)
        )

    def on_tower(self, tower: FieldTower) -> "AlgebraicNumber":
        """Reinterpret on a tower cloned from (and extending) this one.

        Representations carry over verbatim between structurally derived
        towers; the caller is responsible for the derivation relationship.
        """
        if tower.height < self.depth:
            raise ValueError("target tower is shallower than the element")
        return AlgebraicNumber(tower, self.depth, self.rep)

    def order_key(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        b = self.box(bits)
        return (b.re.mid, b.im.mid)

    def render(self) -> str:
        r = self.as_rational()
        if r is not None:
            return str(r)
        mp = minimal_polynomial(self)
        b = self.box(40)
        rlo, rhi = float(b.re.lo), float(b.re.hi)
        ilo, ihi = float(b.im.lo), float(b.im.hi)
        return (
            f"root({mp.render('T')}; "
            f"re=[{rlo:.6g}, {rhi:.6g}], im=[{ilo:.6g}, {ihi:.6g}])"
        )

    def __repr__(self):
        return self.render()


def _coerce(like: AlgebraicNumber, x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    return AlgebraicNumber(like.tower, 0, _as_rational(x))


def rational_number(r, tower: FieldTower | None = None) -> AlgebraicNumber:
    return AlgebraicNumber(tower or FieldTower(), 0, _as_rational(r))


def field_op(x: AlgebraicNumber, y: AlgebraicNumber, op: str) -> AlgebraicNumber:
    """Arithmetic on numbers sharing a tower (rationals mix with anything)."""
    if x.tower is not y.tower and x.depth > 0 and y.depth > 0:
        raise ValueError("operands live on different towers")
    tower = x.tower if x.depth >= y.depth else y.tower
    depth = max(x.depth, y.depth)
    a = el_lift(x.rep, x.depth, depth)
    b = el_lift(y.rep, y.depth, depth)
    if op == "add":
        rep = el_add(depth, a, b)
    elif op == "sub":
        rep = el_sub(depth, a, b)
    elif op == "mul":
        rep = el_mul(tower, depth, a, b)
    elif op == "div":
        rep = el_div(tower, depth, a, b)
    else:
        raise ValueError(f"unknown field operation {op!r}")
    return AlgebraicNumber(tower, depth, el_reduce(tower, depth, rep))


# ---------------------------------------------------------------------------
# roots and annihilators


def _flatten(tw: FieldTower, depth: int, e) -> list[Fraction]:
    if depth == 0:
        return [e]
    n = len(tw.levels[depth - 1].poly) - 1
    e = list(e) + [el_zero(depth - 1)] * (n - len(e))
    out: list[Fraction] = []
    for c in e[:n]:
        out.extend(_flatten(tw, depth - 1, c))
    return out


def minimal_polynomial(x: AlgebraicNumber, var: str = "X") -> UniPoly:
    """Monic square-free annihilator of x over Q.

    Computed as the first linear dependency among the powers of x in the
    ambient product algebra, then stripped of repeated factors.  It is a
    multiple of the number-theoretic minimal polynomial and coincides with
    it whenever the tower is a genuine field.
    """
    r = x.as_rational()
    if r is not None:
        return UniPoly([-r, Fraction(1)])
    tw, depth = x.tower, x.depth
    dim = tw.degree_product(depth)
    xr = el_reduce(tw, depth, x.rep)
    basis: list[tuple[int, list[Fraction], list[Fraction]]] = []
    power = el_one(depth)
    for k in range(dim + 1):
        vec = _flatten(tw, depth, power)
        combo = [Fraction(0)] * (k + 1)
        combo[k] = Fraction(1)
        for pivot, bvec, bcombo in basis:
            if vec[pivot] == 0:
                continue
            fac = vec[pivot] / bvec[pivot]
            vec = [v - fac * w for v, w in zip(vec, bvec)]
            for i, w in enumerate(bcombo):
                combo[i] -= fac * w
        nz = next((i for i, v in enumerate(vec) if v != 0), None)
        if nz is None:
            p = UniPoly(combo)
            g = p.gcd(p.derivative())
            if g.degree > 0:
                p = p.exact_div(g)
            return p.monic()
        basis.append((nz, vec, combo))
        power = el_mul(tw, depth, power, xr)
    raise ArithmeticError("no linear dependency found among powers")


def _roots_of_rational_poly(tw, depth, p: UniPoly, mult, out):
    """Split off rational roots, then isolate whatever is left."""
    work = p
    for cand in _rational_root_candidates(work):
        if work.degree < 1:
            break
        if work.eval(cand) == 0:
            out.append((rational_number(cand, tw), mult))
            work = work.exact_div(UniPoly([-cand, Fraction(1)]))
    if work.degree < 1:
        return
    if work.degree == 1:
        out.append((rational_number(-work.c[0] / work.c[1], tw), mult))
        return
    tp = [el_from_rational(depth, c) for c in work.monic().c]
    _extend_with_isolated(tw, depth, tp, mult, out)


def _extend_with_isolated(tw, depth, tp, mult, out):
    for bx in isolate_roots(tw, depth, tp):
        branch = tw.clone()
        branch.extend(tp, bx)
        out.append((AlgebraicNumber.generator(branch), mult))


def roots_with_multiplicity(
    p, tower: FieldTower | None = None
) -> list[tuple[AlgebraicNumber, int]]:
    """All distinct roots of p with multiplicities, deterministically ordered.

    ``p`` is a UniPoly over Q, a list of AlgebraicNumber coefficients
    (lowest first) on a shared tower, or a list of raw tower elements when
    ``tower`` is given.  Roots extending the base field come back on their
    own cloned towers; multiplicities sum to deg p.
    """
    if isinstance(p, UniPoly):
        tw = tower or FieldTower()
        depth = tw.height
        coeffs = [el_from_rational(depth, c) for c in p.c]
    elif p and isinstance(p[0], AlgebraicNumber):
        tw = tower or p[0].tower
        depth = max(c.depth for c in p)
        coeffs = [el_lift(c.rep, c.depth, depth) for c in p]
    else:
        if tower is None:
            raise ValueError("raw coefficient lists need an explicit tower")
        tw = tower
        depth = tw.height
        coeffs = list(p)
    coeffs = _tp_trim(tw, depth, coeffs)
    if len(coeffs) <= 1:
        raise ValueError("constant polynomial has no well-defined root set")
    monic = _tp_monic(tw, depth, coeffs)
    out: list[tuple[AlgebraicNumber, int]] = []
    for factor, mult in tp_squarefree_monic(tw, depth, monic):
        if el_is_zero(tw, depth, factor[0]):
            out.append((rational_number(0, tw), mult))
            factor = factor[1:]
            if len(factor) == 1:
                continue
        rats = [el_to_rational(tw, depth, c) for c in factor]
        if all(r is not None for r in rats):
            _roots_of_rational_poly(tw, depth, UniPoly(rats), mult, out)
        elif len(factor) == 2:
            root = el_neg(depth, el_div(tw, depth, factor[0], factor[1]))
            out.append((AlgebraicNumber(tw, depth, root), mult))
        else:
            _extend_with_isolated(tw, depth, factor, mult, out)
    total = sum(m for _, m in out)
    if total != len(coeffs) - 1:
        raise ArithmeticError(
            f"root multiplicities sum to {total}, expected {len(coeffs) - 1}"
        )
    out.sort(key=lambda rm: rm[0].order_key(64))
    return out
