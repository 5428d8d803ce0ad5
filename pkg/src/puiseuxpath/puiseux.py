"""Newton polygons and Puiseux expansions of plane curves over Q.

The expansion engine follows the classical polygon iteration: pick a
segment of slope gamma, take a root a of its edge polynomial, substitute
V = mu^gamma (a + V') and repeat on the renormalized polynomial.  Working
exponents are kept as exact fractions on a common grid (1/L)Z instead of
rescaling the parameter, so every recorded exponent is an exponent of the
actual series in mu.  Once the working root becomes simple the branch is
analytic in mu^(1/q) with q = lcm of the exponent denominators seen so
far, and a few more terms are collected by linear steps.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .algebraic import (
    AlgebraicNumber,
    FieldTower,
    el_add,
    el_div,
    el_from_rational,
    el_is_zero,
    el_lift,
    el_mul,
    el_neg,
    el_one,
    el_reduce,
    el_scale,
    el_to_rational,
    el_zero,
    isolate_roots,
    rational_nth_root,
    rational_number,
    roots_with_multiplicity,
)
from .errors import DegenerateInputError, IterationGuardError
from .polynomials import BiPoly, UniPoly

__all__ = [
    "Branch",
    "PolygonSegment",
    "expand",
    "newton_polygon",
    "reconstruct_residual",
    "render_branch",
]


# ---------------------------------------------------------------------------
# sparse series in mu with tower coefficients
#
# Exponents are stored as integers in units of 1/L for a per-node scale L,
# so dictionary keys stay cheap to hash and the polygon hull is pure
# integer geometry.  Picking a segment of denominator w refines the grid
# to L*w, which is the same bookkeeping as substituting mu -> mu^w in the
# classical algorithm.


def gp_from_unipoly(p: UniPoly, depth: int, scale: int = 1) -> dict:
    return {
        k * scale: el_from_rational(depth, c)
        for k, c in enumerate(p.c)
        if c != 0
    }


def gp_lift(a: dict, from_depth: int, to_depth: int) -> dict:
    if from_depth == to_depth:
        return a
    return {e: el_lift(c, from_depth, to_depth) for e, c in a.items()}


def gp_rescale(a: dict, f: int) -> dict:
    if f == 1:
        return a
    return {e * f: c for e, c in a.items()}


def gp_add(tw: FieldTower, depth: int, a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        if e in out:
            out[e] = el_add(depth, out[e], c)
        else:
            out[e] = c
    return out


def gp_order(tw: FieldTower, depth: int, a: dict) -> int | None:
    """Smallest exponent with a nonzero coefficient; prunes zero entries."""
    for e in sorted(a):
        if el_is_zero(tw, depth, a[e]):
            del a[e]
        else:
            return e
    return None


def gp_is_zero(tw: FieldTower, depth: int, a: dict) -> bool:
    return gp_order(tw, depth, a) is None


def gp_coeff(tw: FieldTower, depth: int, a: dict, e: int):
    """Coefficient at exponent e, or None when absent or provably zero."""
    c = a.get(e)
    if c is None:
        return None
    if el_is_zero(tw, depth, c):
        del a[e]
        return None
    return c


# ---------------------------------------------------------------------------
# polygons


class PolygonSegment:
    """One edge of the lower Newton polygon.

    gamma is the candidate exponent (negated slope), beta the common value
    of m + gamma*j along the edge, and edge_poly collects the coefficients
    of the support points on the edge as a polynomial in T^(j - j0).
    """

    __slots__ = ("j0", "j1", "m0", "m1", "gamma", "beta", "edge_poly")

    def __init__(self, j0, m0, j1, m1, edge_poly):
        self.j0 = j0
        self.m0 = m0
        self.j1 = j1
        self.m1 = m1
        self.gamma = Fraction(m0 - m1, j1 - j0)
        self.beta = Fraction(m0) + self.gamma * j0
        self.edge_poly = edge_poly

    @property
    def endpoints(self) -> tuple[tuple[int, Fraction], tuple[int, Fraction]]:
        return ((self.j0, self.m0), (self.j1, self.m1))

    def __repr__(self):
        return (
            f"PolygonSegment(({self.j0},{self.m0})->({self.j1},{self.m1}), "
            f"gamma={self.gamma}, edge={self.edge_poly.render('T')})"
        )


def _lower_hull(pts: list[tuple]) -> list[tuple]:
    """Lower convex hull of points sorted by x with distinct x."""
    hull: list[tuple] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(p: BiPoly) -> list[PolygonSegment]:
    """Lower Newton polygon of p, segments ordered by increasing gamma.

    Points are (j, ord_mu p_j) over the V-degrees j with p_j != 0.  Raises
    DegenerateInputError when the support has fewer than two distinct
    V-degrees (a mu-scaled monomial in V carries no polygon).
    """
    pts = []
    for j in range(p.deg_v + 1):
        pj = p.coeff_v(j)
        if not pj.is_zero():
            pts.append((j, Fraction(pj.order())))
    if len(pts) < 2:
        raise DegenerateInputError(
            "Newton polygon needs at least two V-degrees in the support"
        )
    segs = []
    hull = _lower_hull(pts)
    for (j0, m0), (j1, m1) in zip(hull, hull[1:]):
        gamma = Fraction(m0 - m1, j1 - j0)
        beta = m0 + gamma * j0
        coeffs = []
        for j in range(j0, j1 + 1):
            m = beta - gamma * j
            if m.denominator == 1:
                coeffs.append(p.coeff_v(j).coeff(int(m)))
            else:
                coeffs.append(Fraction(0))
        segs.append(PolygonSegment(j0, m0, j1, m1, UniPoly(coeffs)))
    segs.sort(key=lambda s: s.gamma)
    return segs


def _grid_hull_segments(tw, depth, coeffs: list[dict]):
    """Hull segments (slope, j0, m0, j1, m1) by increasing slope.

    The slope is (m0 - m1)/(j1 - j0) in grid units: the true gamma times
    the node's grid scale.
    """
    pts = []
    for j, q in enumerate(coeffs):
        m = gp_order(tw, depth, q)
        if m is not None:
            pts.append((j, m))
    if len(pts) < 2:
        return []
    hull = _lower_hull(pts)
    segs = [
        (Fraction(m0 - m1, j1 - j0), j0, m0, j1, m1)
        for (j0, m0), (j1, m1) in zip(hull, hull[1:])
    ]
    segs.sort(key=lambda s: s[0])
    return segs


# ---------------------------------------------------------------------------
# branches


class Branch:
    """One Puiseux branch, conjugates collapsed into a representative.

    terms are (exponent, coefficient) pairs with exponents in (1/q)Z and
    nonzero algebraic coefficients, lowest exponent first.  q is the
    ramification index; the branch stands for q conjugate sheets, so the
    conjugate counts over all branches of a separable curve sum to deg_V.
    iterations_used counts guarded polygon substitutions only; the
    post-stabilization terms come from a loop bounded by max_extra_terms.
    """

    __slots__ = (
        "terms",
        "q",
        "conjugate_count",
        "exact",
        "iterations_used",
        "tower",
        "multiplicity",
    )

    def __init__(self, terms, q, exact, iterations_used, tower,
                 multiplicity=1):
        self.terms = terms
        self.q = q
        self.conjugate_count = q
        self.exact = exact
        self.iterations_used = iterations_used
        self.tower = tower
        self.multiplicity = multiplicity

    @property
    def center(self) -> AlgebraicNumber:
        if self.terms and self.terms[0][0] == 0:
            return self.terms[0][1]
        return rational_number(0, self.tower)

    def ramification_index(self) -> int:
        return self.q

    def __repr__(self):
        return render_branch(self)


def _coeff_str(x: AlgebraicNumber) -> str:
    r = x.as_rational()
    if r is not None:
        return str(r)
    b = x.box(48)
    re = float(b.re.mid)
    im = float(b.im.mid)
    if abs(im) < 1e-12:
        return f"{re:.10g}"
    sign = "+" if im >= 0 else "-"
    return f"({re:.10g}{sign}{abs(im):.10g}i)"


def _exp_str(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e})"


def render_branch(b: Branch) -> str:
    parts = []
    for e, c in b.terms:
        cs = _coeff_str(c)
        if e == 0:
            parts.append(cs)
        elif e == 1:
            parts.append(f"{cs}*mu")
        else:
            parts.append(f"{cs}*mu^{_exp_str(e)}")
    series = " + ".join(parts) if parts else "0"
    if b.exact:
        series += " (exact)"
    return f"center={_coeff_str(b.center)} q={b.q} series={series}"


# ---------------------------------------------------------------------------
# the expansion engine


class _Ctx:
    __slots__ = ("limit", "count", "max_extra", "center_filter")

    def __init__(self, limit, max_extra, center_filter):
        self.limit = limit
        self.count = 0
        self.max_extra = max_extra
        self.center_filter = center_filter

    def tick(self):
        self.count += 1
        if self.count > self.limit:
            raise IterationGuardError(
                f"expansion exceeded the {self.limit}-substitution budget; "
                "the input is likely not square-free in V"
            )


def _w_root_representative(xi: AlgebraicNumber, w: int) -> AlgebraicNumber:
    """Deterministic w-th root of xi: exact rational when possible, else
    the isolated root with the largest (re, im) midpoint."""
    if w == 1:
        return xi
    tw = xi.tower
    r = el_to_rational(tw, xi.depth, xi.rep)
    if r is not None:
        rr = rational_nth_root(r, w)
        if rr is not None:
            return rational_number(rr, tw)
    # tower extensions want their defining polynomial at the top depth
    depth = tw.height
    rep = el_lift(el_reduce(tw, xi.depth, xi.rep), xi.depth, depth)
    poly = (
        [el_neg(depth, rep)]
        + [el_zero(depth) for _ in range(w - 1)]
        + [el_one(depth)]
    )
    boxes = isolate_roots(tw, depth, poly)
    pick = max(range(len(boxes)),
               key=lambda i: (boxes[i].re.mid, boxes[i].im.mid))
    branch_tw = tw.clone()
    branch_tw.extend(poly, boxes[pick])
    return AlgebraicNumber.generator(branch_tw)


def _substitute(tw, depth, coeffs: list[dict], gamma_u: int,
                beta_u: int, a) -> list[dict]:
    """mu^-beta P(mu, mu^gamma (a + V)) with exponents in grid units.

    gamma_u and beta_u are gamma and beta multiplied by the grid scale, so
    every exponent shift is an integer.
    """
    d = len(coeffs) - 1
    apow = [el_one(depth)]
    for _ in range(d):
        apow.append(el_mul(tw, depth, apow[-1], a))
    out: list[dict] = [dict() for _ in range(d + 1)]
    rational = depth == 0
    for j, pj in enumerate(coeffs):
        if not pj:
            continue
        shift = gamma_u * j - beta_u
        for i in range(j + 1):
            acc = out[i]
            if i == j:
                # factor is a^0 * C(j, j) = 1
                for e, c in pj.items():
                    k = e + shift
                    cur = acc.get(k)
                    acc[k] = c if cur is None else el_add(depth, cur, c)
                continue
            f = el_scale(depth, apow[j - i], Fraction(math.comb(j, i)))
            if rational:
                for e, c in pj.items():
                    k = e + shift
                    cur = acc.get(k)
                    acc[k] = f * c if cur is None else cur + f * c
            else:
                for e, c in pj.items():
                    k = e + shift
                    prod = el_mul(tw, depth, c, f)
                    cur = acc.get(k)
                    acc[k] = prod if cur is None else el_add(depth, cur, prod)
    return out


def _term_lcm(terms) -> int:
    q = 1
    for e, _ in terms:
        q = q * e.denominator // math.gcd(q, e.denominator)
    return q


def _continue_stabilized(tw, depth, coeffs, scale, prefix, terms, ctx):
    """Collect up to max_extra more terms of a branch with a simple root.

    A simple working root keeps the (0, m0) -> (1, 0) polygon segment, so
    each further term is a linear solve with no new ramification.
    """
    exact = False
    for _ in range(ctx.max_extra):
        m0 = gp_order(tw, depth, coeffs[0])
        if m0 is None:
            exact = True
            break
        c1 = gp_coeff(tw, depth, coeffs[1], 0)
        if c1 is None:
            raise ArithmeticError(
                "stabilized branch lost its simple-root certificate"
            )
        c0 = coeffs[0][m0]
        a = el_neg(depth, el_div(tw, depth, c0, c1))
        # bounded by max_extra and certified to terminate: no guard tick
        coeffs = _substitute(tw, depth, coeffs, m0, m0, a)
        prefix = prefix + Fraction(m0, scale)
        terms = terms + [(prefix, AlgebraicNumber(tw, depth, a))]
    else:
        # one more look: the series may have terminated exactly
        if gp_is_zero(tw, depth, coeffs[0]):
            exact = True
    return Branch(
        terms=terms,
        q=_term_lcm(terms),
        exact=exact,
        iterations_used=ctx.count,
        tower=tw,
        multiplicity=1,
    )


def _expand_node(tw, depth, coeffs, scale, prefix, terms, ctx,
                 top_level) -> list[Branch]:
    out: list[Branch] = []
    state = (tw, depth, coeffs, scale, prefix, terms, top_level)
    # single-child multiplicity chains are looped rather than recursed:
    # a repeated factor keeps the working root multiplicity >= 2 all the
    # way to the iteration guard, far past the interpreter stack budget
    while state is not None:
        tw, depth, coeffs, scale, prefix, terms, top_level = state
        state = None
        # V-power factor: the accumulated series itself is an exact root
        k = 0
        while k < len(coeffs) and gp_is_zero(tw, depth, coeffs[k]):
            k += 1
        if k == len(coeffs):
            raise ArithmeticError("working polynomial collapsed to zero")
        if k > 0:
            out.append(Branch(
                terms=terms,
                q=_term_lcm(terms),
                exact=True,
                iterations_used=ctx.count,
                tower=tw,
                multiplicity=k,
            ))
            coeffs = coeffs[k:]
            if len(coeffs) == 1:
                break
        children = []
        for slope, j0, m0, j1, m1 in _grid_hull_segments(tw, depth, coeffs):
            if slope < 0 or (slope == 0 and not top_level):
                continue
            u, w_eff = slope.numerator, slope.denominator
            gamma = Fraction(u, w_eff * scale)
            phi = []
            for t in range((j1 - j0) // w_eff + 1):
                j = j0 + t * w_eff
                c = gp_coeff(tw, depth, coeffs[j], m0 - t * u)
                phi.append(c if c is not None else el_zero(depth))
            for xi, mult in roots_with_multiplicity(phi, tower=tw):
                if ctx.center_filter is not None and top_level:
                    # at gamma = 0 the edge root is the branch center
                    center = xi if slope == 0 else rational_number(0, tw)
                    if not ctx.center_filter(center):
                        continue
                ctx.tick()
                a_num = _w_root_representative(xi, w_eff)
                tw2 = a_num.tower
                depth2 = max(depth, a_num.depth)
                a_el = el_lift(a_num.rep, a_num.depth, depth2)
                lifted = [gp_rescale(gp_lift(c, depth, depth2), w_eff)
                          for c in coeffs]
                # on the refined grid both gamma and beta are integers
                new_scale = scale * w_eff
                gamma_u = u
                beta_u = m0 * w_eff + u * j0
                sub = _substitute(tw2, depth2, lifted, gamma_u, beta_u, a_el)
                new_terms = terms + [(prefix + gamma,
                                      AlgebraicNumber(tw2, depth2, a_el))]
                if mult == 1:
                    children.append(("stab", _continue_stabilized(
                        tw2, depth2, sub, new_scale, prefix + gamma,
                        new_terms, ctx
                    )))
                else:
                    children.append(("rec", (
                        tw2, depth2, sub, new_scale, prefix + gamma,
                        new_terms, False
                    )))
        if len(children) == 1 and children[0][0] == "rec":
            state = children[0][1]
            continue
        for kind, item in children:
            if kind == "stab":
                out.append(item)
            else:
                tw2, depth2, sub, sc, new_prefix, new_terms, top = item
                out.extend(_expand_node(tw2, depth2, sub, sc,
                                        new_prefix, new_terms, ctx, top))
    return out


def expand(p: BiPoly, max_extra_terms: int = 4,
           center_filter=None) -> list[Branch]:
    """All bounded Puiseux branches of p(mu, V) = 0 around mu = 0.

    Returns one representative per conjugacy class; segments with negative
    gamma (poles as mu -> 0) are skipped.  Raises IterationGuardError when
    the polygon iteration fails to stabilize within 4*deg_mu*deg_V^2
    substitutions, which is the signature of a repeated factor in V.
    """
    if p.is_zero():
        raise DegenerateInputError("cannot expand the zero polynomial")
    if p.deg_v < 1:
        raise DegenerateInputError("input has no V dependence")
    deg_mu = max(1, p.deg_mu)
    limit = 4 * deg_mu * p.deg_v**2
    ctx = _Ctx(limit, max_extra_terms, center_filter)
    tw = FieldTower()
    coeffs = [gp_from_unipoly(p.coeff_v(j), 0, 1) for j in range(p.deg_v + 1)]
    branches = _expand_node(tw, 0, coeffs, 1, Fraction(0), [], ctx,
                            top_level=True)
    if center_filter is not None:
        # segment branches were filtered as they were opened; the exact
        # zero branch (empty series) still needs its center checked
        branches = [b for b in branches if b.terms or center_filter(b.center)]
    return branches


# ---------------------------------------------------------------------------
# residual diagnostics


def reconstruct_residual(p: BiPoly, branch: Branch,
                         n_terms: int | None = None) -> Fraction | float:
    """mu-order of P(mu, s(mu)) for the truncated branch series s.

    Returns float('inf') when the truncation satisfies the curve exactly.
    More terms can only raise the order, which is the practical check that
    the expansion really converges to a root.
    """
    terms = branch.terms if n_terms is None else branch.terms[:n_terms]
    tw = branch.tower
    depth = tw.height
    scale = _term_lcm(terms)
    series: dict[int, object] = {}
    for e, c in terms:
        series[int(e * scale)] = el_lift(c.rep, c.depth, depth)
    # Horner in V over the grid series (series == {} multiplies acc by zero)
    acc: dict[int, object] = {}
    for j in range(p.deg_v, -1, -1):
        if acc:
            new: dict[int, object] = {}
            for e1, c1 in acc.items():
                for e2, c2 in series.items():
                    e = e1 + e2
                    prod = el_mul(tw, depth, c1, c2)
                    if e in new:
                        new[e] = el_add(depth, new[e], prod)
                    else:
                        new[e] = prod
            acc = new
        pj = p.coeff_v(j)
        if not pj.is_zero():
            acc = gp_add(tw, depth, acc, gp_from_unipoly(pj, depth, scale))
    order = gp_order(tw, depth, acc)
    return float("inf") if order is None else Fraction(order, scale)
