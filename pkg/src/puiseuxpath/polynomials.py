"""Exact polynomial arithmetic over the rationals.

Two dense representations drive everything downstream: ``UniPoly`` for
polynomials in a single variable over Q, and ``BiPoly`` for polynomials in
a parameter (written ``mu``) and a dependent variable (written ``V``), held
as a vector of ``UniPoly`` coefficients indexed by V-degree.

All operations are pure: every method returns a fresh object and never
mutates its operands, so values can be shared freely.  Polynomial gcds in
Q[mu][V] go through a subresultant pseudo-remainder sequence, which keeps
intermediate coefficient growth polynomial instead of exponential; the
resultant is the determinant of the Sylvester matrix, evaluated by
fraction-free (Bareiss) elimination so every division is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateInputError, ParseError

#: Exact scalar type used throughout the package.  Always normalized:
#: denominators are positive and gcd(numerator, denominator) = 1.
Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class UniPoly:
    """Dense univariate polynomial over Q.

    Coefficients are stored low degree first with no trailing zeros; the
    zero polynomial is the empty tuple and reports degree -1.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_rational(x) for x in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.c = tuple(cs)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "UniPoly":
        return UniPoly()

    @staticmethod
    def const(x) -> "UniPoly":
        return UniPoly([x])

    @staticmethod
    def var() -> "UniPoly":
        return UniPoly([0, 1])

    @staticmethod
    def monomial(coeff, exp: int) -> "UniPoly":
        return UniPoly([0] * exp + [coeff])

    # -- structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_const(self) -> bool:
        return len(self.c) <= 1

    def lc(self) -> Fraction:
        """Leading coefficient (0 for the zero polynomial)."""
        return self.c[-1] if self.c else _ZERO

    def constant(self) -> Fraction:
        return self.c[0] if self.c else _ZERO

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if 0 <= k < len(self.c) else _ZERO

    def order(self) -> int | None:
        """Smallest exponent with a nonzero coefficient; None if zero."""
        for k, x in enumerate(self.c):
            if x != 0:
                return k
        return None

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, x in enumerate(b):
            out[k] += x
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly([-x for x in self.c])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.c, other.c
        if not a or not b:
            return UniPoly()
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return UniPoly(out)

    def scale(self, r) -> "UniPoly":
        r = _as_rational(r)
        return UniPoly([r * x for x in self.c])

    def shift(self, k: int) -> "UniPoly":
        """Multiply by the k-th power of the variable."""
        if self.is_zero():
            return self
        return UniPoly((0,) * k + self.c)

    def __pow__(self, n: int) -> "UniPoly":
        result = UniPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        """Quotient and remainder in Q[x]."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        d = other.degree
        lb = other.lc()
        quot = [_ZERO] * max(0, len(rem) - d)
        for k in range(len(rem) - 1, d - 1, -1):
            q = rem[k] / lb
            if q == 0:
                continue
            quot[k - d] = q
            for j, y in enumerate(other.c):
                rem[k - d + j] -= q * y
        return UniPoly(quot), UniPoly(rem)

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division was expected to be exact")
        return q

    def derivative(self) -> "UniPoly":
        return UniPoly([k * x for k, x in enumerate(self.c)][1:])

    def eval(self, x) -> Fraction:
        x = _as_rational(x)
        acc = _ZERO
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def compose_shift(self, a) -> "UniPoly":
        """Substitute (x + a) for x."""
        a = _as_rational(a)
        acc = UniPoly()
        xa = UniPoly([a, 1])
        for coef in reversed(self.c):
            acc = acc * xa + UniPoly.const(coef)
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.lc())

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd in Q[x]."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    # -- comparison / rendering ----------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def render(self, var: str = "mu") -> str:
        return _render_terms(
            [(x, {var: k} if k else {}) for k, x in enumerate(self.c) if x != 0]
        )

    def __repr__(self):
        return f"UniPoly({self.render()})"


def _render_coeff_exp(coeff: Fraction, powers: dict[str, int]) -> str:
    parts = []
    if not powers or abs(coeff) != 1:
        parts.append(str(abs(coeff)))
    for var, k in powers.items():
        parts.append(var if k == 1 else f"{var}^{k}")
    return "*".join(parts) if parts else "1"


def _render_terms(terms: list[tuple[Fraction, dict[str, int]]]) -> str:
    """Render (coefficient, {var: power}) terms, highest degree first."""
    if not terms:
        return "0"
    out = []
    for coeff, powers in reversed(terms):
        body = _render_coeff_exp(coeff, powers)
        if not out:
            out.append(body if coeff > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(out)


class BiPoly:
    """Polynomial in Q[mu][V], stored as UniPoly coefficients by V-degree.

    ``cv[j]`` is the coefficient of V^j, a polynomial in mu.  Trailing zero
    coefficients are trimmed, so ``deg_v`` is exact; the zero polynomial
    has ``deg_v == -1``.
    """

    __slots__ = ("cv",)

    def __init__(self, coeffs: Iterable[UniPoly] = ()):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.cv = tuple(cs)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly()

    @staticmethod
    def const(x) -> "BiPoly":
        return BiPoly([UniPoly.const(x)])

    @staticmethod
    def from_dict(d: dict[tuple[int, int], Fraction]) -> "BiPoly":
        """Build from {(v_exp, mu_exp): coefficient}."""
        if not d:
            return BiPoly()
        dv = max(j for j, _ in d)
        cols: list[dict[int, Fraction]] = [{} for _ in range(dv + 1)]
        for (j, k), x in d.items():
            cols[j][k] = cols[j].get(k, _ZERO) + _as_rational(x)
        out = []
        for col in cols:
            if col:
                n = max(col) + 1
                out.append(UniPoly([col.get(k, _ZERO) for k in range(n)]))
            else:
                out.append(UniPoly())
        return BiPoly(out)

    # -- structure -------------------------------------------------------

    @property
    def deg_v(self) -> int:
        return len(self.cv) - 1

    @property
    def deg_mu(self) -> int:
        return max((p.degree for p in self.cv if not p.is_zero()), default=-1)

    def is_zero(self) -> bool:
        return not self.cv

    def coeff_v(self, j: int) -> UniPoly:
        return self.cv[j] if 0 <= j < len(self.cv) else UniPoly()

    def lc_v(self) -> UniPoly:
        return self.cv[-1] if self.cv else UniPoly()

    def support(self) -> list[tuple[int, int]]:
        """All (v_exp, mu_exp) pairs with nonzero coefficient."""
        pts = []
        for j, p in enumerate(self.cv):
            for k, x in enumerate(p.c):
                if x != 0:
                    pts.append((j, k))
        return pts

    def to_dict(self) -> dict[tuple[int, int], Fraction]:
        return {
            (j, k): x
            for j, p in enumerate(self.cv)
            for k, x in enumerate(p.c)
            if x != 0
        }

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        a, b = self.cv, other.cv
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, p in enumerate(b):
            out[j] = out[j] + p
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly([-p for p in self.cv])

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        a, b = self.cv, other.cv
        if not a or not b:
            return BiPoly()
        out = [UniPoly() for _ in range(len(a) + len(b) - 1)]
        for i, p in enumerate(a):
            if p.is_zero():
                continue
            for j, q in enumerate(b):
                if q.is_zero():
                    continue
                out[i + j] = out[i + j] + p * q
        return BiPoly(out)

    def scale_mu(self, p: UniPoly) -> "BiPoly":
        return BiPoly([q * p for q in self.cv])

    def scale(self, r) -> "BiPoly":
        return BiPoly([q.scale(r) for q in self.cv])

    def derivative_v(self) -> "BiPoly":
        return BiPoly([p.scale(j) for j, p in enumerate(self.cv)][1:])

    def derivative_mu(self) -> "BiPoly":
        return BiPoly([p.derivative() for p in self.cv])

    def eval_mu(self, x) -> UniPoly:
        """Substitute a rational for mu, leaving a polynomial in V."""
        return UniPoly([p.eval(x) for p in self.cv])

    def eval_v_poly(self, s: UniPoly) -> UniPoly:
        """Substitute a polynomial in mu for V, collapsing to Q[mu]."""
        acc = UniPoly()
        for p in reversed(self.cv):
            acc = acc * s + p
        return acc

    def eval(self, mu, v) -> Fraction:
        acc = _ZERO
        v = _as_rational(v)
        for p in reversed(self.cv):
            acc = acc * v + p.eval(mu)
        return acc

    def swap_vars(self) -> "BiPoly":
        """Exchange the roles of mu and V."""
        return BiPoly.from_dict({(k, j): x for (j, k), x in self.to_dict().items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, BiPoly) and self.cv == other.cv

    def __hash__(self):
        return hash(self.cv)

    def __repr__(self):
        return f"BiPoly({render_bipoly(self)})"

    # -- content / normalization -------------------------------------------

    def content_and_primitive(self) -> tuple[UniPoly, "BiPoly"]:
        """Split off the content in Q[mu].

        The content is the monic gcd of the V-coefficients (the monic
        convention pushes any overall rational scale into the primitive
        part).  Returns (content, primitive) with P = content * primitive.
        """
        if self.is_zero():
            return UniPoly.const(1), self
        g = UniPoly()
        for p in self.cv:
            g = g.gcd(p)
            if g.is_const() and not g.is_zero():
                g = UniPoly.const(1)
                break
        return g, BiPoly([p.exact_div(g) for p in self.cv])

    def sign_normalized(self) -> "BiPoly":
        """Flip the global sign so the leading V-coefficient has positive lead."""
        if not self.is_zero() and self.lc_v().lc() < 0:
            return -self
        return self

    def lead_normalized(self) -> "BiPoly":
        """Scale by a rational unit so the leading coefficient's lead is 1.

        Canonicalizes results defined only up to a rational factor (gcds).
        """
        if self.is_zero():
            return self
        return self.scale(1 / self.lc_v().lc())

    def normalized(self) -> "BiPoly":
        """Primitive, sign-normalized copy (canonical up to nothing)."""
        _, prim = self.content_and_primitive()
        return prim.sign_normalized()

    # -- gcd / resultant ------------------------------------------------------

    def pseudo_rem(self, other: "BiPoly") -> "BiPoly":
        """Pseudo-remainder with respect to V: lc(other)^(d+1) * self mod other."""
        if other.is_zero():
            raise ZeroDivisionError("pseudo-division by zero")
        d = self.deg_v - other.deg_v
        if d < 0:
            return self
        lb = other.lc_v()
        r = self
        steps = 0
        while not r.is_zero() and r.deg_v >= other.deg_v:
            k = r.deg_v - other.deg_v
            lr = r.lc_v()
            r = r.scale_mu(lb) - BiPoly([UniPoly()] * k + [lr * p for p in other.cv])
            steps += 1
        for _ in range(d + 1 - steps):
            r = r.scale_mu(lb)
        return r

    def exact_div_mu(self, p: UniPoly) -> "BiPoly":
        return BiPoly([q.exact_div(p) for q in self.cv])

    def exact_div(self, other: "BiPoly") -> "BiPoly":
        """Exact division in Q[mu][V]; raises if the division leaves a remainder."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.cv)
        db = other.deg_v
        lb = other.lc_v()
        quot = [UniPoly() for _ in range(max(0, len(rem) - db))]
        for k in range(len(rem) - 1, db - 1, -1):
            if rem[k].is_zero():
                continue
            q, r = rem[k].divmod(lb)
            if not r.is_zero():
                raise ArithmeticError("division was expected to be exact")
            quot[k - db] = q
            for j, y in enumerate(other.cv):
                rem[k - db + j] = rem[k - db + j] - q * y
        if any(not p.is_zero() for p in rem):
            raise ArithmeticError("division was expected to be exact")
        return BiPoly(quot)

    def gcd(self, other: "BiPoly", var: str = "V") -> "BiPoly":
        """Gcd in Q[mu][V] (or with the roles swapped for var="mu").

        Computed by a subresultant pseudo-remainder sequence on primitive
        parts; the content gcd is a plain monic gcd in Q[mu].  The result
        is primitive and sign-normalized.
        """
        if var == "mu":
            return self.swap_vars().gcd(other.swap_vars()).swap_vars()
        if self.is_zero():
            return other.normalized().lead_normalized()
        if other.is_zero():
            return self.normalized().lead_normalized()
        ca, pa = self.content_and_primitive()
        cb, pb = other.content_and_primitive()
        cont = ca.gcd(cb)
        if pa.deg_v < pb.deg_v:
            pa, pb = pb, pa
        if pb.deg_v == 0:
            # a nonzero constant-in-V operand: only the contents can match
            return BiPoly([cont]).lead_normalized()
        a, b = pa, pb
        g = UniPoly.const(1)
        h = UniPoly.const(1)
        while True:
            d = a.deg_v - b.deg_v
            r = a.pseudo_rem(b)
            if r.is_zero():
                break
            if r.deg_v == 0:
                b = r
                break
            r = r.exact_div_mu(g * h**d)
            a, b = b, r
            g = a.lc_v()
            h = (g**d).exact_div(h ** (d - 1)) if d >= 1 else h ** (1 - d) * g**d
        if b.deg_v == 0:
            return BiPoly([cont]).lead_normalized()
        _, prim = b.content_and_primitive()
        return prim.scale_mu(cont).lead_normalized()

    def separable_part(self, var: str = "V") -> "BiPoly":
        """Same roots in V, each with multiplicity one.

        P / gcd(P, dP/dV), made primitive and sign-normalized.
        """
        if var == "mu":
            return self.swap_vars().separable_part().swap_vars()
        if self.deg_v <= 0:
            return self.normalized()
        g = self.gcd(self.derivative_v())
        quot = self.exact_div(g) if g.deg_v > 0 else self
        return quot.normalized()

    def resultant(self, other: "BiPoly", var: str = "V") -> UniPoly:
        """Determinant of the Sylvester matrix with respect to ``var``.

        Evaluated by fraction-free Gaussian elimination so all divisions
        stay exact in Q[mu].
        """
        if var == "mu":
            res = self.swap_vars().resultant(other.swap_vars())
            return res  # a polynomial in the remaining variable
        m, n = self.deg_v, other.deg_v
        if m <= 0 and n <= 0:
            raise DegenerateInputError(
                "resultant needs positive degree in the eliminated variable"
            )
        if m < 0 or n < 0:
            return UniPoly()
        if m == 0:
            return self.cv[0] ** n
        if n == 0:
            return other.cv[0] ** m
        size = m + n
        rows: list[list[UniPoly]] = []
        a = [self.coeff_v(m - k) for k in range(m + 1)]
        b = [other.coeff_v(n - k) for k in range(n + 1)]
        for i in range(n):
            rows.append(
                [UniPoly()] * i + a + [UniPoly()] * (size - m - 1 - i)
            )
        for i in range(m):
            rows.append(
                [UniPoly()] * i + b + [UniPoly()] * (size - n - 1 - i)
            )
        return _bareiss_det(rows)


def _bareiss_det(rows: list[list[UniPoly]]) -> UniPoly:
    """Fraction-free determinant of a square matrix over Q[mu]."""
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = UniPoly.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return UniPoly()
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = UniPoly()
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


# ---------------------------------------------------------------------------
# parsing / rendering
# ---------------------------------------------------------------------------

_PARAM_NAMES = {"mu", "x"}
_DEP_NAMES = {"v", "y", "t"}


class _Tokens:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str]] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("num", text[i:j]))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.toks.append(("name", text[i:j]))
                i = j
                continue
            if ch in "+-*/^()":
                self.toks.append((ch, ch))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r} in polynomial")
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self) -> tuple[str, str]:
        if self.pos >= len(self.toks):
            raise ParseError("unexpected end of polynomial")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok


def parse_bipoly(text: str) -> BiPoly:
    """Parse polynomial text into a ``BiPoly``.

    The grammar covers integer and rational literals, the parameter
    (``mu``, alias ``X``), the dependent variable (``V``, aliases ``Y``
    and ``T``), ``+ - * ^`` and parentheses, e.g.::

        2*T^3 + (2 - 1/2*mu)*T^2 - (mu + 2)*T - 2

    Adjacent factors multiply implicitly (``2mu`` means ``2*mu``).
    """
    toks = _Tokens(text)
    poly = _parse_sum(toks)
    if toks.pos != len(toks.toks):
        kind, val = toks.toks[toks.pos]
        raise ParseError(f"unexpected {val!r} after polynomial")
    return poly


def _parse_sum(toks: _Tokens) -> BiPoly:
    acc = _parse_product(toks)
    while toks.peek() in ("+", "-"):
        op, _ = toks.next()
        rhs = _parse_product(toks)
        acc = acc + rhs if op == "+" else acc - rhs
    return acc


def _parse_product(toks: _Tokens) -> BiPoly:
    acc = _parse_factor(toks)
    while True:
        nxt = toks.peek()
        if nxt == "*":
            toks.next()
            acc = acc * _parse_factor(toks)
        elif nxt in ("num", "name", "("):
            acc = acc * _parse_factor(toks)
        else:
            return acc


def _parse_factor(toks: _Tokens) -> BiPoly:
    if toks.peek() == "-":
        toks.next()
        return -_parse_factor(toks)
    if toks.peek() == "+":
        toks.next()
        return _parse_factor(toks)
    base = _parse_atom(toks)
    while toks.peek() == "^":
        toks.next()
        kind, val = toks.next()
        if kind != "num":
            raise ParseError("exponent must be a nonnegative integer")
        e = int(val)
        acc = BiPoly.const(1)
        for _ in range(e):
            acc = acc * base
        base = acc
    if toks.peek() == "/":
        save = toks.pos
        toks.next()
        kind, val = toks.next()
        if kind == "num":
            base = base.scale(Fraction(1, int(val)))
        else:
            toks.pos = save
    return base


def _parse_atom(toks: _Tokens) -> BiPoly:
    kind, val = toks.next()
    if kind == "num":
        return BiPoly.const(Fraction(int(val)))
    if kind == "name":
        low = val.lower()
        if low in _PARAM_NAMES:
            return BiPoly([UniPoly.var()])
        if low in _DEP_NAMES:
            return BiPoly([UniPoly(), UniPoly.const(1)])
        raise ParseError(
            f"unknown variable {val!r}: use mu/X for the parameter, V/Y/T for the unknown"
        )
    if kind == "(":
        inner = _parse_sum(toks)
        kind, val = toks.next()
        if kind != ")":
            raise ParseError("unbalanced parenthesis")
        return inner
    raise ParseError(f"unexpected {val!r} in polynomial")


def render_bipoly(p: BiPoly, param: str = "mu", dep: str = "V") -> str:
    """Deterministic text form, highest V-degree first."""
    if p.is_zero():
        return "0"
    chunks = []
    for j in range(p.deg_v, -1, -1):
        cj = p.coeff_v(j)
        if cj.is_zero():
            continue
        if j == 0:
            nonzero = [x for x in cj.c if x != 0]
            body = cj.render(param)
            if len(nonzero) > 1:
                body = f"({body})"
            chunk = body
        else:
            vpart = dep if j == 1 else f"{dep}^{j}"
            nonzero = [x for x in cj.c if x != 0]
            if len(nonzero) == 1:
                k = cj.order()
                coeff = cj.c[k]
                mu_part = "" if k == 0 else (param if k == 1 else f"{param}^{k}")
                pieces = []
                if abs(coeff) != 1 or (not mu_part and False):
                    pieces.append(str(abs(coeff)))
                if mu_part:
                    pieces.append(mu_part)
                pieces.append(vpart)
                body = "*".join(pieces)
                chunk = body if coeff > 0 else f"-{body}"
            else:
                chunk = f"({cj.render(param)})*{vpart}"
        chunks.append(chunk)
    out = chunks[0]
    for chunk in chunks[1:]:
        if chunk.startswith("-"):
            out += " - " + chunk[1:]
        else:
            out += " + " + chunk
    return out
