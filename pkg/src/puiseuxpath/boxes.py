"""Rational interval arithmetic and axis-aligned complex boxes.

All endpoints are exact ``Fraction`` values, so every enclosure statement
("this box contains the value") is a theorem about exact arithmetic, not a
floating-point approximation.  Outward rounding (`round_out`) is the only
place where enclosures are deliberately loosened, to keep denominators from
compounding across long refinement chains.
"""

from __future__ import annotations

from fractions import Fraction


class RealInterval:
    """Closed interval [lo, hi] with rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, o: "RealInterval") -> "RealInterval":
        return RealInterval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o: "RealInterval") -> "RealInterval":
        return RealInterval(self.lo - o.hi, self.hi - o.lo)

    def __neg__(self) -> "RealInterval":
        return RealInterval(-self.hi, -self.lo)

    def __mul__(self, o: "RealInterval") -> "RealInterval":
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RealInterval(min(ps), max(ps))

    def square(self) -> "RealInterval":
        if self.lo >= 0:
            return RealInterval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return RealInterval(self.hi * self.hi, self.lo * self.lo)
        m = max(-self.lo, self.hi)
        return RealInterval(0, m * m)

    def recip(self) -> "RealInterval":
        if self.contains_zero():
            raise ZeroDivisionError("interval straddles zero")
        return RealInterval(1 / self.hi, 1 / self.lo)

    def scale(self, r) -> "RealInterval":
        r = Fraction(r)
        if r >= 0:
            return RealInterval(self.lo * r, self.hi * r)
        return RealInterval(self.hi * r, self.lo * r)

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains(self, r) -> bool:
        return self.lo <= r <= self.hi

    def strictly_inside(self, o: "RealInterval") -> bool:
        return o.lo < self.lo and self.hi < o.hi

    def intersect(self, o: "RealInterval") -> "RealInterval | None":
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        return RealInterval(lo, hi) if lo <= hi else None

    def disjoint(self, o: "RealInterval") -> bool:
        return self.hi < o.lo or o.hi < self.lo

    def abs_upper(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def abs_lower(self) -> Fraction:
        if self.contains_zero():
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def round_out(self, bits: int) -> "RealInterval":
        """Widen endpoints outward onto the 2^-bits grid."""
        scale = 1 << bits
        lo = Fraction((self.lo * scale).__floor__(), scale)
        hi = Fraction(-((-self.hi * scale).__floor__()), scale)
        return RealInterval(lo, hi)


class Box:
    """Axis-aligned rectangle in the complex plane with rational corners."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealInterval, im: RealInterval | None = None):
        self.re = re
        self.im = im if im is not None else RealInterval(0)

    @staticmethod
    def point(re, im=0) -> "Box":
        return Box(RealInterval(re), RealInterval(im))

    def __repr__(self):
        return f"Box(re={self.re}, im={self.im})"

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)

    def mid(self) -> tuple[Fraction, Fraction]:
        return self.re.mid, self.im.mid

    def __add__(self, o: "Box") -> "Box":
        return Box(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "Box") -> "Box":
        return Box(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "Box":
        return Box(-self.re, -self.im)

    def __mul__(self, o: "Box") -> "Box":
        return Box(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    def scale(self, r) -> "Box":
        return Box(self.re.scale(r), self.im.scale(r))

    def abs_sq(self) -> RealInterval:
        return self.re.square() + self.im.square()

    def recip(self) -> "Box":
        inv = self.abs_sq().recip()
        return Box(self.re * inv, (-self.im) * inv)

    def __truediv__(self, o: "Box") -> "Box":
        return self * o.recip()

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains_point(self, re, im=0) -> bool:
        return self.re.contains(re) and self.im.contains(im)

    def strictly_inside(self, o: "Box") -> bool:
        return self.re.strictly_inside(o.re) and self.im.strictly_inside(o.im)

    def intersect(self, o: "Box") -> "Box | None":
        re = self.re.intersect(o.re)
        im = self.im.intersect(o.im)
        return Box(re, im) if re is not None and im is not None else None

    def disjoint(self, o: "Box") -> bool:
        return self.re.disjoint(o.re) or self.im.disjoint(o.im)

    def abs_upper(self) -> Fraction:
        # 1-norm bound: |z| <= |re| + |im|
        return self.re.abs_upper() + self.im.abs_upper()

    def abs_lower(self) -> Fraction:
        # inf-norm bound: |z| >= max(|re|, |im|) pointwise minimum over the box
        return max(self.re.abs_lower(), self.im.abs_lower())

    def round_out(self, bits: int) -> "Box":
        return Box(self.re.round_out(bits), self.im.round_out(bits))

    def subdivide(self, cre: Fraction, cim: Fraction) -> list["Box"]:
        """Split into up to four boxes at an interior crossing point."""
        res = []
        re_parts = [
            RealInterval(self.re.lo, cre),
            RealInterval(cre, self.re.hi),
        ]
        im_parts = [
            RealInterval(self.im.lo, cim),
            RealInterval(cim, self.im.hi),
        ]
        for rp in re_parts:
            for ip in im_parts:
                res.append(Box(rp, ip))
        return res
