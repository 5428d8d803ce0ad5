"""Semidefinite instances and central-path numerics.

For min <C, X> subject to <A_i, X> = b_i and X positive semidefinite,
the central point at mu > 0 solves

    <A_i, X> = b_i,    sum_i y_i A_i + S = C,    X S = mu I.

Newton's method is applied to the symmetrized complementarity block
(XS + SX)/2 - mu I so iterates stay symmetric, with a
fraction-to-the-boundary line search keeping X and S positive definite.
All arithmetic runs in numpy extended precision so traces stay clean
well below mu = 1e-6.

Coordinates of a sample are ordered as vec(X) row-major, then y, then
vec(S) row-major, for a total length of m + 2 n^2.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

from .errors import (
    ConstantCoordinateError,
    InfeasibleInstanceError,
    InputError,
    InsufficientSamplesError,
    ParseError,
    SolveFailureError,
)

__all__ = [
    "SDOInstance",
    "CentralPathSample",
    "TraceResult",
    "ReparametrizationReport",
    "identity_instance",
    "elliptope_instance",
    "kl02_instance",
    "builtin_instance",
    "load_instance",
    "central_point",
    "trace_path",
    "fit_order",
    "fit_order_raw",
    "verify_reparametrization",
]

_LD = np.longdouble


def _sym_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


class SDOInstance:
    """One semidefinite problem with integer data.

    n is the matrix size, m the number of constraints. A holds the m
    constraint matrices, b the right-hand side, C the cost matrix.
    """

    __slots__ = ("n", "m", "A", "b", "C", "name")

    def __init__(self, A, b, C, name: str = "instance"):
        C_arr = np.array(C, dtype=_LD)
        if C_arr.ndim != 2 or C_arr.shape[0] != C_arr.shape[1]:
            raise InputError("C must be a square matrix")
        n = C_arr.shape[0]
        A_arr = [np.array(Ai, dtype=_LD) for Ai in A]
        b_arr = np.array(b, dtype=_LD)
        m = len(A_arr)
        if m == 0:
            raise InputError("need at least one constraint matrix")
        if b_arr.shape != (m,):
            raise InputError(f"b must have {m} entries, got shape {b_arr.shape}")
        for idx, Ai in enumerate(A_arr):
            if Ai.shape != (n, n):
                raise InputError(f"A[{idx}] must be {n}x{n}")
            if not np.array_equal(Ai, Ai.T):
                raise InputError(f"A[{idx}] is not symmetric")
        if not np.array_equal(C_arr, C_arr.T):
            raise InputError("C is not symmetric")
        stacked = np.array([Ai.ravel() for Ai in A_arr], dtype=np.float64)
        if np.linalg.matrix_rank(stacked) != m:
            raise InputError("constraint matrices are linearly dependent")
        self.n = n
        self.m = m
        self.A = A_arr
        self.b = b_arr
        self.C = C_arr
        self.name = name

    @property
    def dim(self) -> int:
        """Length of the coordinate vector (vec X, y, vec S)."""
        return self.m + 2 * self.n * self.n

    def coordinate_labels(self) -> list[str]:
        n = self.n
        labels = [f"X[{i},{j}]" for i in range(n) for j in range(n)]
        labels += [f"y[{i}]" for i in range(self.m)]
        labels += [f"S[{i},{j}]" for i in range(n) for j in range(n)]
        return labels

    def to_text(self) -> str:
        def rows(M):
            return "\n".join(
                " ".join(str(int(v)) for v in row) for row in np.asarray(M)
            )

        parts = [f"# {self.name}", f"{self.n} {self.m}"]
        for Ai in self.A:
            parts.append(rows(Ai))
        parts.append(" ".join(str(int(v)) for v in self.b))
        parts.append(rows(self.C))
        return "\n".join(parts) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "instance") -> "SDOInstance":
        tokens: list[str] = []
        for line in text.splitlines():
            body = line.split("#", 1)[0]
            tokens.extend(body.split())
        pos = 0

        def take(count: int) -> list[int]:
            nonlocal pos
            if pos + count > len(tokens):
                raise ParseError("instance text ended early")
            out = []
            for tok in tokens[pos : pos + count]:
                try:
                    out.append(int(tok))
                except ValueError:
                    raise ParseError(f"expected an integer, got {tok!r}") from None
            pos += count
            return out

        n, m = take(2)
        if n <= 0 or m <= 0:
            raise ParseError("matrix size and constraint count must be positive")
        A = []
        for _ in range(m):
            flat = take(n * n)
            A.append([flat[i * n : (i + 1) * n] for i in range(n)])
        b = take(m)
        flat = take(n * n)
        C = [flat[i * n : (i + 1) * n] for i in range(n)]
        if pos != len(tokens):
            raise ParseError(f"{len(tokens) - pos} trailing tokens in instance text")
        return cls(A, b, C, name=name)


def identity_instance(n: int = 3) -> SDOInstance:
    """tr X = n with identity cost; the central path is X = I, S = mu I."""
    if n < 1:
        raise InputError("matrix size must be at least 1")
    eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return SDOInstance([eye], [n], eye, name=f"identity_{n}")


def elliptope_instance() -> SDOInstance:
    """Correlation-matrix feasible set with cost 4 X12 - 4 X13 - 2 X23.

    Unit diagonal is forced by the three constraints; the cost matrix
    halves each coefficient because <C, X> counts off-diagonal pairs
    twice.
    """
    A = [
        [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
    ]
    b = [1, 1, 1]
    C = [[0, 2, -2], [2, 0, -1], [-2, -1, 0]]
    return SDOInstance(A, b, C, name="elliptope_3")


def kl02_instance(n: int = 4) -> SDOInstance:
    """Arrow-pattern family whose dual slack decays like mu^(2^-(n-2)).

    The dual variable y fills the slack matrix

        S(y) = [[1,   y_1, y_2, ..., y_{n-1}],
                [y_1, y_2, 0,   ..., 0      ],
                [y_2, 0,   y_3, ..., 0      ],
                ...
                [y_{n-1}, 0, ..., 0, y_n    ]]

    and the objective maximizes -y_n, so b = -e_n and C = E_11. Toward
    mu = 0 the coordinates collapse at staggered fractional rates, the
    slowest being y_2.
    """
    if n < 3:
        raise InputError("arrow family needs matrix size at least 3")

    def zeros():
        return [[0] * n for _ in range(n)]

    A = []
    for j in range(1, n):
        Aj = zeros()
        Aj[0][j] = Aj[j][0] = -1
        if j >= 2:
            Aj[j - 1][j - 1] = -1
        A.append(Aj)
    An = zeros()
    An[n - 1][n - 1] = -1
    A.append(An)
    b = [0] * (n - 1) + [-1]
    C = zeros()
    C[0][0] = 1
    return SDOInstance(A, b, C, name=f"kl02_{n}")


def builtin_instance(name: str) -> SDOInstance:
    """Look up a named instance like identity_3, elliptope_3 or kl02_4."""
    base = name.strip()
    if base in ("elliptope", "elliptope_3"):
        return elliptope_instance()
    for prefix, builder in (("identity", identity_instance), ("kl02", kl02_instance)):
        if base == prefix:
            return builder()
        if base.startswith(prefix + "_"):
            try:
                size = int(base[len(prefix) + 1 :])
            except ValueError:
                break
            return builder(size)
    raise InputError(f"unknown builtin instance {name!r}")


def load_instance(path_or_name: str) -> SDOInstance:
    """Parse an instance file, or fall back to a builtin name.

    A path that exists on disk wins; otherwise the basename without its
    extension is tried against the builtin registry.
    """
    if os.path.exists(path_or_name):
        with open(path_or_name, "r", encoding="utf-8") as fh:
            text = fh.read()
        stem = os.path.splitext(os.path.basename(path_or_name))[0]
        return SDOInstance.from_text(text, name=stem)
    stem = os.path.splitext(os.path.basename(path_or_name))[0]
    return builtin_instance(stem)


class CentralPathSample:
    """One solved central point: matrices, multipliers and the residual."""

    __slots__ = ("mu", "X", "y", "S", "residual")

    def __init__(self, mu, X, y, S, residual):
        self.mu = float(mu)
        self.X = X
        self.y = y
        self.S = S
        self.residual = float(residual)

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate((self.X.ravel(), self.y, self.S.ravel()))

    def duality_gap(self) -> float:
        return float(np.trace(self.X @ self.S))

    def __repr__(self):
        return f"CentralPathSample(mu={self.mu:.3e}, residual={self.residual:.2e})"


def _is_pd(M) -> bool:
    try:
        np.linalg.cholesky(np.asarray(M, dtype=np.float64))
        return True
    except np.linalg.LinAlgError:
        return False


def _solve_linear(M, rhs):
    # partial-pivot elimination; numpy's solver would drop to double
    a = M.copy()
    b = rhs.copy()
    size = len(b)
    for col in range(size):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            raise SolveFailureError("Newton system is singular")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        inv = 1 / a[col, col]
        for row in range(col + 1, size):
            f = a[row, col] * inv
            if f != 0:
                a[row, col:] -= f * a[col, col:]
                b[row] -= f * b[col]
    x = np.zeros(size, dtype=_LD)
    for row in range(size - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def _residual_blocks(inst, X, y, S, mu):
    rp = np.array([(Ai * X).sum() - bi for Ai, bi in zip(inst.A, inst.b)], dtype=_LD)
    Rd = sum(yi * Ai for yi, Ai in zip(y, inst.A)) + S - inst.C
    Rc = (X @ S + S @ X) / 2 - mu * np.eye(inst.n, dtype=_LD)
    return rp, Rd, Rc


def central_point(
    inst: SDOInstance,
    mu: float,
    tol: float = 1e-11,
    start: CentralPathSample | None = None,
    max_iter: int = 120,
) -> CentralPathSample:
    """Solve the central-path equations at one mu by damped Newton steps.

    A warm start reuses the matrices from a nearby sample. The default
    start is X = S = I, y = 0; if no interior step exists from there the
    instance is reported infeasible.
    """
    if not mu > 0:
        raise InputError("mu must be positive")
    n, m = inst.n, inst.m
    if start is None and mu < 1e-2:
        # cold Newton far from the analytic center diverges; walk down
        warm = None
        bridge = 1.0
        while bridge > mu * 1.000001:
            warm = central_point(
                inst, bridge, tol=max(tol, 1e-10), start=warm, max_iter=max_iter
            )
            bridge *= 0.1
        return central_point(inst, mu, tol=tol, start=warm, max_iter=max_iter)
    pairs = _sym_pairs(n)
    k = len(pairs)
    if start is None:
        X = np.eye(n, dtype=_LD)
        y = np.zeros(m, dtype=_LD)
        S = np.eye(n, dtype=_LD)
        cold = True
    else:
        X = start.X.copy()
        y = start.y.copy()
        S = start.S.copy()
        cold = False
    basis = []
    for i, j in pairs:
        B = np.zeros((n, n), dtype=_LD)
        B[i, j] = B[j, i] = 1
        basis.append(B)
    size = m + 2 * k
    mu_ld = _LD(mu)
    res = np.inf
    for _ in range(max_iter):
        rp, Rd, Rc = _residual_blocks(inst, X, y, S, mu_ld)
        res = max(
            float(np.abs(rp).max()), float(np.abs(Rd).max()), float(np.abs(Rc).max())
        )
        if res <= tol:
            return CentralPathSample(mu, X, y, S, res)
        F = np.zeros(size, dtype=_LD)
        F[:m] = rp
        F[m : m + k] = [Rd[i, j] for i, j in pairs]
        F[m + k :] = [Rc[i, j] for i, j in pairs]
        J = np.zeros((size, size), dtype=_LD)
        for col, B in enumerate(basis):
            for row, Ai in enumerate(inst.A):
                J[row, col] = (Ai * B).sum()
            M = (B @ S + S @ B) / 2
            J[m + k :, col] = [M[i, j] for i, j in pairs]
            M = (X @ B + B @ X) / 2
            J[m + k :, k + m + col] = [M[i, j] for i, j in pairs]
            J[m : m + k, k + m + col] = [B[i, j] for i, j in pairs]
        for idx, Ai in enumerate(inst.A):
            J[m : m + k, k + idx] = [Ai[i, j] for i, j in pairs]
        step = _solve_linear(J, -F)
        dX = np.zeros((n, n), dtype=_LD)
        dS = np.zeros((n, n), dtype=_LD)
        for val, (i, j) in zip(step[:k], pairs):
            dX[i, j] = dX[j, i] = val
        for val, (i, j) in zip(step[k + m :], pairs):
            dS[i, j] = dS[j, i] = val
        dy = step[k : k + m]
        t = 1.0
        while t > 1e-18 and not (_is_pd(X + t * dX) and _is_pd(S + t * dS)):
            t *= 0.5
        if t <= 1e-18:
            if cold:
                raise InfeasibleInstanceError(
                    f"no interior step from the default start at mu={mu:g}"
                )
            raise SolveFailureError(f"line search collapsed at mu={mu:g}")
        if t < 1.0:
            t *= 0.95
        X = X + t * dX
        X = (X + X.T) / 2
        S = S + t * dS
        S = (S + S.T) / 2
        y = y + t * dy
    raise SolveFailureError(
        f"no convergence at mu={mu:g} after {max_iter} iterations;"
        f" last residual {res:.3e}"
    )


def _aitken3(x0, x1, x2):
    d1 = x1 - x0
    d2 = x2 - x1
    den = d2 - d1
    if abs(den) <= 1e-30 + 1e-12 * (abs(d1) + abs(d2)):
        return x2
    return x2 - d2 * d2 / den


class TraceResult:
    """A swept central path with per-coordinate limit and order data.

    values is a (samples x dim) array in the vec(X), y, vec(S) order.
    limits and widths give an extrapolated limit per coordinate and the
    disagreement of the last two samples as its interval width.
    order_estimates maps coordinate index to a snapped decay exponent,
    or None where no exponent could be fit.
    """

    __slots__ = ("instance", "samples", "values", "limits", "widths", "order_estimates")

    def __init__(self, instance, samples, values, limits, widths, order_estimates):
        self.instance = instance
        self.samples = samples
        self.values = values
        self.limits = limits
        self.widths = widths
        self.order_estimates = order_estimates

    @property
    def mus(self) -> np.ndarray:
        return np.array([s.mu for s in self.samples])

    def __repr__(self):
        return (
            f"TraceResult({self.instance.name}, {len(self.samples)} samples,"
            f" mu in [{self.samples[-1].mu:.2e}, {self.samples[0].mu:.2e}])"
        )


def trace_path(
    inst: SDOInstance,
    mu_start: float = 1.0,
    mu_end: float = 1e-8,
    grid_ratio: float = 0.5,
    tol: float = 1e-11,
) -> TraceResult:
    """Follow the central path down a geometric mu grid with warm starts."""
    if not (0 < mu_end < mu_start):
        raise InputError("need 0 < mu_end < mu_start")
    if not (0 < grid_ratio < 1):
        raise InputError("grid ratio must lie in (0, 1)")
    mus = []
    kk = 0
    while True:
        mu = mu_start * grid_ratio**kk
        if mu < mu_end * (1 - 1e-12):
            break
        mus.append(mu)
        kk += 1
    samples = []
    prev = None
    for mu in mus:
        prev = central_point(inst, mu, tol=tol, start=prev)
        samples.append(prev)
    values = np.array([s.coords for s in samples], dtype=_LD)
    dim = inst.dim
    limits = np.zeros(dim)
    widths = np.zeros(dim)
    for i in range(dim):
        col = values[:, i].astype(np.float64)
        if len(col) >= 3:
            limits[i] = _aitken3(col[-3], col[-2], col[-1])
        else:
            limits[i] = col[-1]
        if len(col) >= 2:
            widths[i] = max(abs(col[-1] - col[-2]), 10 * tol)
        else:
            widths[i] = 10 * tol
    trace = TraceResult(inst, samples, values, limits, widths, {})
    for i in range(dim):
        try:
            trace.order_estimates[i] = fit_order(trace, i)
        except (ConstantCoordinateError, InsufficientSamplesError):
            trace.order_estimates[i] = None
    return trace


_FIT_WINDOW = 12


def _order_fit(trace: TraceResult, coordinate: int) -> float:
    samples = trace.samples
    if len(samples) < 6:
        raise InsufficientSamplesError(
            f"order fit needs at least 6 samples, trace has {len(samples)}"
        )
    col = trace.values[:, coordinate].astype(np.float64)
    limit = trace.limits[coordinate]
    scale = 1.0 + abs(limit)
    dev = np.abs(col - limit)
    if dev.max() <= 1e-9 * scale:
        raise ConstantCoordinateError(
            f"coordinate {coordinate} is constant along the trace"
        )
    mus = np.array([s.mu for s in samples])
    floor = 1e-12 * scale
    idx = [j for j in range(len(samples)) if dev[j] > floor]
    idx = idx[-_FIT_WINDOW:]
    if len(idx) < 4:
        raise InsufficientSamplesError(
            f"only {len(idx)} resolvable samples for coordinate {coordinate}"
        )
    xs = np.log(mus[idx])
    ys = np.log(dev[idx])
    xs -= xs.mean()
    return float((xs @ (ys - ys.mean())) / (xs @ xs))


def fit_order_raw(trace: TraceResult, coordinate: int) -> float:
    """Least-squares slope of log |v_i - limit| against log mu."""
    return _order_fit(trace, coordinate)


def fit_order(
    trace: TraceResult, coordinate: int, max_denominator: int = 16
) -> Fraction:
    """Decay exponent of one coordinate, snapped to a small denominator."""
    slope = _order_fit(trace, coordinate)
    return Fraction(slope).limit_denominator(max_denominator)


# heuristic resolution of a solved coordinate, used to floor the
# finite-difference verdicts below
_COORD_RESOLUTION = 1e-12


class ReparametrizationReport:
    """Finite-difference boundedness evidence for v(t^rho) as t -> 0.

    d1 and d2 hold |first| and |second| centered differences per level
    and coordinate; res1/res2 are the corresponding noise floors. A
    coordinate is bounded when neither difference grows over the last
    levels beyond slack plus floor. growth holds the log-log slope of
    the first difference over the last levels.
    """

    __slots__ = (
        "rho",
        "t_levels",
        "d1",
        "d2",
        "res1",
        "res2",
        "coordinate_bounded",
        "bounded",
        "growth",
    )

    def __init__(self, rho, t_levels, d1, d2, res1, res2, coordinate_bounded, growth):
        self.rho = rho
        self.t_levels = t_levels
        self.d1 = d1
        self.d2 = d2
        self.res1 = res1
        self.res2 = res2
        self.coordinate_bounded = coordinate_bounded
        self.bounded = bool(all(coordinate_bounded))
        self.growth = growth

    def max_first_derivative(self) -> np.ndarray:
        return self.d1.max(axis=0)

    def max_second_derivative(self) -> np.ndarray:
        return self.d2.max(axis=0)

    def __repr__(self):
        verdict = "bounded" if self.bounded else "unbounded"
        return f"ReparametrizationReport(rho={self.rho}, {verdict})"


def verify_reparametrization(
    inst: SDOInstance,
    rho: int,
    window: tuple[float, float] = (1e-3, 0.25),
    tol: float = 1e-14,
) -> ReparametrizationReport:
    """Check numerically whether t -> v(t^rho) has bounded derivatives.

    Centered first and second differences are taken at t-levels halving
    from the top of the window down to its bottom. The verdict is
    bounded when the level maxima do not grow over the last three
    levels, up to 5 percent slack and the finite-difference noise floor.
    """
    if rho < 1:
        raise InputError("rho must be a positive integer")
    lo, hi = window
    if not (0 < lo < hi <= 1):
        raise InputError("window must satisfy 0 < lo < hi <= 1")
    levels = int(math.floor(math.log2(hi / lo))) + 1
    if levels < 4:
        raise InsufficientSamplesError(
            "window too narrow for a dyadic verdict (needs at least 4 levels)"
        )
    ts = [hi * 2.0**-lvl for lvl in range(levels)]
    dim = inst.dim
    d1 = np.zeros((levels, dim))
    d2 = np.zeros((levels, dim))
    hs = np.zeros(levels)
    warm = None
    for lvl, t in enumerate(ts):
        h = t / 4
        hs[lvl] = h
        gs = []
        for point in (t + h, t, t - h):
            warm = central_point(inst, point**rho, tol=tol, start=warm)
            gs.append(warm.coords.astype(np.float64))
        d1[lvl] = np.abs((gs[0] - gs[2]) / (2 * h))
        d2[lvl] = np.abs((gs[0] - 2 * gs[1] + gs[2]) / (h * h))
    res1 = 2 * _COORD_RESOLUTION / hs
    res2 = 4 * _COORD_RESOLUTION / (hs * hs)
    coordinate_bounded = []
    for i in range(dim):
        ok = True
        for seq, res in ((d1, res1), (d2, res2)):
            M = seq[:, i]
            for lvl in range(levels - 3, levels - 1):
                if M[lvl + 1] > 1.05 * M[lvl] + res[lvl + 1]:
                    ok = False
        coordinate_bounded.append(ok)
    tail = min(4, levels)
    growth = np.zeros(dim)
    xs = np.log(np.array(ts[-tail:]))
    xs_c = xs - xs.mean()
    denom = xs_c @ xs_c
    for i in range(dim):
        ys = np.log(np.maximum(d1[-tail:, i], 1e-300))
        growth[i] = float((xs_c @ (ys - ys.mean())) / denom)
    return ReparametrizationReport(
        rho, tuple(ts), d1, d2, res1, res2, tuple(coordinate_bounded), growth
    )
