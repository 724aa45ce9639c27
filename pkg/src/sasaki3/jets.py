"""Truncated multivariate Taylor arithmetic ("jets").

A :class:`Jet` stores, for every entry of an arbitrary leading array shape,
the Taylor coefficients of a smooth function of ``nvars`` variables about a
base point, truncated at total degree ``order`` (at most :data:`MAX_ORDER`).
Arithmetic and the elementary functions propagate the coefficients exactly,
so partial derivatives come out at machine precision.

Coefficients are stored in graded order: all monomials of degree 0, then
degree 1, and so on, lexicographically descending inside each degree.  The
coefficient of ``x**alpha`` is ``d^alpha f / alpha!``.

The row-wise product and the Horner composition run in a compiled kernel
when available; see :data:`BACKEND`.
"""
from __future__ import annotations

import itertools
import math
import os
from functools import lru_cache

import numpy as np

if os.environ.get("SASAKI3_PURE_PYTHON"):
    from . import _jetcore_py as _core
    BACKEND = "python"
else:
    try:
        from . import _jetcore as _core
        BACKEND = "compiled"
    except ImportError:  # extension not built
        from . import _jetcore_py as _core
        BACKEND = "python"

MAX_ORDER = 3


@lru_cache(maxsize=None)
def monomials(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of all monomials of degree <= order, graded order."""
    out = []
    for deg in range(order + 1):
        degs = [a for a in itertools.product(range(deg + 1), repeat=nvars) if sum(a) == deg]
        out.extend(sorted(degs, reverse=True))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, order: int) -> dict:
    return {a: i for i, a in enumerate(monomials(nvars, order))}


def ncoef(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


@lru_cache(maxsize=None)
def _product_table(nvars: int, order: int):
    mons = monomials(nvars, order)
    index = monomial_index(nvars, order)
    rows = []
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= order:
                rows.append((index[c], i, j))
    rows.sort()
    ic, ia, ib = (np.ascontiguousarray(col, dtype=np.intc) for col in zip(*rows))
    return ia, ib, ic


@lru_cache(maxsize=None)
def _derivative_map(nvars: int, order: int, k: int):
    """Source indices and factors for d/dx_k, mapping order -> order-1."""
    index = monomial_index(nvars, order)
    src, fac = [], []
    for a in monomials(nvars, order - 1):
        b = list(a)
        b[k] += 1
        src.append(index[tuple(b)])
        fac.append(b[k])
    return np.array(src), np.array(fac, dtype=float)


def _dtype(*arrays):
    if any(np.iscomplexobj(a) for a in arrays):
        return np.complex128
    return np.float64


class Jet:
    """Array of truncated Taylor expansions sharing one set of variables.

    Parameters
    ----------
    coeffs : array_like
        Shape ``lead + (ncoef(nvars, order),)``.
    nvars : int
    order : int
    """

    __slots__ = ("c", "nvars", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, nvars: int, order: int):
        c = np.asarray(coeffs)
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
        if c.shape[-1:] != (ncoef(nvars, order),):
            raise ValueError(
                f"expected trailing axis {ncoef(nvars, order)} for nvars={nvars}, "
                f"order={order}; got shape {c.shape}")
        self.c = c
        self.nvars = nvars
        self.order = order

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value)
        c = np.zeros(value.shape + (ncoef(nvars, order),), dtype=_dtype(value))
        c[..., 0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, value, k: int, nvars: int, order: int) -> "Jet":
        """The coordinate function ``x_k`` expanded about ``value``."""
        jet = cls.constant(value, nvars, order)
        if order >= 1:
            unit = [0] * nvars
            unit[k] = 1
            jet.c[..., monomial_index(nvars, order)[tuple(unit)]] = 1.0
        return jet

    @classmethod
    def variables(cls, point, order: int) -> tuple["Jet", ...]:
        n = len(point)
        return tuple(cls.variable(x, k, n, order) for k, x in enumerate(point))

    @classmethod
    def from_partials(cls, partials: dict, nvars: int, order: int) -> "Jet":
        """Build from ``{alpha: d^alpha f}``; missing entries are zero."""
        first = np.asarray(next(iter(partials.values())))
        c = np.zeros(first.shape + (ncoef(nvars, order),), dtype=_dtype(first))
        index = monomial_index(nvars, order)
        for alpha, val in partials.items():
            if sum(alpha) <= order:
                fact = math.prod(math.factorial(a) for a in alpha)
                c[..., index[tuple(alpha)]] = np.asarray(val) / fact
        return cls(c, nvars, order)

    @staticmethod
    def stack(jets, axis: int = 0) -> "Jet":
        jets = list(jets)
        order = min(j.order for j in jets)
        nvars = jets[0].nvars
        if axis < 0:
            axis += jets[0].c.ndim
        cs = [j.truncate(order).c for j in jets]
        cs = np.broadcast_arrays(*cs)
        return Jet(np.stack(cs, axis=axis), nvars, order)

    # inspection -------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.c.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.c.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    def partial(self, *alpha: int) -> np.ndarray:
        """``d^alpha f`` at the base point, e.g. ``jet.partial(1, 1)``."""
        if sum(alpha) > self.order:
            raise ValueError(f"derivative of degree {sum(alpha)} exceeds jet order {self.order}")
        fact = math.prod(math.factorial(a) for a in alpha)
        return fact * self.c[..., monomial_index(self.nvars, self.order)[tuple(alpha)]]

    def gradient(self) -> np.ndarray:
        """First partials, stacked on a new trailing axis."""
        return np.stack([self.d(k).value for k in range(self.nvars)], axis=-1)

    def __repr__(self):
        return f"Jet(shape={self.shape}, nvars={self.nvars}, order={self.order})"

    # structural -------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.c[..., :ncoef(self.nvars, order)], self.nvars, order)

    def d(self, k: int) -> "Jet":
        """Partial derivative along variable ``k``; the order drops by one."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = _derivative_map(self.nvars, self.order, k)
        return Jet(self.c[..., src] * fac, self.nvars, self.order - 1)

    def grad(self) -> "Jet":
        """Jet of the gradient, derivative index appended as the last axis."""
        return Jet.stack([self.d(k) for k in range(self.nvars)], axis=-1)

    def embed(self, nvars: int, mapping) -> "Jet":
        """Re-express in ``nvars`` variables; variable i becomes mapping[i]."""
        src = monomials(self.nvars, self.order)
        index = monomial_index(nvars, self.order)
        c = np.zeros(self.shape + (ncoef(nvars, self.order),), dtype=self.c.dtype)
        for i, a in enumerate(src):
            b = [0] * nvars
            for k, e in enumerate(a):
                b[mapping[k]] += e
            c[..., index[tuple(b)]] = self.c[..., i]
        return Jet(c, nvars, self.order)

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[key + (slice(None),)], self.nvars, self.order)

    def transpose(self, *axes) -> "Jet":
        return Jet(self.c.transpose(*axes, self.ndim), self.nvars, self.order)

    def reshape(self, *shape) -> "Jet":
        return Jet(self.c.reshape(*shape, self.c.shape[-1]), self.nvars, self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        return Jet(self.c.sum(axis=_lead_axes(axis, self.ndim)), self.nvars, self.order)

    def conj(self) -> "Jet":
        return Jet(self.c.conj(), self.nvars, self.order)

    @property
    def real(self) -> "Jet":
        return Jet(self.c.real, self.nvars, self.order)

    @property
    def imag(self) -> "Jet":
        return Jet(self.c.imag, self.nvars, self.order)

    # arithmetic -------------------------------------------------------
    def _align(self, other: "Jet"):
        if other.nvars != self.nvars:
            raise ValueError("jets over different variable sets")
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order), order

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a.c + b.c, self.nvars, order)
        other = np.asarray(other)
        shape = np.broadcast_shapes(self.shape, other.shape)
        c = np.array(np.broadcast_to(self.c, shape + self.c.shape[-1:]),
                     dtype=_dtype(self.c, other))
        c[..., 0] += other
        return Jet(c, self.nvars, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.nvars, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return _mul(a.c, b.c, self.nvars, order)
        other = np.asarray(other)
        return Jet(self.c * other[..., None], self.nvars, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other)
        return Jet(self.c / other[..., None], self.nvars, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        if float(p).is_integer():
            n = int(p)
            if n < 0:
                return (self ** (-n)).reciprocal()
            result = None
            base = self
            while n:
                if n & 1:
                    result = base if result is None else result * base
                n >>= 1
                if n:
                    base = base * base
            return result if result is not None else Jet.constant(np.ones(self.shape), self.nvars, self.order)
        return self._compose(_taylor_power(self.value, float(p)))

    def reciprocal(self) -> "Jet":
        x = self.value
        return self._compose([1 / x, -1 / x**2, 1 / x**3, -1 / x**4])

    def _compose(self, coeffs) -> "Jet":
        """Apply f given its Taylor coefficients [f, f', f''/2, f'''/6] at the base point."""
        if self.order == 0:
            return Jet(np.asarray(coeffs[0])[..., None], self.nvars, 0)
        g = np.stack([np.broadcast_to(np.asarray(g), self.shape) for g in coeffs[: self.order + 1]], axis=-1)
        h = self.c.copy()
        h[..., 0] = 0
        dt = _dtype(h, g)
        nc = h.shape[-1]
        ia, ib, ic = _product_table(self.nvars, self.order)
        h2 = np.ascontiguousarray(h.reshape(-1, nc), dtype=dt)
        g2 = np.ascontiguousarray(g.reshape(-1, g.shape[-1]), dtype=dt)
        out = _core.compose(h2, g2, ia, ib, ic)
        return Jet(out.reshape(self.shape + (nc,)), self.nvars, self.order)


def _lead_axes(axis, ndim):
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a + ndim if a < 0 else a for a in axis)


def _mul(a, b, nvars, order):
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    nc = a.shape[-1]
    dt = _dtype(a, b)
    a2 = np.ascontiguousarray(np.broadcast_to(a, shape + (nc,)).reshape(-1, nc), dtype=dt)
    b2 = np.ascontiguousarray(np.broadcast_to(b, shape + (nc,)).reshape(-1, nc), dtype=dt)
    ia, ib, ic = _product_table(nvars, order)
    out = _core.mul(a2, b2, ia, ib, ic, nc)
    return Jet(out.reshape(shape + (nc,)), nvars, order)


def jeinsum(spec: str, a, b) -> "Jet":
    """Two-operand einsum on jets (or a jet and a constant array).

    Indices refer to the leading axes only; every label may appear at most
    once per operand.
    """
    ins, out = spec.replace(" ", "").split("->")
    la, lb = ins.split(",")
    if not isinstance(b, Jet):
        return Jet(np.einsum(f"{la}z,{lb}->{out}z", a.c, np.asarray(b)), a.nvars, a.order)
    if not isinstance(a, Jet):
        return Jet(np.einsum(f"{la},{lb}z->{out}z", np.asarray(a), b.c), b.nvars, b.order)
    labels = "".join(dict.fromkeys(la + lb))
    A = _expand(a, la, labels)
    B = _expand(b, lb, labels)
    prod = A * B
    summed = [i for i, l in enumerate(labels) if l not in out]
    if summed:
        prod = prod.sum(axis=tuple(summed))
    kept = [l for l in labels if l in out]
    return prod.transpose(*[kept.index(l) for l in out])


def _expand(j: Jet, have: str, labels: str) -> Jet:
    perm = sorted(range(len(have)), key=lambda i: labels.index(have[i]))
    c = j.c.transpose(*perm, j.ndim)
    shape = [j.shape[have.index(l)] if l in have else 1 for l in labels]
    return Jet(c.reshape(*shape, c.shape[-1]), j.nvars, j.order)


def det3(m: Jet) -> Jet:
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def inv3(m: Jet) -> Jet:
    """Inverse of a 3x3 jet matrix via the adjugate."""
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0], s[0]] * m[r[1], s[1]] - m[r[0], s[1]] * m[r[1], s[0]]
            cof[j][i] = minor if (i + j) % 2 == 0 else -minor
    adj = Jet.stack([Jet.stack(row) for row in cof])
    return adj * det3(m).reciprocal()


# elementary functions -------------------------------------------------

def _taylor_power(x, p):
    return [x**p, p * x ** (p - 1), p * (p - 1) / 2 * x ** (p - 2),
            p * (p - 1) * (p - 2) / 6 * x ** (p - 3)]


def _unary(numpy_fn, taylor):
    def fn(x):
        if isinstance(x, Jet):
            return x._compose(taylor(x.value))
        return numpy_fn(x)
    fn.__name__ = numpy_fn.__name__
    return fn


def _t_exp(x):
    e = np.exp(x)
    return [e, e, e / 2, e / 6]


def _t_log(x):
    return [np.log(x), 1 / x, -1 / (2 * x**2), 1 / (3 * x**3)]


def _t_sqrt(x):
    s = np.sqrt(x)
    return [s, 1 / (2 * s), -1 / (8 * s**3), 1 / (16 * s**5)]


def _t_sin(x):
    s, c = np.sin(x), np.cos(x)
    return [s, c, -s / 2, -c / 6]


def _t_cos(x):
    s, c = np.sin(x), np.cos(x)
    return [c, -s, -c / 2, s / 6]


def _t_tan(x):
    t = np.tan(x)
    q = 1 + t * t
    return [t, q, t * q, q * (1 + 3 * t * t) / 3]


def _t_arctan(x):
    q = 1 + x * x
    return [np.arctan(x), 1 / q, -x / q**2, (3 * x * x - 1) / (3 * q**3)]


def _t_sinh(x):
    s, c = np.sinh(x), np.cosh(x)
    return [s, c, s / 2, c / 6]


def _t_cosh(x):
    s, c = np.sinh(x), np.cosh(x)
    return [c, s, c / 2, s / 6]


def _t_tanh(x):
    t = np.tanh(x)
    q = 1 - t * t
    return [t, q, -t * q, -q * (1 - 3 * t * t) / 3]


def _t_arctanh(x):
    q = 1 - x * x
    return [np.arctanh(x), 1 / q, x / q**2, (1 + 3 * x * x) / (3 * q**3)]


def _t_abs(x):
    z = np.zeros_like(x)
    return [np.abs(x), np.sign(x), z, z]


exp = _unary(np.exp, _t_exp)
log = _unary(np.log, _t_log)
sqrt = _unary(np.sqrt, _t_sqrt)
sin = _unary(np.sin, _t_sin)
cos = _unary(np.cos, _t_cos)
tan = _unary(np.tan, _t_tan)
arctan = _unary(np.arctan, _t_arctan)
sinh = _unary(np.sinh, _t_sinh)
cosh = _unary(np.cosh, _t_cosh)
tanh = _unary(np.tanh, _t_tanh)
arctanh = _unary(np.arctanh, _t_arctanh)
absolute = _unary(np.abs, _t_abs)


def value(x):
    """Base-point value of a jet, or ``x`` itself for plain numbers."""
    return x.value if isinstance(x, Jet) else x
