"""Second-order forward-mode jets (multivariate hyper-dual numbers).

A :class:`Jet` carries the value of an array-valued quantity together with its
gradient and Hessian with respect to ``n`` seed variables.  Derivative axes come
first: ``grad`` has shape ``(n, *shape)`` and ``hess`` has shape
``(n, n, *shape)``, so elementwise broadcasting works unchanged on the trailing
axes.  Only negative axes are accepted by the shape-changing helpers.

Field formulas are written with ordinary operators and numpy ufuncs; the same
code then evaluates on plain arrays or on jets.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 1000.0

    def __init__(self, val, grad, hess=None):
        self.val = np.asarray(val, dtype=float)
        self.grad = grad
        self.hess = hess

    # construction -----------------------------------------------------------
    @classmethod
    def variables(cls, x, order: int = 2) -> "Jet":
        """Seed jet for the coordinates ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        grad = np.zeros((n,) + x.shape)
        for a in range(n):
            grad[a, ..., a] = 1.0
        hess = np.zeros((n, n) + x.shape) if order >= 2 else None
        return cls(x, grad, hess)

    @classmethod
    def constant(cls, c, nvars: int, order: int) -> "Jet":
        c = np.asarray(c, dtype=float)
        grad = np.zeros((nvars,) + c.shape)
        hess = np.zeros((nvars, nvars) + c.shape) if order >= 2 else None
        return cls(c, grad, hess)

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    @property
    def shape(self) -> tuple:
        return self.val.shape

    @property
    def ndim(self) -> int:
        return self.val.ndim

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.nvars, self.order)

    def _pad(self, ndim: int) -> "Jet":
        """Insert leading value axes (after the derivative axes) up to ``ndim``."""
        k = ndim - self.val.ndim
        if k <= 0:
            return self
        sh = (1,) * k + self.val.shape
        n = self.nvars
        hess = None if self.hess is None else self.hess.reshape((n, n) + sh)
        return Jet(self.val.reshape(sh), self.grad.reshape((n,) + sh), hess)

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r}, order={self.order})"

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        self, o = _align(self, o)
        hess = None if self.hess is None or o.hess is None else self.hess + o.hess
        return Jet(self.val + o.val, self.grad + o.grad, hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            a = self._pad(c.ndim)
            return Jet(a.val * c, a.grad * c, None if a.hess is None else a.hess * c)
        a, b = _align(self, other)
        val = a.val * b.val
        grad = a.grad * b.val + a.val * b.grad
        hess = None
        if a.hess is not None and b.hess is not None:
            cross = a.grad[:, None] * b.grad[None, :]
            hess = a.hess * b.val + a.val * b.hess + cross + np.swapaxes(cross, 0, 1)
        return Jet(val, grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        u = self.val
        return self._chain(1.0 / u, -1.0 / u**2, 2.0 / u**3)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        p = float(p)
        if p == 0.0:
            return Jet.constant(np.ones_like(self.val), self.nvars, self.order)
        if p == 1.0:
            return self
        if p == 2.0:
            return self * self
        u = self.val
        return self._chain(u**p, p * u ** (p - 1.0), p * (p - 1.0) * u ** (p - 2.0))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def _chain(self, f0, f1, f2) -> "Jet":
        # f0, f1, f2 are computed from self.val and share its shape
        grad = f1 * self.grad
        hess = None
        if self.hess is not None:
            hess = f1 * self.hess + f2 * (self.grad[:, None] * self.grad[None, :])
        return Jet(f0, grad, hess)

    # shape handling ---------------------------------------------------------
    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        hess = None if self.hess is None else self.hess[(slice(None), slice(None)) + idx]
        return Jet(self.val[idx], self.grad[(slice(None),) + idx], hess)

    def sum(self, axis):
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        if any(a >= 0 for a in axes):
            raise ValueError("jet reductions take negative axes only")
        hess = None if self.hess is None else self.hess.sum(axis=axes)
        return Jet(self.val.sum(axis=axes), self.grad.sum(axis=axes), hess)

    def swapaxes(self, a: int, b: int) -> "Jet":
        if a >= 0 or b >= 0:
            raise ValueError("jet axis swaps take negative axes only")
        hess = None if self.hess is None else np.swapaxes(self.hess, a, b)
        return Jet(np.swapaxes(self.val, a, b), np.swapaxes(self.grad, a, b), hess)

    def broadcast_to(self, shape) -> "Jet":
        shape = tuple(shape)
        self = self._pad(len(shape))
        n = self.nvars
        hess = None if self.hess is None else np.broadcast_to(self.hess, (n, n) + shape)
        return Jet(np.broadcast_to(self.val, shape), np.broadcast_to(self.grad, (n,) + shape), hess)

    @property
    def T(self) -> "Jet":
        return self.swapaxes(-1, -2)

    # numpy interop ----------------------------------------------------------
    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            return NotImplemented
        if ufunc in _BINARY:
            a, b = inputs
            return _BINARY[ufunc](a, b)
        if ufunc in _UNARY:
            (u,) = inputs
            return _UNARY[ufunc](u)
        return NotImplemented


def _align(a: Jet, b: Jet):
    nd = max(a.val.ndim, b.val.ndim)
    return a._pad(nd), b._pad(nd)


# elementwise functions -------------------------------------------------------

def sin(u):
    if not isinstance(u, Jet):
        return np.sin(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return u._chain(s, c, -s)


def cos(u):
    if not isinstance(u, Jet):
        return np.cos(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return u._chain(c, -s, -c)


def tan(u):
    if not isinstance(u, Jet):
        return np.tan(u)
    t = np.tan(u.val)
    sec2 = 1.0 + t * t
    return u._chain(t, sec2, 2.0 * t * sec2)


def exp(u):
    if not isinstance(u, Jet):
        return np.exp(u)
    e = np.exp(u.val)
    return u._chain(e, e, e)


def log(u):
    if not isinstance(u, Jet):
        return np.log(u)
    v = u.val
    return u._chain(np.log(v), 1.0 / v, -1.0 / v**2)


def sqrt(u):
    if not isinstance(u, Jet):
        return np.sqrt(u)
    r = np.sqrt(u.val)
    return u._chain(r, 0.5 / r, -0.25 / (r * u.val))


def tanh(u):
    if not isinstance(u, Jet):
        return np.tanh(u)
    t = np.tanh(u.val)
    d = 1.0 - t * t
    return u._chain(t, d, -2.0 * t * d)


def arctan(u):
    if not isinstance(u, Jet):
        return np.arctan(u)
    v = u.val
    d = 1.0 / (1.0 + v * v)
    return u._chain(np.arctan(v), d, -2.0 * v * d * d)


def sinh(u):
    if not isinstance(u, Jet):
        return np.sinh(u)
    return u._chain(np.sinh(u.val), np.cosh(u.val), np.sinh(u.val))


def cosh(u):
    if not isinstance(u, Jet):
        return np.cosh(u)
    return u._chain(np.cosh(u.val), np.sinh(u.val), np.cosh(u.val))


def absolute(u):
    if not isinstance(u, Jet):
        return np.abs(u)
    s = np.sign(u.val)
    return u * s


def apply(u, f0, f1, f2):
    """Apply a scalar function given its value and first two derivatives at ``u``."""
    if not isinstance(u, Jet):
        return f0
    return u._chain(f0, f1, f2)


_UNARY = {
    np.sin: sin,
    np.cos: cos,
    np.tan: tan,
    np.exp: exp,
    np.log: log,
    np.sqrt: sqrt,
    np.tanh: tanh,
    np.arctan: arctan,
    np.sinh: sinh,
    np.cosh: cosh,
    np.absolute: absolute,
    np.negative: lambda u: -u,
    np.positive: lambda u: u,
    np.square: lambda u: u * u,
    np.reciprocal: lambda u: 1.0 / u,
}


def _binary(op):
    def f(a, b):
        if isinstance(a, Jet):
            return op(a, b)
        return op(b._lift(a), b)
    return f


_BINARY = {
    np.add: _binary(lambda a, b: a + b),
    np.subtract: _binary(lambda a, b: a - b),
    np.multiply: _binary(lambda a, b: a * b),
    np.true_divide: _binary(lambda a, b: a / b),
    np.power: _binary(lambda a, b: a**b),
}


# array helpers ---------------------------------------------------------------

def is_jet(x) -> bool:
    return isinstance(x, Jet)


def value(x) -> np.ndarray:
    return x.val if isinstance(x, Jet) else np.asarray(x, dtype=float)


def stack(items, axis: int = -1, like=None):
    """Stack jets, arrays and scalars along a new negative axis.

    Plain numbers are broadcast to the common shape.  ``like`` supplies the
    batch shape and jet layout when every entry is a constant.
    """
    if axis >= 0:
        raise ValueError("stack takes a negative axis")
    jets = [it for it in items if isinstance(it, Jet)]
    shapes = [value(it).shape for it in items]
    if like is not None:
        shapes.append(value(like).shape[:-1])
    shape = np.broadcast_shapes(*shapes)
    if not jets:
        return np.stack([np.broadcast_to(np.asarray(it, dtype=float), shape) for it in items], axis=axis)
    ref = jets[0]
    n = ref.nvars
    order = min(j.order for j in jets)
    vals, grads, hesses = [], [], []
    for it in items:
        j = it if isinstance(it, Jet) else Jet.constant(it, n, order)
        j = j._pad(len(shape))
        vals.append(np.broadcast_to(j.val, shape))
        grads.append(np.broadcast_to(j.grad, (n,) + shape))
        if order >= 2:
            hesses.append(np.broadcast_to(j.hess, (n, n) + shape))
    hess = np.stack(hesses, axis=axis) if order >= 2 else None
    return Jet(np.stack(vals, axis=axis), np.stack(grads, axis=axis), hess)


def vector(components, like=None):
    return stack(list(components), axis=-1, like=like)


def matrix(rows, like=None):
    """Assemble a matrix from nested rows of jets/arrays/scalars."""
    return stack([vector(r, like=like) for r in rows], axis=-2)


def lift(x, like: Jet) -> Jet:
    return x if isinstance(x, Jet) else Jet.constant(x, like.nvars, like.order)


def matmul(a, b):
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.matmul(a, b)
    ref = a if isinstance(a, Jet) else b
    a, b = _align(lift(a, ref), lift(b, ref))
    val = a.val @ b.val
    grad = a.grad @ b.val + a.val @ b.grad
    hess = None
    if a.hess is not None and b.hess is not None:
        cross = a.grad[:, None] @ b.grad[None, :]
        hess = a.hess @ b.val + a.val @ b.hess + cross + np.swapaxes(cross, 0, 1)
    return Jet(val, grad, hess)


def inv(a):
    """Matrix inverse over the last two axes, with jet derivatives."""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    ai = np.linalg.inv(a.val)
    da = a.grad
    grad = -(ai @ da @ ai)
    hess = None
    if a.hess is not None:
        t = da[:, None] @ ai @ da[None, :]
        hess = ai @ (t + np.swapaxes(t, 0, 1) - a.hess) @ ai
    return Jet(ai, grad, hess)


def transpose(a):
    if isinstance(a, Jet):
        return a.T
    return np.swapaxes(a, -1, -2)


def derivative_last(arr: np.ndarray, k: int = 1) -> np.ndarray:
    """Move the ``k`` leading derivative axes of a jet array to the end."""
    for _ in range(k):
        arr = np.moveaxis(arr, 0, -1)
    return arr
