"""Smooth fields on a single coordinate chart of R^n.

A field wraps a formula ``func(x)`` where ``x`` has shape ``(..., n)`` and the
coordinates are read as ``x[..., i]``.  The formula is evaluated on plain arrays
for values and on :class:`~lorentzlab.jet.Jet` seeds for exact first and second
derivatives.  Finite differences are available as a fallback mode.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import jet as J
from .errors import ContractError, EvaluationDomainError

DUAL = "dual"
FD = "fd"

_TRAILING = {"scalar": 0, "vector": 1, "metric": 2}


class Field:
    kind = "scalar"

    def __init__(self, func: Callable, n: int, *, mode: str = DUAL, fd_step: float = 1e-5,
                 name: str | None = None):
        if mode not in (DUAL, FD):
            raise ContractError(f"unknown derivative mode {mode!r}")
        if fd_step <= 0:
            raise ContractError("finite-difference step must be positive")
        self.func = func
        self.n = int(n)
        self.mode = mode
        self.fd_step = float(fd_step)
        self.name = name or self.kind

    def _copy_with(self, **kw) -> "Field":
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.__dict__.update(kw)
        return new

    def with_mode(self, mode: str, fd_step: float | None = None) -> "Field":
        """Same field, derivatives taken in another mode."""
        if mode not in (DUAL, FD):
            raise ContractError(f"unknown derivative mode {mode!r}")
        return self._copy_with(mode=mode, fd_step=self.fd_step if fd_step is None else float(fd_step))

    @property
    def trailing(self) -> int:
        return _TRAILING[self.kind]

    def _batch_shape(self, x: np.ndarray) -> tuple:
        return x.shape[:-1]

    def _out_shape(self, x: np.ndarray) -> tuple:
        return self._batch_shape(x) + (self.n,) * self.trailing

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise ContractError(f"point has dimension {x.shape[-1:]} but the field lives on R^{self.n}")
        return x

    def __call__(self, x) -> np.ndarray:
        x = self._check_point(x)
        out = np.broadcast_to(np.asarray(J.value(self.func(x)), dtype=float), self._out_shape(x))
        if not np.all(np.isfinite(out)):
            raise EvaluationDomainError(f"{self.name} is not finite at the requested point")
        return np.array(out)

    def jet(self, x, order: int = 1) -> J.Jet:
        """Value and derivatives up to ``order`` (1 or 2)."""
        x = self._check_point(x)
        if order not in (1, 2):
            raise ContractError("jet order must be 1 or 2")
        if self.mode == FD:
            out = self._fd_jet(x, order)
        else:
            out = self._dual_jet(x, order)
        if not (np.all(np.isfinite(out.val)) and np.all(np.isfinite(out.grad))
                and (out.hess is None or np.all(np.isfinite(out.hess)))):
            raise EvaluationDomainError(f"{self.name} has non-finite derivatives at the requested point")
        return out

    def _dual_jet(self, x: np.ndarray, order: int) -> J.Jet:
        seed = J.Jet.variables(x, order)
        out = self.func(seed)
        shape = self._out_shape(x)
        if not isinstance(out, J.Jet):
            return J.Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), shape), self.n, order)
        return out.broadcast_to(shape)

    def _fd_jet(self, x: np.ndarray, order: int) -> J.Jet:
        h = self.fd_step
        n = self.n
        f = self.__call__
        val = f(x)
        grad = np.empty((n,) + val.shape)
        eye = np.eye(n)
        plus = [f(x + h * eye[a]) for a in range(n)]
        minus = [f(x - h * eye[a]) for a in range(n)]
        for a in range(n):
            grad[a] = (plus[a] - minus[a]) / (2 * h)
        hess = None
        if order >= 2:
            hess = np.empty((n, n) + val.shape)
            for a in range(n):
                hess[a, a] = (plus[a] - 2 * val + minus[a]) / h**2
                for b in range(a + 1, n):
                    d = (f(x + h * (eye[a] + eye[b])) - f(x + h * (eye[a] - eye[b]))
                         - f(x - h * (eye[a] - eye[b])) + f(x - h * (eye[a] + eye[b]))) / (4 * h * h)
                    hess[a, b] = hess[b, a] = d
        return J.Jet(val, grad, hess)


class ScalarField(Field):
    kind = "scalar"

    @classmethod
    def constant(cls, c: float, n: int, name: str | None = None) -> "ScalarField":
        return cls(lambda x: c + 0.0 * J.value(x)[..., 0], n, name=name or f"const({c})")


class VectorField(Field):
    kind = "vector"

    @classmethod
    def constant(cls, v: Sequence[float], name: str | None = None) -> "VectorField":
        v = np.asarray(v, dtype=float)
        return cls(lambda x: J.vector(list(v), like=x), len(v), name=name or "const")

    @classmethod
    def coordinate(cls, i: int, n: int) -> "VectorField":
        e = np.zeros(n)
        e[i] = 1.0
        return cls.constant(e, name=f"d{i}")


class MetricField(Field):
    kind = "metric"

    def __init__(self, func: Callable, n: int, index: int, **kw):
        super().__init__(func, n, **kw)
        if not 0 <= index <= n:
            raise ContractError("metric index must lie in [0, n]")
        self.index = int(index)

    def check_signature(self, x, tol: float = 1e-12) -> None:
        """Raise unless the metric at ``x`` is nondegenerate with the declared index."""
        G = self(x)
        w = np.linalg.eigvalsh(G)
        scale = max(1.0, float(np.max(np.abs(w))))
        if np.any(np.abs(w) <= tol * scale):
            raise ContractError("metric is degenerate at the requested point")
        if np.any(np.sum(w < 0, axis=-1) != self.index):
            raise ContractError("metric index differs from the declared index")


class DerivedField(Field):
    """Field computed from the jets of other fields by a generic formula.

    ``fn`` receives one argument per parent (an array when only values are
    needed, a jet otherwise) plus the point, and is written with ordinary
    arithmetic so the same code serves both cases.
    """

    def __init__(self, kind: str, n: int, fn: Callable, parents: Sequence[Field], name: str | None = None,
                 index: int | None = None):
        self.kind = kind
        self.func = None
        self.n = int(n)
        self.mode = DUAL
        self.fd_step = 1e-5
        self.name = name or f"derived {kind}"
        self.fn = fn
        self.parents = list(parents)
        if index is not None:
            self.index = index

    def __call__(self, x) -> np.ndarray:
        x = self._check_point(x)
        out = self.fn(*[p(x) for p in self.parents], x)
        out = np.broadcast_to(np.asarray(J.value(out), dtype=float), self._out_shape(x))
        if not np.all(np.isfinite(out)):
            raise EvaluationDomainError(f"{self.name} is not finite at the requested point")
        return np.array(out)

    def jet(self, x, order: int = 1) -> J.Jet:
        x = self._check_point(x)
        if order not in (1, 2):
            raise ContractError("jet order must be 1 or 2")
        seed = J.Jet.variables(x, order)
        out = self.fn(*[p.jet(x, order) for p in self.parents], seed)
        if not isinstance(out, J.Jet):
            out = J.Jet.constant(out, self.n, order)
        return out.broadcast_to(self._out_shape(x))

    def with_mode(self, mode: str, fd_step: float | None = None) -> "DerivedField":
        new = self._copy_with(parents=[p.with_mode(mode, fd_step) for p in self.parents])
        return new


class DerivedMetric(DerivedField, MetricField):
    def __init__(self, n: int, index: int, fn: Callable, parents: Sequence[Field], name: str | None = None):
        DerivedField.__init__(self, "metric", n, fn, parents, name=name, index=index)


def derived_vector(fn: Callable, parents: Sequence[Field], n: int, name: str | None = None) -> DerivedField:
    return DerivedField("vector", n, fn, parents, name=name)


def derived_scalar(fn: Callable, parents: Sequence[Field], n: int, name: str | None = None) -> DerivedField:
    return DerivedField("scalar", n, fn, parents, name=name)


def linear_combination(coeffs: Sequence, fields: Sequence[Field], name: str | None = None) -> DerivedField:
    """``sum_i c_i X_i`` where each ``c_i`` is a number or a scalar field."""
    scalars = [c for c in coeffs if isinstance(c, Field)]
    n = fields[0].n

    def fn(*args):
        vecs = args[: len(fields)]
        svals = iter(args[len(fields): len(fields) + len(scalars)])
        total = 0.0
        for c, v in zip(coeffs, vecs):
            w = next(svals)[..., None] if isinstance(c, Field) else float(c)
            total = total + w * v
        return total

    return DerivedField("vector", n, fn, list(fields) + scalars, name=name)


class BracketField(VectorField):
    """The Lie bracket [X, Y] as a vector field.

    First derivatives use the second-order jets of ``X`` and ``Y``; asking for
    second derivatives would need third-order data and raises.
    """

    def __init__(self, X: VectorField, Y: VectorField):
        if X.n != Y.n:
            raise ContractError("bracket of fields on different spaces")
        self.X, self.Y = X, Y
        self.n = X.n
        self.mode = DUAL
        self.fd_step = X.fd_step
        self.func = None
        self.name = f"[{X.name},{Y.name}]"

    def __call__(self, x) -> np.ndarray:
        return lie_bracket(self.X, self.Y, x)

    def jet(self, x, order: int = 1) -> J.Jet:
        x = self._check_point(x)
        if order != 1:
            raise ContractError("bracket fields provide first-order jets only")
        jx, jy = self.X.jet(x, 2), self.Y.jet(x, 2)
        X, Y = jx.val, jy.val
        DX, DY = J.derivative_last(jx.grad), J.derivative_last(jy.grad)          # [..., i, a]
        HX, HY = J.derivative_last(jx.hess, 2), J.derivative_last(jy.hess, 2)  # [..., i, a, b]
        val = np.einsum("...j,...ij->...i", X, DY) - np.einsum("...j,...ij->...i", Y, DX)
        d = (np.einsum("...ja,...ij->...ia", DX, DY) + np.einsum("...j,...ija->...ia", X, HY)
             - np.einsum("...ja,...ij->...ia", DY, DX) - np.einsum("...j,...ija->...ia", Y, HX))
        return J.Jet(val, np.moveaxis(d, -1, 0))

    def with_mode(self, mode: str, fd_step: float | None = None) -> "BracketField":
        return BracketField(self.X.with_mode(mode, fd_step), self.Y.with_mode(mode, fd_step))


def evaluate_jet(field: Field, x, order: int = 1):
    """Value (order 0) or jet with derivatives up to ``order``."""
    if order == 0:
        return field(x)
    return field.jet(x, order)


def jacobian(field: Field, x) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative array with the derivative index last."""
    j = field.jet(x, 1)
    return j.val, J.derivative_last(j.grad)


def lie_bracket(X: VectorField, Y: VectorField, x) -> np.ndarray:
    """``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`` at ``x``."""
    xv, dx = jacobian(X, x)
    yv, dy = jacobian(Y, x)
    return np.einsum("...j,...ij->...i", xv, dy) - np.einsum("...j,...ij->...i", yv, dx)
