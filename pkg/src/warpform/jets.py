"""Second-order truncated Taylor jets and the finite-difference fallback.

A :class:`Jet` carries the value, gradient and Hessian of a scalar quantity
with respect to a fixed set of seed variables.  User maps are written once
against the functions in this module (``sin``, ``cos``, ``exp``, ...) and can
then be evaluated either on plain floats or on seeded jets.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "seed",
    "jet_arrays",
    "fd_arrays",
    "sin", "cos", "tan", "exp", "log", "sqrt",
    "sinh", "cosh", "tanh", "arctan", "arcsinh", "arccos",
    "is_jet",
]


class Jet:
    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h):
        self.v = float(v)
        self.g = g
        self.h = h

    @property
    def nvars(self) -> int:
        return self.g.shape[0]

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        n = self.g.shape[0]
        return Jet(other, np.zeros(n), np.zeros((n, n)))

    def _chain(self, f0, f1, f2) -> "Jet":
        # value f0, first and second derivative f1, f2 of a unary function at self.v
        return Jet(f0, f1 * self.g, f1 * self.h + f2 * np.outer(self.g, self.g))

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            return Jet(self.v + other.v, self.g + other.g, self.h + other.h)
        return Jet(self.v + other, self.g, self.h)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            return Jet(self.v - other.v, self.g - other.g, self.h - other.h)
        return Jet(self.v - other, self.g, self.h)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return Jet(other - self.v, -self.g, -self.h)

    def __neg__(self):
        return Jet(-self.v, -self.g, -self.h)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            cross = np.outer(self.g, other.g)
            return Jet(
                self.v * other.v,
                self.v * other.g + other.v * self.g,
                self.v * other.h + other.v * self.h + cross + cross.T,
            )
        return Jet(self.v * other, self.g * other, self.h * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        if self.v == 0.0:
            raise ZeroDivisionError("jet division by zero")
        r = 1.0 / self.v
        return self._chain(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.v / other, self.g / other, self.h / other)

    def __rtruediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        p = float(p)
        if p == 0.0:
            return self._lift(1.0)
        if p == int(p) and p > 0:
            # integer powers stay defined at negative bases
            k = int(p)
            f0 = self.v ** k
            f1 = k * self.v ** (k - 1)
            f2 = k * (k - 1) * self.v ** (k - 2) if k >= 2 else 0.0
            return self._chain(f0, f1, f2)
        f0 = self.v ** p
        return self._chain(f0, p * self.v ** (p - 1), p * (p - 1) * self.v ** (p - 2))

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __float__(self):
        return self.v

    def __repr__(self):
        return f"Jet({self.v!r}, g={self.g!r})"

    # comparisons act on the value so that branchy user code keeps working
    def __lt__(self, other):
        return self.v < float(other)

    def __le__(self, other):
        return self.v <= float(other)

    def __gt__(self, other):
        return self.v > float(other)

    def __ge__(self, other):
        return self.v >= float(other)


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def _unary(name: str, f0, f1, f2):
    def fn(x):
        if isinstance(x, Jet):
            v = x.v
            return x._chain(f0(v), f1(v), f2(v))
        return getattr(np, name)(x)

    fn.__name__ = name
    return fn


sin = _unary("sin", math.sin, math.cos, lambda v: -math.sin(v))
cos = _unary("cos", math.cos, lambda v: -math.sin(v), lambda v: -math.cos(v))
tan = _unary("tan", math.tan, lambda v: 1.0 / math.cos(v) ** 2,
             lambda v: 2.0 * math.tan(v) / math.cos(v) ** 2)
exp = _unary("exp", math.exp, math.exp, math.exp)
log = _unary("log", math.log, lambda v: 1.0 / v, lambda v: -1.0 / (v * v))
sqrt = _unary("sqrt", math.sqrt, lambda v: 0.5 / math.sqrt(v),
              lambda v: -0.25 / (v * math.sqrt(v)))
sinh = _unary("sinh", math.sinh, math.cosh, math.sinh)
cosh = _unary("cosh", math.cosh, math.sinh, math.cosh)
tanh = _unary("tanh", math.tanh, lambda v: 1.0 - math.tanh(v) ** 2,
              lambda v: -2.0 * math.tanh(v) * (1.0 - math.tanh(v) ** 2))
arctan = _unary("arctan", math.atan, lambda v: 1.0 / (1.0 + v * v),
                lambda v: -2.0 * v / (1.0 + v * v) ** 2)
arcsinh = _unary("arcsinh", math.asinh, lambda v: 1.0 / math.sqrt(1.0 + v * v),
                 lambda v: -v / (1.0 + v * v) ** 1.5)
arccos = _unary("arccos", math.acos, lambda v: -1.0 / math.sqrt(1.0 - v * v),
                lambda v: -v / (1.0 - v * v) ** 1.5)


def seed(z: Sequence[float]) -> np.ndarray:
    """Independent variables at ``z`` as an object array of jets."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    eye = np.eye(n)
    out = np.empty(n, dtype=object)
    for i in range(n):
        out[i] = Jet(z[i], eye[i].copy(), np.zeros((n, n)))
    return out


def jet_arrays(values, nvars: int):
    """Split a (nested) array of jets/floats into value, gradient and Hessian arrays.

    The derivative axes are appended last: for an input of shape ``S`` the
    outputs have shapes ``S``, ``S + (n,)`` and ``S + (n, n)``.
    """
    arr = np.asarray(values, dtype=object)
    shape = arr.shape
    flat = arr.reshape(-1)
    v = np.empty(flat.shape[0])
    g = np.zeros((flat.shape[0], nvars))
    h = np.zeros((flat.shape[0], nvars, nvars))
    for i, x in enumerate(flat):
        if isinstance(x, Jet):
            v[i] = x.v
            g[i] = x.g
            h[i] = x.h
        else:
            v[i] = float(x)
    return v.reshape(shape), g.reshape(shape + (nvars,)), h.reshape(shape + (nvars, nvars))


def fd_arrays(fn: Callable[[np.ndarray], object], z: Sequence[float], step: float = 1e-4):
    """Central finite-difference value, gradient and Hessian of an array-valued map.

    Second-order central stencils; mixed partials use the four-point cross
    stencil.  ``step`` is the absolute step in every coordinate.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[0]

    def ev(p):
        return np.asarray(fn(p), dtype=float)

    f0 = ev(z)
    shape = f0.shape
    g = np.zeros(shape + (n,))
    h = np.zeros(shape + (n, n))
    e = np.eye(n) * step
    plus = [ev(z + e[i]) for i in range(n)]
    minus = [ev(z - e[i]) for i in range(n)]
    for i in range(n):
        g[..., i] = (plus[i] - minus[i]) / (2 * step)
        h[..., i, i] = (plus[i] - 2 * f0 + minus[i]) / step**2
        for j in range(i + 1, n):
            pp = ev(z + e[i] + e[j])
            pm = ev(z + e[i] - e[j])
            mp = ev(z - e[i] + e[j])
            mm = ev(z - e[i] - e[j])
            d = (pp - pm - mp + mm) / (4 * step**2)
            h[..., i, j] = d
            h[..., j, i] = d
    return f0, g, h
