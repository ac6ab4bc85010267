"""Symbolic time signals (forcing terms and history functions).

Signals are sums of a polynomial and finitely many sinusoids per component,
so derivatives of any order are available in closed form.  This is what the
algebraic solution formula and the admissibility check require; arbitrary
callables would only offer approximate derivatives.
"""

import math

import numpy as np

from .errors import DataError, ShapeError

_HALF_PI = math.pi / 2.0


class SymbolicSignal:
    """Vector-valued map ``t -> R^n`` with exact derivatives of any order.

    Component ``i`` is ``poly_i(t) + sum_k amp * sin(omega * t + phase)``
    where ``poly_i`` is stored as ascending coefficients.

    Parameters
    ----------
    poly : sequence of coefficient sequences, one per component
    sin : sequence of ``(amp, omega, phase)`` triple lists, one per component
    dim : dimension override, needed only when both lists are empty
    """

    def __init__(self, poly=None, sin=None, dim=None):
        if poly is None and sin is None and dim is None:
            raise ShapeError("signal needs poly, sin or an explicit dimension")
        n = dim
        if n is None:
            n = len(poly) if poly is not None else len(sin)
        self.dim = int(n)
        poly = [[]] * self.dim if poly is None else poly
        sin = [[]] * self.dim if sin is None else sin
        if len(poly) != self.dim or len(sin) != self.dim:
            raise ShapeError("poly/sin component counts disagree with dim")
        self.poly = [tuple(float(c) for c in row) for row in poly]
        self.sin = [tuple((float(a), float(w), float(p)) for a, w, p in row)
                    for row in sin]
        for row in self.poly:
            if not all(math.isfinite(c) for c in row):
                raise DataError("non-finite polynomial coefficient")
        for row in self.sin:
            for tr in row:
                if not all(math.isfinite(v) for v in tr):
                    raise DataError("non-finite sinusoid parameter")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, dim):
        return cls(dim=dim)

    @classmethod
    def constant(cls, values):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return cls(poly=[[v] for v in values])

    @classmethod
    def from_polynomials(cls, rows):
        return cls(poly=rows)

    # -- evaluation -----------------------------------------------------

    def eval(self, t, order=0):
        """Evaluate the ``order``-th derivative at time ``t``."""
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        out = np.zeros(self.dim)
        for i in range(self.dim):
            acc = 0.0
            coeffs = self.poly[i]
            for j in range(order, len(coeffs)):
                fall = 1.0
                for r in range(j, j - order, -1):
                    fall *= r
                acc += coeffs[j] * fall * t ** (j - order)
            for amp, omega, phase in self.sin[i]:
                acc += amp * omega ** order * math.sin(
                    omega * t + phase + order * _HALF_PI)
            out[i] = acc
        return out

    def __call__(self, t, order=0):
        return self.eval(t, order)

    # -- algebra --------------------------------------------------------

    def shift(self, dt):
        """Return the signal ``t -> self(t + dt)``."""
        new_poly = []
        for coeffs in self.poly:
            m = len(coeffs)
            row = [0.0] * m
            for j, c in enumerate(coeffs):
                for i in range(j + 1):
                    row[i] += c * math.comb(j, i) * dt ** (j - i)
            new_poly.append(row)
        new_sin = [[(a, w, p + w * dt) for a, w, p in row] for row in self.sin]
        return SymbolicSignal(poly=new_poly, sin=new_sin, dim=self.dim)

    def transform(self, M):
        """Return the signal ``t -> M @ self(t)`` for a matrix ``M``."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape[1] != self.dim:
            raise ShapeError("transform matrix columns must match signal dim")
        out_dim = M.shape[0]
        width = max((len(r) for r in self.poly), default=0)
        new_poly = [[0.0] * width for _ in range(out_dim)]
        new_sin = [[] for _ in range(out_dim)]
        for i in range(out_dim):
            for j in range(self.dim):
                mij = M[i, j]
                if mij == 0.0:
                    continue
                for k, c in enumerate(self.poly[j]):
                    new_poly[i][k] += mij * c
                for a, w, p in self.sin[j]:
                    new_sin[i].append((mij * a, w, p))
        return SymbolicSignal(poly=new_poly, sin=new_sin, dim=out_dim)

    def stack(self, other):
        """Concatenate two signals into one of dimension ``n1 + n2``."""
        return SymbolicSignal(poly=list(self.poly) + list(other.poly),
                              sin=list(self.sin) + list(other.sin))

    # -- serialization --------------------------------------------------

    def to_json(self):
        return {"poly": [list(row) for row in self.poly],
                "sin": [[list(tr) for tr in row] for row in self.sin]}

    @classmethod
    def from_json(cls, data):
        poly = data.get("poly")
        sin = data.get("sin")
        dim = None
        if poly is None and sin is None:
            dim = int(data["dim"])
        return cls(poly=poly, sin=sin, dim=dim)

    def __repr__(self):
        return f"SymbolicSignal(dim={self.dim})"


# Forcing terms use the signal type directly.
ForcingFunction = SymbolicSignal


class HistoryFunction:
    """Initial trajectory on ``[-tau, 0]`` with exact derivatives.

    Wraps a :class:`SymbolicSignal` and rejects evaluation outside the
    history interval (a small relative slack absorbs rounding in segment
    bookkeeping).
    """

    def __init__(self, signal, tau):
        if tau <= 0:
            raise ValueError("history interval requires tau > 0")
        self.signal = signal
        self.tau = float(tau)
        self.dim = signal.dim

    @classmethod
    def from_polynomials(cls, rows, tau):
        return cls(SymbolicSignal(poly=rows), tau)

    @classmethod
    def constant(cls, values, tau):
        return cls(SymbolicSignal.constant(values), tau)

    def eval(self, t, order=0):
        slack = 1e-9 * max(self.tau, 1.0)
        if t < -self.tau - slack or t > slack:
            raise ValueError(f"history evaluated outside [-tau, 0]: t={t}")
        return self.signal.eval(min(t, 0.0), order)

    def __call__(self, t, order=0):
        return self.eval(t, order)

    def to_json(self):
        data = self.signal.to_json()
        data["tau"] = self.tau
        return data

    @classmethod
    def from_json(cls, data):
        return cls(SymbolicSignal.from_json(data), data["tau"])
