"""Strangeness-free delay DAE models.

A model supplies its own split into d differential equations
D(t, z, z', z_tau) and a algebraic equations A(t, z, z_tau, z_tau', ...),
including all hidden constraints.  The split is part of the model
definition: computing it automatically for a black-box residual would need
symbolic derivative arrays, so built-in models ship hand-derived
constraints instead.

The declared delay-derivative order of A (``s_decl``) classifies the
system: 0 retarded, 1 neutral, >= 2 advanced.  Advanced systems lose one
derivative of smoothness per delay interval and generically break down
under the method of steps.
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)


class Classification:
    """Delay type of a DDAE, with the underlying delay-derivative order s."""

    RETARDED = "retarded"
    NEUTRAL = "neutral"
    ADVANCED = "advanced"

    def __init__(self, tag, s):
        if tag == self.RETARDED and s != 0:
            raise ValueError("retarded systems have s = 0")
        if tag == self.NEUTRAL and s != 1:
            raise ValueError("neutral systems have s = 1")
        if tag == self.ADVANCED and s < 2:
            raise ValueError("advanced systems have s >= 2")
        self.tag = tag
        self.s = s

    @classmethod
    def retarded(cls):
        return cls(cls.RETARDED, 0)

    @classmethod
    def neutral(cls):
        return cls(cls.NEUTRAL, 1)

    @classmethod
    def advanced(cls, s):
        return cls(cls.ADVANCED, s)

    def __eq__(self, other):
        return (isinstance(other, Classification)
                and self.tag == other.tag and self.s == other.s)

    def __hash__(self):
        return hash((self.tag, self.s))

    def __repr__(self):
        return f"Classification({self.tag}, s={self.s})"

    def to_json(self):
        return {"type": self.tag, "s": self.s}


class SfDdaeModel:
    """Strangeness-free DDAE with hand-supplied split and Jacobians.

    Parameters
    ----------
    n, d, a : state dimension and differential/algebraic equation counts,
        with d + a = n
    tau : delay, strictly positive
    s_decl : highest delayed-derivative order + 1 appearing in A; 0 means A
        is independent of all delayed quantities
    D : callable (t, z, zdot, ztau) -> (d,)
    A : callable (t, z, zlags) -> (a,) where zlags has rows
        z_tau, z_tau', ..., z_tau^(s_decl - 1)
    JD_z, JD_zdot : Jacobians of D w.r.t. z and zdot, same signature as D
    JA_z : Jacobian of A w.r.t. z, same signature as A
    name : identifier used in reports
    state_names : informational component labels
    default_history : optional zero-argument callable building a history
    """

    def __init__(self, n, d, a, tau, s_decl, D, A, JD_z, JD_zdot, JA_z,
                 name="model", state_names=None, default_history=None):
        if d + a != n:
            raise ValueError(f"d + a must equal n, got {d} + {a} != {n}")
        if tau <= 0:
            raise ValueError("tau must be positive (a zero delay makes the "
                             "shifted coupling collapse)")
        if s_decl < 0:
            raise ValueError("s_decl must be non-negative")
        self.n = n
        self.d = d
        self.a = a
        self.tau = float(tau)
        self.s_decl = int(s_decl)
        self.D = D
        self.A = A
        self.JD_z = JD_z
        self.JD_zdot = JD_zdot
        self.JA_z = JA_z
        self.name = name
        self.state_names = list(state_names) if state_names else [
            f"z_{i + 1}" for i in range(n)]
        self.default_history = default_history

    @property
    def n_lags(self):
        """Number of delayed-derivative rows the model consumes."""
        return max(1, self.s_decl)

    def residual(self, t, z, zdot, zlags):
        """Stacked [D; A] residual; zlags rows are z_tau^(j)."""
        zlags = np.atleast_2d(zlags)
        out = np.empty(self.n)
        out[:self.d] = self.D(t, z, zdot, zlags[0])
        out[self.d:] = self.A(t, z, zlags[:max(self.s_decl, 0)])
        return out

    def algebraic_residual(self, t, z, zlags):
        zlags = np.atleast_2d(zlags)
        return np.asarray(self.A(t, z, zlags[:max(self.s_decl, 0)]))

    def __repr__(self):
        return (f"SfDdaeModel({self.name!r}, n={self.n}, d={self.d}, "
                f"a={self.a}, tau={self.tau}, s_decl={self.s_decl})")


def residual(m, t, z, zdot, zlags):
    """Module-level alias for the stacked [D; A] evaluation."""
    return m.residual(t, z, zdot, zlags)


def admissible(m, phi, tol=1e-6):
    """Check the history endpoint against the algebraic part.

    Evaluates r = A(0, phi(0), phi(-tau), phi'(-tau), ...,
    phi^(s_decl-1)(-tau)) and returns (norm(r) <= tol, r).  This is exactly
    the consistency condition of the first method-of-steps segment, so an
    admissible history guarantees solvability on [0, tau).
    """
    rows = max(1, m.s_decl)
    zlags = np.stack([phi.eval(-m.tau, order=j) for j in range(rows)])
    z0 = phi.eval(0.0)
    r = m.algebraic_residual(0.0, z0, zlags)
    return bool(np.linalg.norm(r) <= tol), r


def classify(m):
    """Declared classification of the model (pure reporting of s_decl)."""
    if m.s_decl == 0:
        return Classification.retarded()
    if m.s_decl == 1:
        return Classification.neutral()
    return Classification.advanced(m.s_decl)
