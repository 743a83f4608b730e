"""Position-space evolution of 2-state coined walks and the 3-state Grover walk.

Amplitudes are stored densely over the occupied window. Component 0 hops
one site to the left per step; for the 2-state walk component 1 hops right,
for the Grover walk component 1 stays and component 2 hops right.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from qwalk._util import fmt

FAMILY_A = "A"
FAMILY_B = "B"
GROVER = "grover"

_EXCLUDED_TOL = 1e-12


@dataclass(frozen=True)
class CoinSpec:
    """Coin operator of the walk.

    ``kind`` is ``"A"`` (u00 = -u11 = c, u01 = u10 = s, det = -1),
    ``"B"`` (u00 = u11 = c, -u01 = u10 = s, det = +1) or ``"grover"``
    (G = (2/3) J - I on C^3, no angle).
    """

    kind: str
    theta: float | None = None
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind in (FAMILY_A, FAMILY_B):
            if self.theta is None:
                raise ValueError("2-state coins need an angle")
            theta = float(self.theta)
            if not 0.0 < theta < 2 * math.pi:
                raise ValueError(f"theta must lie in (0, 2pi), got {theta}")
            c, s = math.cos(theta), math.sin(theta)
            if abs(c) < _EXCLUDED_TOL or abs(s) < _EXCLUDED_TOL:
                raise ValueError(f"theta={theta} is excluded (needs cos and sin nonzero)")
            if self.kind == FAMILY_A:
                u = np.array([[c, s], [s, -c]], dtype=complex)
            else:
                u = np.array([[c, -s], [s, c]], dtype=complex)
            det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
            expected = -1.0 if self.kind == FAMILY_A else 1.0
            if abs(det - expected) > 1e-14:
                raise AssertionError(f"coin determinant {det} != {expected}")
        elif self.kind == GROVER:
            u = 2.0 / 3.0 * np.ones((3, 3), dtype=complex) - np.eye(3)
            if np.max(np.abs(u @ u - np.eye(3))) > 1e-14:
                raise AssertionError("Grover coin is not an involution")
        else:
            raise ValueError(f"unknown coin kind {self.kind!r}")
        if np.max(np.abs(u @ u.conj().T - np.eye(len(u)))) > 1e-14:
            raise AssertionError("coin matrix is not unitary")
        u.flags.writeable = False
        object.__setattr__(self, "matrix", u)

    @classmethod
    def family_a(cls, theta):
        return cls(FAMILY_A, theta)

    @classmethod
    def family_b(cls, theta):
        return cls(FAMILY_B, theta)

    @classmethod
    def grover(cls):
        return cls(GROVER)

    @property
    def dim(self):
        return 3 if self.kind == GROVER else 2

    @property
    def c(self):
        self._require_angle()
        return math.cos(self.theta)

    @property
    def s(self):
        self._require_angle()
        return math.sin(self.theta)

    def _require_angle(self):
        if self.kind == GROVER:
            raise AttributeError("the Grover coin has no angle")

    @property
    def det(self):
        """Determinant of the coin: -1 for family A, +1 for family B."""
        if self.kind == GROVER:
            return float(np.linalg.det(self.matrix).real)
        return -1.0 if self.kind == FAMILY_A else 1.0


@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes ``amps[i]`` at position ``offset + i`` at time ``t``.

    ``amps`` has shape (n_sites, dim) and is made read-only.
    """

    dim: int
    t: int
    offset: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != self.dim:
            raise ValueError(f"amps must have shape (n, {self.dim}), got {amps.shape}")
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.t < 0:
            raise ValueError("time must be non-negative")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def positions(self):
        return np.arange(self.offset, self.offset + len(self.amps))

    def amplitude(self, x):
        i = x - self.offset
        if 0 <= i < len(self.amps):
            return self.amps[i].copy()
        return np.zeros(self.dim, dtype=complex)

    def norm_squared(self):
        return math.fsum((np.abs(self.amps) ** 2).ravel().tolist())

    def to_csv(self):
        """Amplitude dump, one row per stored site, positions ascending."""
        head = ["x"]
        for j in range(self.dim):
            head += [f"re_{j}", f"im_{j}"]
        lines = [",".join(head)]
        for x, psi in zip(self.positions, self.amps):
            row = [str(int(x))]
            for z in psi:
                row += [fmt(z.real), fmt(z.imag)]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def make_initial(dim, position, spinor, tol=1e-12):
    """Walk state at t=0 with all amplitude on a single site.

    The spinor must have unit norm within ``tol``; it is never rescaled.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    spinor = np.asarray(spinor, dtype=complex)
    if spinor.shape != (dim,):
        raise ValueError(f"spinor must have {dim} components")
    norm = float(np.vdot(spinor, spinor).real)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"initial spinor is not normalized (|psi|^2 = {norm!r})")
    return WalkState(dim, 0, int(position), spinor[None, :])


def _check_dims(state, coin):
    if state.dim != coin.dim:
        raise ValueError(f"state has dim {state.dim} but coin {coin.kind!r} acts on C^{coin.dim}")


def step(state, coin):
    """One application of coin-then-conditional-shift."""
    _check_dims(state, coin)
    b = state.amps @ coin.matrix.T
    n = len(b)
    new = np.zeros((n + 2, state.dim), dtype=complex)
    new[0:n, 0] = b[:, 0]
    if state.dim == 2:
        new[2:, 1] = b[:, 1]
    else:
        new[1:n + 1, 1] = b[:, 1]
        new[2:, 2] = b[:, 2]
    return WalkState(state.dim, state.t + 1, state.offset - 1, new)


def step_adjoint(state, coin):
    """Inverse of :func:`step`: reversed shift followed by the adjoint coin.

    The time label is decremented but never below zero, so this can also be
    used to run a state backwards past its origin.
    """
    _check_dims(state, coin)
    a = state.amps
    n = len(a)
    shifted = np.zeros((n + 2, state.dim), dtype=complex)
    shifted[2:, 0] = a[:, 0]
    if state.dim == 2:
        shifted[0:n, 1] = a[:, 1]
    else:
        shifted[1:n + 1, 1] = a[:, 1]
        shifted[0:n, 2] = a[:, 2]
    back = shifted @ coin.matrix.conj()
    return WalkState(state.dim, max(state.t - 1, 0), state.offset - 1, back)


def evolve(state, coin, steps):
    if steps < 0:
        raise ValueError("steps must be non-negative")
    for _ in range(steps):
        state = step(state, coin)
    return state
