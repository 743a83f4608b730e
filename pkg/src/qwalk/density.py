"""Local density matrices, position distributions and rescaled sums
sum_x (x/t)^r <j1|rho_t(x)|j2>."""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from qwalk._util import fmt, fsum_complex


@dataclass(frozen=True, eq=False)
class LocalDensity:
    x: int
    mat: np.ndarray

    @property
    def trace(self):
        return float(np.trace(self.mat).real)


@dataclass(frozen=True)
class MomentSeries:
    """Rescaled sums for one matrix entry at a fixed time, keyed by r."""

    entry: tuple
    t: int
    values: dict = field(default_factory=dict)

    def to_json(self):
        data = {
            "entry": list(self.entry),
            "t": self.t,
            "values": {
                str(r): {"re": fmt(z.real), "im": fmt(z.imag)}
                for r, z in sorted(self.values.items())
            },
        }
        return json.dumps(data, indent=2) + "\n"


def density_at(state, x):
    """rho_t(x) = |psi_t(x)><psi_t(x)|; zero matrix off the stored window."""
    psi = state.amplitude(x)
    return LocalDensity(int(x), np.outer(psi, psi.conj()))


def entry_profile(state, j1, j2):
    """Positions and <j1|rho_t(x)|j2> = psi_j1(x) conj(psi_j2(x)) for every stored x."""
    _check_indices(state, j1, j2)
    a, b = state.amps[:, j1], state.amps[:, j2]
    # separate real products keep (j2, j1) the exact conjugate of (j1, j2)
    re = a.real * b.real + a.imag * b.imag
    im = a.imag * b.real - a.real * b.imag
    if j1 == j2:
        im = np.zeros_like(re)
    return state.positions, re + 1j * im


def probabilities(state):
    """Positions and P(X_t = x) as parallel arrays."""
    return state.positions, (np.abs(state.amps) ** 2).sum(axis=1)


def probability_distribution(state, *, drop_zeros=True):
    xs, p = probabilities(state)
    return {int(x): float(v) for x, v in zip(xs, p) if v != 0.0 or not drop_zeros}


def _weights(state, r):
    if state.t == 0:
        if r > 0:
            raise ValueError("rescaled sums with r > 0 are undefined at t = 0")
        return np.ones(len(state.amps))
    return (state.positions / state.t) ** r


def rescaled_sum(state, r, j1, j2):
    """Exact finite sum of (x/t)^r <j1|rho_t(x)|j2> over all sites."""
    if r < 0:
        raise ValueError("moment order must be non-negative")
    _, z = entry_profile(state, j1, j2)
    return fsum_complex(_weights(state, r) * z)


def moment(state, r):
    """Empirical moment E[(X_t/t)^r] (diagonal entries summed)."""
    if r < 0:
        raise ValueError("moment order must be non-negative")
    _, p = probabilities(state)
    return math.fsum((_weights(state, r) * p).tolist())


def moment_series(state, j1, j2, r_max):
    values = {r: rescaled_sum(state, r, j1, j2) for r in range(r_max + 1)}
    return MomentSeries((j1, j2), state.t, values)


def density_csv(state):
    """Rows ``x,j1,j2,re,im`` for every stored site and index pair."""
    lines = ["x,j1,j2,re,im"]
    for x, psi in zip(state.positions, state.amps):
        mat = np.outer(psi, psi.conj())
        for j1 in range(state.dim):
            for j2 in range(state.dim):
                z = mat[j1, j2]
                lines.append(f"{int(x)},{j1},{j2},{fmt(z.real)},{fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def interference_csv(state, j1, j2):
    """Rows ``x_over_t,re,im`` of one density-matrix entry against x/t.

    Parity-null sites of a 2-state walk are skipped, since they carry no
    information and would otherwise interleave zeros into the profile.
    """
    if state.t == 0:
        raise ValueError("x/t is undefined at t = 0")
    xs, z = entry_profile(state, j1, j2)
    keep = np.abs(state.amps).sum(axis=1) > 0
    lines = ["x_over_t,re,im"]
    for x, v in zip(xs[keep], z[keep]):
        lines.append(f"{fmt(x / state.t)},{fmt(v.real)},{fmt(v.imag)}")
    return "\n".join(lines) + "\n"


def probability_csv(state):
    """Rows ``x,x_over_t,probability`` for every nonzero site."""
    xs, p = probabilities(state)
    lines = ["x,x_over_t,probability"]
    for x, v in zip(xs, p):
        if v == 0.0:
            continue
        scaled = x / state.t if state.t else 0.0
        lines.append(f"{int(x)},{fmt(scaled)},{fmt(v)}")
    return "\n".join(lines) + "\n"


def _check_indices(state, j1, j2):
    if not (0 <= j1 < state.dim and 0 <= j2 < state.dim):
        raise ValueError(f"indices ({j1}, {j2}) out of range for dim {state.dim}")
