"""Momentum-space picture of the walk.

The Fourier transform Psi(k) = sum_x exp(-ikx) psi(x) evolves by the
symbol U(k) = R(k) U. This module provides the symbol's eigensystem and
group velocities h_j(k) = i lambda_j'(k) / lambda_j(k), an independent
k-space propagator used as an oracle for position-space evolution, the
flat-band integrals that give the Grover walk its point masses, and the
band-mixing term of the rescaled sums whose decay drives the limit laws.
"""

import math

import numpy as np
import scipy.linalg

from qwalk._util import fmt, fsum_complex
from qwalk.lattice_walk import FAMILY_A, GROVER, WalkState
from qwalk.limit_laws import PAIRS, quad_tolerance

DEFAULT_NODES = 4096
MAX_NODES = 2 ** 22
FD_STEP = 1e-5


class ConvergenceError(RuntimeError):
    pass


def k_nodes(n):
    """Uniform nodes -pi + 2 pi m / n, m = 0..n-1."""
    return -math.pi + 2 * math.pi * np.arange(n) / n


class FourierSymbol:
    """U(k) = R(k) U for a coin, with its eigenvalues and eigenvectors."""

    def __init__(self, coin):
        self.coin = coin
        self.dim = coin.dim

    def shift_phases(self, k):
        k = np.asarray(k, dtype=float)
        e = np.exp(1j * k)
        if self.dim == 2:
            return np.stack([e, e.conj()], axis=-1)
        return np.stack([e, np.ones_like(e), e.conj()], axis=-1)

    def matrix(self, k):
        """U(k), shape (..., d, d) for array-valued k."""
        return self.shift_phases(k)[..., :, None] * self.coin.matrix

    def eigensystem(self, k):
        """List of (lambda, v) pairs, ordered by band.

        2-state: bands j = 1, 2 from the closed forms. Grover: the flat
        band (lambda = 1) first, then the dispersive bands with
        Im(lambda) >= 0 and Im(lambda) < 0.
        """
        k = float(k)
        if self.dim == 2:
            lam = two_state_eigenvalues(self.coin, k)
            vecs = two_state_eigenvectors(self.coin, k)
            pairs = [(complex(lam[j]), vecs[j]) for j in range(2)]
        else:
            pairs = self._grover_eigensystem(k)
        mat = self.matrix(k)
        for lam, v in pairs:
            res = np.max(np.abs(mat @ v - lam * v))
            if res > 1e-10:
                raise ConvergenceError(f"eigenpair residual {res:.3g} at k={k}")
        return pairs

    def _grover_eigensystem(self, k):
        mat = self.matrix(k)
        t_mat, q = scipy.linalg.schur(mat, output="complex")
        lams = np.diag(t_mat)
        flat = int(np.argmin(np.abs(lams - 1)))
        rest = [i for i in range(3) if i != flat]
        rest.sort(key=lambda i: (lams[i].imag < 0, -lams[i].imag))
        pairs = [(1.0 + 0j, flat_band_vector(k))]
        for i in rest:
            v = q[:, i]
            pairs.append((complex(lams[i]), v / np.linalg.norm(v)))
        return pairs

    def eigenvalues(self, k):
        return np.array([lam for lam, _ in self.eigensystem(k)])

    def velocity(self, k, band):
        """h_band(k) (bands numbered from 1; Grover band 0 is the flat band)."""
        if self.dim == 2:
            return float(two_state_velocity(self.coin, k)[band - 1])
        if band == 0:
            return 0.0
        return grover_velocity_numeric(self, k, band)


def _col(x):
    return np.asarray(x)[..., None]


def two_state_eigenvalues(coin, k):
    """lambda_j(k), j = 1, 2, as an array of shape (..., 2)."""
    c = coin.c
    k = np.asarray(k, dtype=float)
    sign = np.array([-1.0, 1.0])  # (-1)^j for j = 1, 2
    if coin.kind == FAMILY_A:
        root = _col(np.sqrt(1 - c ** 2 * np.sin(k) ** 2))
        return _col(1j * c * np.sin(k)) - sign * root
    root = _col(np.sqrt(1 - c ** 2 * np.cos(k) ** 2))
    return _col(c * np.cos(k)) - 1j * sign * root


def two_state_eigenvectors(coin, k):
    """Normalized eigenvectors, shape (..., 2 bands, 2 components)."""
    c, s = coin.c, coin.s
    k = np.asarray(k, dtype=float)
    sign = np.array([-1.0, 1.0])
    top = np.broadcast_to(_col(s * np.exp(1j * k)), k.shape + (2,))
    if coin.kind == FAMILY_A:
        root = _col(np.sqrt(1 - c ** 2 * np.sin(k) ** 2))
        bottom = _col(-c * np.cos(k)) - sign * root
    else:
        root = _col(np.sqrt(1 - c ** 2 * np.cos(k) ** 2))
        bottom = 1j * (_col(c * np.sin(k)) + sign * root)
    v = np.stack([top, bottom + 0j], axis=-1)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def two_state_velocity(coin, k):
    """h_j(k) = i lambda_j'(k) / lambda_j(k) from the differentiated closed forms."""
    c = coin.c
    k = np.asarray(k, dtype=float)
    sign = np.array([-1.0, 1.0])
    lam = two_state_eigenvalues(coin, k)
    sk, ck = _col(np.sin(k)), _col(np.cos(k))
    if coin.kind == FAMILY_A:
        root = np.sqrt(1 - c ** 2 * sk ** 2)
        dlam = 1j * c * ck + sign * c ** 2 * sk * ck / root
    else:
        root = np.sqrt(1 - c ** 2 * ck ** 2)
        dlam = -c * sk - 1j * sign * c ** 2 * ck * sk / root
    return (1j * dlam / lam).real


def flat_band_vector(k):
    """Normalized eigenvector of the Grover symbol at eigenvalue 1."""
    k = np.asarray(k, dtype=float)
    e = np.exp(-1j * k)
    v = np.stack([np.ones_like(e), (1 + e) / 2, e], axis=-1)
    return _col(np.sqrt(2 / (5 + np.cos(k)))) * v


def _phase_derivative(phase_at, k, step):
    # Richardson-extrapolated central difference of a phase function
    def central(h):
        return np.angle(phase_at(k + h) / phase_at(k - h)) / (2 * h)

    return (4 * central(step / 2) - central(step)) / 3


def grover_velocity_numeric(symbol, k, band):
    """-d(arg lambda)/dk by tracking the band's eigenvalue across k +- h."""
    lam0 = symbol.eigenvalues(k)[band]

    def tracked(kk):
        lams = np.linalg.eigvals(symbol.matrix(kk))
        return lams[np.argmin(np.abs(lams - lam0))]

    return float(-_phase_derivative(tracked, k, FD_STEP))


def velocity_by_finite_difference(coin, k, band, step=FD_STEP):
    """-d(arg lambda_band)/dk for a 2-state coin, by finite differences of
    the closed-form eigenvalue (used to check the analytic h)."""
    def lam(kk):
        return two_state_eigenvalues(coin, kk)[..., band - 1]

    h = -_phase_derivative(lam, np.asarray(k, dtype=float), step)
    return float(h) if np.ndim(h) == 0 else h


def fourier_transform(state, ks):
    """Psi(k) = sum_x exp(-ikx) psi(x), shape (len(ks), d)."""
    ks = np.asarray(ks, dtype=float)
    phases = np.exp(-1j * np.outer(ks, state.positions))
    return phases @ state.amps


def plancherel_norm(state, n_nodes=None):
    """Trapezoid value of the integral of |Psi(k)|^2 dk / 2pi."""
    n = n_nodes or max(DEFAULT_NODES, 2 * len(state.amps) + 1)
    psi_hat = fourier_transform(state, k_nodes(n))
    return math.fsum((np.abs(psi_hat) ** 2).ravel().tolist()) / n


def k_space_propagate(init, symbol, t, n_nodes=None):
    """psi_t(x) = integral of exp(ikx) U(k)^t Psi_0(k) dk / 2pi, by the
    trapezoid rule. Returns a state on the same window as ``evolve``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if init.dim != symbol.dim:
        raise ValueError("state and symbol dimensions differ")
    width = len(init.amps)
    need = 2 * (t + width) + 1
    n = need if n_nodes is None else int(n_nodes)
    if n < need:
        raise ValueError(f"{n} k-nodes would alias at t={t}; need at least {need}")
    ks = k_nodes(n)
    psi_hat = fourier_transform(init, ks)
    prop = np.linalg.matrix_power(symbol.matrix(ks), t)
    psi_hat_t = np.einsum("mab,mb->ma", prop, psi_hat)
    xs = np.arange(init.offset - t, init.offset + width + t)
    amps = np.exp(1j * np.outer(xs, ks)) @ psi_hat_t / n
    return WalkState(init.dim, init.t + t, int(xs[0]), amps)


def _converged_trapezoid(integrand, tol, n_start=None):
    """Mean of a 2pi-periodic integrand over uniform nodes, doubling the node
    count until successive values agree within tol."""
    n = n_start or DEFAULT_NODES
    prev = integrand(k_nodes(n))
    while n < MAX_NODES:
        n *= 2
        cur = integrand(k_nodes(n))
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise ConvergenceError(f"k-quadrature did not settle to {tol:.3g} with {n} nodes")


def _require_grover(init):
    if init.dim != 3:
        raise ValueError("flat-band integrals need a 3-state (Grover) walk state")


def flat_band_overlap(init, ks):
    """<v(k)|Psi_0(k)> on the given nodes."""
    v = flat_band_vector(ks)
    return np.einsum("ma,ma->m", v.conj(), fourier_transform(init, ks))


def delta_integrals(init, which, j1, j2, *, identity_form=False, tol=None):
    """Flat-band contribution to the r=0 limit of sum_x <j1|rho_t(x)|j2>.

    ``which="R"`` gives the integral of 1/2 |<v|Psi_0>|^2 <v|J+|v>,
    ``which="I"`` that of 1/(2i) |<v|Psi_0>|^2 <v|J-|v>, with
    J+ = |j1><j2| + |j2><j1| and J- = |j2><j1| - |j1><j2|. These are the
    point masses at the origin of the Grover limit laws.

    With ``identity_form=True`` the real (0, 2) entry additionally subtracts
    1/4 |<v|Psi_0>|^2, which is the normalization under which the r=0 sum
    equals Delta + 1/4 - 5/4 E[(X/t)^2] in the large-t limit.
    """
    _require_grover(init)
    if (j1, j2) not in PAIRS:
        raise ValueError(f"index pair must be one of {PAIRS}, got {(j1, j2)}")
    if which not in ("R", "I"):
        raise ValueError("which must be 'R' or 'I'")
    tol = quad_tolerance() if tol is None else tol

    def integrand(ks):
        v = flat_band_vector(ks)
        weight = np.abs(flat_band_overlap(init, ks)) ** 2
        cross = v[:, j1] * v[:, j2].conj()
        if which == "R":
            vals = weight * cross.real
            if identity_form and (j1, j2) == (0, 2):
                vals = vals - 0.25 * weight
        else:
            vals = weight * cross.imag
        return math.fsum(vals.tolist()) / len(ks)

    return _converged_trapezoid(integrand, tol)


def flat_band_weight(init, tol=None):
    """Integral of |<v(k)|Psi_0(k)>|^2 dk / 2pi: the probability that stays
    localized in the long run."""
    _require_grover(init)
    tol = quad_tolerance() if tol is None else tol
    return _converged_trapezoid(
        lambda ks: math.fsum((np.abs(flat_band_overlap(init, ks)) ** 2).tolist()) / len(ks),
        tol,
    )


def flat_band_amplitude(init, x, n_nodes=None):
    """Time-independent flat-band part of psi_t(x)."""
    _require_grover(init)
    n_nodes = n_nodes or 4 * DEFAULT_NODES
    ks = k_nodes(n_nodes)
    coef = flat_band_overlap(init, ks) * np.exp(1j * ks * x)
    return (coef[:, None] * flat_band_vector(ks)).sum(axis=0) / n_nodes


def band_decomposition(init, symbol, t, r, j1, j2, n_nodes=None):
    """Leading-order split of sum_x (x/t)^r <j1|rho_t(x)|j2> into the
    band-diagonal part and the band-mixing part for a 2-state walk.

    Uses D^r lambda^t ~ (t)_r h^r lambda^t; exact when r = 0.
    Returns (diagonal, mixing) as complex numbers.
    """
    if symbol.dim != 2:
        raise ValueError("band decomposition is implemented for 2-state walks")
    width = len(init.amps)
    n = n_nodes or max(DEFAULT_NODES, 8 * (t + width) + 1)
    ks = k_nodes(n)
    lam = two_state_eigenvalues(symbol.coin, ks)        # (n, 2)
    vecs = two_state_eigenvectors(symbol.coin, ks)      # (n, band, comp)
    h = two_state_velocity(symbol.coin, ks)              # (n, 2)
    w = np.einsum("mja,ma->mj", vecs.conj(), fourier_transform(init, ks))
    # <v_j| (|j2><j1|) |v_l> = conj(v_j[j2]) v_l[j1]
    op = vecs[:, :, j2].conj()[:, :, None] * vecs[:, None, :, j1]
    falling = 1.0
    for i in range(r):
        falling *= (t - i) / t if t else 0.0
    diag = np.zeros(n, dtype=complex)
    mix = np.zeros(n, dtype=complex)
    for j in range(2):
        for l in range(2):
            term = w[:, j].conj() * w[:, l] * h[:, l] ** r * op[:, j, l]
            if j == l:
                diag += term
            else:
                mix += (lam[:, j].conj() * lam[:, l]) ** t * term
    return falling * fsum_complex(diag) / n, falling * fsum_complex(mix) / n


def cross_term_magnitude(init, symbol, t, r, j1, j2, n_nodes=None):
    """|band-mixing part| of the rescaled sum at time t."""
    return abs(band_decomposition(init, symbol, t, r, j1, j2, n_nodes)[1])


def band_csv(symbol, points=1025):
    """``k,re_lambda_j,im_lambda_j,h_j`` columns for every band j."""
    ks = np.linspace(-math.pi, math.pi, points, endpoint=False)
    nb = symbol.dim
    first = 1 if symbol.dim == 2 else 0
    head = ["k"]
    for j in range(first, first + nb):
        head += [f"re_lambda_{j}", f"im_lambda_{j}", f"h_{j}"]
    lines = [",".join(head)]
    for k in ks:
        lams = symbol.eigenvalues(k)
        row = [fmt(k)]
        for idx, j in enumerate(range(first, first + nb)):
            row += [fmt(lams[idx].real), fmt(lams[idx].imag), fmt(symbol.velocity(k, j))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
