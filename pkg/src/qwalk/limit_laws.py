"""Closed-form limit densities for rescaled position moments and
interference terms, and their moments by singularity-free quadrature.

Every law has the shape

    density(y) = smooth(y) * (bound**2 - y**2) ** exponent   on (-bound, bound)

with ``exponent`` equal to -1/2 (inverse-square-root edge) or +1/2
(square-root edge), plus an optional point mass at the origin. Writing
y = bound * sin(phi) turns either edge into an analytic integrand.
"""

from dataclasses import dataclass
import math
import os

import numpy as np
from scipy import integrate

from qwalk._util import fmt
from qwalk.lattice_walk import GROVER

DEFAULT_QUAD_TOL = 1e-10
GROVER_BOUND = 1.0 / math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
PAIRS = ((0, 1), (0, 2), (1, 2))
SPINOR_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


def quad_tolerance():
    """Absolute quadrature tolerance, overridable via ``QWALK_QUAD_TOL``."""
    raw = os.environ.get("QWALK_QUAD_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_QUAD_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"QWALK_QUAD_TOL must be positive, got {raw!r}")
    return tol


@dataclass(frozen=True)
class LimitLaw:
    bound: float
    smooth: object
    exponent: float
    point_mass: float = 0.0
    name: str = ""

    def density(self, y):
        """Absolutely continuous part, zero outside the open support."""
        y = np.asarray(y, dtype=float)
        inside = np.abs(y) < self.bound
        out = np.zeros(y.shape)
        yi = y[inside]
        out[inside] = self.smooth(yi) * (self.bound ** 2 - yi ** 2) ** self.exponent
        return out if out.ndim else float(out)

    __call__ = density


def _check_two_state(coin, alpha, beta):
    if coin.kind == GROVER:
        raise ValueError("this limit law is defined for 2-state coins only")
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > SPINOR_TOL:
        raise ValueError(f"initial spinor is not normalized (|psi|^2 = {norm!r})")


def make_g(coin, alpha, beta):
    """Limit density of X_t/t for a 2-state walk started at the origin."""
    _check_two_state(coin, alpha, beta)
    c, s = coin.c, coin.s
    u00, u01 = coin.matrix[0, 0], coin.matrix[0, 1]
    cross = alpha * u00 * np.conj(beta * u01)
    slope = abs(alpha) ** 2 - abs(beta) ** 2 + 2 * cross.real / abs(u00) ** 2
    scale = math.sqrt(1 - abs(u00) ** 2) / math.pi

    def smooth(y):
        return scale * (1 - slope * y) / (1 - y ** 2)

    return LimitLaw(abs(c), smooth, -0.5, 0.0, "g")


def make_f_2state(coin, alpha, beta):
    """Limit laws (real part, imaginary part) of <0|rho_t(x)|1>."""
    _check_two_state(coin, alpha, beta)
    c, s, det = coin.c, coin.s, coin.det
    ab = alpha * np.conj(beta)
    slope = abs(alpha) ** 2 - abs(beta) ** 2 - det * (s / c) * 2 * ab.real
    re_scale = det * s / (2 * c) * abs(s) / math.pi
    im_scale = abs(s) * ab.imag / (math.pi * c ** 2)

    def smooth_re(y):
        return re_scale * y * (1 - slope * y) / (1 - y ** 2)

    def smooth_im(y):
        return im_scale / (1 - y ** 2)

    return (
        LimitLaw(abs(c), smooth_re, -0.5, 0.0, "f_R"),
        LimitLaw(abs(c), smooth_im, 0.5, 0.0, "f_I"),
    )


@dataclass(frozen=True)
class GroverCoefficients:
    alpha: complex
    beta: complex
    gamma: complex
    delta_r: dict
    delta_i: dict
    c0: float
    c1: float
    c2: float
    d0: float
    d1: float


def grover_coefficients(alpha, beta, gamma):
    """Point masses and polynomial coefficients of the Grover-walk limit laws
    for a walk started at the origin in alpha|0> + beta|1> + gamma|2>."""
    alpha, beta, gamma = complex(alpha), complex(beta), complex(gamma)
    norm = abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2
    if abs(norm - 1.0) > SPINOR_TOL:
        raise ValueError(f"initial spinor is not normalized (|psi|^2 = {norm!r})")
    ca, cb, cg = alpha.conjugate(), beta.conjugate(), gamma.conjugate()

    edge = abs(alpha + beta / 2) ** 2 + abs(gamma + beta / 2) ** 2
    mix = ((2 * alpha + beta) * (2 * cg + cb)).real
    im_fac = (ca * beta + cb * gamma + 2 * gamma * ca).imag

    d01_r = SQRT6 / 36 * edge + (1 - 29 * SQRT6 / 72) * mix
    d02_r = -SQRT6 / 72 * edge + (2 - 115 * SQRT6 / 144) * mix
    d01_i = (2 - 5 * SQRT6 / 6) * im_fac
    d02_i = (4 - 5 * SQRT6 / 3) * im_fac

    return GroverCoefficients(
        alpha, beta, gamma,
        delta_r={(0, 1): d01_r, (0, 2): d02_r, (1, 2): d01_r},
        delta_i={(0, 1): d01_i, (0, 2): d02_i, (1, 2): d01_i},
        c0=abs(alpha + gamma) ** 2 + 2 * abs(beta) ** 2,
        c1=2 * (-abs(alpha - beta) ** 2 + abs(gamma - beta) ** 2),
        c2=abs(alpha - gamma) ** 2 - 2 * mix,
        d0=((alpha + gamma) * cb).imag,
        d1=(ca * (beta + gamma) + (ca + cb) * gamma).imag,
    )


def make_f_3state(coeffs, j1, j2):
    """Limit laws (real part, imaginary part) of <j1|rho_t(x)|j2> for the
    Grover walk; each carries its Dirac weight at the origin as point_mass."""
    if (j1, j2) not in PAIRS:
        raise ValueError(f"index pair must be one of {PAIRS}, got {(j1, j2)}")
    k = coeffs
    # (1 - 3y^2)^(+-1/2) = 3^(+-1/2) * (1/3 - y^2)^(+-1/2)
    re_scale = math.sqrt(2) / (4 * math.pi * math.sqrt(3))
    im_scale = math.sqrt(3) / math.pi

    def quad_poly(y):
        return re_scale * (k.c0 + k.c1 * y + k.c2 * y ** 2)

    def lin(y):
        return im_scale * (k.d0 + k.d1 * y)

    if (j1, j2) == (0, 1):
        re = lambda y: quad_poly(y) * y / (1 + y)
        im = lambda y: lin(y) / (math.sqrt(2) * (1 + y))
    elif (j1, j2) == (0, 2):
        re = lambda y: quad_poly(y) * (1 - 5 * y ** 2) / (2 * (1 - y ** 2))
        im = lambda y: -lin(y) * math.sqrt(2) * y / (1 - y ** 2)
    else:
        re = lambda y: -quad_poly(y) * y / (1 - y)
        im = lambda y: -lin(y) / (math.sqrt(2) * (1 - y))

    tag = f"{j1}{j2}"
    return (
        LimitLaw(GROVER_BOUND, re, -0.5, k.delta_r[(j1, j2)], f"f_R_{tag}"),
        LimitLaw(GROVER_BOUND, im, 0.5, k.delta_i[(j1, j2)], f"f_I_{tag}"),
    )


def _point_term(law, r):
    return law.point_mass if r == 0 else 0.0


def moment_of_law(law, r, tol=None):
    """point_mass * 0**r + integral of y**r * density(y) dy (0**0 = 1)."""
    if r < 0:
        raise ValueError("moment order must be non-negative")
    tol = quad_tolerance() if tol is None else tol
    b, e = law.bound, law.exponent
    # y = b sin(phi): dy = b cos(phi) dphi and (b^2 - y^2)^e = (b cos(phi))^(2e)
    jac_power = 2 * e + 1

    def integrand(phi):
        y = b * math.sin(phi)
        return y ** r * float(law.smooth(y)) * (b * math.cos(phi)) ** jac_power

    value, err, info = integrate.quad(
        integrand, -math.pi / 2, math.pi / 2,
        epsabs=tol, epsrel=0.0, limit=200, full_output=True,
    )[:3]
    if err > tol:
        raise QuadratureError(
            f"moment r={r} of {law.name or 'law'}: error estimate {err:.3g} above tol {tol:.3g}"
        )
    return _point_term(law, r) + value


def moment_by_edge_weights(law, r, tol=1e-12):
    """Same moment computed with an algebraic-endpoint-weight rule (QUADPACK
    QAWS) applied directly in y, as an independent cross-check."""
    b, e = law.bound, law.exponent

    def f(y):
        return y ** r * float(law.smooth(y))

    value, err = integrate.quad(
        f, -b, b, weight="alg", wvar=(e, e), epsabs=tol, epsrel=0.0, limit=200
    )
    return _point_term(law, r) + value


def moment_by_midpoint(law, r, panels=10**6, shrink=1e-12):
    """Plain midpoint rule on a slightly shrunk support. Only accurate for
    laws whose density vanishes at the edges (exponent +1/2)."""
    b = law.bound * (1 - shrink)
    h = 2 * b / panels
    y = -b + h * (np.arange(panels) + 0.5)
    return _point_term(law, r) + float(np.sum(y ** r * law.density(y)) * h)


def law_table_csv(law, points=2001):
    """``y,density`` on a uniform grid of the closed support, preceded by a
    ``# point_mass=<value>`` comment line. Edge values are the density
    limits from inside (0 for square-root edges, omitted as inf otherwise)."""
    ys = np.linspace(-law.bound, law.bound, points)
    lines = [f"# point_mass={fmt(law.point_mass)}", "y,density"]
    for y in ys:
        if abs(y) >= law.bound:
            if law.exponent < 0:
                continue
            val = 0.0
        else:
            val = float(law.density(y))
        lines.append(f"{fmt(y)},{fmt(val)}")
    return "\n".join(lines) + "\n"
