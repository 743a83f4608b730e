"""Finite-time simulation against limit predictions.

A :class:`ComparisonReport` holds one row per compared quantity. Row kinds:

    g-moment   E[(X_t/t)^r] against the moments of g
    Thm2-R     Re sum (x/t)^r <0|rho|1> against the moments of f^(R)
    Thm2-I     Im sum (x/t)^r <0|rho|1> against the moments of f^(I)
    Lemma1     Re sum (x/t)^r <0|rho|1> against det(U) s/(2c) E[(X_t/t)^(r+1)]
    LemA1-r0   Grover r=0 real sums against Delta + moment combination
    LemA1-r    Grover r>=1 real sums against the moment combination
    ThmA2-R    Grover real sums against point mass + density moments
    ThmA2-I    Grover imaginary sums, likewise
"""

from dataclasses import dataclass, field
import json
import math
import os

import numpy as np

from qwalk._util import atomic_write, fmt
from qwalk.density import moment, probabilities, rescaled_sum
from qwalk.lattice_walk import CoinSpec, evolve, make_initial, step
from qwalk.limit_laws import (
    PAIRS,
    grover_coefficients,
    make_f_2state,
    make_f_3state,
    make_g,
    moment_of_law,
)
from qwalk.spectral import (
    FourierSymbol,
    cross_term_magnitude,
    delta_integrals,
    flat_band_amplitude,
    flat_band_weight,
)

KINDS = ("g-moment", "Thm2-R", "Thm2-I", "Lemma1", "LemA1-r0", "LemA1-r", "ThmA2-R", "ThmA2-I")

TOL_TWO_STATE = 1e-2
TOL_THREE_STATE = 2e-2
TOL_IDENTITY = 2e-2
TOL_DELTA_CLOSED_FORM = 1e-8
TOL_DELTA_SYMMETRY = 1e-10

# Grover real parts: Re sum (x/t)^r <j1|rho|j2> -> a*M_r + b*M_(r+1) + c*M_(r+2)
_GROVER_MOMENT_COMBOS = {
    (0, 1): (0.0, 0.5, -0.5),
    (0, 2): (0.25, 0.0, -1.25),
    (1, 2): (0.0, -0.5, -0.5),
}


@dataclass(frozen=True)
class Row:
    kind: str
    qid: str
    finite: complex
    limit: complex
    tol: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown quantity kind {self.kind!r}")

    @property
    def abs_error(self):
        return abs(complex(self.finite) - complex(self.limit))

    @property
    def ok(self):
        return self.abs_error <= self.tol


@dataclass
class ComparisonReport:
    scenario: dict
    rows: list = field(default_factory=list)
    convergence: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.ok for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.ok]

    def row(self, qid):
        for r in self.rows:
            if r.qid == qid:
                return r
        raise KeyError(qid)

    def to_json(self):
        data = {
            "scenario": self.scenario,
            "rows": [
                {
                    "kind": r.kind,
                    "id": r.qid,
                    "finite_t_value": _cplx(r.finite),
                    "limit_value": _cplx(r.limit),
                    "abs_error": fmt(r.abs_error),
                    "tolerance": fmt(r.tol),
                    "pass": r.ok,
                }
                for r in self.rows
            ],
            "convergence": [{"t": int(t), "abs_error": fmt(e)} for t, e in self.convergence],
        }
        return json.dumps(data, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        """Parse a report, recomputing every abs_error from its two values."""
        data = json.loads(text)
        rows = []
        for item in data["rows"]:
            row = Row(
                item["kind"], item["id"], _uncplx(item["finite_t_value"]),
                _uncplx(item["limit_value"]), float(item["tolerance"]),
            )
            stored = float(item["abs_error"])
            if not math.isclose(stored, row.abs_error, rel_tol=1e-14, abs_tol=1e-300):
                raise ValueError(f"row {row.qid}: stored abs_error {stored} is inconsistent")
            rows.append(row)
        conv = [(int(c["t"]), float(c["abs_error"])) for c in data.get("convergence", [])]
        return cls(data["scenario"], rows, conv)


def _cplx(z):
    z = complex(z)
    return {"re": fmt(z.real), "im": fmt(z.imag)}


def _uncplx(d):
    return complex(float(d["re"]), float(d["im"]))


def write_report(report, path):
    """Write a report to a new file; existing reports are never overwritten."""
    if os.path.exists(path):
        raise FileExistsError(f"report {path} already exists")
    atomic_write(path, report.to_json())


def _rid(kind, r, pair=None):
    if pair is None:
        return f"{kind}[r={r}]"
    return f"{kind}[r={r},({pair[0]},{pair[1]})]"


def _spinor_text(spinor):
    return [_cplx(z) for z in spinor]


def _two_state_rows(state, coin, alpha, beta, r_max):
    g = make_g(coin, alpha, beta)
    f_re, f_im = make_f_2state(coin, alpha, beta)
    factor = coin.det * coin.s / (2 * coin.c)
    rows = []
    for r in range(r_max + 1):
        z = rescaled_sum(state, r, 0, 1)
        rows.append(Row("g-moment", _rid("g-moment", r), moment(state, r), moment_of_law(g, r), TOL_TWO_STATE))
        rows.append(Row("Thm2-R", _rid("Thm2-R", r, (0, 1)), z.real, moment_of_law(f_re, r), TOL_TWO_STATE))
        rows.append(Row("Thm2-I", _rid("Thm2-I", r, (0, 1)), z.imag, moment_of_law(f_im, r), TOL_TWO_STATE))
        rows.append(Row("Lemma1", _rid("Lemma1", r, (0, 1)), z.real, factor * moment(state, r + 1), TOL_IDENTITY))
    return rows


def check_theorem2(coin, alpha, beta, t, r_max=2):
    """Compare a 2-state walk from the origin with its interference limit laws."""
    if coin.dim != 2:
        raise ValueError("check_theorem2 needs a 2-state coin")
    if t < 100:
        raise ValueError("finite-time comparisons need t >= 100")
    state = evolve(make_initial(2, 0, [alpha, beta]), coin, t)
    scenario = {
        "name": "two-state",
        "coin": coin.kind,
        "theta": fmt(coin.theta),
        "init": _spinor_text([alpha, beta]),
        "t": t,
    }
    return ComparisonReport(scenario, _two_state_rows(state, coin, alpha, beta, r_max))


def grover_delta_rows(init, coeffs):
    """Flat-band quadratures against the closed-form point masses, and the
    (0,1)/(1,2) equality of both parts."""
    rows = []
    for which, closed in (("R", coeffs.delta_r), ("I", coeffs.delta_i)):
        kind = f"ThmA2-{which}"
        quad = {}
        for pair in PAIRS:
            quad[pair] = delta_integrals(init, which, *pair)
            rows.append(Row(kind, f"{kind}[delta,({pair[0]},{pair[1]})]", quad[pair], closed[pair], TOL_DELTA_CLOSED_FORM))
        rows.append(Row(kind, f"{kind}[delta01=delta12]", quad[(0, 1)], quad[(1, 2)], TOL_DELTA_SYMMETRY))
    return rows


def _grover_rows(state, init, coeffs, r_max):
    rows = []
    moments = [moment(state, r) for r in range(r_max + 3)]
    for pair in PAIRS:
        f_re, f_im = make_f_3state(coeffs, *pair)
        a, b, c = _GROVER_MOMENT_COMBOS[pair]
        for r in range(r_max + 1):
            z = rescaled_sum(state, r, *pair)
            rows.append(Row("ThmA2-R", _rid("ThmA2-R", r, pair), z.real, moment_of_law(f_re, r), TOL_THREE_STATE))
            rows.append(Row("ThmA2-I", _rid("ThmA2-I", r, pair), z.imag, moment_of_law(f_im, r), TOL_THREE_STATE))
            if r == 0:
                delta = delta_integrals(init, "R", *pair, identity_form=True)
                pred = delta + a + b * moments[1] + c * moments[2]
                rows.append(Row("LemA1-r0", _rid("LemA1-r0", 0, pair), z.real, pred, TOL_IDENTITY))
            else:
                pred = a * moments[r] + b * moments[r + 1] + c * moments[r + 2]
                rows.append(Row("LemA1-r", _rid("LemA1-r", r, pair), z.real, pred, TOL_IDENTITY))
    return rows


def check_theoremA2(alpha, beta, gamma, t, r_max=2):
    """Compare a Grover walk from the origin with its interference limit laws
    and the moment identities for the real parts."""
    if t < 100:
        raise ValueError("finite-time comparisons need t >= 100")
    coeffs = grover_coefficients(alpha, beta, gamma)
    init = make_initial(3, 0, [alpha, beta, gamma])
    state = evolve(init, CoinSpec.grover(), t)
    scenario = {"name": "grover", "coin": "grover", "init": _spinor_text([alpha, beta, gamma]), "t": t}
    rows = grover_delta_rows(init, coeffs) + _grover_rows(state, init, coeffs, r_max)
    return ComparisonReport(scenario, rows)


@dataclass(frozen=True)
class Scenario:
    name: str
    coin: CoinSpec
    spinor: tuple
    t: int


R2 = math.sqrt(2.0)
R3 = math.sqrt(3.0)

SCENARIOS = {
    "thm2-fig2": Scenario("thm2-fig2", CoinSpec.family_a(math.pi / 4), (1 / R2, 1j / R2), 1000),
    "grover-interference": Scenario("grover-interference", CoinSpec.grover(), (1 / R3, 1j / R3, 1j / R3), 1000),
}


def run_scenario(scenario, t=None, r_max=2):
    t = scenario.t if t is None else t
    if scenario.coin.dim == 2:
        report = check_theorem2(scenario.coin, *scenario.spinor, t, r_max)
    else:
        report = check_theoremA2(*scenario.spinor, t, r_max)
    report.scenario["name"] = scenario.name
    return report


def convergence_sweep(scenario, t_list, quantity_id, r_max=2):
    """abs_error of one row at each t in ascending ``t_list``.

    ``scenario.name`` is recorded; the report's ``rows`` hold the row at the
    largest t and ``scenario["improved"]`` says whether the error there is
    no larger than at the smallest t.
    """
    t_list = list(t_list)
    meta = {"name": scenario.name, "quantity": quantity_id, "t_list": t_list}
    if not t_list:
        return ComparisonReport(meta)
    if t_list != sorted(t_list):
        raise ValueError("t_list must be ascending")
    coin = scenario.coin
    init = make_initial(coin.dim, 0, list(scenario.spinor))
    if coin.dim == 3:
        coeffs = grover_coefficients(*scenario.spinor)
    state = init
    conv, last = [], None
    for t in t_list:
        state = evolve(state, coin, t - state.t)
        if coin.dim == 2:
            rows = _two_state_rows(state, coin, *scenario.spinor, r_max)
        else:
            rows = _grover_rows(state, init, coeffs, r_max)
        last = ComparisonReport(meta, rows).row(quantity_id)
        conv.append((t, last.abs_error))
    meta["improved"] = conv[-1][1] <= conv[0][1]
    return ComparisonReport(meta, [last], conv)


@dataclass
class Evidence:
    """A time series with a pass/fail threshold, for checks that are not
    finite-vs-limit differences (localization, cross-term decay)."""

    name: str
    series: list
    threshold: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        data = {
            "name": self.name,
            "series": [{"t": int(t), "value": fmt(v)} for t, v in self.series],
            "threshold": fmt(self.threshold),
            "pass": self.passed,
            "details": {k: (fmt(v) if isinstance(v, float) else v) for k, v in self.details.items()},
        }
        return json.dumps(data, indent=2) + "\n"


def localization_floor(spinor):
    """Half of the long-time return probability carried by the flat band.

    The flat band contributes a time-independent amplitude at the origin;
    the dispersive bands' contribution there dies out, so P(X_t = 0)
    approaches |flat amplitude|^2. Half of that is a floor any moderately
    long run should clear.
    """
    init = make_initial(3, 0, list(spinor))
    amp = flat_band_amplitude(init, 0)
    limit = float(np.vdot(amp, amp).real)
    return 0.5 * limit, limit


def check_localization(spinor, t_min=100, t_max=150):
    """min over t in [t_min, t_max] of P(X_t = 0) against the flat-band floor."""
    coin = CoinSpec.grover()
    state = evolve(make_initial(3, 0, list(spinor)), coin, t_min)
    series = []
    for t in range(t_min, t_max + 1):
        if t > t_min:
            state = step(state, coin)
        xs, p = probabilities(state)
        series.append((t, float(p[xs == 0][0])))
    floor, limit = localization_floor(spinor)
    low = min(v for _, v in series)
    init = make_initial(3, 0, list(spinor))
    return Evidence(
        "localization", series, floor, low > floor,
        {"min_p0": low, "flat_band_p0_limit": limit, "flat_band_weight": flat_band_weight(init)},
    )


def check_cross_term_decay(coin, spinor, t_list=(125, 250, 500, 1000), r=0, pair=(0, 1)):
    """Band-mixing magnitude at each t; passes when the sequence never increases."""
    init = make_initial(2, 0, list(spinor))
    symbol = FourierSymbol(coin)
    series = [(t, cross_term_magnitude(init, symbol, t, r, *pair)) for t in t_list]
    vals = [v for _, v in series]
    ok = all(b <= a for a, b in zip(vals, vals[1:]))
    return Evidence("cross-term-decay", series, vals[0] if vals else 0.0, ok, {"r": r, "pair": list(pair)})
