"""Single-arc unsplittable flow set and its basic derived quantities.

The set is ``X = {(x, y) in {0,1}^Q x Z_+^T : a.x <= b.y + c}`` where ``a`` are
commodity demands, ``b`` facility module capacities (sorted nondecreasing) and
``c`` the existing capacity.  Indices are 0-based throughout the package; text
renderings of inequalities use 1-based names (``x1``, ``y2``).
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

FEAS_TOL = 1e-9
VIOLATION_TOL = 1e-6


class InstanceError(ValueError):
    """Malformed arc-set instance, point or inequality."""


def ceil_div(p: int, q: int) -> int:
    """Exact ceiling of p/q for integers, q > 0."""
    return -((-p) // q)


@dataclass(frozen=True)
class ArcSetInstance:
    demands: tuple[int, ...]
    capacities: tuple[int, ...]
    existing: int

    def __post_init__(self):
        demands = tuple(self.demands)
        caps = tuple(self.capacities)
        for name, vals in (("demands", demands), ("capacities", caps)):
            for v in vals:
                if isinstance(v, bool) or int(v) != v:
                    raise InstanceError(f"{name} must be integers, got {v!r}")
        demands = tuple(int(v) for v in demands)
        caps = tuple(int(v) for v in caps)
        if int(self.existing) != self.existing:
            raise InstanceError(f"existing must be an integer, got {self.existing!r}")
        if not caps:
            raise InstanceError("at least one facility is required")
        if any(v <= 0 for v in demands):
            raise InstanceError("demands must be positive")
        if any(v <= 0 for v in caps):
            raise InstanceError("capacities must be positive")
        if list(caps) != sorted(caps):
            raise InstanceError("capacities must be sorted nondecreasing")
        if sum(demands) - int(self.existing) <= 0:
            raise InstanceError("capacity constraint is redundant (sum of demands <= existing)")
        object.__setattr__(self, "demands", demands)
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "existing", int(self.existing))

    @property
    def n_commodities(self) -> int:
        return len(self.demands)

    @property
    def n_facilities(self) -> int:
        return len(self.capacities)

    @property
    def dim(self) -> int:
        return len(self.demands) + len(self.capacities)

    def is_feasible(self, x: Sequence[int], y: Sequence[int]) -> bool:
        """Exact membership of an integer point in X."""
        if len(x) != self.n_commodities or len(y) != self.n_facilities:
            return False
        if any(v not in (0, 1) for v in x) or any(int(v) != v or v < 0 for v in y):
            return False
        load = sum(a for a, v in zip(self.demands, x) if v)
        return load <= sum(b * int(v) for b, v in zip(self.capacities, y)) + self.existing

    def to_dict(self) -> dict:
        return {"demands": list(self.demands), "capacities": list(self.capacities),
                "existing": self.existing}


@dataclass(frozen=True)
class FracPoint:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if any(math.isnan(v) or math.isinf(v) for v in x + y):
            raise InstanceError("point coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def in_box(self, tol: float = FEAS_TOL) -> bool:
        return all(-tol <= v <= 1 + tol for v in self.x) and all(v >= -tol for v in self.y)

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y)}


def _as_number(v):
    if isinstance(v, Rational):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class CutInequality:
    """The inequality ``alpha.x <= beta.y + gamma``.

    Coefficients are ints, Fractions or floats.  ``integralized`` marks cuts whose
    entries are all integers (after scaling).
    """

    alpha: tuple
    beta: tuple
    gamma: object
    integralized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(_as_number(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(_as_number(v) for v in self.beta))
        object.__setattr__(self, "gamma", _as_number(self.gamma))
        if self.integralized:
            for v in self.alpha + self.beta + (self.gamma,):
                if v != int(v):
                    raise InstanceError(f"integralized cut has non-integer entry {v}")

    def lhs_minus_rhs(self, x: Sequence[float], y: Sequence[float]) -> float:
        """alpha.x - beta.y - gamma evaluated in floating point."""
        return (sum(float(a) * v for a, v in zip(self.alpha, x))
                - sum(float(b) * v for b, v in zip(self.beta, y)) - float(self.gamma))

    def violation(self, point: FracPoint) -> float:
        return self.lhs_minus_rhs(point.x, point.y)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.alpha + self.beta + (self.gamma,))

    def scaled(self, factor) -> "CutInequality":
        alpha = tuple(v * factor for v in self.alpha)
        beta = tuple(v * factor for v in self.beta)
        gamma = self.gamma * factor
        integral = all(isinstance(v, Fraction) and v.denominator == 1
                       for v in alpha + beta + (gamma,))
        return CutInequality(alpha, beta, gamma, integralized=integral)

    def integralize(self) -> "CutInequality":
        """Exact integer multiple of a rational cut (lcm of denominators)."""
        if not self.is_rational:
            raise InstanceError("only rational cuts can be integralized exactly")
        lcm = 1
        for v in self.alpha + self.beta + (self.gamma,):
            lcm = math.lcm(lcm, v.denominator)
        return self.scaled(Fraction(lcm))

    def to_dict(self) -> dict:
        return {"alpha": [_jsonable(v) for v in self.alpha],
                "beta": [_jsonable(v) for v in self.beta],
                "gamma": _jsonable(self.gamma),
                "integralized": self.integralized}

    @classmethod
    def from_dict(cls, d: dict) -> "CutInequality":
        conv = _from_jsonable
        return cls(tuple(conv(v) for v in d["alpha"]), tuple(conv(v) for v in d["beta"]),
                   conv(d["gamma"]), bool(d.get("integralized", False)))

    def render(self) -> str:
        return format_cut(self)


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


def _from_jsonable(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


class Verdict(str, enum.Enum):
    MEMBER = "Member"
    VIOLATED = "Violated"


class Provenance(str, enum.Enum):
    TRIVIAL_BOUND = "TrivialBound"
    SINGLE_FACILITY = "SingleFacilityRound"
    CLOSED_FORM_P5 = "ClosedFormP5"
    CLOSED_FORM_P6 = "ClosedFormP6"
    CLOSED_FORM_P7 = "ClosedFormP7"
    CLOSED_FORM_P8 = "ClosedFormP8"
    ROW_GENERATION = "RowGeneration"


@dataclass
class SeparationOutcome:
    """Result of one separation call.

    ``violation`` is measured on the cut normalized so that the coefficient of
    the normalizing facility is one; for integral cuts this is the raw
    violation divided by that coefficient.  ``cut_dropped`` flags a point that
    was found outside the polyhedron but whose cut failed the scaling stage.
    """

    verdict: Verdict
    cut: Optional[CutInequality] = None
    violation: float = 0.0
    provenance: Optional[Provenance] = None
    stage: str = ""
    cut_dropped: bool = False
    reduced_cut: Optional[CutInequality] = None
    details: dict = field(default_factory=dict)

    @property
    def in_polyhedron(self) -> bool:
        return self.verdict is Verdict.MEMBER and not self.cut_dropped

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "cut": self.cut.to_dict() if self.cut else None,
            "cut_text": self.cut.render() if self.cut else None,
            "violation": self.violation,
            "provenance": self.provenance.value if self.provenance else None,
            "stage": self.stage,
            "cut_dropped": self.cut_dropped,
            "reduced_cut": self.reduced_cut.to_dict() if self.reduced_cut else None,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SeparationOutcome":
        return cls(
            verdict=Verdict(d["verdict"]),
            cut=CutInequality.from_dict(d["cut"]) if d.get("cut") else None,
            violation=float(d.get("violation", 0.0)),
            provenance=Provenance(d["provenance"]) if d.get("provenance") else None,
            stage=d.get("stage", ""),
            cut_dropped=bool(d.get("cut_dropped", False)),
            reduced_cut=CutInequality.from_dict(d["reduced_cut"]) if d.get("reduced_cut") else None,
            details=dict(d.get("details", {})),
        )


def rho(inst: ArcSetInstance, x: Sequence[int], t: int) -> int:
    """Fewest modules of facility ``t`` alone that make binary ``x`` feasible."""
    load = sum(a for a, v in zip(inst.demands, x) if v)
    return max(ceil_div(load - inst.existing, inst.capacities[t]), 0)


def r_value(inst: ArcSetInstance) -> int:
    """Least nonnegative k with b_1 k + c >= 0."""
    return max(ceil_div(-inst.existing, inst.capacities[0]), 0)


def d_index(point: FracPoint) -> int:
    """Index of the largest x coordinate; ties go to the smallest index."""
    best = 0
    for q, v in enumerate(point.x):
        if v > point.x[best]:
            best = q
    return best


def q_tilde(point: FracPoint) -> list[int]:
    """Commodities whose x value strictly exceeds the y mass outside facility 1."""
    s = sum(point.y[1:])
    return [q for q, v in enumerate(point.x) if v > s]


def screen_trivial(inst: ArcSetInstance, point: FracPoint,
                   tol: float = FEAS_TOL) -> Optional[SeparationOutcome]:
    """Return the most violated trivial inequality, or None if the point is in X_LP."""
    nq, nt = inst.n_commodities, inst.n_facilities
    if len(point.x) != nq or len(point.y) != nt:
        raise InstanceError(f"point dimension ({len(point.x)}, {len(point.y)}) "
                            f"does not match instance ({nq}, {nt})")
    candidates = []
    for q, v in enumerate(point.x):
        if v > 1 + tol:
            alpha = [0] * nq
            alpha[q] = 1
            # x_q <= 1 as alpha.x <= beta.y + gamma
            candidates.append((v - 1, CutInequality(alpha, [0] * nt, 1, True), f"x{q + 1} <= 1"))
        if v < -tol:
            alpha = [0] * nq
            alpha[q] = -1
            candidates.append((-v, CutInequality(alpha, [0] * nt, 0, True), f"x{q + 1} >= 0"))
    for t, v in enumerate(point.y):
        if v < -tol:
            beta = [0] * nt
            beta[t] = 1
            candidates.append((-v, CutInequality([0] * nq, beta, 0, True), f"y{t + 1} >= 0"))
    excess = (sum(a * v for a, v in zip(inst.demands, point.x))
              - sum(b * v for b, v in zip(inst.capacities, point.y)) - inst.existing)
    if excess > tol:
        candidates.append((excess, CutInequality(inst.demands, inst.capacities, inst.existing, True),
                           "capacity"))
    if not candidates:
        return None
    viol, cut, name = max(candidates, key=lambda c: c[0])
    return SeparationOutcome(Verdict.VIOLATED, cut, viol, Provenance.TRIVIAL_BOUND,
                             stage="trivial", details={"bound": name})


def in_lp_relaxation(inst: ArcSetInstance, point: FracPoint, tol: float = FEAS_TOL) -> bool:
    return screen_trivial(inst, point, tol) is None


# --- text rendering / parsing of inequalities -------------------------------------

def _fmt_num(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if float(v).is_integer():
        return str(int(v))
    return f"{float(v):.10g}"


def _fmt_terms(coefs, names, const=None) -> str:
    parts = []
    for c, name in zip(coefs, names):
        if c == 0:
            continue
        mag = abs(c)
        body = name if mag == 1 else f"{_fmt_num(mag)} {name}"
        parts.append(("-" if c < 0 else "+", body))
    if const is not None and const != 0:
        parts.append(("-" if const < 0 else "+", _fmt_num(abs(const))))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_cut(cut: CutInequality) -> str:
    """Render as e.g. ``x1 + x4 <= y`` (y carries no index when there is one facility)."""
    xnames = [f"x{q + 1}" for q in range(len(cut.alpha))]
    ynames = ["y"] if len(cut.beta) == 1 else [f"y{t + 1}" for t in range(len(cut.beta))]
    return f"{_fmt_terms(cut.alpha, xnames)} <= {_fmt_terms(cut.beta, ynames, cut.gamma)}"


_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:/\d+)?)?\s*\*?\s*([xy]\d*)?")


def _parse_side(text: str, nq: int, nt: int):
    xs = [Fraction(0)] * nq
    ys = [Fraction(0)] * nt
    const = Fraction(0)
    s = text.replace(" ", "")
    if not s:
        raise InstanceError("empty side in inequality")
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise InstanceError(f"cannot parse inequality near {s[pos:]!r}")
        sign, num, var = m.groups()
        if not first and not sign:
            raise InstanceError(f"missing operator near {s[pos:]!r}")
        if num is None and var is None:
            raise InstanceError(f"dangling sign near {s[pos:]!r}")
        coef = Fraction(num) if num else Fraction(1)
        if sign == "-":
            coef = -coef
        if var is None:
            const += coef
        else:
            kind, idx = var[0], var[1:]
            if kind == "y" and not idx:
                if nt != 1:
                    raise InstanceError("bare 'y' only allowed with a single facility")
                k = 0
            elif not idx:
                raise InstanceError("x variables need an index")
            else:
                k = int(idx) - 1
            limit = nq if kind == "x" else nt
            if not 0 <= k < limit:
                raise InstanceError(f"variable {var} out of range")
            (xs if kind == "x" else ys)[k] += coef
        pos = m.end()
        first = False
    return xs, ys, const


def parse_cut(text: str, nq: int, nt: int) -> CutInequality:
    """Parse ``lhs <= rhs`` or ``lhs >= rhs`` into canonical ``alpha.x <= beta.y + gamma``."""
    text = text.strip().replace("≤", "<=").replace("≥", ">=")
    if "<=" in text:
        lhs, rhs = text.split("<=", 1)
    elif ">=" in text:
        rhs, lhs = text.split(">=", 1)
    else:
        raise InstanceError("inequality needs '<=' or '>='")
    lx, ly, lc = _parse_side(lhs, nq, nt)
    rx, ry, rc = _parse_side(rhs, nq, nt)
    alpha = [a - b for a, b in zip(lx, rx)]
    beta = [b - a for a, b in zip(ly, ry)]
    gamma = rc - lc
    integral = all(v.denominator == 1 for v in alpha + beta + [gamma])
    return CutInequality(alpha, beta, gamma, integralized=integral)


# --- instance files -------------------------------------------------------------

def instance_from_dict(d: dict) -> tuple[ArcSetInstance, Optional[FracPoint]]:
    if not isinstance(d, dict):
        raise InstanceError("instance must be a JSON object")
    for key in ("demands", "capacities", "existing"):
        if key not in d:
            raise InstanceError(f"missing field {key!r}")
    if not isinstance(d["demands"], list) or not isinstance(d["capacities"], list):
        raise InstanceError("'demands' and 'capacities' must be arrays")
    inst = ArcSetInstance(tuple(d["demands"]), tuple(d["capacities"]), d["existing"])
    point = None
    if d.get("point") is not None:
        p = d["point"]
        if not isinstance(p, dict) or "x" not in p or "y" not in p:
            raise InstanceError("'point' must be an object with 'x' and 'y'")
        point = FracPoint(tuple(p["x"]), tuple(p["y"]))
        if len(point.x) != inst.n_commodities:
            raise InstanceError(f"point.x has length {len(point.x)}, expected {inst.n_commodities}")
        if len(point.y) != inst.n_facilities:
            raise InstanceError(f"point.y has length {len(point.y)}, expected {inst.n_facilities}")
    return inst, point


def load_instance(path) -> tuple[ArcSetInstance, Optional[FracPoint]]:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(d)
