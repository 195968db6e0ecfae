"""Generic Mamdani fuzzy system.

Trapezoid/triangle memberships, min conjunction, min implication, max
aggregation and centroid defuzzification over a uniform grid. Systems are
immutable after load; inference is pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import NoRuleFired, SchemaError

TRAPEZOID = "trapezoid"
TRIANGLE = "triangle"

DEFAULT_GRID_POINTS = 1001


@dataclass(frozen=True)
class MembershipFunction:
    kind: str
    params: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if self.kind == TRIANGLE:
            if len(p) != 3:
                raise SchemaError("triangle needs 3 params")
        elif self.kind == TRAPEZOID:
            if len(p) != 4:
                raise SchemaError("trapezoid needs 4 params")
        else:
            raise SchemaError(f"unknown membership kind {self.kind!r}")
        if any(a > b for a, b in zip(p, p[1:])):
            raise SchemaError(f"params must be non-decreasing, got {p}")

    @property
    def apex(self) -> float:
        """Point (or plateau midpoint) of full membership."""
        if self.kind == TRIANGLE:
            return self.params[1]
        return 0.5 * (self.params[1] + self.params[2])

    @property
    def support(self) -> tuple:
        return (self.params[0], self.params[-1])


def eval_membership(mf: MembershipFunction, x):
    """Piecewise-linear membership in [0, 1]; scalar in, scalar out."""
    arr = eval_membership_array(mf, np.asarray(x, dtype=np.float64))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(arr)
    return arr


def eval_membership_array(mf: MembershipFunction, x: np.ndarray) -> np.ndarray:
    if mf.kind == TRIANGLE:
        a, b, c = mf.params
        lo, hi = b, b
    else:
        a, lo, hi, c = mf.params
    out = np.zeros_like(x, dtype=np.float64)
    if lo > a:
        rising = (x > a) & (x < lo)
        out = np.where(rising, (x - a) / (lo - a), out)
    out = np.where((x >= lo) & (x <= hi), 1.0, out)
    if c > hi:
        falling = (x > hi) & (x < c)
        out = np.where(falling, (c - x) / (c - hi), out)
    return out


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    domain: tuple
    terms: tuple  # of (name, MembershipFunction)

    def __post_init__(self):
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate term names in variable {self.name!r}")
        lo, hi = self.domain
        for n, mf in self.terms:
            s0, s1 = mf.support
            if s0 < lo or s1 > hi:
                raise SchemaError(
                    f"term {n!r} support ({s0}, {s1}) outside domain ({lo}, {hi})")
        object.__setattr__(self, "domain", (float(lo), float(hi)))
        object.__setattr__(self, "terms", tuple(self.terms))

    def term_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.terms):
            if n == name:
                return i
        raise SchemaError(f"variable {self.name!r} has no term {name!r}")

    def term(self, name: str) -> MembershipFunction:
        return self.terms[self.term_index(name)][1]


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: tuple  # one term name (or None = any) per input variable
    consequent: str
    weight: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise SchemaError(f"rule weight must be in (0, 1], got {self.weight}")
        object.__setattr__(self, "antecedent", tuple(self.antecedent))


@dataclass(frozen=True)
class MamdaniSystem:
    inputs: tuple  # of LinguisticVariable
    output: LinguisticVariable
    rules: tuple  # of FuzzyRule
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if not self.rules:
            raise SchemaError("a Mamdani system needs at least one rule")
        for r in self.rules:
            if len(r.antecedent) != len(self.inputs):
                raise SchemaError("rule antecedent arity != number of inputs")
            for var, tname in zip(self.inputs, r.antecedent):
                if tname is not None:
                    var.term_index(tname)
            self.output.term_index(r.consequent)
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(self.rules))

    def output_grid(self) -> np.ndarray:
        lo, hi = self.output.domain
        return np.linspace(lo, hi, self.grid_points)


def firing_strengths(sys: MamdaniSystem, values: np.ndarray) -> np.ndarray:
    """Rule firing strengths for a batch of inputs.

    values has shape (n, n_inputs); returns (n, n_rules) with min
    conjunction and rule weights applied.
    """
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    n = values.shape[0]
    memb = []  # per input var: (n, n_terms)
    for i, var in enumerate(sys.inputs):
        cols = [eval_membership_array(mf, values[:, i]) for _, mf in var.terms]
        memb.append(np.stack(cols, axis=1))
    strengths = np.empty((n, len(sys.rules)), dtype=np.float64)
    for r, rule in enumerate(sys.rules):
        acc = np.ones(n, dtype=np.float64)
        for i, tname in enumerate(rule.antecedent):
            if tname is None:
                continue
            acc = np.minimum(acc, memb[i][:, sys.inputs[i].term_index(tname)])
        strengths[:, r] = rule.weight * acc
    return strengths


def aggregate_levels(sys: MamdaniSystem, strengths: np.ndarray) -> np.ndarray:
    """Per-output-term clip levels: max firing strength by consequent."""
    n = strengths.shape[0]
    levels = np.zeros((n, len(sys.output.terms)), dtype=np.float64)
    for r, rule in enumerate(sys.rules):
        t = sys.output.term_index(rule.consequent)
        np.maximum(levels[:, t], strengths[:, r], out=levels[:, t])
    return levels


def centroids(sys: MamdaniSystem, levels: np.ndarray) -> np.ndarray:
    """Grid centroid of the aggregated shape for each row of clip levels.

    Rows whose aggregated area is zero come back as NaN; scalar callers
    turn that into NoRuleFired.
    """
    grid = sys.output_grid()
    mf_matrix = np.stack(
        [eval_membership_array(mf, grid) for _, mf in sys.output.terms], axis=0)
    agg = np.minimum(levels[:, :, None], mf_matrix[None, :, :]).max(axis=1)
    denom = agg.sum(axis=1)
    num = agg @ grid
    with np.errstate(invalid="ignore"):
        out = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), np.nan)
    return out


def infer(sys: MamdaniSystem, values: Sequence[float]) -> float:
    """Run the full Mamdani pipeline for one input tuple.

    Raises NoRuleFired when the aggregated area is zero.
    """
    values = np.asarray(values, dtype=np.float64).reshape(1, -1)
    if values.shape[1] != len(sys.inputs):
        raise ValueError(f"expected {len(sys.inputs)} inputs")
    levels = aggregate_levels(sys, firing_strengths(sys, values))
    crisp = centroids(sys, levels)[0]
    if np.isnan(crisp):
        raise NoRuleFired("no rule fired for inputs " + repr(values[0].tolist()))
    return float(crisp)


# -- JSON (de)serialization ---------------------------------------------------

SCHEMA_VERSION = 1


def _variable_from_dict(d: dict) -> LinguisticVariable:
    try:
        terms = tuple(
            (t["name"], MembershipFunction(t["kind"], tuple(t["params"])))
            for t in d["terms"])
        return LinguisticVariable(d["name"], tuple(d["domain"]), terms)
    except KeyError as exc:
        raise SchemaError(f"variable definition missing field {exc}") from exc


def system_from_dict(doc: dict) -> MamdaniSystem:
    try:
        if doc["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {doc['schema_version']}")
        inputs = tuple(_variable_from_dict(v) for v in doc["inputs"])
        output = _variable_from_dict(doc["output"])
        rules = tuple(
            FuzzyRule(tuple(r["if"]), r["then"], r.get("weight", 1.0))
            for r in doc["rules"])
    except KeyError as exc:
        raise SchemaError(f"rule base missing field {exc}") from exc
    return MamdaniSystem(inputs, output, rules,
                         doc.get("grid_points", DEFAULT_GRID_POINTS))


def load_system(path) -> MamdaniSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))
