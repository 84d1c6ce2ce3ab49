"""Voting method catalog: admissible score sets, ballot validation, scoring.

All scores are exact rationals (``fractions.Fraction``). The built-in methods
use decimal-fraction score levels, and downstream share/consistency numbers
must come out exact, so nothing here ever touches binary floats: float inputs
are converted through their decimal string representation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class MethodId(str, enum.Enum):
    MV = "mv"            # majority voting: pick exactly one option
    CAV = "cav"          # combined approval voting: disapprove/neutral/approve
    SV = "sv"            # score voting: six-level scale
    MBC = "mbc"          # modified Borda count over a ranked subset
    AV = "av"            # approval voting: approve any subset
    QV = "qv"            # quadratic voting: integer votes, quadratic cost
    CUMULATIVE = "cumulative"  # fixed point budget spread over options


class BallotShape(str, enum.Enum):
    SINGLE_CHOICE = "single_choice"
    PER_OPTION_SCORE = "per_option_score"
    RANKED_SUBSET = "ranked_subset"
    INTEGER_ALLOCATION = "integer_allocation"


def as_fraction(value) -> Fraction:
    """Convert a score value to an exact Fraction.

    Floats go through str() so that 0.3 means the decimal 3/10, not the
    nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class VotingMethodSpec:
    """One method's admissible per-option score set and ballot shape.

    ``score_levels`` is empty for the integer-allocation methods (QV,
    CUMULATIVE), which constrain ballots through ``params`` instead
    (``budget`` credits for QV, ``points`` for CUMULATIVE).
    """

    method_id: MethodId
    score_levels: tuple[Fraction, ...]
    ballot_shape: BallotShape
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        levels = tuple(sorted(as_fraction(v) for v in self.score_levels))
        object.__setattr__(self, "score_levels", levels)
        for lv in levels:
            if not 0 <= lv <= 1:
                raise ValueError(f"score level {lv} outside [0, 1]")

    def admissible(self, level: Fraction) -> bool:
        return level in self.score_levels


_HALF = Fraction(1, 2)
_FIFTH = Fraction(1, 5)


def builtin_spec(method_id: MethodId, params: Mapping | None = None) -> VotingMethodSpec:
    """Return the standard spec for a built-in method.

    ``params`` overrides the defaults (QV budget, cumulative point total).
    """
    params = dict(params or {})
    if method_id == MethodId.MV:
        return VotingMethodSpec(method_id, (Fraction(0), Fraction(1)), BallotShape.SINGLE_CHOICE, params)
    if method_id == MethodId.CAV:
        return VotingMethodSpec(method_id, (Fraction(0), _HALF, Fraction(1)), BallotShape.PER_OPTION_SCORE, params)
    if method_id == MethodId.SV:
        levels = tuple(Fraction(i, 5) for i in range(6))
        return VotingMethodSpec(method_id, levels, BallotShape.PER_OPTION_SCORE, params)
    if method_id == MethodId.MBC:
        # Realized levels depend on the question's option count; validated at
        # scoring time, so the spec itself carries no fixed level set.
        return VotingMethodSpec(method_id, (), BallotShape.RANKED_SUBSET, params)
    if method_id == MethodId.AV:
        return VotingMethodSpec(method_id, (Fraction(0), Fraction(1)), BallotShape.PER_OPTION_SCORE, params)
    if method_id == MethodId.QV:
        params.setdefault("budget", 100)
        return VotingMethodSpec(method_id, (), BallotShape.INTEGER_ALLOCATION, params)
    if method_id == MethodId.CUMULATIVE:
        params.setdefault("points", 10)
        return VotingMethodSpec(method_id, (), BallotShape.INTEGER_ALLOCATION, params)
    raise ValueError(f"unknown method {method_id!r}")


def builtin_specs(params_by_method: Mapping[MethodId, Mapping] | None = None) -> dict[MethodId, VotingMethodSpec]:
    overrides = params_by_method or {}
    return {m: builtin_spec(m, overrides.get(m)) for m in MethodId}


@dataclass(frozen=True)
class Option:
    option_id: str
    label: str = ""


@dataclass(frozen=True)
class Question:
    """A question with its ordered options and enabled methods.

    Option order is canonical: it defines the deterministic tie-break for
    rankings and must not change once ballots exist.
    """

    question_id: str
    text: str
    options: tuple[Option, ...]
    enabled_methods: tuple[VotingMethodSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        object.__setattr__(self, "enabled_methods", tuple(self.enabled_methods))
        ids = [o.option_id for o in self.options]
        if len(ids) < 2:
            raise ValueError("a question needs at least 2 options")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate option ids")

    @property
    def option_ids(self) -> tuple[str, ...]:
        return tuple(o.option_id for o in self.options)

    @property
    def n(self) -> int:
        return len(self.options)

    def method_spec(self, method_id: MethodId) -> VotingMethodSpec:
        for spec in self.enabled_methods:
            if spec.method_id == method_id:
                return spec
        raise KeyError(f"method {method_id.value} not enabled for {self.question_id}")


@dataclass(frozen=True)
class RawBallot:
    """Shape-tagged raw voter input, before validation/normalization.

    Exactly one payload field is populated, matching ``shape``.
    """

    shape: BallotShape
    choice: str | None = None
    scores: Mapping[str, Fraction] | None = None
    ranking: tuple[str, ...] | None = None
    allocation: Mapping[str, int] | None = None

    @classmethod
    def single_choice(cls, option_id: str) -> "RawBallot":
        return cls(BallotShape.SINGLE_CHOICE, choice=option_id)

    @classmethod
    def per_option(cls, scores: Mapping[str, object]) -> "RawBallot":
        conv = {k: as_fraction(v) for k, v in scores.items()}
        return cls(BallotShape.PER_OPTION_SCORE, scores=conv)

    @classmethod
    def ranked(cls, option_ids: Iterable[str]) -> "RawBallot":
        return cls(BallotShape.RANKED_SUBSET, ranking=tuple(option_ids))

    @classmethod
    def allocated(cls, allocation: Mapping[str, int]) -> "RawBallot":
        return cls(BallotShape.INTEGER_ALLOCATION, allocation=dict(allocation))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    option_id: str | None = None
    value: object = None

    def to_dict(self) -> dict:
        doc = {"code": self.code, "message": self.message}
        if self.option_id is not None:
            doc["option_id"] = self.option_id
        if self.value is not None:
            doc["value"] = str(self.value)
        return doc


@dataclass(frozen=True)
class ValidationVerdict:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ScoreVector:
    """Per-option scores produced by one ballot under one method.

    Entries align with the question's canonical option order. Score-set
    methods yield rationals in [0, 1]; QV/CUMULATIVE yield nonnegative
    integers (as Fractions, for uniform aggregation downstream).
    """

    method_id: MethodId
    scores: tuple[Fraction, ...]


def _unknown_options(q: Question, ids: Iterable[str]) -> list[Violation]:
    known = set(q.option_ids)
    return [
        Violation("UnknownOption", f"option {oid!r} is not part of question {q.question_id}", option_id=oid)
        for oid in ids
        if oid not in known
    ]


def validate_ballot(q: Question, spec: VotingMethodSpec, ballot: RawBallot) -> ValidationVerdict:
    """Check a raw ballot against the method's shape and constraints.

    Returns a verdict rather than raising: the HTTP layer and UI want the
    full violation list, not just the first failure.
    """
    if ballot.shape != spec.ballot_shape:
        return ValidationVerdict((
            Violation(
                "ShapeMismatch",
                f"{spec.method_id.value} expects a {spec.ballot_shape.value} ballot, got {ballot.shape.value}",
            ),
        ))

    violations: list[Violation] = []

    if spec.ballot_shape == BallotShape.SINGLE_CHOICE:
        if ballot.choice is None:
            violations.append(Violation("EmptyBallot", "no option chosen"))
        else:
            violations += _unknown_options(q, [ballot.choice])

    elif spec.ballot_shape == BallotShape.PER_OPTION_SCORE:
        scores = ballot.scores or {}
        violations += _unknown_options(q, scores.keys())
        for oid in q.option_ids:
            if oid not in scores:
                violations.append(
                    Violation("MissingOption", f"option {oid!r} has no score assigned", option_id=oid)
                )
        for oid, level in scores.items():
            if oid in set(q.option_ids) and not spec.admissible(level):
                admissible = "{" + ", ".join(str(v) for v in spec.score_levels) + "}"
                violations.append(
                    Violation(
                        "LevelNotAdmissible",
                        f"level {level} for option {oid!r} not in {admissible}",
                        option_id=oid,
                        value=level,
                    )
                )

    elif spec.ballot_shape == BallotShape.RANKED_SUBSET:
        ranking = ballot.ranking or ()
        if not ranking:
            violations.append(Violation("EmptyBallot", "ranked subset is empty"))
        seen: set[str] = set()
        for oid in ranking:
            if oid in seen:
                violations.append(
                    Violation("DuplicateOption", f"option {oid!r} appears more than once", option_id=oid)
                )
            seen.add(oid)
        violations += _unknown_options(q, ranking)

    elif spec.ballot_shape == BallotShape.INTEGER_ALLOCATION:
        alloc = ballot.allocation or {}
        violations += _unknown_options(q, alloc.keys())
        if not alloc or all(v == 0 for v in alloc.values()):
            violations.append(Violation("EmptyBallot", "no votes allocated"))
        for oid, votes in alloc.items():
            if not isinstance(votes, int) or votes < 0:
                violations.append(
                    Violation(
                        "LevelNotAdmissible",
                        f"allocation {votes!r} for option {oid!r} must be a nonnegative integer",
                        option_id=oid,
                        value=votes,
                    )
                )
        if not violations:
            if spec.method_id == MethodId.QV:
                budget = spec.params["budget"]
                cost = sum(v * v for v in alloc.values())
                if cost > budget:
                    violations.append(
                        Violation(
                            "BudgetExceeded",
                            f"quadratic cost {cost} exceeds budget {budget}",
                            value=cost,
                        )
                    )
            else:
                points = spec.params["points"]
                spent = sum(alloc.values())
                if spent > points:
                    violations.append(
                        Violation(
                            "BudgetExceeded",
                            f"allocated {spent} points, only {points} available",
                            value=spent,
                        )
                    )

    return ValidationVerdict(tuple(violations))


def normalize_scores(q: Question, spec: VotingMethodSpec, ballot: RawBallot) -> ScoreVector:
    """Turn a validated raw ballot into a canonical per-option score vector.

    Callers must have run validate_ballot first; this raises ValueError on
    inputs a validated ballot cannot produce.
    """
    verdict = validate_ballot(q, spec, ballot)
    if not verdict.ok:
        raise ValueError(f"ballot invalid: {[v.message for v in verdict.violations]}")

    n = q.n
    if spec.ballot_shape == BallotShape.SINGLE_CHOICE:
        scores = tuple(Fraction(1) if oid == ballot.choice else Fraction(0) for oid in q.option_ids)
    elif spec.ballot_shape == BallotShape.PER_OPTION_SCORE:
        scores = tuple(ballot.scores[oid] for oid in q.option_ids)
    elif spec.ballot_shape == BallotShape.RANKED_SUBSET:
        # Rank r of m selected options earns (m - r + 1)/n; unranked earn 0.
        # Selecting more options can only raise every selected option's score.
        m = len(ballot.ranking)
        by_option = {oid: Fraction(m - r, n) for r, oid in enumerate(ballot.ranking)}
        scores = tuple(by_option.get(oid, Fraction(0)) for oid in q.option_ids)
    else:
        alloc = ballot.allocation
        scores = tuple(Fraction(alloc.get(oid, 0)) for oid in q.option_ids)
    return ScoreVector(spec.method_id, scores)


def mbc_admissible_levels(n: int) -> tuple[Fraction, ...]:
    """Every score a Borda-subset ballot can realize for an n-option question."""
    return tuple(Fraction(i, n) for i in range(n + 1))
