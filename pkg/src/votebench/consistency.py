"""Cross-method outcome consistency.

Given each method's linearized ranking of one question's options, the
consistency at rank k is the largest fraction of methods that agree on which
option sits at rank k. Mean consistency averages over all ranks. Values are
exact rationals with denominator M (the method count).
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DuplicateMethod, MixedQuestions, RankOutOfRange
from .methods import MethodId
from .tally import TallyResult


@dataclass(frozen=True)
class RankProfile:
    """Per-method linearized rankings of one question's options."""

    question_id: str
    rankings: dict[MethodId, tuple[str, ...]]
    # rank groups per method, kept for reporting (ties are broken in the
    # linearized ranking but should stay visible)
    tie_groups: dict[MethodId, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    @property
    def methods(self) -> tuple[MethodId, ...]:
        return tuple(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings)

    @property
    def n(self) -> int:
        return len(next(iter(self.rankings.values())))

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("a rank profile needs at least 2 methods")
        lengths = {len(r) for r in self.rankings.values()}
        if len(lengths) != 1:
            raise ValueError("rankings differ in length")
        first = set(next(iter(self.rankings.values())))
        for r in self.rankings.values():
            if set(r) != first or len(set(r)) != len(r):
                raise ValueError("each ranking must be a permutation of the same option set")


@dataclass(frozen=True)
class ConsistencyReport:
    question_id: str
    methods: tuple[MethodId, ...]
    per_rank: tuple[Fraction, ...]
    mean: Fraction
    tie_groups: dict[MethodId, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "methods": [m.value for m in self.methods],
            "per_rank": [str(c) for c in self.per_rank],
            "per_rank_decimal": [float(c) for c in self.per_rank],
            "mean": str(self.mean),
            "mean_decimal": float(self.mean),
            "tie_groups": {
                m.value: [list(g) for g in groups] for m, groups in self.tie_groups.items()
            },
        }


def build_rank_profile(tallies: Sequence[TallyResult]) -> RankProfile:
    """Assemble one question's per-method rankings from its tallies."""
    if not tallies:
        raise ValueError("no tallies given")
    qid = tallies[0].question_id
    rankings: dict[MethodId, tuple[str, ...]] = {}
    tie_groups: dict[MethodId, tuple[tuple[str, ...], ...]] = {}
    for t in tallies:
        if t.question_id != qid:
            raise MixedQuestions(
                f"tally for question {t.question_id!r} mixed into profile for {qid!r}"
            )
        if t.method_id in rankings:
            raise DuplicateMethod(f"two tallies for method {t.method_id.value}")
        rankings[t.method_id] = t.linear_ranking
        tie_groups[t.method_id] = t.ranking
    return RankProfile(qid, rankings, tie_groups)


def consistency_at_rank(profile: RankProfile, k: int) -> Fraction:
    """Fraction of methods agreeing on the option at rank k (1-based)."""
    if not 1 <= k <= profile.n:
        raise RankOutOfRange(f"rank {k} outside 1..{profile.n}")
    at_k = Counter(r[k - 1] for r in profile.rankings.values())
    return Fraction(max(at_k.values()), profile.m)


def consistency_report(profile: RankProfile) -> ConsistencyReport:
    per_rank = tuple(consistency_at_rank(profile, k) for k in range(1, profile.n + 1))
    mean = sum(per_rank, Fraction(0)) / len(per_rank)
    return ConsistencyReport(
        question_id=profile.question_id,
        methods=profile.methods,
        per_rank=per_rank,
        mean=mean,
        tie_groups=profile.tie_groups,
    )


def reports_to_json(reports: Sequence[ConsistencyReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def reports_to_csv(reports: Sequence[ConsistencyReport]) -> str:
    """CSV with one row per (question, rank): question_id, rank, consistency, mean."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["question_id", "rank", "consistency", "mean"])
    for r in reports:
        for k, c in enumerate(r.per_rank, start=1):
            writer.writerow([r.question_id, k, str(c), str(r.mean)])
    return buf.getvalue()
