"""Vote aggregation and ranking.

Aggregation is plain score summation over counted ballots; everything stays
in exact rational arithmetic so normalized shares sum to exactly 100 and the
golden consistency numbers downstream come out exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .methods import MethodId, Question, ScoreVector, VotingMethodSpec


@dataclass(frozen=True)
class TallyResult:
    """Aggregate outcome for one (question, method).

    ``ranking`` is a partition of the options into rank groups by weakly
    decreasing aggregate; ``linear_ranking`` breaks ties by the question's
    canonical option order. ``normalized_share`` is None when every aggregate
    is zero (shares are undefined, not fabricated).
    """

    question_id: str
    method_id: MethodId
    option_ids: tuple[str, ...]
    aggregates: tuple[Fraction, ...]
    normalized_share: tuple[Fraction, ...] | None
    ranking: tuple[tuple[str, ...], ...]
    linear_ranking: tuple[str, ...]
    first_choice_share: dict[str, Fraction] = field(default_factory=dict)
    counted_ballots: int = 0
    interim: bool = False

    @property
    def no_score_mass(self) -> bool:
        return self.normalized_share is None

    def aggregate_of(self, option_id: str) -> Fraction:
        return self.aggregates[self.option_ids.index(option_id)]

    def share_of(self, option_id: str) -> Fraction | None:
        if self.normalized_share is None:
            return None
        return self.normalized_share[self.option_ids.index(option_id)]


def rank_groups(option_ids: Sequence[str], aggregates: Sequence[Fraction]) -> tuple[tuple[str, ...], ...]:
    """Group options by aggregate, best first; ties share a group."""
    by_score: dict[Fraction, list[str]] = {}
    for oid, agg in zip(option_ids, aggregates):
        by_score.setdefault(agg, []).append(oid)
    # within a group, options keep canonical order because of insertion order
    return tuple(tuple(by_score[s]) for s in sorted(by_score, reverse=True))


def linearize(groups: Sequence[Sequence[str]]) -> tuple[str, ...]:
    """Flatten rank groups into a total order (canonical order within ties)."""
    return tuple(oid for group in groups for oid in group)


def rank_options(tally: TallyResult) -> tuple[tuple[tuple[str, ...], ...], tuple[str, ...]]:
    """Return (rank groups, linearized ranking) for a finished tally."""
    return tally.ranking, tally.linear_ranking


def aggregate(
    q: Question,
    spec: VotingMethodSpec,
    ballots: Sequence[ScoreVector],
    interim: bool = False,
) -> TallyResult:
    """Sum per-option scores over ballots and rank the options.

    Callers enforce one counted ballot per voter; this just sums what it is
    given (permutation invariant by construction).
    """
    n = q.n
    totals = [Fraction(0)] * n
    first_choice_counts = [0] * n
    for sv in ballots:
        if sv.method_id != spec.method_id or len(sv.scores) != n:
            raise ValueError("score vector does not match the (question, method) being tallied")
        for i, s in enumerate(sv.scores):
            totals[i] += s
        top = max(sv.scores)
        winners = [i for i, s in enumerate(sv.scores) if s == top]
        if len(winners) == 1:
            first_choice_counts[winners[0]] += 1

    mass = sum(totals)
    if mass > 0:
        shares = tuple(100 * t / mass for t in totals)
    else:
        shares = None

    groups = rank_groups(q.option_ids, totals)
    counted = len(ballots)
    fcs = {}
    if counted:
        fcs = {oid: Fraction(100 * c, counted) for oid, c in zip(q.option_ids, first_choice_counts)}

    return TallyResult(
        question_id=q.question_id,
        method_id=spec.method_id,
        option_ids=q.option_ids,
        aggregates=tuple(totals),
        normalized_share=shares,
        ranking=groups,
        linear_ranking=linearize(groups),
        first_choice_share=fcs,
        counted_ballots=counted,
        interim=interim,
    )
