from fractions import Fraction

import pytest

from votebench.consistency import (
    RankProfile,
    build_rank_profile,
    consistency_at_rank,
    consistency_report,
    reports_to_csv,
)
from votebench.errors import DuplicateMethod, MixedQuestions, RankOutOfRange
from votebench.methods import MethodId, RawBallot, builtin_spec, normalize_scores
from votebench.tally import aggregate

from conftest import make_question


def profile(rankings):
    return RankProfile("q", {m: tuple(r) for m, r in rankings.items()})


def test_full_agreement_is_one_everywhere():
    p = profile({MethodId.MV: "abc", MethodId.CAV: "abc", MethodId.SV: "abc"})
    r = consistency_report(p)
    assert r.per_rank == (Fraction(1),) * 3
    assert r.mean == 1


def test_mode_count_over_methods():
    p = profile(
        {
            MethodId.MV: ("a", "b", "c"),
            MethodId.CAV: ("a", "c", "b"),
            MethodId.SV: ("b", "c", "a"),
            MethodId.MBC: ("a", "b", "c"),
        }
    )
    assert consistency_at_rank(p, 1) == Fraction(3, 4)
    assert consistency_at_rank(p, 2) == Fraction(2, 4)
    assert consistency_at_rank(p, 3) == Fraction(2, 4)


def test_rank_bounds():
    p = profile({MethodId.MV: "ab", MethodId.CAV: "ab"})
    with pytest.raises(RankOutOfRange):
        consistency_at_rank(p, 0)
    with pytest.raises(RankOutOfRange):
        consistency_at_rank(p, 3)


def test_profile_requires_permutations_of_same_set():
    with pytest.raises(ValueError):
        profile({MethodId.MV: ("a", "b"), MethodId.CAV: ("a", "c")})
    with pytest.raises(ValueError):
        profile({MethodId.MV: ("a", "b")})


def test_build_profile_from_tallies():
    q = make_question(n=3, methods=(MethodId.MV, MethodId.CAV))
    mv = aggregate(
        q,
        builtin_spec(MethodId.MV),
        [normalize_scores(q, builtin_spec(MethodId.MV), RawBallot.single_choice("o2"))],
    )
    cav = aggregate(
        q,
        builtin_spec(MethodId.CAV),
        [
            normalize_scores(
                q, builtin_spec(MethodId.CAV), RawBallot.per_option({"o1": 1, "o2": 0.5, "o3": 0})
            )
        ],
    )
    p = build_rank_profile([mv, cav])
    assert p.rankings[MethodId.MV] == ("o2", "o1", "o3")
    assert p.rankings[MethodId.CAV] == ("o1", "o2", "o3")
    assert consistency_at_rank(p, 3) == 1

    with pytest.raises(DuplicateMethod):
        build_rank_profile([mv, mv])
    other = make_question("q2", n=3, methods=(MethodId.MV,))
    mv2 = aggregate(
        other,
        builtin_spec(MethodId.MV),
        [normalize_scores(other, builtin_spec(MethodId.MV), RawBallot.single_choice("o1"))],
    )
    with pytest.raises(MixedQuestions):
        build_rank_profile([mv, mv2])


def test_tie_groups_survive_into_report():
    q = make_question(n=2, methods=(MethodId.MV, MethodId.CAV))
    mv_spec, cav_spec = builtin_spec(MethodId.MV), builtin_spec(MethodId.CAV)
    mv = aggregate(
        q,
        mv_spec,
        [
            normalize_scores(q, mv_spec, RawBallot.single_choice("o1")),
            normalize_scores(q, mv_spec, RawBallot.single_choice("o2")),
        ],
    )
    cav = aggregate(
        q, cav_spec, [normalize_scores(q, cav_spec, RawBallot.per_option({"o1": 1, "o2": 0}))]
    )
    report = consistency_report(build_rank_profile([mv, cav]))
    assert report.tie_groups[MethodId.MV] == (("o1", "o2"),)
    # tie broken by canonical option order in the linearized ranking
    assert report.per_rank == (Fraction(1), Fraction(1))


def test_csv_shape():
    p = profile({MethodId.MV: "ab", MethodId.CAV: "ba"})
    text = reports_to_csv([consistency_report(p)])
    lines = text.strip().split("\r\n")
    assert lines[0] == "question_id,rank,consistency,mean"
    assert lines[1] == "q,1,1/2,1/2"
    assert len(lines) == 3
