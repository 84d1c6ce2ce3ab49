"""Built-in demonstration study: four COVID-19 questions, four methods.

Ships the published aggregate share table of the 2021 online study (120
voters, questions vaccine/icu/protection/lockdown, methods mv/cav/sv/mbc) and
generates synthetic per-voter ballots whose tallies reproduce those shares to
within 120-voter rounding, with residuals placed by largest remainder. The
study only published aggregates, so the individual ballots here are
synthetic; only the aggregate-level numbers are meaningful.
"""

from __future__ import annotations

import random
from itertools import permutations
from fractions import Fraction
from typing import Sequence

from .methods import (
    MethodId,
    Option,
    Question,
    RawBallot,
    builtin_spec,
)

VOTER_COUNT = 120
FIXTURE_CAMPAIGN_ID = "covid-study"
FIXTURE_METHODS = (MethodId.MV, MethodId.CAV, MethodId.SV, MethodId.MBC)

# Aggregate share (percent) of each option, per question and method, as
# published. Kept as strings so they convert to exact decimal fractions.
SHARE_TABLE: dict[str, dict[MethodId, tuple[str, ...]]] = {
    "vaccine": {
        MethodId.MV: ("14.7", "31.8", "11.6", "18.6", "23.3"),
        MethodId.CAV: ("11.2", "18.6", "19.8", "25.2", "25.1"),
        MethodId.SV: ("15.2", "19.3", "17.9", "24.9", "22.7"),
        MethodId.MBC: ("16.6", "19.6", "19.1", "22.2", "22.5"),
    },
    "icu": {
        MethodId.MV: ("26.4", "16.5", "7.9", "22.7", "26.5"),
        MethodId.CAV: ("21.8", "22.3", "14.8", "20.2", "20.8"),
        MethodId.SV: ("22.9", "21.4", "14.3", "19.8", "21.6"),
        MethodId.MBC: ("22.4", "21.7", "15.4", "19.9", "20.6"),
    },
    "protection": {
        MethodId.MV: ("4.1", "15.8", "3.9", "62.9", "13.3"),
        MethodId.CAV: ("20.4", "21.7", "14.9", "22.4", "20.6"),
        MethodId.SV: ("19.9", "21.4", "13.2", "25.1", "20.4"),
        MethodId.MBC: ("17.2", "22.6", "11.8", "27.6", "20.8"),
    },
    "lockdown": {
        MethodId.MV: ("31.1", "2.4", "25.4", "36.6", "3.8"),
        MethodId.CAV: ("22.6", "13.5", "21.2", "23.5", "19.2"),
        MethodId.SV: ("24.5", "11.3", "20.8", "25.1", "18.3"),
        MethodId.MBC: ("25.3", "13.2", "21.3", "24.6", "15.6"),
    },
}

_QUESTION_TEXTS: dict[str, tuple[str, tuple[str, ...]]] = {
    "vaccine": (
        "What are you most concerned about the COVID-19 vaccines?",
        (
            "How to be vaccinated as soon as possible",
            "Their long-term side-effects",
            "Their overall effectiveness",
            "Their misuse by governments & companies",
            "Discrimination, e.g. travels, access to facilities & services",
        ),
    ),
    "icu": (
        "Among COVID-19 patients, which criterion should grant one access to an intensive care unit?",
        (
            "Being the youngest",
            "Being the oldest",
            "No denial of vaccination",
            "No violation of lockdown rules",
            "No health self-damage, e.g. smoking, drugs, alcohol",
        ),
    ),
    "protection": (
        "Which is the most effective protection measure against a COVID-19 infection?",
        (
            "Wearing a mask",
            "Physical distancing",
            "Vaccination",
            "Regular hand washing",
            "Maintaining a healthy lifestyle",
        ),
    ),
    "lockdown": (
        "Which is the most significant problem that the lockdown has caused?",
        (
            "Economic recession & unemployment",
            "Government control & suppression of freedom",
            "Social segregation & increased inequality",
            "Mental distress",
            "Reduced physical health condition",
        ),
    ),
}

OPTION_IDS = tuple(f"o{i}" for i in range(1, 6))


def covid_questions() -> list[Question]:
    specs = tuple(builtin_spec(m) for m in FIXTURE_METHODS)
    questions = []
    for qid, (text, labels) in _QUESTION_TEXTS.items():
        options = tuple(Option(oid, label) for oid, label in zip(OPTION_IDS, labels))
        questions.append(Question(qid, text, options, specs))
    return questions


def share_fractions(question_id: str, method_id: MethodId) -> tuple[Fraction, ...]:
    return tuple(Fraction(s) for s in SHARE_TABLE[question_id][method_id])


def table_rankings() -> dict[str, dict[MethodId, tuple[str, ...]]]:
    """Linearized option ranking per (question, method), straight from the table."""
    out: dict[str, dict[MethodId, tuple[str, ...]]] = {}
    for qid, per_method in SHARE_TABLE.items():
        out[qid] = {}
        for mid in per_method:
            shares = share_fractions(qid, mid)
            order = sorted(range(5), key=lambda i: (-shares[i], i))
            out[qid][mid] = tuple(OPTION_IDS[i] for i in order)
    return out


def largest_remainder(targets: Sequence[Fraction], total: int) -> list[int]:
    """Apportion ``total`` integer units proportionally to ``targets``.

    Floors first, then hands remaining units to the largest fractional
    remainders (position as deterministic tie-break).
    """
    weight = sum(targets)
    if weight <= 0:
        raise ValueError("targets must have positive total weight")
    exact = [t / weight * total for t in targets]
    units = [int(e) for e in exact]
    leftovers = total - sum(units)
    order = sorted(range(len(targets)), key=lambda i: (exact[i] - units[i], -i), reverse=True)
    for i in order[:leftovers]:
        units[i] += 1
    return units


def _apportion_ranked(targets: Sequence[Fraction], total: int, cap: int | None = None) -> list[int]:
    """Largest-remainder apportionment that also preserves the target order.

    Rounding can collapse two close targets to equal unit counts, and the
    canonical tie-break may then invert the order the targets imply. Where
    targets strictly decrease, unit counts are forced strictly decreasing;
    the freed units go back to the largest remainders that can absorb them
    without breaking the order (or the per-option ``cap``).
    """
    units = largest_remainder(targets, total)
    weight = sum(targets)
    exact = [t / weight * total for t in targets]
    order = sorted(range(len(targets)), key=lambda i: (-targets[i], i))

    surplus = 0
    for pos in range(1, len(order)):
        i, prev = order[pos], order[pos - 1]
        if targets[i] < targets[prev] and units[i] >= units[prev]:
            surplus += units[i] - (units[prev] - 1)
            units[i] = units[prev] - 1
            if units[i] < 0:
                raise ValueError("targets too close to apportion at this resolution")

    while surplus:
        best = None
        for pos, i in enumerate(order):
            bumped = units[i] + 1
            if cap is not None and bumped > cap:
                continue
            if pos > 0:
                prev = order[pos - 1]
                limit = units[prev] - (1 if targets[i] < targets[prev] else 0)
                if bumped > limit:
                    continue
            if pos + 1 < len(order):
                nxt = order[pos + 1]
                needed = units[nxt] + (1 if targets[nxt] < targets[i] else 0)
                if bumped < needed:
                    continue
            remainder = exact[i] - units[i]
            if best is None or remainder > best[1]:
                best = (i, remainder)
        if best is None:
            raise ValueError("cannot place surplus units without breaking the order")
        units[best[0]] += 1
        surplus -= 1
    return units


# Unit totals used when converting shares into discrete per-voter scores.
# CAV counts half-points (cap 2 per voter per option), SV and MBC count
# fifths (cap 5). Totals are sized so every per-option target stays within
# what 120 voters can produce while keeping rounding fine enough to preserve
# the published ranking order.
_CAV_TOTAL_UNITS = 800
_SV_TOTAL_UNITS = 1800
_MBC_TOTAL_UNITS = VOTER_COUNT * 15  # every synthetic voter ranks all 5 options


def _mv_ballots(units: Sequence[int]) -> list[RawBallot]:
    ballots = []
    for idx, count in enumerate(units):
        ballots += [RawBallot.single_choice(OPTION_IDS[idx])] * count
    return ballots


def _per_option_ballots(units: Sequence[int], per_voter_cap: int, denom: int) -> list[RawBallot]:
    """Spread per-option unit demand over voters, each option independent."""
    levels_by_voter: list[dict[str, Fraction]] = [dict() for _ in range(VOTER_COUNT)]
    for idx, u in enumerate(units):
        if u > per_voter_cap * VOTER_COUNT:
            raise ValueError("per-option demand exceeds what voters can supply")
        base, extra = divmod(u, VOTER_COUNT)
        for v in range(VOTER_COUNT):
            got = base + (1 if v < extra else 0)
            levels_by_voter[v][OPTION_IDS[idx]] = Fraction(got, denom)
    return [RawBallot.per_option(levels) for levels in levels_by_voter]


def _mbc_ballots(units: Sequence[int]) -> list[RawBallot]:
    """Build 120 full rankings whose Borda unit column sums equal ``units``.

    Every synthetic voter ranks all five options, so each contributes the
    score multiset {5,4,3,2,1} (in fifths). Construction is exact in two
    stages: first a 5x5 count matrix c[option][score] with all row and
    column sums 120 and the demanded weighted column sums, built from the
    uniform matrix by balance-preserving pair moves; then a Birkhoff-style
    decomposition of that matrix into 120 option->score permutations.
    """
    nscore = 5
    if sum(units) != _MBC_TOTAL_UNITS:
        raise ValueError("demand must total 15 units per voter")
    base = sum(range(1, nscore + 1)) * VOTER_COUNT // nscore
    c = [[VOTER_COUNT // nscore] * nscore for _ in range(nscore)]
    delta = [u - base for u in units]
    while any(delta):
        i = max(range(nscore), key=lambda k: delta[k])
        j = min(range(nscore), key=lambda k: delta[k])
        d = min(delta[i], -delta[j])
        moved = False
        # shift one voter of option i from score s to s+gap and one voter of
        # option j the opposite way: transfers `gap` units from j to i while
        # keeping all row/column sums intact
        for gap in range(min(d, nscore - 1), 0, -1):
            for s in range(1, nscore - gap + 1):
                sp = s + gap
                if c[i][s - 1] > 0 and c[j][sp - 1] > 0:
                    c[i][s - 1] -= 1
                    c[i][sp - 1] += 1
                    c[j][sp - 1] -= 1
                    c[j][s - 1] += 1
                    delta[i] -= gap
                    delta[j] += gap
                    moved = True
                    break
            if moved:
                break
        if not moved:
            raise ValueError(f"cannot balance Borda demands {units}")

    rows: list[list[int]] = []
    remaining = VOTER_COUNT
    while remaining:
        best: tuple[tuple[int, ...], int] | None = None
        for perm in permutations(range(nscore)):
            if all(c[i][perm[i]] > 0 for i in range(nscore)):
                t = min(c[i][perm[i]] for i in range(nscore))
                if best is None or t > best[1]:
                    best = (perm, t)
        if best is None:
            raise ValueError("count matrix decomposition failed")
        perm, t = best
        t = min(t, remaining)
        for i in range(nscore):
            c[i][perm[i]] -= t
        rows += [[perm[i] + 1 for i in range(nscore)]] * t
        remaining -= t

    ballots = []
    for row in rows:
        ranked = sorted(range(nscore), key=lambda i: -row[i])
        ballots.append(RawBallot.ranked(OPTION_IDS[i] for i in ranked))
    return ballots


def synthetic_ballots(question_id: str, method_id: MethodId, seed: int = 0) -> list[RawBallot]:
    """One raw ballot per synthetic voter, index-aligned with voter order.

    The seed only shuffles which voter gets which ballot; aggregates are
    seed-independent.
    """
    shares = share_fractions(question_id, method_id)
    if method_id == MethodId.MV:
        ballots = _mv_ballots(_apportion_ranked(shares, VOTER_COUNT))
    elif method_id == MethodId.CAV:
        ballots = _per_option_ballots(_apportion_ranked(shares, _CAV_TOTAL_UNITS, cap=2 * VOTER_COUNT), 2, 2)
    elif method_id == MethodId.SV:
        ballots = _per_option_ballots(_apportion_ranked(shares, _SV_TOTAL_UNITS, cap=5 * VOTER_COUNT), 5, 5)
    elif method_id == MethodId.MBC:
        ballots = _mbc_ballots(_apportion_ranked(shares, _MBC_TOTAL_UNITS, cap=5 * VOTER_COUNT))
    else:
        raise ValueError(f"no fixture data for method {method_id.value}")
    rng = random.Random(f"{seed}:{question_id}:{method_id.value}")
    rng.shuffle(ballots)
    return ballots


def voter_pseudonyms() -> list[str]:
    return [f"synthetic-voter-{i:03d}" for i in range(1, VOTER_COUNT + 1)]
