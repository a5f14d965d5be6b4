# coding: utf-8
# Distributed under the terms of the MIT License.

import datetime

from monty.json import MSONable

from repvote.elect.rules import (Tally, ElectionRule, Outcome, TOLERANCE,
                                 add_tallies, decide, decide_districts,
                                 allocate_seats, below_threshold, leaders,
                                 margin)
from repvote.errors import (IncompatibleTallies, DistrictMismatch,
                            RuleArityError, EmptyElection, NoViableParty,
                            UnsupportedVariant, CalendarError)
from repvote.utils.log import get_logger

"""
The repeat voting procedure: two identical rounds whose votes are added up,
with the first round officially published in between, plus the conditional
second round, best-of-three and weighted-rounds variants.

Under a districts rule every function that takes a Tally also accepts a list
of per-district tallies.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

MIN_PUBLICATION_GAP = datetime.timedelta(days=7)
DEFAULT_ROUND_GAP_DAYS = 14
DEFAULT_PSEUDO_COUNT_SCALE = 10 ** 6
# Weighted-rounds scale that apportions on exact cross-multiplied counts
EXACT_SCALE = "exact"


class PublishedRound(MSONable):
    """
    The officially counted and published result of one round.
    """

    def __init__(self, tally, shares, turnout, margin, provisional_outcome,
                 round_index=1, district_tallies=None, provisional_error=None,
                 published_at=None, next_round_at=None):
        """
        :param tally: Tally of the round (national aggregate for districts).
        :param shares: Vote share per option, all zero if nobody voted.
        :param turnout: ballots_cast / eligible.
        :param margin: Winning margin of the round (0 if nobody voted).
        :param provisional_outcome: Outcome the rule would give if this round
            stood alone, or None when the rule cannot decide it.
        :param round_index: 1-based round number.
        :param district_tallies: Per-district tallies under a districts rule.
        :param provisional_error: Why provisional_outcome is None, if it is.
        :param published_at: Optional datetime of official publication.
        :param next_round_at: Optional datetime of the following round; must
            be at least a week after publication.
        """

        if published_at is not None and next_round_at is not None:
            if next_round_at - published_at < MIN_PUBLICATION_GAP:
                raise CalendarError("The next round must take place at least "
                                    "one week after publication")

        self.tally = tally
        self.shares = tuple(shares)
        self.turnout = turnout
        self.margin = margin
        self.provisional_outcome = provisional_outcome
        self.round_index = round_index
        self.district_tallies = None if district_tallies is None else \
            list(district_tallies)
        self.provisional_error = provisional_error
        self.published_at = published_at
        self.next_round_at = next_round_at

    @property
    def leader(self):
        """
        Round plurality leader (lowest index among ties).
        """
        return leaders(self.tally.counts)[0]

    @property
    def runner_up(self):
        """
        Option ranked second by count, ties to the lowest index.
        """
        ranked = sorted(range(self.tally.num_options),
                        key=lambda k: (-self.tally.counts[k], k))
        ranked.remove(self.leader)
        return ranked[0]

    def __repr__(self):
        return "PublishedRound(round={}, counts={}, turnout={:.4f}, " \
               "margin={:.4f}, outcome={})".format(self.round_index,
                                                   list(self.tally.counts),
                                                   self.turnout, self.margin,
                                                   self.provisional_outcome)


class FinalResult(MSONable):
    """
    The final result of a (repeat) voting procedure.
    """

    def __init__(self, outcome, rounds_held, published, combined_tally=None,
                 combined_shares=None, tie_broken=False, round_winners=None,
                 variant=None):
        """
        :param outcome: Final Outcome.
        :param rounds_held: Number of rounds actually held (1, 2 or 3).
        :param published: List of PublishedRound, one per round held.
        :param combined_tally: Summed Tally (list of them for districts), if
            the variant adds votes.
        :param combined_shares: Combined share vector the decision was based
            on.
        :param tie_broken: True if a per-round tie was broken to the lowest
            option.
        :param round_winners: Per-round winners (best-of-three).
        :param variant: Name of the variant that produced the result.
        """

        if len(published) != rounds_held:
            raise ValueError("{} published rounds for {} rounds "
                             "held".format(len(published), rounds_held))

        self.outcome = outcome
        self.rounds_held = rounds_held
        self.published = list(published)
        self.combined_tally = combined_tally
        self.combined_shares = None if combined_shares is None else \
            tuple(combined_shares)
        self.tie_broken = tie_broken
        self.round_winners = None if round_winners is None else \
            list(round_winners)
        self.variant = variant


class ProcedureVariant(MSONable):
    """
    Which procedure is run. single_round is the baseline every comparison is
    made against.
    """

    SINGLE_ROUND = "single_round"
    TWO_ROUND_SUM = "two_round_sum"
    CONDITIONAL = "conditional_second_round"
    BEST_OF_THREE = "best_of_three"
    WEIGHTED_ROUNDS = "weighted_rounds"
    KINDS = (SINGLE_ROUND, TWO_ROUND_SUM, CONDITIONAL, BEST_OF_THREE,
             WEIGHTED_ROUNDS)

    def __init__(self, kind, margin_threshold=None, scale=None):
        """
        :param kind: One of ProcedureVariant.KINDS.
        :param margin_threshold: Margin below which the conditional second
            round is held, in [0, 1].
        :param scale: Pseudo-count scale for weighted rounds under a
            parliamentary rule. Default 10**6; EXACT_SCALE apportions on
            exact integer pseudo-counts proportional to the averaged shares.
        """

        if kind not in self.KINDS:
            raise UnsupportedVariant("Unknown procedure variant: "
                                     "{}".format(kind))
        self.kind = kind
        self.margin_threshold = None
        self.scale = None

        if kind == self.CONDITIONAL:
            if margin_threshold is None:
                raise UnsupportedVariant("The conditional second round needs "
                                         "a margin_threshold")
            margin_threshold = float(margin_threshold)
            if not 0.0 <= margin_threshold <= 1.0:
                raise UnsupportedVariant("margin_threshold must lie in "
                                         "[0, 1]")
            self.margin_threshold = margin_threshold
        elif kind == self.WEIGHTED_ROUNDS:
            if scale is None:
                scale = DEFAULT_PSEUDO_COUNT_SCALE
            self.scale = scale if scale == EXACT_SCALE else int(scale)
            if self.scale != EXACT_SCALE and self.scale < 1:
                raise UnsupportedVariant("scale must be a positive integer")

    @property
    def name(self):
        if self.kind == self.CONDITIONAL:
            return "{}({})".format(self.kind, repr(self.margin_threshold))
        if self.kind == self.WEIGHTED_ROUNDS and \
                self.scale != DEFAULT_PSEUDO_COUNT_SCALE:
            return "{}({})".format(self.kind, self.scale)
        return self.kind

    @property
    def max_rounds(self):
        return {self.SINGLE_ROUND: 1, self.BEST_OF_THREE: 3}.get(self.kind, 2)

    def check(self, rule, num_options):
        """
        Raise if this variant cannot be run under rule with num_options.
        """

        if self.kind == self.BEST_OF_THREE:
            if rule.kind != ElectionRule.PLURALITY:
                raise UnsupportedVariant("best_of_three is decided by "
                                         "plurality in each round")
            if num_options != 2:
                raise RuleArityError("best_of_three applies only to "
                                     "two-outcome elections")
        elif self.kind == self.CONDITIONAL:
            if rule.kind not in (ElectionRule.PLURALITY,
                                 ElectionRule.SUPERMAJORITY):
                raise UnsupportedVariant("The conditional second round is "
                                         "defined for plurality and "
                                         "supermajority rules only")
        elif self.kind == self.WEIGHTED_ROUNDS:
            if rule.kind == ElectionRule.DISTRICTS:
                raise UnsupportedVariant("weighted_rounds is not defined for "
                                         "district rules")

    def run(self, rule, first_round, next_round):
        """
        Run the variant.

        :param rule: ElectionRule
        :param first_round: Tally (or per-district list) of round 1.
        :param next_round: Callable(round_index, published) returning the
            tally of round round_index, given the PublishedRound of the
            round before it. Called only for rounds that are held.
        :return: FinalResult
        """

        if self.kind == self.SINGLE_ROUND:
            result = run_single_round(first_round, rule)
        elif self.kind == self.TWO_ROUND_SUM:
            pub = publish_round(first_round, rule)
            result = run_two_round_sum(first_round, next_round(2, pub), rule)
        elif self.kind == self.CONDITIONAL:
            pub = publish_round(first_round, rule)
            result = run_conditional(first_round, lambda: next_round(2, pub),
                                     rule, self.margin_threshold)
        elif self.kind == self.BEST_OF_THREE:
            pub = publish_round(first_round, rule)
            second = next_round(2, pub)
            third = next_round(3, publish_round(second, rule, round_index=2))
            result = run_best_of_three(first_round, second, third, rule)
        else:
            pub = publish_round(first_round, rule)
            result = run_weighted_rounds(first_round, next_round(2, pub),
                                         rule, scale=self.scale)

        result.variant = self.name
        return result

    def __eq__(self, other):
        if not isinstance(other, ProcedureVariant):
            return NotImplemented
        return (self.kind, self.margin_threshold, self.scale) == \
               (other.kind, other.margin_threshold, other.scale)

    def __hash__(self):
        return hash((self.kind, self.margin_threshold, self.scale))

    def __repr__(self):
        return "ProcedureVariant({})".format(self.name)


def _is_district_list(t):
    return isinstance(t, (list, tuple))


def national_tally(per_district):
    """
    Aggregate per-district tallies into one national tally.
    """

    num_options = per_district[0].num_options
    if any(t.num_options != num_options for t in per_district):
        raise DistrictMismatch("Districts disagree on the number of options")
    counts = [sum(t.counts[k] for t in per_district)
              for k in range(num_options)]
    return Tally(counts, sum(t.eligible for t in per_district),
                 rounds=per_district[0].rounds)


def decide_any(rule, t):
    """
    decide() or decide_districts(), depending on the rule.
    """
    if rule.is_districts:
        return decide_districts(rule, list(t))
    return decide(rule, t)


def combine_rounds(t1, t2):
    """
    add_tallies(), applied district by district for per-district lists.
    """

    if _is_district_list(t1) or _is_district_list(t2):
        if not (_is_district_list(t1) and _is_district_list(t2)):
            raise IncompatibleTallies("Cannot add a district list to a "
                                      "single tally")
        if len(t1) != len(t2):
            raise DistrictMismatch("Rounds have {} and {} "
                                   "districts".format(len(t1), len(t2)))
        return [add_tallies(a, b) for a, b in zip(t1, t2)]
    return add_tallies(t1, t2)


def schedule_next_round(published_at, days=DEFAULT_ROUND_GAP_DAYS):
    """
    Date of the next round, by default two weeks after publication.

    :param published_at: datetime of official publication.
    :param days: Gap in days; at least seven.
    :return: datetime
    """

    gap = datetime.timedelta(days=days)
    if gap < MIN_PUBLICATION_GAP:
        raise CalendarError("The next round must take place at least one "
                            "week after publication")
    return published_at + gap


def publish_round(t, rule, round_index=1, published_at=None,
                  next_round_at=None):
    """
    Derive what is officially published about a round.

    :param t: Tally, or per-district list under a districts rule.
    :param rule: ElectionRule
    :param round_index: 1-based round number.
    :param published_at: Optional publication datetime.
    :param next_round_at: Optional datetime of the next round.
    :return: PublishedRound
    """

    district_tallies = None
    if _is_district_list(t):
        if not rule.is_districts:
            raise IncompatibleTallies("Per-district tallies need a districts "
                                      "rule")
        district_tallies = list(t)
        tally = national_tally(district_tallies)
    else:
        if rule.is_districts:
            raise DistrictMismatch("A districts rule needs per-district "
                                   "tallies")
        tally = t

    provisional, error = None, None
    try:
        provisional = decide_any(rule, t)
    except (EmptyElection, NoViableParty) as exc:
        error = str(exc)

    return PublishedRound(tally=tally,
                          shares=tally.shares,
                          turnout=tally.turnout,
                          margin=margin(tally) if tally.ballots_cast else 0.0,
                          provisional_outcome=provisional,
                          round_index=round_index,
                          district_tallies=district_tallies,
                          provisional_error=error,
                          published_at=published_at,
                          next_round_at=next_round_at)


def run_single_round(t, rule):
    """
    The ordinary one-round election the repeat procedure is compared with.
    """

    return FinalResult(outcome=decide_any(rule, t),
                       rounds_held=1,
                       published=[publish_round(t, rule)],
                       combined_tally=t,
                       combined_shares=_shares_of(t),
                       variant=ProcedureVariant.SINGLE_ROUND)


def run_two_round_sum(t1, t2, rule):
    """
    Add up the votes of both rounds and apply the rule to the totals.

    :param t1: Round 1 Tally (per-district list for districts rules).
    :param t2: Round 2 Tally, same shape as t1.
    :param rule: ElectionRule
    :return: FinalResult
    """

    combined = combine_rounds(t1, t2)
    return FinalResult(outcome=decide_any(rule, combined),
                       rounds_held=2,
                       published=[publish_round(t1, rule, round_index=1),
                                  publish_round(t2, rule, round_index=2)],
                       combined_tally=combined,
                       combined_shares=_shares_of(combined),
                       variant=ProcedureVariant.TWO_ROUND_SUM)


def run_conditional(t1, round2_supplier, rule, margin_threshold):
    """
    Hold the second round only when the first one is close.

    The second round is held iff margin(t1) < margin_threshold; a margin equal
    to the threshold stops after round 1.

    :param t1: Round 1 Tally.
    :param round2_supplier: Callable with no arguments producing the round 2
        Tally; invoked at most once.
    :param rule: Plurality or supermajority ElectionRule.
    :param margin_threshold: Threshold in [0, 1].
    :return: FinalResult
    """

    if rule.kind not in (ElectionRule.PLURALITY, ElectionRule.SUPERMAJORITY):
        raise UnsupportedVariant("The conditional second round is defined for "
                                 "plurality and supermajority rules only")
    if not 0.0 <= margin_threshold <= 1.0:
        raise ValueError("margin_threshold must lie in [0, 1]")

    first_margin = margin(t1)
    if first_margin >= margin_threshold - TOLERANCE:
        logger.debug("Margin %s >= %s; no second round", first_margin,
                     margin_threshold)
        result = run_single_round(t1, rule)
    else:
        result = run_two_round_sum(t1, round2_supplier(), rule)
    result.variant = ProcedureVariant.CONDITIONAL
    return result


def run_best_of_three(t1, t2, t3, rule=None):
    """
    Three rounds of a two-outcome election, each decided on its own by
    plurality; the winner must win at least two of them. A tied round goes to
    option 0 and sets tie_broken.

    :param t1: Round 1 Tally.
    :param t2: Round 2 Tally.
    :param t3: Round 3 Tally.
    :param rule: Optional ElectionRule; must be plurality if given.
    :return: FinalResult
    """

    rule = rule or ElectionRule.plurality()
    if rule.kind != ElectionRule.PLURALITY:
        raise UnsupportedVariant("best_of_three is decided by plurality in "
                                 "each round")

    rounds = [t1, t2, t3]
    for t in rounds:
        if _is_district_list(t) or t.num_options != 2:
            raise RuleArityError("best_of_three applies only to two-outcome "
                                 "elections")

    round_winners = []
    tie_broken = False
    for t in rounds:
        top = leaders(t.counts)
        if len(top) > 1:
            tie_broken = True
        round_winners.append(top[0])

    winner = max((0, 1), key=lambda k: (round_winners.count(k), -k))

    combined = add_tallies(add_tallies(t1, t2), t3)
    return FinalResult(outcome=Outcome.win(winner),
                       rounds_held=3,
                       published=[publish_round(t, rule, round_index=i + 1)
                                  for i, t in enumerate(rounds)],
                       combined_tally=combined,
                       combined_shares=combined.shares,
                       tie_broken=tie_broken,
                       round_winners=round_winners,
                       variant=ProcedureVariant.BEST_OF_THREE)


def averaged_shares(t1, t2):
    """
    Average of the two rounds' vote shares, option by option.
    """
    return tuple((a + b) / 2 for a, b in zip(t1.shares, t2.shares))


def weighted_ballot_shares(t1, t2):
    """
    Combined shares when every ballot of round r weighs 1 / ballots_cast(r).
    """

    w1 = 1.0 / t1.ballots_cast
    w2 = 1.0 / t2.ballots_cast
    weighted = [a * w1 + b * w2 for a, b in zip(t1.counts, t2.counts)]
    total = sum(weighted)
    return tuple(w / total for w in weighted)


def decide_shares(rule, shares, scale=DEFAULT_PSEUDO_COUNT_SCALE):
    """
    Apply a rule's comparison logic to a share vector instead of counts.

    Parliamentary rules apply the entry threshold to the shares and then
    apportion seats over round(share * scale) pseudo-counts.

    :param rule: Plurality, supermajority or parliamentary ElectionRule.
    :param shares: Share vector summing to 1.
    :param scale: Pseudo-count scale for apportionment.
    :return: Outcome
    """

    if rule.kind == ElectionRule.PLURALITY:
        top = max(shares)
        tied = [k for k, s in enumerate(shares) if s >= top - TOLERANCE]
        if len(tied) == 1:
            return Outcome.win(tied[0])
        return Outcome.tie(tied)

    if rule.kind == ElectionRule.SUPERMAJORITY:
        if len(shares) != 2:
            raise RuleArityError("Supermajority needs exactly two options")
        if shares[0] >= rule.quota - TOLERANCE:
            return Outcome.passed()
        return Outcome.failed()

    if rule.kind == ElectionRule.PARLIAMENTARY:
        viable = [k for k, s in enumerate(shares)
                  if not below_threshold(s, 1.0, rule.entry_threshold)]
        if not viable:
            raise NoViableParty("No party reaches the entry threshold of "
                                "{}".format(rule.entry_threshold))
        pseudo = [int(round(s * scale)) if k in viable else 0
                  for k, s in enumerate(shares)]
        seats = allocate_seats(Tally(pseudo, sum(pseudo)), 0.0, rule.seats,
                               rule.apportionment)
        return Outcome.seat_vector(seats)

    raise UnsupportedVariant("Share-based decisions are not defined for "
                             "{} rules".format(rule.kind))


def run_weighted_rounds(t1, t2, rule, scale=DEFAULT_PSEUDO_COUNT_SCALE):
    """
    Average the two rounds' vote shares and decide on the averages. This is
    the same as weighting each round inversely to its number of ballots.

    :param t1: Round 1 Tally.
    :param t2: Round 2 Tally.
    :param rule: Plurality, supermajority or parliamentary ElectionRule.
    :param scale: Pseudo-count scale for parliamentary apportionment.
        EXACT_SCALE apportions on c1 * n2 + c2 * n1, which is exactly
        proportional to the averaged shares.
    :return: FinalResult
    """

    if rule.is_districts or _is_district_list(t1) or _is_district_list(t2):
        raise UnsupportedVariant("weighted_rounds is not defined for district "
                                 "rules")
    if t1.num_options != t2.num_options or t1.eligible != t2.eligible:
        raise IncompatibleTallies("Rounds must share options and electorate")
    if t1.ballots_cast == 0 or t2.ballots_cast == 0:
        raise EmptyElection("weighted_rounds needs ballots in both rounds")

    shares = averaged_shares(t1, t2)
    if rule.kind == ElectionRule.PARLIAMENTARY and scale == EXACT_SCALE:
        outcome = _decide_exact_average(rule, t1, t2, shares)
    else:
        outcome = decide_shares(rule, shares, scale)
    return FinalResult(outcome=outcome,
                       rounds_held=2,
                       published=[publish_round(t1, rule, round_index=1),
                                  publish_round(t2, rule, round_index=2)],
                       combined_shares=shares,
                       variant=ProcedureVariant.WEIGHTED_ROUNDS)


def _shares_of(t):
    if _is_district_list(t):
        return national_tally(t).shares
    return t.shares


def _decide_exact_average(rule, t1, t2, shares):
    viable = [k for k, s in enumerate(shares)
              if not below_threshold(s, 1.0, rule.entry_threshold)]
    if not viable:
        raise NoViableParty("No party reaches the entry threshold of "
                            "{}".format(rule.entry_threshold))
    n1, n2 = t1.ballots_cast, t2.ballots_cast
    pseudo = [a * n2 + b * n1 if k in viable else 0
              for k, (a, b) in enumerate(zip(t1.counts, t2.counts))]
    seats = allocate_seats(Tally(pseudo, sum(pseudo)), 0.0, rule.seats,
                           rule.apportionment)
    return Outcome.seat_vector(seats)
