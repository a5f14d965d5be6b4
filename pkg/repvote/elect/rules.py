# coding: utf-8
# Distributed under the terms of the MIT License.

from fractions import Fraction

import numpy as np
from monty.json import MSONable

from repvote.errors import (InvalidBallot, OverVote, IncompatibleTallies,
                            WrongDecisionPath, RuleArityError, NoViableParty,
                            EmptyElection, DistrictMismatch, BadSpec)
from repvote.utils.log import get_logger

"""
Tallying and decision rules: plurality, supermajority, parliamentary seat
apportionment with an entry threshold, and a weighted winner-take-all
district college.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

# Fractional thresholds and quotas are compared at this tolerance
TOLERANCE = 1e-12

HIGHEST_AVERAGES = "highest_averages"
LARGEST_REMAINDER = "largest_remainder"
APPORTIONMENT_METHODS = (HIGHEST_AVERAGES, LARGEST_REMAINDER)


class Tally(MSONable):
    """
    Vote counts for one round (or for several rounds added together).

    A single round satisfies ballots_cast <= eligible. When rounds are added,
    the same electorate may have contributed one ballot per round, so the
    invariant becomes ballots_cast <= rounds * eligible.
    """

    def __init__(self, counts, eligible, ballots_cast=None, rounds=1):
        """
        :param counts: Sequence of nonnegative ints, one per option.
        :param eligible: Size of the electorate.
        :param ballots_cast: Number of ballots. Defaults to sum(counts); if
            given it must agree with the counts.
        :param rounds: Number of rounds summed into this tally. Default 1.
        """

        counts = tuple(int(c) for c in counts)
        if len(counts) < 1:
            raise ValueError("A tally needs at least one option")
        if any(c < 0 for c in counts):
            raise ValueError("Vote counts must be nonnegative")

        total = sum(counts)
        if ballots_cast is None:
            ballots_cast = total
        elif int(ballots_cast) != total:
            raise ValueError("ballots_cast ({}) does not match the sum of "
                             "counts ({})".format(ballots_cast, total))

        eligible = int(eligible)
        rounds = int(rounds)
        if eligible < 0 or rounds < 1:
            raise ValueError("eligible must be >= 0 and rounds >= 1")
        if total > rounds * eligible:
            raise OverVote("{} ballots cast by an electorate of {} over {} "
                           "round(s)".format(total, eligible, rounds))

        self.counts = counts
        self.ballots_cast = total
        self.eligible = eligible
        self.rounds = rounds

    @classmethod
    def zero(cls, num_options, eligible):
        return cls([0] * num_options, eligible)

    @property
    def num_options(self):
        return len(self.counts)

    @property
    def shares(self):
        """
        Vote share of each option; all zero when nobody voted.
        """
        if self.ballots_cast == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / self.ballots_cast for c in self.counts)

    @property
    def turnout(self):
        if self.eligible == 0:
            return 0.0
        return self.ballots_cast / (self.rounds * self.eligible)

    def __eq__(self, other):
        if not isinstance(other, Tally):
            return NotImplemented
        return (self.counts == other.counts and
                self.eligible == other.eligible and
                self.rounds == other.rounds)

    def __hash__(self):
        return hash((self.counts, self.eligible, self.rounds))

    def __repr__(self):
        return "Tally(counts={}, ballots_cast={}, eligible={}, " \
               "rounds={})".format(list(self.counts), self.ballots_cast,
                                   self.eligible, self.rounds)


class ElectionRule(MSONable):
    """
    Description of the decision rule applied to a (combined) tally.

    Build instances through the classmethods plurality(), supermajority(),
    parliamentary() and districts().
    """

    PLURALITY = "plurality"
    SUPERMAJORITY = "supermajority"
    PARLIAMENTARY = "parliamentary"
    DISTRICTS = "districts"
    KINDS = (PLURALITY, SUPERMAJORITY, PARLIAMENTARY, DISTRICTS)

    def __init__(self, kind, quota=None, entry_threshold=None, seats=None,
                 apportionment=None, weights=None):
        """
        :param kind: One of ElectionRule.KINDS.
        :param quota: Supermajority quota in (1/2, 1].
        :param entry_threshold: Parliamentary entry threshold in [0, 1).
        :param seats: Number of parliamentary seats (>= 1).
        :param apportionment: "highest_averages" or "largest_remainder".
        :param weights: Positive int weight of each district.
        """

        if kind not in self.KINDS:
            raise BadSpec("Unknown rule kind: {}".format(kind))

        self.kind = kind
        self.quota = None
        self.entry_threshold = None
        self.seats = None
        self.apportionment = None
        self.weights = None

        if kind == self.SUPERMAJORITY:
            quota = float(quota)
            if not 0.5 < quota <= 1.0:
                raise BadSpec("quota must exceed 1/2 and be at most 1")
            self.quota = quota
        elif kind == self.PARLIAMENTARY:
            entry_threshold = float(entry_threshold or 0.0)
            if not 0.0 <= entry_threshold < 1.0:
                raise BadSpec("entry_threshold must lie in [0, 1)")
            if seats is None or int(seats) < 1:
                raise BadSpec("seats must be a positive integer")
            apportionment = apportionment or HIGHEST_AVERAGES
            if apportionment not in APPORTIONMENT_METHODS:
                raise BadSpec("Unknown apportionment method: "
                              "{}".format(apportionment))
            self.entry_threshold = entry_threshold
            self.seats = int(seats)
            self.apportionment = apportionment
        elif kind == self.DISTRICTS:
            weights = tuple(int(w) for w in (weights or ()))
            if len(weights) == 0 or any(w < 1 for w in weights):
                raise BadSpec("districts need at least one positive weight")
            self.weights = weights

    @classmethod
    def plurality(cls):
        return cls(cls.PLURALITY)

    @classmethod
    def supermajority(cls, quota):
        return cls(cls.SUPERMAJORITY, quota=quota)

    @classmethod
    def parliamentary(cls, entry_threshold, seats,
                      apportionment=HIGHEST_AVERAGES):
        return cls(cls.PARLIAMENTARY, entry_threshold=entry_threshold,
                   seats=seats, apportionment=apportionment)

    @classmethod
    def districts(cls, weights):
        return cls(cls.DISTRICTS, weights=weights)

    @property
    def is_districts(self):
        return self.kind == self.DISTRICTS

    def __eq__(self, other):
        if not isinstance(other, ElectionRule):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash((self.kind, self.quota, self.entry_threshold, self.seats,
                     self.apportionment, self.weights))

    def __repr__(self):
        params = {k: v for k, v in self.as_dict().items()
                  if not k.startswith("@") and k != "kind" and v is not None}
        return "ElectionRule({}, {})".format(self.kind, params)


class Outcome(MSONable):
    """
    The decision a rule produces.
    """

    WINNER = "winner"
    TIE = "tie"
    PASSED = "passed"
    FAILED = "failed"
    SEATS = "seats"
    COLLEGE_WINNER = "college_winner"

    def __init__(self, kind, winner=None, tied=None, seats=None,
                 college_votes=None, district_ties=None):
        """
        :param kind: One of the Outcome kind constants.
        :param winner: Winning option (WINNER, COLLEGE_WINNER).
        :param tied: Options sharing the top spot (TIE), at least two.
        :param seats: Seat vector (SEATS).
        :param college_votes: College weight won by each option (district
            rules only; also set on a college TIE).
        :param district_ties: Indices of districts whose plurality was tied
            and whose weight went to nobody.
        """

        self.kind = kind
        self.winner = None if winner is None else int(winner)
        self.tied = None if tied is None else tuple(sorted(int(t) for t in tied))
        self.seats = None if seats is None else tuple(int(s) for s in seats)
        self.college_votes = None if college_votes is None else \
            tuple(int(c) for c in college_votes)
        self.district_ties = tuple(int(d) for d in (district_ties or ()))

        if kind == self.TIE and len(self.tied) < 2:
            raise ValueError("A tie needs at least two options")

    @classmethod
    def win(cls, winner):
        return cls(cls.WINNER, winner=winner)

    @classmethod
    def tie(cls, tied, college_votes=None, district_ties=None):
        return cls(cls.TIE, tied=tied, college_votes=college_votes,
                   district_ties=district_ties)

    @classmethod
    def passed(cls):
        return cls(cls.PASSED)

    @classmethod
    def failed(cls):
        return cls(cls.FAILED)

    @classmethod
    def seat_vector(cls, seats):
        return cls(cls.SEATS, seats=seats)

    @classmethod
    def college_winner(cls, winner, college_votes, district_ties=None):
        return cls(cls.COLLEGE_WINNER, winner=winner,
                   college_votes=college_votes, district_ties=district_ties)

    @property
    def is_tie(self):
        return self.kind == self.TIE

    def same_decision(self, other):
        """
        Whether two outcomes announce the same decision, ignoring the
        college-vote breakdown and the Winner/CollegeWinner wrapper.
        """

        if other is None:
            return False
        winners = (self.WINNER, self.COLLEGE_WINNER)
        if self.kind in winners and other.kind in winners:
            return self.winner == other.winner
        if self.kind != other.kind:
            return False
        return self.tied == other.tied and self.seats == other.seats

    def __eq__(self, other):
        if not isinstance(other, Outcome):
            return NotImplemented
        return (self.kind, self.winner, self.tied, self.seats,
                self.college_votes, self.district_ties) == \
               (other.kind, other.winner, other.tied, other.seats,
                other.college_votes, other.district_ties)

    def __hash__(self):
        return hash((self.kind, self.winner, self.tied, self.seats))

    def __repr__(self):
        if self.kind in (self.WINNER, self.COLLEGE_WINNER):
            return "Outcome({}={})".format(self.kind, self.winner)
        if self.kind == self.TIE:
            return "Outcome(tie={})".format(list(self.tied))
        if self.kind == self.SEATS:
            return "Outcome(seats={})".format(list(self.seats))
        return "Outcome({})".format(self.kind)


def below_threshold(count, total, threshold):
    """
    True when count/total falls short of threshold (at TOLERANCE).
    """
    return count / total < threshold - TOLERANCE


def leaders(counts):
    """
    Indices of every option holding the maximum count, ascending.
    """
    counts = np.asarray(counts)
    return [int(k) for k in np.flatnonzero(counts == counts.max())]


def ranked_options(counts):
    """
    Options ordered by count (descending), ties to the lowest index.
    """
    return sorted(range(len(counts)), key=lambda k: (-counts[k], k))


def tally_ballots(choices, num_options, eligible):
    """
    Count ballots.

    :param choices: Iterable of option indices, one per ballot.
    :param num_options: Number of options K.
    :param eligible: Size of the electorate.
    :return: Tally
    """

    choices = list(choices)
    if len(choices) > eligible:
        raise OverVote("{} ballots for an electorate of "
                       "{}".format(len(choices), eligible))
    for c in choices:
        if not 0 <= c < num_options:
            raise InvalidBallot("Ballot for option {} but only {} options "
                                "exist".format(c, num_options))

    counts = np.bincount(np.asarray(choices, dtype=np.int64),
                         minlength=num_options)
    return Tally(counts.tolist(), eligible)


def add_tallies(t1, t2):
    """
    Add the votes of two rounds cast by the same electorate.

    A tally without ballots adds no round, so the zero tally is the identity
    of the sum (rounds and turnout included).
    """

    if t1.num_options != t2.num_options:
        raise IncompatibleTallies("Tallies have {} and {} "
                                  "options".format(t1.num_options,
                                                   t2.num_options))
    if t1.eligible != t2.eligible:
        raise IncompatibleTallies("Tallies have electorates of {} and "
                                  "{}".format(t1.eligible, t2.eligible))

    if t1.ballots_cast == 0 and t2.ballots_cast == 0:
        rounds = max(t1.rounds, t2.rounds)
    elif t2.ballots_cast == 0:
        rounds = t1.rounds
    elif t1.ballots_cast == 0:
        rounds = t2.rounds
    else:
        rounds = t1.rounds + t2.rounds

    counts = [a + b for a, b in zip(t1.counts, t2.counts)]
    return Tally(counts, t1.eligible, rounds=rounds)


def margin(t):
    """
    Winning margin of a tally: (top count - second count) / ballots_cast.

    A single-option tally has margin 1.
    """

    if t.ballots_cast == 0:
        raise EmptyElection("Margin is undefined when nobody voted")
    if t.num_options == 1:
        return 1.0
    top, second = sorted(t.counts, reverse=True)[:2]
    return (top - second) / t.ballots_cast


def allocate_seats(t, entry_threshold, seats, method=HIGHEST_AVERAGES):
    """
    Apportion seats among the parties that pass the entry threshold.

    Highest averages uses divisors 1, 2, 3, ...; largest remainder uses the
    simple (Hare) quota computed over the votes of surviving parties. Exact
    ties go to the lowest party index.

    :param t: Tally
    :param entry_threshold: Minimum vote share for representation.
    :param seats: Number of seats S.
    :param method: "highest_averages" or "largest_remainder".
    :return: list of ints summing to S
    """

    if t.ballots_cast == 0:
        raise EmptyElection("Cannot apportion seats without ballots")
    if seats < 1:
        raise ValueError("seats must be a positive integer")
    if method not in APPORTIONMENT_METHODS:
        raise ValueError("Unknown apportionment method: {}".format(method))

    viable = [k for k, c in enumerate(t.counts)
              if not below_threshold(c, t.ballots_cast, entry_threshold)]
    if not viable:
        raise NoViableParty("No party reaches the entry threshold of "
                            "{}".format(entry_threshold))
    logger.debug("Parties passing threshold %s: %s", entry_threshold, viable)

    allocation = [0] * t.num_options

    if method == HIGHEST_AVERAGES:
        for _ in range(seats):
            best = max(viable, key=lambda k: (Fraction(t.counts[k],
                                                        allocation[k] + 1),
                                              -k))
            allocation[best] += 1
    else:
        total = sum(t.counts[k] for k in viable)
        if total == 0:
            raise NoViableParty("Surviving parties received no votes")
        remainders = {}
        for k in viable:
            quotient, remainders[k] = divmod(t.counts[k] * seats, total)
            allocation[k] = quotient
        left = seats - sum(allocation)
        for k in sorted(viable, key=lambda k: (-remainders[k], k))[:left]:
            allocation[k] += 1

    return allocation


def decide(rule, t):
    """
    Apply a (non-district) rule to a tally.

    :param rule: ElectionRule
    :param t: Tally
    :return: Outcome
    """

    if rule.kind == ElectionRule.DISTRICTS:
        raise WrongDecisionPath("District rules are decided with "
                                "decide_districts()")

    if rule.kind == ElectionRule.PLURALITY:
        top = leaders(t.counts)
        if len(top) == 1:
            return Outcome.win(top[0])
        return Outcome.tie(top)

    if rule.kind == ElectionRule.SUPERMAJORITY:
        if t.num_options != 2:
            raise RuleArityError("Supermajority needs exactly two options, "
                                 "got {}".format(t.num_options))
        # Option 0 is the proposal; an empty vote leaves the status quo
        if t.ballots_cast == 0:
            return Outcome.failed()
        if t.counts[0] / t.ballots_cast >= rule.quota - TOLERANCE:
            return Outcome.passed()
        return Outcome.failed()

    return Outcome.seat_vector(allocate_seats(t, rule.entry_threshold,
                                              rule.seats, rule.apportionment))


def decide_districts(rule, per_district):
    """
    Decide a weighted winner-take-all college.

    Each district goes to its plurality winner; a tied district gives its
    weight to nobody and is listed in Outcome.district_ties. An option with a
    strict majority of the total weight wins. Otherwise the result is a tie
    among the top college scorers (widened to the next score tier when the
    leader stands alone without a majority). When every district is tied the
    college is empty and the tie runs among the maximisers of those districts.

    :param rule: ElectionRule of kind districts.
    :param per_district: list of Tally, one per district.
    :return: Outcome
    """

    if rule.kind != ElectionRule.DISTRICTS:
        raise WrongDecisionPath("decide_districts() needs a districts rule")
    if len(per_district) != len(rule.weights):
        raise DistrictMismatch("{} district tallies for {} "
                               "weights".format(len(per_district),
                                                len(rule.weights)))
    num_options = per_district[0].num_options
    if any(t.num_options != num_options for t in per_district):
        raise DistrictMismatch("Districts disagree on the number of options")

    college = [0] * num_options
    district_ties = []
    for d, (t, weight) in enumerate(zip(per_district, rule.weights)):
        top = leaders(t.counts)
        if len(top) == 1:
            college[top[0]] += weight
        else:
            district_ties.append(d)

    total = sum(rule.weights)
    ranked = ranked_options(college)
    if 2 * college[ranked[0]] > total:
        return Outcome.college_winner(ranked[0], college,
                                      district_ties=district_ties)

    if sum(college) == 0 and district_ties:
        # Nobody scored: the tie is among the maximisers of the tied districts
        tied = sorted(set().union(*(leaders(per_district[d].counts)
                                    for d in district_ties)))
        return Outcome.tie(tied, college_votes=college,
                           district_ties=district_ties)

    tied = leaders(college)
    if len(tied) == 1:
        runners_up = [k for k in range(num_options) if k != tied[0]]
        tied += leaders([college[k] if k in runners_up else -1
                         for k in range(num_options)])
    return Outcome.tie(tied, college_votes=college, district_ties=district_ties)
