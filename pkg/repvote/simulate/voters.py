# coding: utf-8
# Distributed under the terms of the MIT License.

import re

import numpy as np
from monty.json import MSONable

from repvote.elect.rules import ElectionRule, below_threshold, tally_ballots, \
    TOLERANCE
from repvote.errors import BadSpec
from repvote.utils.log import get_logger

"""
Agent-based electorate: preference generation, first-round turnout and
choice, and second-round decisions that react to the published first round.

Turnout follows a linear threshold rule: a voter turns out when the stake
(the utility gap between the top two options, scaled up by closeness in
later rounds) covers the participation cost. Later-round choices may then
move away from the sincere favourite by, in this order, threshold-viability
correction, bandwagon towards the published leader, or underdog support for
the published runner-up.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

ABSTAIN = None


class Distribution(MSONable):
    """
    A scalar distribution used for costs and behavioural coefficients.

    Text forms: "0.3" (fixed), "uniform(lo, hi)", "beta(a, b)" and
    "bimodal(lo, hi, p_hi)" (lo or hi, hi with probability p_hi).
    """

    FIXED = "fixed"
    UNIFORM = "uniform"
    BETA = "beta"
    BIMODAL = "bimodal"
    ARITY = {FIXED: 1, UNIFORM: 2, BETA: 2, BIMODAL: 3}

    def __init__(self, kind, params):
        """
        :param kind: One of "fixed", "uniform", "beta", "bimodal".
        :param params: Sequence of floats, as many as the kind takes.
        """

        if kind not in self.ARITY:
            raise BadSpec("Unknown distribution: {}".format(kind))
        params = tuple(float(p) for p in params)
        if len(params) != self.ARITY[kind]:
            raise BadSpec("{} takes {} parameter(s), got "
                          "{}".format(kind, self.ARITY[kind], len(params)))
        if not all(np.isfinite(params)):
            raise BadSpec("Distribution parameters must be finite")
        if kind == self.UNIFORM and params[0] > params[1]:
            raise BadSpec("uniform(lo, hi) needs lo <= hi")
        if kind == self.BETA and min(params) <= 0:
            raise BadSpec("beta(a, b) needs a > 0 and b > 0")
        if kind == self.BIMODAL:
            if params[0] > params[1]:
                raise BadSpec("bimodal(lo, hi, p_hi) needs lo <= hi")
            if not 0.0 <= params[2] <= 1.0:
                raise BadSpec("bimodal(lo, hi, p_hi) needs p_hi in [0, 1]")

        self.kind = kind
        self.params = params

    @classmethod
    def fixed(cls, value):
        return cls(cls.FIXED, (value,))

    @classmethod
    def from_string(cls, string):
        """
        Parse a distribution from its text form.
        """

        string = string.strip()
        match = re.match(r"^([a-z]+)\s*\((.*)\)$", string)
        try:
            if match is None:
                return cls.fixed(float(string))
            params = [float(p) for p in match.group(2).split(",")]
        except ValueError:
            raise BadSpec("Cannot read a distribution from "
                          "'{}'".format(string))
        return cls(match.group(1), params)

    @property
    def support(self):
        """
        (lowest, highest) value the distribution can produce.
        """
        if self.kind == self.FIXED:
            return self.params[0], self.params[0]
        if self.kind == self.BETA:
            return 0.0, 1.0
        return self.params[0], self.params[1]

    def sample(self, generator, size):
        """
        Draw size values. A fixed distribution draws nothing from generator.
        """

        if self.kind == self.FIXED:
            return np.full(size, self.params[0])
        if self.kind == self.UNIFORM:
            return generator.uniform(self.params[0], self.params[1], size)
        if self.kind == self.BETA:
            return generator.beta(self.params[0], self.params[1], size)
        lo, hi, p_hi = self.params
        return np.where(generator.random(size) < p_hi, hi, lo)

    def __str__(self):
        if self.kind == self.FIXED:
            return repr(self.params[0])
        return "{}({})".format(self.kind,
                               ", ".join(repr(p) for p in self.params))

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (self.kind, self.params) == (other.kind, other.params)

    def __hash__(self):
        return hash((self.kind, self.params))

    def __repr__(self):
        return "Distribution({})".format(self)


class Voter:
    """
    One agent of the electorate.

    intensity (top utility minus second utility) and the sincere favourite
    are derived from the utilities when the voter is built.
    """

    __slots__ = ("utilities", "cost_r1", "cost_r2", "bandwagon", "underdog",
                 "viability_strategic", "closeness", "cost_noise", "district",
                 "intensity", "favourite")

    def __init__(self, utilities, cost_r1=0.0, cost_r2=0.0, bandwagon=0.0,
                 underdog=0.0, viability_strategic=False, closeness=0.0,
                 cost_noise=0.0, district=0):
        """
        :param utilities: Utility of each option, in [0, 1].
        :param cost_r1: Participation cost in round 1.
        :param cost_r2: Participation cost in later rounds.
        :param bandwagon: Probability of switching to the published leader.
        :param underdog: Probability of backing the published runner-up;
            bandwagon + underdog <= 1.
        :param viability_strategic: Abandon a favourite that missed the
            entry threshold.
        :param closeness: Closeness sensitivity (lambda) >= 0.
        :param cost_noise: Half-width of uniform noise added to the cost at
            decision time.
        :param district: District the voter belongs to.
        """

        utilities = tuple(float(u) for u in utilities)
        if len(utilities) < 2:
            raise BadSpec("A voter needs utilities over at least two options")
        if min(cost_r1, cost_r2, closeness, cost_noise) < 0:
            raise BadSpec("Costs, closeness and cost noise must be "
                          "nonnegative")
        if not (0.0 <= bandwagon <= 1.0 and 0.0 <= underdog <= 1.0 and
                bandwagon + underdog <= 1.0 + TOLERANCE):
            raise BadSpec("Need 0 <= bandwagon, underdog and bandwagon + "
                          "underdog <= 1")

        self.utilities = utilities
        self.cost_r1 = float(cost_r1)
        self.cost_r2 = float(cost_r2)
        self.bandwagon = float(bandwagon)
        self.underdog = float(underdog)
        self.viability_strategic = bool(viability_strategic)
        self.closeness = float(closeness)
        self.cost_noise = float(cost_noise)
        self.district = int(district)

        ranked = sorted(range(len(utilities)),
                        key=lambda k: (-utilities[k], k))
        self.favourite = ranked[0]
        self.intensity = utilities[ranked[0]] - utilities[ranked[1]]

    def is_stochastic(self, round_index):
        """
        Whether the decision in round round_index consumes random draws.
        """
        if self.cost_noise > 0:
            return True
        return round_index > 1 and (self.bandwagon > 0 or self.underdog > 0)

    def _as_tuple(self):
        return tuple(getattr(self, s) for s in self.__slots__)

    def __eq__(self, other):
        if not isinstance(other, Voter):
            return NotImplemented
        return self._as_tuple() == other._as_tuple()

    def __hash__(self):
        return hash(self._as_tuple())

    def __repr__(self):
        return "Voter(utilities={}, intensity={:.3f}, cost_r1={:.3f}, " \
               "cost_r2={:.3f})".format(list(self.utilities), self.intensity,
                                        self.cost_r1, self.cost_r2)


class ElectorateSpec(MSONable):
    """
    How to generate an electorate.
    """

    UNIFORM = "uniform"
    POLARIZED = "polarized"
    SPATIAL = "spatial"
    PREFERENCE_MODELS = (UNIFORM, POLARIZED, SPATIAL)

    def __init__(self, num_voters, num_options, preference_model=UNIFORM,
                 mixing=0.5, camp_share=0.5, option_positions=None,
                 position=None, cost_r1=None, cost_r2=None, cost_noise=0.0,
                 bandwagon=None, underdog=None, closeness=None,
                 viability_share=0.0, compulsory=False, districts=1):
        """
        :param num_voters: Electorate size N >= 1.
        :param num_options: Number of options K >= 2.
        :param preference_model: "uniform" (iid utilities), "polarized" (two
            camps with opposite rankings blended with noise) or "spatial"
            (utility = 1 - distance on [0, 1]).
        :param mixing: Polarized only: weight of the noise component.
        :param camp_share: Polarized only: share of voters in camp 0, which
            ranks options 0, 1, ..., K-1.
        :param option_positions: Spatial only: position of each option on
            [0, 1]. Defaults to evenly spaced.
        :param position: Spatial only: Distribution of voter positions.
            Default uniform(0, 1).
        :param cost_r1: Distribution of round 1 costs. Default 0.
        :param cost_r2: Distribution of later-round costs. Default None,
            meaning each voter's round 1 cost is reused.
        :param cost_noise: Half-width of decision-time cost noise. Default 0.
        :param bandwagon: Distribution of bandwagon coefficients. Default 0.
        :param underdog: Distribution of underdog coefficients. Default 0.
        :param closeness: Distribution of closeness sensitivity. Default 0.
        :param viability_share: Probability that a voter is
            viability-strategic. Default 0.
        :param compulsory: If True, every cost is 0 and nobody abstains.
        :param districts: Number of equal-sized, contiguous districts.
        """

        zero = Distribution.fixed(0.0)
        self.num_voters = int(num_voters)
        self.num_options = int(num_options)
        self.preference_model = preference_model
        self.mixing = float(mixing)
        self.camp_share = float(camp_share)
        self.option_positions = None if option_positions is None else \
            tuple(float(p) for p in option_positions)
        self.position = position or Distribution(Distribution.UNIFORM,
                                                 (0.0, 1.0))
        self.cost_r1 = cost_r1 or zero
        self.cost_r2 = cost_r2
        self.cost_noise = float(cost_noise)
        self.bandwagon = bandwagon or zero
        self.underdog = underdog or zero
        self.closeness = closeness or zero
        self.viability_share = float(viability_share)
        self.compulsory = bool(compulsory)
        self.districts = int(districts)

        self.validate()

    def validate(self):
        if self.num_voters < 1:
            raise BadSpec("The electorate needs at least one voter",
                          "num_voters")
        if self.num_options < 2:
            raise BadSpec("At least two options are needed", "num_options")
        if self.preference_model not in self.PREFERENCE_MODELS:
            raise BadSpec("Unknown preference model: "
                          "{}".format(self.preference_model),
                          "preference_model")
        if not 0.0 <= self.mixing <= 1.0:
            raise BadSpec("mixing must lie in [0, 1]", "mixing")
        if not 0.0 <= self.camp_share <= 1.0:
            raise BadSpec("camp_share must lie in [0, 1]", "camp_share")
        if self.option_positions is not None:
            if len(self.option_positions) != self.num_options:
                raise BadSpec("option_positions needs one position per "
                              "option", "option_positions")
            if not all(0.0 <= p <= 1.0 for p in self.option_positions):
                raise BadSpec("option_positions must lie in [0, 1]",
                              "option_positions")
        lo, hi = self.position.support
        if lo < 0.0 or hi > 1.0:
            raise BadSpec("Voter positions must lie in [0, 1]", "position")
        for name in ("cost_r1", "cost_r2", "closeness"):
            dist = getattr(self, name)
            if dist is not None and dist.support[0] < 0.0:
                raise BadSpec("{} must be nonnegative".format(name), name)
        for name in ("bandwagon", "underdog"):
            lo, hi = getattr(self, name).support
            if lo < 0.0 or hi > 1.0:
                raise BadSpec("{} must lie in [0, 1]".format(name), name)
        if self.bandwagon.support[1] + self.underdog.support[1] > \
                1.0 + TOLERANCE:
            raise BadSpec("bandwagon + underdog must not exceed 1",
                          "underdog")
        if self.cost_noise < 0.0:
            raise BadSpec("cost_noise must be nonnegative", "cost_noise")
        if not 0.0 <= self.viability_share <= 1.0:
            raise BadSpec("viability_share must lie in [0, 1]",
                          "viability_share")
        if not 1 <= self.districts <= self.num_voters:
            raise BadSpec("districts must lie in [1, num_voters]",
                          "districts")

    @property
    def positions(self):
        """
        Option positions, evenly spaced on [0, 1] unless given.
        """
        if self.option_positions is not None:
            return self.option_positions
        return tuple(np.linspace(0.0, 1.0, self.num_options).tolist())

    def district_of(self, index):
        return index * self.districts // self.num_voters


def _sample_utilities(spec, gen):
    n, k = spec.num_voters, spec.num_options

    if spec.preference_model == ElectorateSpec.UNIFORM:
        return gen.random((n, k))

    if spec.preference_model == ElectorateSpec.POLARIZED:
        camp_zero = gen.random(n) < spec.camp_share
        noise = gen.random((n, k))
        profile = 1.0 - np.arange(k) / (k - 1)
        camps = np.where(camp_zero[:, None], profile[None, :],
                         profile[None, ::-1])
        return (1.0 - spec.mixing) * camps + spec.mixing * noise

    x = spec.position.sample(gen, n)
    return 1.0 - np.abs(x[:, None] - np.asarray(spec.positions)[None, :])


def sample_electorate(spec, stream):
    """
    Draw an electorate.

    Draw order: utilities, round 1 costs, later-round costs, bandwagon,
    underdog, closeness, viability flags. The same stream always gives the
    same electorate.

    :param spec: ElectorateSpec
    :param stream: RandomStream dedicated to this electorate.
    :return: list of Voter
    """

    spec.validate()
    gen = stream.generator
    n = spec.num_voters

    utilities = _sample_utilities(spec, gen)
    cost_r1 = spec.cost_r1.sample(gen, n)
    if spec.cost_r2 is None:
        cost_r2 = cost_r1.copy()
    else:
        cost_r2 = spec.cost_r2.sample(gen, n)
    bandwagon = spec.bandwagon.sample(gen, n)
    underdog = spec.underdog.sample(gen, n)
    closeness = spec.closeness.sample(gen, n)
    viability = gen.random(n) < spec.viability_share

    cost_noise = spec.cost_noise
    if spec.compulsory:
        cost_r1 = np.zeros(n)
        cost_r2 = np.zeros(n)
        cost_noise = 0.0

    # Sampled pairs may overshoot b + u <= 1 by rounding only
    scale = np.maximum(bandwagon + underdog, 1.0)
    bandwagon = bandwagon / scale
    underdog = underdog / scale

    voters = [Voter(utilities=u, cost_r1=c1, cost_r2=c2, bandwagon=b,
                    underdog=d, viability_strategic=s, closeness=lam,
                    cost_noise=cost_noise, district=spec.district_of(i))
              for i, (u, c1, c2, b, d, lam, s) in
              enumerate(zip(utilities.tolist(), cost_r1.tolist(),
                            cost_r2.tolist(), bandwagon.tolist(),
                            underdog.tolist(), closeness.tolist(),
                            viability.tolist()))]

    logger.debug("Sampled %d voters over %d options (%s preferences)", n,
                 spec.num_options, spec.preference_model)
    return voters


def _cost(voter, base, stream):
    if voter.cost_noise > 0:
        base += stream.generator.uniform(-voter.cost_noise, voter.cost_noise)
        base = max(base, 0.0)
    return base


def decide_round1(voter, stream=None):
    """
    First-round decision: vote for the favourite iff intensity covers the
    round 1 cost.

    :param voter: Voter
    :param stream: RandomStream of this voter for this round; only consulted
        when the voter has decision-time cost noise.
    :return: option index, or ABSTAIN
    """

    if voter.intensity >= _cost(voter, voter.cost_r1, stream):
        return voter.favourite
    return ABSTAIN


def decide_round2(voter, published, rule, stream=None):
    """
    Decision in a round that follows a published round.

    The stake is intensity * (1 + closeness * (1 - published margin)); the
    voter participates iff it covers the round 2 cost. A participant starts
    from the favourite, then
      (a) if viability-strategic under a parliamentary rule and the
          favourite's published share is below the entry threshold, moves to
          the highest-utility option at or above it (if any);
      (b) with probability bandwagon moves to the published leader, else with
          probability underdog / (1 - bandwagon) to the published runner-up.
    Draws, when taken: cost noise, then the bandwagon draw, then the underdog
    draw. Both switching draws are always taken when either coefficient is
    positive. Nobody switches towards a leader of a round in which nobody
    voted.

    :param voter: Voter
    :param published: PublishedRound of the previous round.
    :param rule: ElectionRule in force.
    :param stream: RandomStream of this voter for this round.
    :return: option index, or ABSTAIN
    """

    cost = _cost(voter, voter.cost_r2, stream)

    bandwagon_draw = underdog_draw = 1.0
    if voter.bandwagon > 0 or voter.underdog > 0:
        bandwagon_draw, underdog_draw = stream.generator.random(2)

    stake = voter.intensity * (1.0 + voter.closeness * (1.0 - published.margin))
    if stake < cost:
        return ABSTAIN

    choice = voter.favourite
    counts = published.tally.counts
    cast = published.tally.ballots_cast
    if cast == 0:
        return choice

    if voter.viability_strategic and rule.kind == ElectionRule.PARLIAMENTARY:
        threshold = rule.entry_threshold
        if below_threshold(counts[choice], cast, threshold):
            viable = [k for k in range(len(counts))
                      if not below_threshold(counts[k], cast, threshold)]
            if viable:
                choice = max(viable,
                             key=lambda k: (voter.utilities[k], -k))

    if bandwagon_draw < voter.bandwagon:
        choice = published.leader
    elif voter.bandwagon < 1.0 and \
            underdog_draw < voter.underdog / (1.0 - voter.bandwagon):
        choice = published.runner_up

    return choice


class Phase:
    """
    Which round the electorate is voting in, and what it has been shown.
    """

    def __init__(self, round_index=1, published=None, rule=None):
        """
        :param round_index: 1-based round number.
        :param published: PublishedRound of the previous round (later
            rounds only).
        :param rule: ElectionRule in force (later rounds only).
        """
        if round_index > 1 and (published is None or rule is None):
            raise ValueError("Rounds after the first need the published "
                             "previous round and the rule")
        self.round_index = round_index
        self.published = published
        self.rule = rule

    @classmethod
    def first(cls):
        return cls(1)

    @classmethod
    def followup(cls, published, rule, round_index=2):
        return cls(round_index, published, rule)


def cast_ballots(voters, phase, stream):
    """
    Every voter's decision in one round, in voter index order.

    Voter i draws from stream.spawn(phase.round_index, i), so the result does
    not depend on evaluation order.

    :param voters: list of Voter
    :param phase: Phase
    :param stream: RandomStream of the replication.
    :return: list with an option index or ABSTAIN per voter
    """

    choices = []
    for i, voter in enumerate(voters):
        sub = None
        if voter.is_stochastic(phase.round_index):
            sub = stream.spawn(phase.round_index, i)
        if phase.round_index == 1:
            choices.append(decide_round1(voter, sub))
        else:
            choices.append(decide_round2(voter, phase.published, phase.rule,
                                         sub))
    return choices


def tally_choices(choices, num_options, eligible=None):
    """
    Tally of a list of choices with ABSTAIN entries.
    """
    eligible = len(choices) if eligible is None else eligible
    return tally_ballots([c for c in choices if c is not ABSTAIN],
                         num_options, eligible)


def district_tallies(voters, choices, num_options, num_districts):
    """
    One tally per district from the per-voter choices.
    """

    per_district = [[] for _ in range(num_districts)]
    for voter, choice in zip(voters, choices):
        per_district[voter.district].append(choice)
    return [tally_choices(c, num_options) for c in per_district]


def run_electorate_round(voters, phase, stream):
    """
    Tally of one round; eligible is the whole electorate.

    :param voters: list of Voter with a common number of options.
    :param phase: Phase
    :param stream: RandomStream of the replication.
    :return: Tally
    """

    num_options = len(voters[0].utilities)
    if any(len(v.utilities) != num_options for v in voters):
        raise BadSpec("Voters disagree on the number of options")
    return tally_choices(cast_ballots(voters, phase, stream), num_options)
