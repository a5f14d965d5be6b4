# coding: utf-8
# Distributed under the terms of the MIT License.

import math
import os
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor

import pandas as pd
from monty.json import MSONable

from repvote.elect.procedure import ProcedureVariant, decide_any, \
    national_tally
from repvote.elect.rules import ElectionRule, below_threshold, margin
from repvote.errors import RepeatVotingError, UnsupportedVariant, ConfigError
from repvote.simulate.streams import RandomStream, ELECTORATE_ROUND
from repvote.simulate.voters import (ABSTAIN, Phase, sample_electorate,
                                     cast_ballots, tally_choices,
                                     district_tallies)
from repvote.utils.log import get_logger

"""
Monte Carlo comparison of repeat-voting procedures against the ordinary
single-round election.

Each replication draws one electorate, lets it vote in round 1 and in every
later round a variant asks for, runs every configured variant on the same
ballots, and records per-variant metrics. Replications are independent and
keyed by their index, so serial and parallel runs give identical reports.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

THREADS_ENV = "REPEATVOTE_THREADS"

TURNOUT_R1 = "turnout_r1"
TURNOUT_R2 = "turnout_r2"
TURNOUT_R3 = "turnout_r3"
TURNOUT_UNION = "turnout_union"
MATCHED_BENCHMARK = "matched_benchmark"
MARGIN_R1 = "margin_r1"
ROUNDS_HELD = "rounds_held"
DECISION_ERROR = "decision_error"
WASTED_R1 = "wasted_vote_share_r1"
WASTED_R2 = "wasted_vote_share_r2"

BASE_METRICS = (TURNOUT_R1, TURNOUT_R2, TURNOUT_UNION, MATCHED_BENCHMARK,
                MARGIN_R1, ROUNDS_HELD, DECISION_ERROR)


def metric_names(config):
    """
    Metrics reported for a scenario, in output order.

    turnout_r3 appears only when best_of_three is run, wasted-vote shares
    only under a parliamentary rule.
    """

    names = list(BASE_METRICS)
    if any(v.kind == ProcedureVariant.BEST_OF_THREE for v in config.variants):
        names.insert(2, TURNOUT_R3)
    if config.rule.kind == ElectionRule.PARLIAMENTARY:
        names += [WASTED_R1, WASTED_R2]
    return names


def thread_count(default=None):
    """
    Worker count from REPEATVOTE_THREADS. Unset or 0 means default, and a
    default of None means one worker per CPU.
    """

    raw = os.environ.get(THREADS_ENV)
    threads = 0
    if raw is not None and raw.strip():
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(THREADS_ENV, "must be a nonnegative integer, "
                              "got '{}'".format(raw))
        if threads < 0:
            raise ConfigError(THREADS_ENV, "must be a nonnegative integer")
    return threads or default or os.cpu_count() or 1


class ReplicationResult(MSONable):
    """
    What one replication produced: per-variant metrics and outcomes.
    """

    def __init__(self, rep_index, metrics, outcomes, benchmark, errors=None):
        """
        :param rep_index: 0-based replication index.
        :param metrics: dict variant name -> dict metric -> float.
        :param outcomes: dict variant name -> Outcome, or None when the
            variant could not reach a decision.
        :param benchmark: Outcome of the all-sincere, full-turnout
            benchmark, or None if it has no decision.
        :param errors: dict variant name -> error message, for variants that
            failed.
        """
        self.rep_index = rep_index
        self.metrics = metrics
        self.outcomes = outcomes
        self.benchmark = benchmark
        self.errors = errors or {}


class AggregateReport(MSONable):
    """
    Means and standard errors of every metric, per variant.
    """

    def __init__(self, scenario, master_seed, replications, variants,
                 metrics, means, stderrs, failures=None):
        """
        :param scenario: Scenario id.
        :param master_seed: Master seed the report was produced with.
        :param replications: Number of replications R.
        :param variants: Variant names, baseline first.
        :param metrics: Metric names, in output order.
        :param means: dict variant -> dict metric -> mean.
        :param stderrs: dict variant -> dict metric -> standard error.
        :param failures: dict variant -> number of replications in which the
            variant raised instead of deciding.
        """
        self.scenario = scenario
        self.master_seed = master_seed
        self.replications = replications
        self.variants = list(variants)
        if not self.variants:
            raise ValueError("A report needs at least one variant")
        self.metrics = list(metrics)
        self.means = means
        self.stderrs = stderrs
        self.failures = failures or {v: 0 for v in self.variants}

    @property
    def baseline(self):
        return self.variants[0]

    def delta(self, variant, metric):
        """
        Mean of metric under variant minus its mean under the baseline.
        """
        return self.means[variant][metric] - self.means[self.baseline][metric]

    def as_dataframe(self):
        """
        Long-format table, one row per (variant, metric).
        """

        rows = []
        for variant in self.variants:
            for metric in self.metrics:
                rows.append(OrderedDict([
                    ("scenario", self.scenario),
                    ("variant", variant),
                    ("metric", metric),
                    ("mean", self.means[variant][metric]),
                    ("stderr", self.stderrs[variant][metric]),
                    ("delta", self.delta(variant, metric)),
                    ("replications", self.replications),
                    ("master_seed", self.master_seed)]))
        return pd.DataFrame(rows, columns=OUTPUT_COLUMNS)


OUTPUT_COLUMNS = ["scenario", "variant", "metric", "mean", "stderr", "delta",
                  "replications", "master_seed"]


class _Ballots:
    """
    Round-by-round choices of one electorate, each round cast once and then
    shared by every variant that holds it.
    """

    def __init__(self, config, voters, stream):
        self.config = config
        self.voters = voters
        self.stream = stream
        self.choices = {}
        self.choices[1] = cast_ballots(voters, Phase.first(), stream)

    def tally(self, round_index):
        return self._tally_of(self.choices[round_index])

    def _tally_of(self, choices):
        spec = self.config.electorate
        if self.config.rule.is_districts:
            return district_tallies(self.voters, choices, spec.num_options,
                                    spec.districts)
        return tally_choices(choices, spec.num_options)

    def next_round(self, round_index, published):
        # A later round only depends on the round before it, which is the
        # same for every variant
        if round_index not in self.choices:
            phase = Phase.followup(published, self.config.rule, round_index)
            self.choices[round_index] = cast_ballots(self.voters, phase,
                                                     self.stream)
        return self.tally(round_index)

    def benchmark(self):
        """
        Everybody votes sincerely for their favourite.
        """
        return self._tally_of([v.favourite for v in self.voters])

    def turnout(self, rounds):
        n = len(self.voters)
        voted = set()
        for r in rounds:
            voted.update(i for i, c in enumerate(self.choices[r])
                         if c is not ABSTAIN)
        return len(voted) / n


def _national(t):
    if isinstance(t, (list, tuple)):
        return national_tally(t)
    return t


def _wasted_share(t, threshold):
    t = _national(t)
    counts, cast = t.counts, t.ballots_cast
    if cast == 0:
        return 0.0
    wasted = sum(c for c in counts if below_threshold(c, cast, threshold))
    return wasted / cast


def run_replication(config, rep_index):
    """
    One replication of a scenario.

    The electorate is drawn from stream (rep_index, 0) and voter i votes in
    round r from stream (rep_index, r, i), all under config.master_seed.

    :param config: ScenarioConfig
    :param rep_index: 0-based replication index.
    :return: ReplicationResult
    """

    rule = config.rule
    stream = RandomStream(config.master_seed, (rep_index,))
    voters = sample_electorate(config.electorate,
                               stream.spawn(ELECTORATE_ROUND))
    ballots = _Ballots(config, voters, stream)

    try:
        benchmark = decide_any(rule, ballots.benchmark())
    except RepeatVotingError as exc:
        logger.debug("Replication %d: benchmark has no decision (%s)",
                     rep_index, exc)
        benchmark = None

    first = ballots.tally(1)
    first_national = _national(first)
    first_margin = margin(first_national) if first_national.ballots_cast \
        else 0.0

    metrics, outcomes, errors = {}, {}, {}
    for variant in config.all_variants():
        held = [1]

        def next_round(round_index, published):
            held.append(round_index)
            return ballots.next_round(round_index, published)

        outcome = None
        try:
            outcome = variant.run(rule, first, next_round).outcome
        except RepeatVotingError as exc:
            logger.debug("Replication %d: %s failed: %s", rep_index,
                         variant.name, exc)
            errors[variant.name] = "{}: {}".format(type(exc).__name__, exc)

        matched = outcome is not None and benchmark is not None and \
            outcome.same_decision(benchmark)
        m = OrderedDict()
        m[TURNOUT_R1] = ballots.turnout([1])
        m[TURNOUT_R2] = ballots.turnout([2]) if 2 in held else 0.0
        m[TURNOUT_R3] = ballots.turnout([3]) if 3 in held else 0.0
        m[TURNOUT_UNION] = ballots.turnout(held)
        m[MATCHED_BENCHMARK] = 1.0 if matched else 0.0
        m[MARGIN_R1] = first_margin
        m[ROUNDS_HELD] = float(len(held))
        m[DECISION_ERROR] = 0.0 if outcome is not None else 1.0
        if rule.kind == ElectionRule.PARLIAMENTARY:
            m[WASTED_R1] = _wasted_share(first, rule.entry_threshold)
            m[WASTED_R2] = _wasted_share(ballots.tally(2),
                                         rule.entry_threshold) \
                if 2 in held else 0.0

        metrics[variant.name] = m
        outcomes[variant.name] = outcome

    return ReplicationResult(rep_index, metrics, outcomes, benchmark, errors)


def _run_one(args):
    config, rep_index = args
    return run_replication(config, rep_index)


def aggregate(config, results):
    """
    Reduce replications to an AggregateReport.

    Sums are taken with math.fsum in replication-index order, so the report
    does not depend on how replications were scheduled.

    :param config: ScenarioConfig
    :param results: Iterable of ReplicationResult.
    :return: AggregateReport
    """

    results = sorted(results, key=lambda r: r.rep_index)
    n = len(results)
    if n == 0:
        raise ValueError("Nothing to aggregate")

    names = metric_names(config)
    means, stderrs, failures = {}, {}, {}
    for variant in config.variant_names:
        means[variant], stderrs[variant] = OrderedDict(), OrderedDict()
        failures[variant] = sum(1 for r in results if variant in r.errors)
        for metric in names:
            values = [r.metrics[variant][metric] for r in results]
            mean = math.fsum(values) / n
            if n > 1:
                var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
                stderr = math.sqrt(var / n)
            else:
                stderr = 0.0
            means[variant][metric] = mean
            stderrs[variant][metric] = stderr

    return AggregateReport(config.name, config.master_seed, n,
                           config.variant_names, names, means, stderrs,
                           failures)


class MonteCarloHarness:
    """
    Runs every replication of a scenario, serially or over a process pool.
    """

    def __init__(self, config, threads=None):
        """
        :param config: ScenarioConfig
        :param threads: Number of worker processes. Default: from
            REPEATVOTE_THREADS, else one per CPU.
        """

        self.config = config
        self.threads = threads if threads is not None else thread_count()
        if self.threads < 1:
            raise ValueError("threads must be a positive integer")

    def run_replication(self, rep_index):
        return run_replication(self.config, rep_index)

    def replications(self):
        """
        ReplicationResult for every replication, in index order.
        """

        reps = self.config.replications
        if self.threads == 1 or reps == 1:
            return [run_replication(self.config, i) for i in range(reps)]

        workers = min(self.threads, reps)
        chunksize = max(1, reps // (workers * 4))
        logger.debug("Running %d replications on %d workers", reps, workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_run_one,
                                     ((self.config, i) for i in range(reps)),
                                     chunksize=chunksize))

    def run_scenario(self):
        """
        :return: AggregateReport
        """

        config = self.config
        logger.info("Scenario '%s': %d replication(s), variants %s, seed %d",
                    config.name, config.replications,
                    ", ".join(config.variant_names), config.master_seed)
        report = aggregate(config, self.replications())
        for variant, count in report.failures.items():
            if count:
                logger.warning("Scenario '%s': %s failed to decide in %d of "
                               "%d replications", config.name, variant, count,
                               report.replications)
        return report

    def compare_procedures(self, report=None):
        """
        Side-by-side comparison: one row per metric, one column per variant
        plus a delta[variant] column against the baseline for every other
        variant.

        :param report: Optional AggregateReport already computed for this
            config.
        :return: pandas.DataFrame
        """

        report = report or self.run_scenario()
        if len(report.variants) < 2:
            raise UnsupportedVariant("A comparison needs at least one variant "
                                     "besides single_round")

        table = pd.DataFrame(
            {v: [report.means[v][m] for m in report.metrics]
             for v in report.variants},
            index=pd.Index(report.metrics, name="metric"),
            columns=report.variants)
        for variant in report.variants[1:]:
            table["delta[{}]".format(variant)] = \
                table[variant] - table[report.baseline]
        return table

    def sweep(self):
        """
        Run every point of the config's sweep grid.

        :return: list of (label, AggregateReport)
        """

        results = []
        for label, point in self.config.grid_points():
            harness = MonteCarloHarness(point, threads=self.threads)
            results.append((label, harness.run_scenario()))
        return results


def run_scenario(config, threads=None):
    """
    Run all replications of config and aggregate them.
    """
    return MonteCarloHarness(config, threads).run_scenario()


def compare_procedures(config, threads=None):
    """
    Run config and tabulate each variant against the single-round baseline.
    """
    return MonteCarloHarness(config, threads).compare_procedures()
