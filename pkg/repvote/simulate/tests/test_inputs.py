# coding: utf-8
# Distributed under the terms of the MIT License.

import os
import shutil
import tempfile
import unittest

from repvote.elect.procedure import ProcedureVariant, EXACT_SCALE
from repvote.elect.rules import ElectionRule
from repvote.errors import ConfigError, IoError
from repvote.simulate.inputs import ScenarioConfig, parse_config
from repvote.simulate.voters import Distribution

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

cookbook_dir = os.path.join(os.path.dirname(__file__), "..", "..", "..",
                            "cookbook")

MINIMAL = """
$scenario
   schema_version = 1
   replications = 10
   master_seed = 7
$end

$electorate
   voters = 100
   options = 3
$end

$rule
   kind = plurality
$end

$variants
   two_round_sum
$end
"""


def with_section(section, body, base=MINIMAL):
    """
    Replace the body of one section of a config text.
    """
    head, rest = base.split("${}\n".format(section), 1)
    _, tail = rest.split("$end", 1)
    return "{}${}\n{}\n$end{}".format(head, section, body, tail)


class ReadConfigTest(unittest.TestCase):

    def test_minimal(self):
        config = ScenarioConfig.from_string(MINIMAL)
        self.assertEqual(config.name, "scenario")
        self.assertEqual(config.replications, 10)
        self.assertEqual(config.master_seed, 7)
        self.assertEqual(config.rule, ElectionRule.plurality())
        self.assertEqual(config.electorate.num_voters, 100)
        self.assertEqual(config.electorate.num_options, 3)
        self.assertEqual(config.electorate.preference_model, "uniform")
        self.assertEqual(config.electorate.cost_r1, Distribution.fixed(0.0))
        self.assertIsNone(config.electorate.cost_r2)
        self.assertFalse(config.electorate.compulsory)
        self.assertEqual(config.variant_names,
                         ["single_round", "two_round_sum"])
        self.assertEqual(config.grid_points(), [("", config)])

    def test_full_electorate(self):
        config = ScenarioConfig.from_string(with_section("electorate", """
   voters = 50
   options = 3   # three parties
   preference_model = spatial
   option_positions = 0.1, 0.5, 0.9
   position = beta(2, 2)
   cost_r1 = uniform(0, 0.3)
   cost_r2 = 0.1
   cost_noise = 0.05
   bandwagon = uniform(0, 0.2)
   underdog = 0.1
   closeness = 2.0
   viability_share = 0.5
   compulsory = no"""))
        spec = config.electorate
        self.assertEqual(spec.option_positions, (0.1, 0.5, 0.9))
        self.assertEqual(spec.position, Distribution("beta", (2, 2)))
        self.assertEqual(spec.cost_r2, Distribution.fixed(0.1))
        self.assertEqual(spec.cost_noise, 0.05)
        self.assertEqual(spec.viability_share, 0.5)
        self.assertFalse(spec.compulsory)

    def test_rules(self):
        config = ScenarioConfig.from_string(with_section(
            "rule", "kind = parliamentary\nentry_threshold = 0.05\n"
                    "seats = 120\napportionment = largest_remainder"))
        self.assertEqual(config.rule, ElectionRule.parliamentary(
            0.05, 120, "largest_remainder"))

        text = with_section("electorate", "voters = 100\noptions = 2")
        config = ScenarioConfig.from_string(
            with_section("rule", "kind = supermajority\nquota = 0.6", text))
        self.assertEqual(config.rule, ElectionRule.supermajority(0.6))

        config = ScenarioConfig.from_string(
            with_section("rule", "kind = districts\nweights = 3, 2, 1"))
        self.assertEqual(config.rule.weights, (3, 2, 1))
        self.assertEqual(config.electorate.districts, 3)

    def test_variants(self):
        config = ScenarioConfig.from_string(with_section("variants", """
   two_round_sum
   conditional_second_round threshold=0.05
   weighted_rounds scale=1000
   weighted_rounds scale=exact
   weighted_rounds"""))
        self.assertEqual(config.variants[1], ProcedureVariant(
            ProcedureVariant.CONDITIONAL, margin_threshold=0.05))
        self.assertEqual(config.variants[2].scale, 1000)
        self.assertEqual(config.variants[3].scale, EXACT_SCALE)
        self.assertEqual(config.variant_names, [
            "single_round", "two_round_sum",
            "conditional_second_round(0.05)", "weighted_rounds(1000)",
            "weighted_rounds(exact)", "weighted_rounds"])

    def test_duplicate_variants_run_once(self):
        config = ScenarioConfig.from_string(with_section(
            "variants", "two_round_sum\nsingle_round\ntwo_round_sum"))
        self.assertEqual(config.variant_names,
                         ["single_round", "two_round_sum"])

    def test_sweep(self):
        config = ScenarioConfig.from_string(MINIMAL + """
$sweep
   electorate.closeness = 0.0 | 2.0
   scenario.replications = 5 | 20
$end
""")
        points = config.grid_points()
        self.assertEqual([label for label, _ in points], [
            "electorate.closeness=0.0,scenario.replications=5",
            "electorate.closeness=0.0,scenario.replications=20",
            "electorate.closeness=2.0,scenario.replications=5",
            "electorate.closeness=2.0,scenario.replications=20"])
        label, point = points[3]
        self.assertEqual(point.electorate.closeness, Distribution.fixed(2.0))
        self.assertEqual(point.replications, 20)
        self.assertEqual(point.name, "scenario[{}]".format(label))
        self.assertFalse(point.sweep)

    def test_overrides(self):
        config = ScenarioConfig.from_string(MINIMAL)
        other = config.with_overrides(master_seed=99, replications=3)
        self.assertEqual(other.master_seed, 99)
        self.assertEqual(other.replications, 3)
        self.assertEqual(other.electorate.num_voters, 100)
        self.assertEqual(config.master_seed, 7)
        self.assertEqual(config.with_overrides(), config)

    def test_write_and_read_back(self):
        config = ScenarioConfig.from_file(
            os.path.join(cookbook_dir, "closeness_mobilization.cfg"))
        self.assertEqual(ScenarioConfig.from_string(str(config)), config)

        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, "copy.cfg")
            config.write_file(path)
            self.assertEqual(parse_config(path), config)
        finally:
            shutil.rmtree(tmp)


class ConfigErrorTest(unittest.TestCase):

    def assertConfigError(self, text, field, line=None, words=None):
        with self.assertRaises(ConfigError) as ctx:
            ScenarioConfig.from_string(text)
        self.assertEqual(ctx.exception.field, field)
        if line is not None:
            self.assertEqual(ctx.exception.line, line)
            self.assertTrue(str(ctx.exception).startswith(
                "line {}: {}".format(line, field)))
        if words is not None:
            self.assertIn(words, str(ctx.exception))

    def test_quota(self):
        text = with_section("electorate", "voters = 100\noptions = 2")
        for quota in ("0.5", "0.4", "1.2"):
            self.assertConfigError(
                with_section("rule", "kind = supermajority\nquota = " + quota,
                             text),
                "rule.quota", words="quota must exceed 1/2")

    def test_supermajority_needs_two_options(self):
        self.assertConfigError(
            with_section("rule", "kind = supermajority\nquota = 0.6"),
            "electorate.options", words="two options")

    def test_best_of_three_needs_two_options(self):
        self.assertConfigError(with_section("variants", "best_of_three"),
                               "variants[0]", words="two-outcome")

    def test_unsupported_combinations(self):
        text = with_section("rule", "kind = parliamentary\nseats = 10")
        self.assertConfigError(
            with_section("variants", "conditional_second_round threshold=0.1",
                         text), "variants[0]")
        text = with_section("rule", "kind = districts\nweights = 1, 1")
        self.assertConfigError(with_section("variants", "weighted_rounds",
                                            text), "variants[0]")

    def test_unknown_variant(self):
        self.assertConfigError(with_section("variants",
                                            "two_round_sum\nrunoff"),
                               "variants[1]", words="unknown variant")
        self.assertConfigError(with_section("variants",
                                            "conditional_second_round"),
                               "variants[0]", words="threshold")
        self.assertConfigError(with_section("variants",
                                            "two_round_sum scale=3"),
                               "variants[0]")
        self.assertConfigError(with_section("variants", ""), "variants")

    def test_missing_field(self):
        self.assertConfigError(with_section("electorate", "options = 2"),
                               "electorate.voters")
        self.assertConfigError(
            with_section("scenario", "schema_version = 1\nreplications = 3"),
            "scenario.master_seed", words="missing required field")
        self.assertConfigError(MINIMAL.replace("$rule\n   kind = plurality\n"
                                               "$end", ""), "rule")

    def test_line_numbers(self):
        text = MINIMAL.replace("options = 3", "options = three")
        self.assertConfigError(text, "electorate.options", line=10)
        text = MINIMAL.replace("options = 3", "options = 3\n   colour = red")
        self.assertConfigError(text, "electorate.colour", line=11,
                               words="unknown key")
        text = MINIMAL.replace("schema_version = 1", "schema_version = 2")
        self.assertConfigError(text, "scenario.schema_version", line=3)

    def test_layout(self):
        self.assertConfigError(MINIMAL + "stray = 1\n", "<top level>")
        self.assertConfigError(MINIMAL + "$rule\n$end\n", "rule",
                               words="duplicate section")
        self.assertConfigError(MINIMAL + "$ballots\n$end\n", "ballots",
                               words="unknown section")
        self.assertConfigError(MINIMAL + "$sweep\n", "sweep",
                               words="not closed")
        self.assertConfigError(
            MINIMAL.replace("voters = 100", "voters = 100\n   voters = 5"),
            "electorate.voters", words="duplicate key")

    def test_invalid_values(self):
        self.assertConfigError(
            MINIMAL.replace("replications = 10", "replications = 0"),
            "scenario.replications")
        self.assertConfigError(
            MINIMAL.replace("master_seed = 7", "master_seed = -1"),
            "scenario.master_seed")
        self.assertConfigError(
            MINIMAL.replace("options = 3", "options = 3\n   cost_r1 = "
                            "normal(0, 1)"), "electorate.cost_r1")
        self.assertConfigError(
            MINIMAL.replace("options = 3", "options = 3\n   bandwagon = 0.7\n"
                            "   underdog = 0.6"), "electorate.underdog", 12,
            "bandwagon + underdog")
        self.assertConfigError(
            MINIMAL.replace("options = 3", "options = 3\n   "
                            "option_positions = 0.1, 0.9"),
            "electorate.option_positions", 11)
        self.assertConfigError(
            MINIMAL.replace("options = 3", "options = 3\n   mixing = 1.5"),
            "electorate.mixing", 11)
        self.assertConfigError(
            with_section("rule", "kind = districts\nweights = 1, 1, 1",
                         MINIMAL.replace("voters = 100", "voters = 2")),
            "rule.weights")

    def test_bad_sweep(self):
        self.assertConfigError(MINIMAL + "$sweep\n   closeness = 1 | 2\n$end\n",
                               "sweep.closeness")
        # Every grid point is validated, not only the base config
        with self.assertRaises(ConfigError):
            ScenarioConfig.from_string(
                MINIMAL + "$sweep\n   scenario.replications = 5 | 0\n$end\n")

    def test_missing_file(self):
        self.assertRaises(IoError, parse_config,
                          os.path.join(cookbook_dir, "no_such.cfg"))


@unittest.skipIf(not os.path.isdir(cookbook_dir), "cookbook not found")
class CookbookTest(unittest.TestCase):

    def test_all_parse(self):
        names = sorted(f for f in os.listdir(cookbook_dir)
                       if f.endswith(".cfg"))
        self.assertGreaterEqual(len(names), 7)
        for name in names:
            config = parse_config(os.path.join(cookbook_dir, name))
            self.assertEqual(config.name, name[:-len(".cfg")])

    def test_electoral_college(self):
        config = parse_config(os.path.join(cookbook_dir,
                                           "electoral_college.cfg"))
        self.assertTrue(config.rule.is_districts)
        self.assertEqual(config.electorate.districts, 10)


if __name__ == "__main__":
    unittest.main()
