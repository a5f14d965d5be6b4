# coding: utf-8
# Distributed under the terms of the MIT License.

import itertools
import re
from collections import OrderedDict

from monty.io import zopen
from monty.json import MSONable

from repvote.elect.procedure import ProcedureVariant, EXACT_SCALE, \
    DEFAULT_PSEUDO_COUNT_SCALE
from repvote.elect.rules import ElectionRule, APPORTIONMENT_METHODS
from repvote.errors import ConfigError, RepeatVotingError, IoError, BadSpec
from repvote.simulate.streams import MAX_SEED
from repvote.simulate.voters import ElectorateSpec, Distribution
from repvote.utils.log import get_logger

"""
Classes for reading/writing scenario config files.

A config is a set of sections, each opened by "$name" and closed by "$end":

    $scenario
       schema_version = 1
       name = closeness_mobilization
       replications = 200
       master_seed = 42
    $end

    $electorate
       voters = 1000
       options = 2
       cost_r1 = bimodal(0.05, 0.6, 0.5)
       closeness = 4.0
    $end

    $rule
       kind = plurality
    $end

    $variants
       two_round_sum
       conditional_second_round threshold=0.1
    $end

    $sweep
       electorate.closeness = 0.0 | 2.0 | 4.0
    $end

"#" starts a comment. $scenario, $electorate, $rule and $variants are
required; $sweep is optional and lists "section.key = v1 | v2 | ..." grids.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

SCHEMA_VERSION = 1

SECTIONS = ("scenario", "electorate", "rule", "variants", "sweep")
REQUIRED_SECTIONS = ("scenario", "electorate", "rule", "variants")

SCENARIO_KEYS = ("schema_version", "name", "replications", "master_seed")

# key in the file -> ElectorateSpec argument
ELECTORATE_KEYS = OrderedDict([
    ("voters", "num_voters"),
    ("options", "num_options"),
    ("preference_model", "preference_model"),
    ("mixing", "mixing"),
    ("camp_share", "camp_share"),
    ("option_positions", "option_positions"),
    ("position", "position"),
    ("cost_r1", "cost_r1"),
    ("cost_r2", "cost_r2"),
    ("cost_noise", "cost_noise"),
    ("bandwagon", "bandwagon"),
    ("underdog", "underdog"),
    ("closeness", "closeness"),
    ("viability_share", "viability_share"),
    ("compulsory", "compulsory"),
])
DISTRIBUTION_KEYS = ("position", "cost_r1", "cost_r2", "bandwagon",
                     "underdog", "closeness")

RULE_KEYS = OrderedDict([
    (ElectionRule.PLURALITY, ()),
    (ElectionRule.SUPERMAJORITY, ("quota",)),
    (ElectionRule.PARLIAMENTARY, ("entry_threshold", "seats",
                                  "apportionment")),
    (ElectionRule.DISTRICTS, ("weights",)),
])

VARIANT_PARAMS = {
    ProcedureVariant.SINGLE_ROUND: (),
    ProcedureVariant.TWO_ROUND_SUM: (),
    ProcedureVariant.CONDITIONAL: ("threshold",),
    ProcedureVariant.BEST_OF_THREE: (),
    ProcedureVariant.WEIGHTED_ROUNDS: ("scale",),
}

TRUE_WORDS = ("true", "yes", "on", "1")
FALSE_WORDS = ("false", "no", "off", "0")


class Entry:
    """
    A raw "key = value" line (or variant line) and where it came from.
    """

    __slots__ = ("key", "value", "line")

    def __init__(self, key, value, line=None):
        self.key = key
        self.value = value
        self.line = line


class ScenarioConfig(MSONable):
    """
    A full experiment description: electorate, rule, procedure variants,
    replication count and master seed, plus an optional parameter grid.
    """

    def __init__(self, electorate, rule, variants, replications, master_seed,
                 name="scenario", sweep=None):
        """
        :param electorate: ElectorateSpec
        :param rule: ElectionRule
        :param variants: list of ProcedureVariant (the single-round baseline
            is always run in addition).
        :param replications: Number of replications R >= 1.
        :param master_seed: Unsigned 64-bit master seed.
        :param name: Scenario id carried on every output row.
        :param sweep: OrderedDict "section.key" -> list of raw values.
        """

        self.electorate = electorate
        self.rule = rule
        self.variants = list(variants)
        self.replications = int(replications)
        self.master_seed = int(master_seed)
        self.name = name
        self.sweep = OrderedDict(sweep or {})

        if self.replications < 1:
            raise ConfigError("scenario.replications", "must be at least 1")
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ConfigError("scenario.master_seed",
                              "must be an unsigned 64-bit integer")
        if not self.variants:
            raise ConfigError("variants", "at least one variant is required")
        for i, variant in enumerate(self.variants):
            try:
                variant.check(rule, electorate.num_options)
            except RepeatVotingError as exc:
                raise ConfigError("variants[{}]".format(i), str(exc))

    @property
    def variant_names(self):
        """
        Column order of every report: the baseline, then the configured
        variants.
        """
        return [v.name for v in self.all_variants()]

    def all_variants(self):
        variants = [ProcedureVariant(ProcedureVariant.SINGLE_ROUND)]
        for variant in self.variants:
            if variant not in variants:
                variants.append(variant)
        return variants

    def with_overrides(self, master_seed=None, replications=None):
        """
        Copy of this config with the seed and/or replication count replaced.
        """

        sections = self.to_sections()
        if master_seed is not None:
            sections["scenario"]["master_seed"] = Entry("master_seed",
                                                        str(master_seed))
        if replications is not None:
            sections["scenario"]["replications"] = Entry("replications",
                                                         str(replications))
        return self.from_sections(sections)

    def grid_points(self):
        """
        Expand the sweep grid.

        :return: list of (label, ScenarioConfig); a single ("", self) when no
            sweep is declared.
        """

        if not self.sweep:
            return [("", self)]

        keys = list(self.sweep.keys())
        points = []
        for values in itertools.product(*(self.sweep[k] for k in keys)):
            sections = self.to_sections()
            sections.pop("sweep", None)
            for path, value in zip(keys, values):
                section, key = path.split(".", 1)
                sections[section][key] = Entry(key, value)
            label = ",".join("{}={}".format(k, v) for k, v in zip(keys, values))
            sections["scenario"]["name"] = Entry(
                "name", "{}[{}]".format(self.name, label))
            points.append((label, self.from_sections(sections)))
        return points

    def to_sections(self):
        """
        Raw sections (section -> OrderedDict key -> Entry) that parse back to
        an equivalent config.
        """

        sections = OrderedDict()

        sections["scenario"] = OrderedDict(
            (k, Entry(k, v)) for k, v in [
                ("schema_version", str(SCHEMA_VERSION)),
                ("name", self.name),
                ("replications", str(self.replications)),
                ("master_seed", str(self.master_seed))])

        spec = self.electorate
        electorate = OrderedDict()
        for key, attr in ELECTORATE_KEYS.items():
            value = getattr(spec, attr)
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, tuple):
                value = ", ".join(repr(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            electorate[key] = Entry(key, str(value))
        sections["electorate"] = electorate

        rule = OrderedDict([("kind", Entry("kind", self.rule.kind))])
        for key in RULE_KEYS[self.rule.kind]:
            value = getattr(self.rule, key)
            if isinstance(value, tuple):
                value = ", ".join(str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            rule[key] = Entry(key, str(value))
        sections["rule"] = rule

        variants = OrderedDict()
        for i, variant in enumerate(self.variants):
            tokens = [variant.kind]
            if variant.margin_threshold is not None:
                tokens.append("threshold={!r}".format(variant.margin_threshold))
            if variant.scale not in (None, DEFAULT_PSEUDO_COUNT_SCALE):
                tokens.append("scale={}".format(variant.scale))
            variants[str(i)] = Entry(variant.kind, " ".join(tokens))
        sections["variants"] = variants

        if self.sweep:
            sections["sweep"] = OrderedDict(
                (k, Entry(k, " | ".join(v))) for k, v in self.sweep.items())

        return sections

    @classmethod
    def from_sections(cls, sections):
        """
        Build and validate a config from raw sections.
        """

        for required in REQUIRED_SECTIONS:
            if required not in sections:
                raise ConfigError(required, "missing ${} section".format(
                    required))

        scenario = sections["scenario"]
        _check_keys("scenario", scenario, SCENARIO_KEYS)
        version = _get(scenario, "scenario", "schema_version", int)
        if version != SCHEMA_VERSION:
            raise ConfigError("scenario.schema_version",
                              "unsupported schema version {}".format(version),
                              scenario["schema_version"].line)
        name = _get(scenario, "scenario", "name", str, default="scenario")
        replications = _get(scenario, "scenario", "replications", int)
        master_seed = _get(scenario, "scenario", "master_seed", int)

        rule = _read_rule(sections["rule"])
        electorate = _read_electorate(sections["electorate"], rule)
        variants = _read_variants(sections["variants"], rule,
                                  electorate.num_options)

        sweep = OrderedDict()
        for path, entry in sections.get("sweep", {}).items():
            section, _, key = path.partition(".")
            if section not in ("scenario", "electorate", "rule") or not key:
                raise ConfigError("sweep." + path, "sweep keys look like "
                                  "electorate.closeness or rule.quota",
                                  entry.line)
            values = [v.strip() for v in entry.value.split("|")]
            if not all(values):
                raise ConfigError("sweep." + path, "empty grid value",
                                  entry.line)
            sweep[path] = values

        config = cls(electorate, rule, variants, replications, master_seed,
                     name=name, sweep=sweep)
        # Every grid point must be valid, not just the base config
        config.grid_points()
        return config

    @classmethod
    def from_string(cls, string):
        return cls.from_sections(cls.read_sections(string))

    @classmethod
    def from_file(cls, filename):
        try:
            with zopen(filename, "rt") as f:
                text = f.read()
        except OSError as exc:
            raise IoError("Cannot read config {}: {}".format(filename, exc))
        return cls.from_string(text)

    def write_file(self, filename):
        try:
            with zopen(filename, "wt") as f:
                f.write(self.__str__())
        except OSError as exc:
            raise IoError("Cannot write config {}: {}".format(filename, exc))

    def __str__(self):
        blocks = []
        for section, entries in self.to_sections().items():
            if section == "variants":
                blocks.append(self.variants_template(entries))
            else:
                blocks.append(self.section_template(section, entries))
        return "\n\n".join(blocks) + "\n"

    def __eq__(self, other):
        if not isinstance(other, ScenarioConfig):
            return NotImplemented
        return str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    @staticmethod
    def section_template(section, entries):
        lines = ["${}".format(section)]
        for key, entry in entries.items():
            lines.append("   {key} = {value}".format(key=key,
                                                     value=entry.value))
        lines.append("$end")
        return "\n".join(lines)

    @staticmethod
    def variants_template(entries):
        lines = ["$variants"]
        for entry in entries.values():
            lines.append("   {}".format(entry.value))
        lines.append("$end")
        return "\n".join(lines)

    @staticmethod
    def read_sections(string):
        """
        Split config text into raw sections, keeping line numbers.

        :return: OrderedDict section -> OrderedDict key -> Entry. Variant
            lines are keyed by their position ("0", "1", ...).
        """

        sections = OrderedDict()
        current = None
        for number, raw in enumerate(string.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue

            header = re.match(r"^\$([a-z_]+)$", line)
            if header:
                word = header.group(1)
                if word == "end":
                    if current is None:
                        raise ConfigError("$end", "no open section", number)
                    current = None
                    continue
                if current is not None:
                    raise ConfigError(current, "section not closed with $end "
                                      "before ${}".format(word), number)
                if word not in SECTIONS:
                    raise ConfigError(word, "unknown section", number)
                if word in sections:
                    raise ConfigError(word, "duplicate section", number)
                current = word
                sections[word] = OrderedDict()
                continue

            if current is None:
                raise ConfigError("<top level>", "text outside a section",
                                  number)

            if current == "variants":
                key = str(len(sections[current]))
                sections[current][key] = Entry(line.split()[0], line, number)
                continue

            match = re.match(r"^([A-Za-z_][\w.]*)\s*=\s*(.*)$", line)
            if match is None:
                raise ConfigError(current, "expected 'key = value'", number)
            key, value = match.group(1), match.group(2).strip()
            if key in sections[current]:
                raise ConfigError("{}.{}".format(current, key),
                                  "duplicate key", number)
            sections[current][key] = Entry(key, value, number)

        if current is not None:
            raise ConfigError(current, "section not closed with $end")
        return sections


def parse_config(path):
    """
    Read and fully validate a scenario config file.

    :param path: Path to the config.
    :return: ScenarioConfig
    """
    config = ScenarioConfig.from_file(path)
    logger.info("Loaded scenario '%s' from %s (%d variant(s), R=%d)",
                config.name, path, len(config.variants), config.replications)
    return config


def _check_keys(section, entries, allowed):
    for key, entry in entries.items():
        if key not in allowed:
            raise ConfigError("{}.{}".format(section, key), "unknown key",
                              entry.line)


def _convert(value, kind, field, line):
    try:
        if kind is bool:
            word = value.lower()
            if word in TRUE_WORDS:
                return True
            if word in FALSE_WORDS:
                return False
            raise ValueError(value)
        if kind is Distribution:
            return Distribution.from_string(value)
        if kind is tuple:
            return tuple(float(v) for v in value.split(","))
        return kind(value)
    except (ValueError, RepeatVotingError):
        raise ConfigError(field, "cannot read '{}' as {}".format(
            value, getattr(kind, "__name__", kind)), line)


def _get(entries, section, key, kind, default=None, required=None):
    field = "{}.{}".format(section, key)
    if key not in entries:
        if required or (required is None and default is None):
            raise ConfigError(field, "missing required field")
        return default
    entry = entries[key]
    return _convert(entry.value, kind, field, entry.line)


def _read_rule(entries):
    kind = _get(entries, "rule", "kind", str)
    if kind not in RULE_KEYS:
        raise ConfigError("rule.kind", "unknown rule '{}'".format(kind),
                          entries["kind"].line)
    for key, entry in entries.items():
        if key != "kind" and key not in RULE_KEYS[kind]:
            raise ConfigError("rule." + key, "not a parameter of {} "
                              "rules".format(kind), entry.line)

    def line(key):
        return entries[key].line if key in entries else None

    if kind == ElectionRule.SUPERMAJORITY:
        quota = _get(entries, "rule", "quota", float)
        if not 0.5 < quota <= 1.0:
            raise ConfigError("rule.quota", "quota must exceed 1/2 and be at "
                              "most 1", line("quota"))
        return ElectionRule.supermajority(quota)

    if kind == ElectionRule.PARLIAMENTARY:
        threshold = _get(entries, "rule", "entry_threshold", float,
                         default=0.0, required=False)
        if not 0.0 <= threshold < 1.0:
            raise ConfigError("rule.entry_threshold", "must lie in [0, 1)",
                              line("entry_threshold"))
        seats = _get(entries, "rule", "seats", int)
        if seats < 1:
            raise ConfigError("rule.seats", "must be a positive integer",
                              line("seats"))
        method = _get(entries, "rule", "apportionment", str,
                      default=APPORTIONMENT_METHODS[0], required=False)
        if method not in APPORTIONMENT_METHODS:
            raise ConfigError("rule.apportionment", "must be one of "
                              "{}".format(", ".join(APPORTIONMENT_METHODS)),
                              line("apportionment"))
        return ElectionRule.parliamentary(threshold, seats, method)

    if kind == ElectionRule.DISTRICTS:
        raw = _get(entries, "rule", "weights", str)
        try:
            weights = [int(w) for w in raw.split(",")]
        except ValueError:
            raise ConfigError("rule.weights", "weights must be integers",
                              line("weights"))
        if not weights or min(weights) < 1:
            raise ConfigError("rule.weights", "weights must be positive",
                              line("weights"))
        return ElectionRule.districts(weights)

    return ElectionRule.plurality()


def _read_electorate(entries, rule):
    _check_keys("electorate", entries, ELECTORATE_KEYS)

    kwargs = {}
    for key, attr in ELECTORATE_KEYS.items():
        if key not in entries:
            continue
        if key in ("voters", "options"):
            kind = int
        elif key in DISTRIBUTION_KEYS:
            kind = Distribution
        elif key == "option_positions":
            kind = tuple
        elif key == "compulsory":
            kind = bool
        elif key == "preference_model":
            kind = str
        else:
            kind = float
        kwargs[attr] = _get(entries, "electorate", key, kind)

    for key in ("voters", "options"):
        if key not in entries:
            raise ConfigError("electorate." + key, "missing required field")

    if rule.is_districts:
        kwargs["districts"] = len(rule.weights)
    if rule.kind == ElectionRule.SUPERMAJORITY and kwargs["num_options"] != 2:
        raise ConfigError("electorate.options", "supermajority rules need "
                          "exactly two options", entries["options"].line)

    try:
        return ElectorateSpec(**kwargs)
    except BadSpec as exc:
        if exc.field == "districts":
            raise ConfigError("rule.weights", str(exc))
        key = {attr: key for key, attr in ELECTORATE_KEYS.items()}.get(
            exc.field)
        if key is None:
            raise ConfigError("electorate", str(exc))
        line = entries[key].line if key in entries else None
        raise ConfigError("electorate." + key, str(exc), line)
    except RepeatVotingError as exc:
        raise ConfigError("electorate", str(exc))


def _read_variants(entries, rule, num_options):
    variants = []
    for index, entry in entries.items():
        field = "variants[{}]".format(index)
        tokens = entry.value.split()
        kind = tokens[0]
        if kind not in VARIANT_PARAMS:
            raise ConfigError(field, "unknown variant '{}'".format(kind),
                              entry.line)
        params = {}
        for token in tokens[1:]:
            key, sep, value = token.partition("=")
            if not sep or key not in VARIANT_PARAMS[kind]:
                raise ConfigError(field, "unexpected parameter '{}' for "
                                  "{}".format(token, kind), entry.line)
            params[key] = value

        try:
            if kind == ProcedureVariant.CONDITIONAL:
                if "threshold" not in params:
                    raise ConfigError(field, "conditional_second_round needs "
                                      "threshold=<margin>", entry.line)
                variant = ProcedureVariant(kind, margin_threshold=float(
                    params["threshold"]))
            elif kind == ProcedureVariant.WEIGHTED_ROUNDS and "scale" in params:
                scale = params["scale"]
                if scale != EXACT_SCALE:
                    scale = int(scale)
                variant = ProcedureVariant(kind, scale=scale)
            else:
                variant = ProcedureVariant(kind)
            variant.check(rule, num_options)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(field, str(exc), entry.line)
        variants.append(variant)
    return variants
