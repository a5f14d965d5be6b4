# coding: utf-8
# Distributed under the terms of the MIT License.

import json
import math
import re
import sys

import pandas as pd
from monty.io import zopen
from monty.json import jsanitize

from repvote.errors import IoError
from repvote.simulate.harness import OUTPUT_COLUMNS
from repvote.utils.log import get_logger

"""
Writing reports as CSV, JSON or plain-text tables.

Every output row carries the scenario id, variant, metric, mean, standard
error, delta against the single-round baseline, replication count and master
seed. CSV and JSON floats are both written with 17 significant digits, so a
re-read report compares equal to the one that was written and the two formats
carry the same digits.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

CSV = "csv"
JSON = "json"
TABLE = "table"
FORMATS = (CSV, JSON, TABLE)

FLOAT_FORMAT = "%.17g"

_PLACEHOLDER = re.compile(r'"\\u0000(\d+)\\u0000"')


def _dumps(doc):
    """
    json.dumps with sorted keys, in which every finite float is written with
    FLOAT_FORMAT instead of its shortest repr.
    """

    numbers = []

    def mark(obj):
        if isinstance(obj, float) and math.isfinite(obj):
            numbers.append(FLOAT_FORMAT % obj)
            return "\x00{}\x00".format(len(numbers) - 1)
        if isinstance(obj, dict):
            return {k: mark(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [mark(v) for v in obj]
        return obj

    text = json.dumps(mark(doc), sort_keys=True, indent=2)
    return _PLACEHOLDER.sub(lambda m: numbers[int(m.group(1))], text) + "\n"


def report_to_records(report):
    """
    One dict per (variant, metric), keys in OUTPUT_COLUMNS order.
    """
    return jsanitize(report.as_dataframe().to_dict(orient="records"))


def render_report(report, fmt=CSV):
    """
    Text of a report in the given format.

    :param report: AggregateReport
    :param fmt: "csv", "json" or "table".
    :return: str
    """

    if fmt == CSV:
        return report.as_dataframe().to_csv(index=False,
                                            float_format=FLOAT_FORMAT,
                                            lineterminator="\n")
    if fmt == JSON:
        doc = {"scenario": report.scenario,
               "master_seed": report.master_seed,
               "replications": report.replications,
               "variants": report.variants,
               "failures": report.failures,
               "records": report_to_records(report)}
        return _dumps(doc)
    if fmt == TABLE:
        frame = report.as_dataframe().set_index(["variant", "metric"])
        return frame[["mean", "stderr", "delta"]].to_string() + "\n"
    raise ValueError("Unknown report format '{}'; use one of "
                     "{}".format(fmt, ", ".join(FORMATS)))


def render_comparison(table, fmt=TABLE):
    """
    Text of a compare_procedures() table.
    """

    if fmt == CSV:
        return table.to_csv(float_format=FLOAT_FORMAT, lineterminator="\n")
    if fmt == JSON:
        doc = {metric: jsanitize(row.to_dict())
               for metric, row in table.iterrows()}
        return _dumps(doc)
    if fmt == TABLE:
        return table.to_string() + "\n"
    raise ValueError("Unknown report format '{}'; use one of "
                     "{}".format(fmt, ", ".join(FORMATS)))


def write_text(text, destination=None):
    """
    Write text to a path, to a file-like object, or to stdout when
    destination is None or "-".
    """

    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with zopen(destination, "wt") as f:
            f.write(text)
    except OSError as exc:
        raise IoError("Cannot write {}: {}".format(destination, exc))
    logger.info("Wrote %s", destination)


def emit_report(report, fmt=CSV, destination=None):
    """
    Serialize a report and write it out.

    :param report: AggregateReport
    :param fmt: "csv", "json" or "table".
    :param destination: Path, file-like object, or None / "-" for stdout.
    :return: The text written.
    """

    text = render_report(report, fmt)
    write_text(text, destination)
    return text


def emit_reports(reports, fmt=CSV, destination=None):
    """
    Several reports (e.g. the points of a sweep) in one document. CSV output
    has a single header; JSON output is a list of report documents.

    :param reports: list of AggregateReport
    """

    if fmt == CSV:
        texts = [render_report(r, CSV) for r in reports]
        text = texts[0] + "".join(t.split("\n", 1)[1] for t in texts[1:])
    elif fmt == JSON:
        docs = [json.loads(render_report(r, JSON)) for r in reports]
        text = _dumps(docs)
    else:
        text = "\n".join("# {}\n{}".format(r.scenario, render_report(r, fmt))
                         for r in reports)
    write_text(text, destination)
    return text


def read_csv_report(path):
    """
    Load a CSV report back into a DataFrame with the output columns.
    """

    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except OSError as exc:
        raise IoError("Cannot read {}: {}".format(path, exc))
    return frame[OUTPUT_COLUMNS]
