# coding: utf-8
# Distributed under the terms of the MIT License.

import io
import json
import os
import shutil
import tempfile
import unittest

import pandas as pd

from repvote.errors import IoError
from repvote.simulate.harness import AggregateReport, OUTPUT_COLUMNS
from repvote.simulate.outputs import (render_report, emit_report,
                                      emit_reports, read_csv_report,
                                      render_comparison, report_to_records,
                                      CSV, JSON, TABLE)

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"


def make_report(scenario="demo", seed=42):
    variants = ["single_round", "two_round_sum"]
    metrics = ["turnout_r1", "matched_benchmark"]
    means = {"single_round": {"turnout_r1": 0.5, "matched_benchmark": 0.9},
             "two_round_sum": {"turnout_r1": 0.5,
                               "matched_benchmark": 0.1 + 0.2}}
    stderrs = {"single_round": {"turnout_r1": 0.01, "matched_benchmark": 0.0},
               "two_round_sum": {"turnout_r1": 0.01,
                                 "matched_benchmark": 1 / 3}}
    return AggregateReport(scenario, seed, 10, variants, metrics, means,
                           stderrs)


class RenderTest(unittest.TestCase):

    def setUp(self):
        self.report = make_report()

    def test_csv(self):
        text = render_report(self.report, CSV)
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(OUTPUT_COLUMNS))
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[1].startswith("demo,single_round,turnout_r1,"))
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(render_report(self.report, CSV), text)

    def test_one_row(self):
        report = AggregateReport("one", 1, 1, ["single_round"], ["margin_r1"],
                                 {"single_round": {"margin_r1": 0.25}},
                                 {"single_round": {"margin_r1": 0.0}})
        lines = render_report(report, CSV).splitlines()
        self.assertEqual(lines[1], "one,single_round,margin_r1,0.25,0,0,1,1")

    def test_json(self):
        doc = json.loads(render_report(self.report, JSON))
        self.assertEqual(sorted(doc.keys()), ["failures", "master_seed",
                                              "records", "replications",
                                              "scenario", "variants"])
        self.assertEqual(doc["failures"], {"single_round": 0,
                                           "two_round_sum": 0})
        self.assertEqual(len(doc["records"]), 4)
        record = doc["records"][3]
        self.assertEqual(sorted(record.keys()), sorted(OUTPUT_COLUMNS))
        self.assertEqual(record["mean"], 0.1 + 0.2)
        self.assertAlmostEqual(record["delta"], 0.3 - 0.9)

    def test_json_digits_match_csv(self):
        text = render_report(self.report, JSON)
        self.assertIn('"mean": 0.30000000000000004', text)
        self.assertIn('"stderr": 0.33333333333333331', text)
        csv_text = render_report(self.report, CSV)
        self.assertIn("0.30000000000000004", csv_text)
        self.assertIn("0.33333333333333331", csv_text)

        record = json.loads(text)["records"][3]
        self.assertEqual(record["mean"], 0.1 + 0.2)
        self.assertEqual(record["stderr"], 1 / 3)

        several = emit_reports([self.report], JSON, io.StringIO())
        self.assertIn('"stderr": 0.33333333333333331', several)

    def test_records(self):
        records = report_to_records(self.report)
        self.assertEqual(list(records[0].keys()), OUTPUT_COLUMNS)
        self.assertEqual(records[2]["variant"], "two_round_sum")

    def test_table(self):
        text = render_report(self.report, TABLE)
        self.assertIn("matched_benchmark", text)
        self.assertIn("delta", text)

    def test_no_variants(self):
        self.assertRaises(ValueError, AggregateReport, "none", 1, 1, [],
                          ["margin_r1"], {}, {})

    def test_unknown_format(self):
        self.assertRaises(ValueError, render_report, self.report, "xml")


class WriteTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.report = make_report()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_csv_round_trip(self):
        path = os.path.join(self.tmp, "report.csv")
        text = emit_report(self.report, CSV, path)
        with open(path) as f:
            self.assertEqual(f.read(), text)
        frame = read_csv_report(path)
        self.assertEqual(list(frame.columns), OUTPUT_COLUMNS)
        self.assertEqual(frame["mean"].tolist(),
                         self.report.as_dataframe()["mean"].tolist())
        self.assertEqual(frame["stderr"].tolist()[3], 1 / 3)

    def test_repeated_emits_identical(self):
        a = os.path.join(self.tmp, "a.json")
        b = os.path.join(self.tmp, "b.json")
        emit_report(self.report, JSON, a)
        emit_report(make_report(), JSON, b)
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_file_object(self):
        buf = io.StringIO()
        text = emit_report(self.report, CSV, buf)
        self.assertEqual(buf.getvalue(), text)

    def test_unwritable(self):
        path = os.path.join(self.tmp, "missing", "report.csv")
        self.assertRaises(IoError, emit_report, self.report, CSV, path)
        self.assertRaises(IoError, read_csv_report, path)

    def test_several_reports(self):
        reports = [make_report("a"), make_report("b")]
        text = emit_reports(reports, CSV, io.StringIO())
        lines = text.splitlines()
        self.assertEqual(len(lines), 9)
        headers = [line for line in lines if line.startswith("scenario,")]
        self.assertEqual(len(headers), 1)
        self.assertTrue(lines[5].startswith("b,"))

        docs = json.loads(emit_reports(reports, JSON, io.StringIO()))
        self.assertEqual([d["scenario"] for d in docs], ["a", "b"])

    def test_comparison(self):
        table = pd.DataFrame({"single_round": [1.0], "two_round_sum": [2.0]},
                             index=pd.Index(["rounds_held"], name="metric"))
        text = render_comparison(table, CSV)
        self.assertEqual(text.splitlines()[0],
                         "metric,single_round,two_round_sum")
        doc = json.loads(render_comparison(table, JSON))
        self.assertEqual(doc, {"rounds_held": {"single_round": 1.0,
                                               "two_round_sum": 2.0}})
        table.loc["rounds_held", "two_round_sum"] = 1 / 3
        self.assertIn("0.33333333333333331", render_comparison(table, JSON))


if __name__ == "__main__":
    unittest.main()
