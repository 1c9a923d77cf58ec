"""End-to-end checks of the fmdp command line: exit codes, report schema,
determinism and agreement between the factored and explicit-state paths."""

import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema
import numpy as np

FMDP = None
SCHEMAS = None
TMP = None


def run(*args, expect=0):
    out = Path(TMP) / f"report_{len(list(Path(TMP).glob('report_*')))}.json"
    proc = subprocess.run([FMDP, *map(str, args), "--out", str(out)], capture_output=True, text=True)
    if proc.returncode != expect:
        raise AssertionError(f"fmdp {' '.join(map(str, args))} exited {proc.returncode}, expected {expect}\n"
                             f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}")
    report = json.loads(out.read_text())
    validate_report(report)
    assert report["exit_code"] == expect, report
    return report


def validate_report(report):
    schema = json.loads((SCHEMAS / "report.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, format_checker=jsonschema.FormatChecker()).validate(report)


def write(name, obj):
    path = Path(TMP) / name
    path.write_text(json.dumps(obj, indent=2))
    return path


def export(demo):
    path = Path(TMP) / f"{demo}.json"
    run("demo", demo, "--export", path)
    return path


def wide_model(n):
    """n binary variables that keep their value; 2^n states."""
    return {
        "variables": [{"name": f"X{i}", "cardinality": 2} for i in range(n)],
        "default": [{"child": i, "parents": [i], "table": [1, 0, 0, 1]} for i in range(n)],
        "actions": [{"id": "flip0", "overrides": [{"child": 0, "parents": [0], "table": [0, 1, 1, 0]}]}],
        "default_is_action": True,
        "default_id": "stay",
        "rewards": [{"scope": [0], "table": [0, 1]}],
        "gamma": 0.9,
        "basis": [{"scope": [], "table": [1]}, {"scope": [0], "table": [0, 1]}],
    }


def states(cards):
    return np.array(list(np.ndindex(*cards)), dtype=int)


def table_value(entry, x, cards):
    index = 0
    for v in entry["scope"]:
        index = index * cards[v] + x[v]
    return entry["table"][index]


def dense_projected_fixed_point(doc, action):
    """Solve Phi' D (Phi - gamma P Phi) w = Phi' D R under uniform D, straight from the document."""
    cards = [v["cardinality"] for v in doc["variables"]]
    xs = states(cards)
    cpds = {c["child"]: c for c in doc["default"]}
    for a in doc["actions"]:
        if a["id"] == action:
            cpds.update({c["child"]: c for c in a["overrides"]})
    P = np.ones((len(xs), len(xs)))
    for child, cpd in cpds.items():
        for i, x in enumerate(xs):
            row = 0
            for v in cpd["parents"]:
                row = row * cards[v] + x[v]
            P[i] *= [cpd["table"][row * cards[child] + y[child]] for y in xs]
    R = np.array([sum(table_value(r, x, cards) for r in doc["rewards"]) for x in xs])
    Phi = np.array([[table_value(h, x, cards) for h in doc["basis"]] for x in xs])
    A = Phi.T @ (Phi - doc["gamma"] * P @ Phi)
    return np.linalg.solve(A, Phi.T @ R)


class ExitCodes(unittest.TestCase):
    def test_validate_ok(self):
        report = run("validate", export("dbn5"))
        self.assertEqual(report["diagnostics"], [])
        self.assertEqual(report["variables"], 5)

    def test_truncated_document_is_a_parse_error(self):
        text = export("dbn5").read_text()
        bad = Path(TMP) / "truncated.json"
        bad.write_text(text[: len(text) // 2])
        report = run("validate", bad, expect=2)
        self.assertEqual(report["failure"]["kind"], "parse error")
        self.assertIn("line", report["failure"]["message"])

    def test_bad_cpd_row_fails_validation(self):
        doc = json.loads(export("dbn5").read_text())
        doc["default"][2]["table"][0] = 0.5
        path = write("bad_row.json", doc)
        for command in (["validate", path], ["solve", path]):
            report = run(*command, expect=1)
            self.assertTrue(report["diagnostics"])
            self.assertIn("default", report["diagnostics"][0]["path"])

    def test_solve_chain4_converges(self):
        report = run("solve", "chain4", "--start", "R")
        trace = report["trace"]
        self.assertEqual(trace["status"], "Converged")
        # Each record holds the policy extracted from that iteration's values; RRRR is the start.
        self.assertEqual(trace["start_action"], "R")
        self.assertEqual([it["policy_string"] for it in trace["iterations"]][:2], ["RLLL", "RRLL"])

    def test_default_start_reaches_rrll(self):
        report = run("solve", "chain4", "--weights", "uniform")
        self.assertEqual(report["trace"]["iterations"][-1]["policy_string"], "RRLL")

    def test_stationary_weights_oscillate(self):
        report = run("solve", "chain4", "--start", "R", "--weights", "stationary-oracle", expect=3)
        self.assertEqual(report["trace"]["status"], "Oscillating")
        self.assertEqual(report["trace"]["cycle_length"], 2)

    def test_iteration_limit(self):
        report = run("solve", "dbn5", "--max-iter", "1", expect=4)
        self.assertEqual(report["trace"]["status"], "MaxIterations")

    def test_exact_refuses_large_state_space(self):
        path = write("wide.json", wide_model(25))
        report = run("exact", path, "solve", expect=7)
        self.assertEqual(report["failure"]["kind"], "state space too large")
        # The factored path handles the same model without trouble.
        self.assertEqual(run("solve", path)["trace"]["status"], "Converged")

    def test_unknown_option_is_a_usage_error(self):
        proc = subprocess.run([FMDP, "solve", "chain4", "--bogus"], capture_output=True, text=True)
        self.assertEqual(proc.returncode, 2)


class Reports(unittest.TestCase):
    def test_model_documents_match_schema(self):
        schema = json.loads((SCHEMAS / "model.schema.json").read_text())
        for demo in ("chain4", "dbn5"):
            jsonschema.Draft202012Validator(schema).validate(json.loads(export(demo).read_text()))

    def test_export_round_trip(self):
        first = export("dbn5")
        again = Path(TMP) / "dbn5_again.json"
        self.assertEqual(run("validate", first)["diagnostics"], [])
        # Under uniform weights, dbn5 alternates between two lists.
        a = run("solve", first, expect=3)
        b = run("solve", "dbn5", expect=3)
        for r in (a, b):
            r.pop("timing")
            r.pop("command")
        self.assertEqual(a, b)
        run("demo", "dbn5", "--export", again)
        self.assertEqual(first.read_bytes(), again.read_bytes())

    def test_reports_are_deterministic(self):
        commands = [
            (["solve", "dbn5", "--bounds", "--refine", "2"], 3),
            (["solve", "chain4", "--start", "random", "--seed", "17", "--bounds", "--symmetric"], 0),
            (["demo", "chain4"], 0),
        ]
        for command, code in commands:
            a, b = run(*command, expect=code), run(*command, expect=code)
            a.pop("timing")
            b.pop("timing")
            self.assertEqual(json.dumps(a, sort_keys=True), json.dumps(b, sort_keys=True), command)

    def test_every_demo_report_validates(self):
        run("demo", "chain4")
        run("demo", "dbn5")


class Agreement(unittest.TestCase):
    def test_catch_all_list_matches_fixed_action(self):
        catch_all = write("catch_all.json", {"conditionals": [], "fallback": "a_3", "unpruned_size": 0, "text": ""})
        fixed = run("evaluate", "dbn5", "--policy", "fixed:a_3")["solution"]["coefficients"]
        listed = run("evaluate", "dbn5", "--policy", catch_all)["solution"]["coefficients"]
        for x, y in zip(fixed, listed, strict=True):
            self.assertLessEqual(abs(x - y), 1e-10 * max(1.0, abs(x)))

    def test_stationary_distribution(self):
        dist = run("exact", "chain4", "stationary", "--policy", "fixed-string:RRRR")["distribution"]
        for got, want in zip(dist, [0.00113, 0.01096, 0.09913, 0.88879], strict=True):
            self.assertLessEqual(abs(got - want), 0.002)

    def test_factored_and_exact_bellman_errors_agree(self):
        report = run("solve", "dbn5", expect=3)
        coefficients = write("coefficients.json", report["solution"]["coefficients"])
        for extra in ([], ["--symmetric"]):
            factored = run("bellman-error", "dbn5", "--coefficients", coefficients, *extra)["error"]
            exact = run("exact", "dbn5", "bellman-error", "--coefficients", coefficients, *extra)["error"]
            self.assertAlmostEqual(factored["epsilon"], exact["epsilon"], delta=1e-9 * max(1.0, exact["epsilon"]))
            self.assertAlmostEqual(factored["loss_bound"], exact["loss_bound"], delta=1e-8 * max(1.0, exact["loss_bound"]))

    def test_evaluate_matches_dense_projection(self):
        doc = json.loads(export("chain4").read_text())
        want = dense_projected_fixed_point(doc, "R")
        got = run("evaluate", export("chain4"), "--policy", "fixed:R")["solution"]["coefficients"]
        for x, y in zip(got, want, strict=True):
            self.assertLessEqual(abs(x - y), 1e-8 * max(1.0, abs(y)))

    def test_zero_coefficients_give_max_reward(self):
        zeros = write("zeros.json", [0.0, 0.0, 0.0])
        error = run("bellman-error", "chain4", "--coefficients", zeros)["error"]
        self.assertAlmostEqual(error["epsilon"], 1.0, delta=1e-12)

    def test_exact_policy_of_chain4(self):
        self.assertEqual(run("exact", "chain4", "solve")["policy_string"], "RRLL")


if __name__ == "__main__":
    FMDP = sys.argv.pop(1)
    SCHEMAS = Path(sys.argv.pop(1))
    with tempfile.TemporaryDirectory() as tmp:
        TMP = tmp
        unittest.main(verbosity=2)
