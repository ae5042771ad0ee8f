"""Terminal reporting for the acceptance suite: one PASS/FAIL line per
criterion at the end of the run."""

ACCEPTANCE_CRITERIA = {
    "test_cost_table_arithmetic": "cost-table arithmetic reproduces published cents/lemma (±0.0001)",
    "test_levenshtein_oracle_and_axioms": "Levenshtein: 1000-pair DP-oracle agreement + metric axioms",
    "test_bleu_oracle_agreement": "BLEU: naive-oracle agreement (1e-9), identity=1, disjoint=0",
    "test_jaccard_cosine_property_suites": "Jaccard/cosine property suites (1000 randomized cases each)",
    "test_polysemy_argmax_planted": "polysemy argmax recovers planted senses; figure CSV matches; scale-invariant",
    "test_end_to_end_mock_run": "end-to-end mock run byte-identical across same-seed runs",
    "test_error_taxonomy_fixtures": "error taxonomy fixtures classified exactly as specified",
    "test_batch_round_trip": "batch round trip over match sizes {1,3,5,10} with fault injection",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[str, bool] = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            if name in ACCEPTANCE_CRITERIA:
                ok = outcome == "passed"
                results[name] = results.get(name, True) and ok
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, description in ACCEPTANCE_CRITERIA.items():
        if name in results:
            status = "PASS" if results[name] else "FAIL"
            terminalreporter.write_line(f"[{status}] {description}")
