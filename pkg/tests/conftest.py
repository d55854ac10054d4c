from collections import defaultdict

# criterion number -> list of (passed, detail); filled by the acceptance module
VERDICTS = defaultdict(list)


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance")
    for key in sorted(VERDICTS):
        results = VERDICTS[key]
        status = "PASS" if all(ok for ok, _ in results) else "FAIL"
        terminalreporter.write_line(f"criterion {key:>2}: {status}")
        for ok, detail in results:
            terminalreporter.write_line(f"    [{'ok' if ok else 'x '}] {detail}")
