import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.TITLES):
        if n not in mod.RESULTS:
            terminalreporter.write_line(f"[SKIP] {n:2d}. {mod.TITLES[n]}")
            continue
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {mod.TITLES[n]}: {detail}")
