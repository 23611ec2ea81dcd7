import helpers


def pytest_terminal_summary(terminalreporter):
    if not helpers.VERDICTS:
        return
    terminalreporter.section("acceptance")
    for key in sorted(helpers.VERDICTS):
        ok, detail = helpers.VERDICTS[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
