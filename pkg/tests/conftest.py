from __future__ import annotations

import pytest

from faasforge.emulator import gateway_serve


@pytest.fixture(scope="session")
def gateway():
    handle = gateway_serve("127.0.0.1:0")
    yield handle
    handle.close()


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
