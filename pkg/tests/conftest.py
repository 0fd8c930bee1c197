import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ptlhen.case_data import load_reference_case  # noqa: E402
from ptlhen.milp import SolveOptions  # noqa: E402

CRITERIA: dict[int, str] = {}


def record_criterion(n: int, ok: bool, text: str) -> None:
    CRITERIA[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} {text}"
    print(CRITERIA[n])


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])


@pytest.fixture(scope="session")
def ref_case():
    return load_reference_case()


@pytest.fixture(scope="session")
def ref_boxes(ref_case):
    from ptlhen.objectives import presolve_boxes
    from ptlhen.superstructure import Mode

    return presolve_boxes(ref_case, Mode.coupled(), SolveOptions(mip_gap_target=0.01, time_limit_s=120.0))


@pytest.fixture(scope="session")
def gap5():
    return SolveOptions(mip_gap_target=0.05, time_limit_s=600.0)
