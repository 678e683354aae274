import pytest

from hausdorff_lab.homogeneous_models import ModelId, make_model

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=[m.value for m in ModelId])
def model(request):
    return make_model(request.param)


@pytest.fixture
def real_line():
    return make_model("real-line")


@pytest.fixture
def mod_circle():
    return make_model("complex-mod-circle")


@pytest.fixture
def motion():
    return make_model("motion-group-plane")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
