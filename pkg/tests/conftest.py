import functools

import pytest

from aarbac import io as aio

LEGACY_FIXTURES = {
    "ura97": "ura97",
    "ura99": "ura99",
    "ura02-roles": "ura02",
    "ura02-units": "ura02",
    "ura-uni": "ura-uni",
    "ura-uarbac": "ura-uarbac",
    "pra97": "pra97",
    "pra99": "pra99",
    "pra02-roles": "pra02",
    "pra02-units": "pra02",
    "pra-uni": "pra-uni",
    "pra-uarbac": "pra-uarbac",
}
CORE_FIXTURES = {"aura97": "aura", "arpa-uni": "arpa"}
ALL_FIXTURES = {**LEGACY_FIXTURES, **CORE_FIXTURES}


@functools.lru_cache(maxsize=None)
def fixture(name):
    """Load a bundled fixture once per session (instances are immutable)."""
    return aio.load_file(aio.fixture_path(name))[1]


@pytest.fixture
def aura97():
    return fixture("aura97")


@pytest.fixture
def arpa_uni():
    return fixture("arpa-uni")


@functools.lru_cache(maxsize=None)
def translated(name):
    from aarbac.translate import translate
    return translate(LEGACY_FIXTURES[name], fixture(name))


def aarbac_instances():
    """Every AURA/ARPA instance available: the two transcriptions plus all translations."""
    out = {name: fixture(name) for name in CORE_FIXTURES}
    out.update({f"{name}->translated": translated(name) for name in LEGACY_FIXTURES})
    return out


def single_envs(inst):
    """All ``(op, env)`` combinations for an instance's single-target rules."""
    for op in sorted(inst.rules):
        for au in sorted(inst.admin_users):
            for t in sorted(inst.targets):
                for r in sorted(inst.roles):
                    yield op, {"au": au, inst.target_var: t, "r": r}


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
