import numpy as np
import pytest

from socc_lab.codes import BlockPartition, LdpcCode, LdpcQamCode, WrappedCode


@pytest.fixture(scope="session")
def ref_ldpc():
    # 2000 message bits, 2664 coded bits -> 666 16QAM symbols -> 1332 real uses
    return LdpcCode.regular(2664, 2000 / 2664, col_weight=3, seed=1)


@pytest.fixture(scope="session")
def ref_code(ref_ldpc):
    base = LdpcQamCode(ref_ldpc, symbol_power=1.0)
    return WrappedCode(base, BlockPartition((10,) * 148))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        store[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for k in sorted(store):
            terminalreporter.write_line(store[k])
