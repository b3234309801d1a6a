import pytest

from quasipos.model import identity, kmm, sqrt_model
from quasipos.verify import run_verification


@pytest.mark.parametrize("model", [kmm(1.0), kmm(0.01), identity(), sqrt_model(0.5)],
                         ids=["kmm1", "kmm001", "identity", "sqrt"])
def test_all_suites_pass(model):
    failed = [r.to_dict() for r in run_verification(model) if not r.passed]
    assert not failed
