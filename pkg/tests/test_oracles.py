import numpy as np

from vc_twist import oracles
from vc_twist.oracles import (
    mp_two_point_FC,
    production_FC,
    random_twisted_cases,
    regularized_oracle_FC,
    root_oracle_FC,
    run_oracle_suite,
)


def test_cases_reproducible():
    assert random_twisted_cases(5, seed=7) == random_twisted_cases(5, seed=7)


def test_oracles_agree_on_a_few_cases():
    for case in random_twisted_cases(5, seed=3):
        prod = production_FC(case)
        scale = oracles._case_scale(case)
        assert abs(root_oracle_FC(case) - prod) <= 1e-8 * scale
        assert abs(mp_two_point_FC(case) - prod) <= 1e-10 * scale
        assert abs(regularized_oracle_FC(case) - prod) <= 1e-4 * scale


def test_suite_passes():
    results = run_oracle_suite(n_cases=10, seed=11)
    assert len(results) == 6
    assert all(r.passed for r in results), [r.line() for r in results]
    assert all(np.isfinite(r.error) for r in results)
