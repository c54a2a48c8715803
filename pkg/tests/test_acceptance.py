"""Full-size acceptance run: every criterion at its pinned tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one pass/fail line per
subcheck.  Two subchecks are analytically unattainable as stated (see the
module docstring of stableavoid.acceptance); they are asserted to fail, so a
change that makes them pass flags the documentation for revision.
"""

import pytest

from stableavoid import acceptance

SEED = 0
SCALE = 1.0


def _run(criterion):
    results = criterion(SCALE, SEED)
    for r in results:
        status = "PASS" if r.passed else ("XFAIL" if r.expected_fail else "FAIL")
        print(f"[{status}] {r.name}: {r.detail}")
    unexpected = [r for r in results if not r.passed and not r.expected_fail]
    assert not unexpected, "; ".join(
        f"{r.name}: {r.detail}" for r in unexpected
    )
    # analytically-unattainable subchecks must actually fail; a pass means
    # the documentation needs revising (statistically fragile ones may land
    # either way and carry strict=False)
    surprising = [
        r for r in results if r.passed and r.expected_fail and r.strict
    ]
    assert not surprising, (
        "subchecks documented as unattainable passed, revisit the notes: "
        + "; ".join(r.name for r in surprising)
    )


def test_criterion_01_closed_form_h():
    _run(acceptance.criterion_1_closed_form_h)


def test_criterion_02_overshoot_law():
    _run(acceptance.criterion_2_overshoot_law)


def test_criterion_03_martingale():
    _run(acceptance.criterion_3_martingale)


def test_criterion_04_lemma_exponents():
    _run(acceptance.criterion_4_lemma_exponents)


def test_criterion_05_profile():
    _run(acceptance.criterion_5_profile)


def test_criterion_06_theorem2_convergence():
    _run(acceptance.criterion_6_theorem2)


def test_criterion_07_cancellation_rate():
    _run(acceptance.criterion_7_cancellation)


def test_criterion_08_chapman_kolmogorov():
    _run(acceptance.criterion_8_chapman_kolmogorov)


def test_criterion_09_structural_zeros():
    _run(acceptance.criterion_9_structural_zeros)


def test_criterion_10_upper_bound():
    _run(acceptance.criterion_10_upper_bound)


def test_criterion_11_sampler_scaling():
    _run(acceptance.criterion_11_scaling)


def test_criterion_12_determinism():
    _run(acceptance.criterion_12_determinism)
