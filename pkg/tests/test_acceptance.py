"""Acceptance criteria, one test each, with a one-line pass/fail summary per criterion."""

import pytest

from lorentzlab.suites import CRITERIA, RunConfig

LABELS = {
    1: "coordinate Christoffel table of g^c_3",
    2: "frame Ricci of g^c_n",
    3: "frame energy-momentum tensor of g^c_n",
    4: "Weyl tensor of g^c_4 vanishes",
    5: "closed-form geodesics against RK4",
    6: "closed geodesic classifier",
    7: "isometries of g^c_n",
    8: "closed timelike loop",
    9: "energy conditions of g^c_n",
    10: "stretched Christoffel table",
    11: "Ricci asymptotics of stretched metrics",
    12: "b-beta identity",
    13: "key lemma slack",
    14: "leaf convergence",
}


def _short(x):
    text = repr(x)
    return text if len(text) <= 60 else text[:57] + "..."


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    checks = CRITERIA[k](RunConfig())
    failed = [c for c in checks if not c.passed]
    with capsys.disabled():
        verdict = "PASS" if not failed else "FAIL"
        print(f"\ncriterion {k:2d}: {verdict}  {LABELS[k]} ({len(checks) - len(failed)}/{len(checks)} checks)")
        for c in failed:
            print(f"    failed: {c.name}: measured {_short(c.measured)}, expected {_short(c.expected)}")
    assert checks
    assert not failed, "; ".join(c.name for c in failed)
