from __future__ import annotations

import numpy as np

from gammamu import matrices
from gammamu.checks import run_suite


def test_fast_suite_passes():
    lines = []
    assert run_suite("fast", printer=lines.append) == 0
    assert all(line.startswith("[PASS]") for line in lines[:-1])


def test_tampered_build_fails_nonnegativity(monkeypatch):
    # fault injection: flip one entry's sign and the invariant runner must
    # fail the mass/nonnegativity check
    real = matrices.hausdorff_matrix

    def tampered(mu, n):
        m = real(mu, n)
        entries = m.entries.copy()
        entries[1, 0] = -entries[1, 0]
        return matrices.OperatorMatrix(m.kind, entries, measure=m.measure)

    monkeypatch.setattr(matrices, "hausdorff_matrix", tampered)
    from gammamu import checks
    monkeypatch.setattr(checks.matrices, "hausdorff_matrix", tampered)
    lines = []
    assert run_suite("fast", printer=lines.append) == 1
    assert any("mass-row-sums" in line and "FAIL" in line for line in lines)
