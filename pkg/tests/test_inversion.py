import math

import numpy as np
import pytest

from tcmsim import (CONSISTENT, EvolutionParams, assemble, coherent_field,
                    fock_field, single_atom_jcm_inversion,
                    single_atom_jcm_series, two_atom_inversion)


def test_two_atom_gt0():
    amp = assemble(EvolutionParams(gt=0.0, mode_count=1), [coherent_field(2.0)],
                   CONSISTENT)
    assert two_atom_inversion(amp).w == pytest.approx(1.0, abs=1e-12)


def test_two_atom_vacuum_point():
    gt = math.pi / math.sqrt(6)
    amp = assemble(EvolutionParams(gt=gt, mode_count=1), [fock_field(0)], CONSISTENT)
    assert two_atom_inversion(amp).w == pytest.approx(-7 / 9, abs=1e-12)


def test_two_atom_bounded():
    for gt in np.linspace(0, 8, 17):
        amp = assemble(EvolutionParams(gt=float(gt), mode_count=1),
                       [coherent_field(3.0)], CONSISTENT)
        assert abs(two_atom_inversion(amp).w) <= 1 + 1e-12


def test_single_atom_gt0_is_one():
    for field in (coherent_field(7.0), fock_field(4)):
        assert single_atom_jcm_inversion(field, 0.0).w == pytest.approx(1.0, abs=1e-14)


def test_single_atom_vacuum_rabi():
    f = fock_field(0)
    gts = np.linspace(0, 10, 101)
    w = single_atom_jcm_series(f, gts)
    assert np.allclose(w, np.cos(2 * gts), atol=1e-13)


def test_single_atom_collapse():
    # after the first collapse the envelope stays small for a stretch >= 1 gt
    f = coherent_field(25.0)
    gts = np.linspace(0, 25, 2500)
    w = single_atom_jcm_series(f, gts)
    window = (gts >= 8.0) & (gts <= 20.0)
    assert np.max(np.abs(w[window])) < 0.05
