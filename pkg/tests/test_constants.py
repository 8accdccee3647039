import math

import pytest

from cavitysim.constants import DEFAULT_C, FLUX_QUANTUM, PhysicalConstants


def test_flux_quantum_is_h_over_2e():
    h, e = 6.62607015e-34, 1.602176634e-19
    assert FLUX_QUANTUM == pytest.approx(h / (2 * e), rel=1e-9)


def test_default_squid_length():
    assert PhysicalConstants().delta_L_min == pytest.approx(0.748e-3, abs=5e-7)


def test_default_c_puts_resonance_at_238_mm():
    assert 2 * DEFAULT_C * 0.1e-9 == pytest.approx(0.0238, rel=1e-12)


def test_with_delta_L_min_round_trip():
    const = PhysicalConstants().with_delta_L_min(0.0075e-3)
    assert const.delta_L_min == pytest.approx(0.0075e-3, rel=1e-14)
    assert const.L0 == PhysicalConstants().L0
    assert const.Ic == pytest.approx(PhysicalConstants().Ic * 0.748e-3 / 0.0075e-3, rel=1e-3)


@pytest.mark.parametrize("field", ["c", "Phi0", "L0", "Ic"])
@pytest.mark.parametrize("value", [0.0, -1.0, math.inf, math.nan])
def test_invalid_constants(field, value):
    with pytest.raises(ValueError):
        PhysicalConstants(**{field: value})


def test_with_delta_L_min_rejects_nonpositive():
    with pytest.raises(ValueError):
        PhysicalConstants().with_delta_L_min(0.0)
