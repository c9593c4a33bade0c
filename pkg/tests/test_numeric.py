import pytest

from e8anomaly.numeric import LAWS, ConvergenceError, NumericPoint, numeric_transform_check, theta_value

TAUS = (1j, 1 + 1j, 2j)
VS = (0, 0.3, 0.3 + 0.1j)


@pytest.mark.parametrize("law", LAWS)
@pytest.mark.parametrize("tau", TAUS)
def test_transformation_laws(law, tau):
    worst = max(numeric_transform_check(law, NumericPoint(tau, v)) for v in VS)
    assert worst < 1e-9


def test_small_imaginary_part_is_rejected():
    with pytest.raises(ConvergenceError):
        numeric_transform_check("theta", NumericPoint(0.1j))


def test_budget_exhaustion():
    with pytest.raises(ConvergenceError):
        theta_value("theta", 0.3, 0.001j, budget=10)


def test_lower_half_plane_rejected():
    with pytest.raises(ValueError):
        NumericPoint(-1j)


def test_unknown_law():
    with pytest.raises(ValueError):
        numeric_transform_check("theta4", NumericPoint(1j))
