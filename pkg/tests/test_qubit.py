import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasecast.errors import DomainError
from phasecast.qubit import cnot_activation, phase_of, qubit_state, rotate

finite_phases = st.floats(min_value=-50.0, max_value=50.0,
                          allow_nan=False, allow_infinity=False)


class TestQubitState:
    def test_zero_phase(self):
        assert qubit_state(0.0) == complex(1.0, 0.0)

    def test_quarter_turn(self):
        z = qubit_state(math.pi / 2)
        assert z.imag == pytest.approx(1.0, abs=1e-15)
        assert z.real == pytest.approx(0.0, abs=1e-15)

    def test_eighth_turn(self):
        z = qubit_state(math.pi / 4)
        assert z.real == pytest.approx(0.70710678, abs=1e-8)
        assert z.imag == pytest.approx(0.70710678, abs=1e-8)

    @given(finite_phases)
    def test_unit_modulus(self, phase):
        assert abs(abs(qubit_state(phase)) - 1.0) < 1e-12

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            qubit_state(bad)


class TestRotate:
    def test_quarter_rotation(self):
        z = rotate(complex(1.0, 0.0), math.pi / 2)
        assert z.real == pytest.approx(0.0, abs=1e-15)
        assert z.imag == pytest.approx(1.0, abs=1e-15)

    def test_identity_rotation(self):
        state = qubit_state(0.3)
        assert rotate(state, 0.0) == state

    def test_phase_shift(self):
        # rotating the 0.2 state by 0.5 lands on the 0.7 state
        z = rotate(qubit_state(0.2), 0.5)
        expected = qubit_state(0.7)
        assert z.real == pytest.approx(expected.real, abs=1e-12)
        assert z.imag == pytest.approx(expected.imag, abs=1e-12)

    @given(finite_phases, finite_phases)
    def test_composition_law(self, base, phi):
        rotated = rotate(qubit_state(base), phi)
        direct = qubit_state(base + phi)
        assert rotated.real == pytest.approx(direct.real, abs=1e-12)
        assert rotated.imag == pytest.approx(direct.imag, abs=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            rotate(complex(math.nan, 0.0), 0.1)
        with pytest.raises(DomainError):
            rotate(complex(1.0, 0.0), math.inf)


class TestCnotActivation:
    def test_reverse_rotation_branch(self):
        assert cnot_activation(1.0, 0.0) == pytest.approx(complex(0.0, 1.0), abs=1e-15)

    def test_non_rotation_branch(self):
        assert cnot_activation(0.0, 0.0) == complex(1.0, 0.0)

    def test_midpoint_control(self):
        z = cnot_activation(0.5, math.pi / 4)
        assert z.real == pytest.approx(1.0, abs=1e-15)
        assert z.imag == pytest.approx(0.0, abs=1e-15)

    @given(finite_phases)
    def test_branches_match_closed_forms(self, phi):
        up = cnot_activation(1.0, phi)
        assert up.real == pytest.approx(math.sin(phi), abs=1e-12)
        assert up.imag == pytest.approx(math.cos(phi), abs=1e-12)
        down = cnot_activation(0.0, phi)
        assert down.real == pytest.approx(math.cos(phi), abs=1e-12)
        assert down.imag == pytest.approx(-math.sin(phi), abs=1e-12)

    @pytest.mark.parametrize("eta", [-0.01, 1.01, 2.0, math.nan])
    def test_control_out_of_range(self, eta):
        with pytest.raises(DomainError):
            cnot_activation(eta, 0.0)


class TestPhaseOf:
    @pytest.mark.parametrize("z,expected", [
        (complex(1, 0), 0.0),
        (complex(0, 1), math.pi / 2),
        (complex(0, 0), 0.0),
    ])
    def test_anchors(self, z, expected):
        assert phase_of(z) == pytest.approx(expected, abs=1e-15)

    def test_negative_real_axis_uses_positive_branch(self):
        assert phase_of(complex(-1.0, 0.0)) == pytest.approx(math.pi)
        assert phase_of(complex(-1.0, -0.0)) == pytest.approx(math.pi)

    @given(st.floats(min_value=-math.pi + 1e-9, max_value=math.pi,
                     allow_nan=False))
    def test_round_trip_on_principal_branch(self, phase):
        assert phase_of(qubit_state(phase)) == pytest.approx(phase, abs=1e-12)
