"""Qubit phase arithmetic.

Signals, weights, and biases are all phase angles. A phase theta stands for
the unit phasor cos(theta) + i*sin(theta), whose components are the
amplitudes of the |0> and |1> basis states (cos^2 + sin^2 = 1 identically).
Two gate effects act on these phasors:

- rotation: R(phi) adds phi to the phase of a state,
- C-NOT style activation: f(pi/2 * eta - phi), which for eta=1 reverses the
  rotation of the input phase (sin phi + i*cos phi) and for eta=0 leaves it
  unrotated but conjugated (cos phi - i*sin phi). eta is accepted anywhere
  in [0, 1] so a sigmoid output can drive the control slot continuously.

Phases are never wrapped into a canonical interval here: all trigonometry is
periodic, so unbounded phases are safe. Only ``phase_of`` canonicalizes, to
the principal branch (-pi, pi].
"""

import math

from .errors import DomainError


def qubit_state(phase: float) -> complex:
    """Unit phasor cos(phase) + i*sin(phase). Modulus is 1 by construction."""
    if not math.isfinite(phase):
        raise DomainError(f"phase must be finite, got {phase!r}")
    return complex(math.cos(phase), math.sin(phase))


def rotate(state: complex, phi: float) -> complex:
    """Apply the 2x2 rotation matrix R(phi) to an amplitude pair.

    R(phi) = [[cos phi, -sin phi], [sin phi, cos phi]], so a unit state
    (cos a, sin a) maps to (cos(phi + a), sin(phi + a)): the phase shifts
    by phi.
    """
    state = complex(state)
    if not (math.isfinite(state.real) and math.isfinite(state.imag)):
        raise DomainError(f"state must have finite components, got {state!r}")
    if not math.isfinite(phi):
        raise DomainError(f"rotation angle must be finite, got {phi!r}")
    c, s = math.cos(phi), math.sin(phi)
    return complex(c * state.real - s * state.imag,
                   s * state.real + c * state.imag)


def cnot_activation(eta: float, phi: float) -> complex:
    """C-NOT style activation f(pi/2 * eta - phi).

    eta=1 yields sin(phi) + i*cos(phi) (reverse rotation), eta=0 yields
    cos(phi) - i*sin(phi) (non-rotation); intermediate eta interpolates.
    """
    if not math.isfinite(eta) or not 0.0 <= eta <= 1.0:
        raise DomainError(f"control parameter must lie in [0, 1], got {eta!r}")
    if not math.isfinite(phi):
        raise DomainError(f"phase must be finite, got {phi!r}")
    return qubit_state(math.pi / 2 * eta - phi)


def phase_of(z: complex) -> float:
    """Principal argument of z in (-pi, pi]. The zero vector maps to 0.

    atan2 can return exactly -pi for a negative real part with a negative
    zero imaginary part; that is folded onto +pi to keep the half-open
    branch.
    """
    z = complex(z)
    a = math.atan2(z.imag, z.real)
    if a == -math.pi:
        a = math.pi
    return a
