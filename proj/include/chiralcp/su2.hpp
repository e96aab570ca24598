#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace chiralcp {

using complexd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce an angle to [0, 2*pi).
double wrap_2pi(double phase);

/// One rectangular drive on one transition.
///
/// Every pulse in a train has the same duration T = pi/W0 (the duration of a
/// nominal pi pulse at the reference Rabi frequency W0); the nominal area A is
/// realized by scaling the Rabi frequency, and epsilon is a fractional error
/// of that Rabi frequency at fixed duration. The detuning delta is constant
/// during the pulse and measured in units of W0.
struct Pulse {
  double area;     // nominal temporal pulse area, radians, > 0
  double phase;    // relative field phase, stored in [0, 2*pi)
  double epsilon;  // fractional Rabi-frequency error
  double delta;    // detuning in units of W0

  Pulse(double area, double phase = 0.0, double epsilon = 0.0,
        double delta = 0.0);
};

/// Cayley-Klein pair (a, b) of a two-state propagator [[a, b], [-b*, a*]],
/// |a|^2 + |b|^2 = 1.
struct TwoStatePropagator {
  complexd a{1.0, 0.0};
  complexd b{0.0, 0.0};

  /// | |a|^2 + |b|^2 - 1 |
  double unitarity_defect() const;
  /// U^-1 = U^dagger: (a, b) -> (a*, -b)
  TwoStatePropagator inverse() const;
};

/// Exact propagator of a single rectangular pulse:
///   Theta = sqrt((A(1+eps))^2 + (pi*delta)^2)
///   a = cos(Theta/2) + i (pi*delta/Theta) sin(Theta/2)
///   b = -i (A(1+eps)/Theta) sin(Theta/2) e^{i phase}
/// which reduces to a = cos(A/2), b = -i sin(A/2) e^{i phase} on resonance.
TwoStatePropagator propagate_pulse(const Pulse& p);

/// Time-ordered product of a pulse train; train.front() acts first.
TwoStatePropagator compose(std::span<const TwoStatePropagator> train);
TwoStatePropagator compose(std::span<const Pulse> train);

/// U2 * U1 as Cayley-Klein pairs (u1 acts first).
TwoStatePropagator ck_product(const TwoStatePropagator& u2,
                              const TwoStatePropagator& u1);

/// (alpha, beta) = (arg a, arg b), each reported in [0, 2*pi).
/// A phase is absent when the corresponding magnitude is below 1e-12.
struct CayleyKleinPhases {
  std::optional<double> alpha;
  std::optional<double> beta;
};

CayleyKleinPhases cayley_klein_phases(const TwoStatePropagator& u);

}  // namespace chiralcp
