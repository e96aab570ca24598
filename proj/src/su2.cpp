#include "chiralcp/su2.hpp"

#include <cmath>
#include <stdexcept>

namespace chiralcp {

double wrap_2pi(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod rounding at the seam
  return r;
}

Pulse::Pulse(double area_, double phase_, double epsilon_, double delta_)
    : area(area_), phase(wrap_2pi(phase_)), epsilon(epsilon_), delta(delta_) {
  if (!std::isfinite(area_) || !std::isfinite(phase_) ||
      !std::isfinite(epsilon_) || !std::isfinite(delta_)) {
    throw std::invalid_argument("Pulse: non-finite parameter");
  }
  if (area_ <= 0.0) {
    throw std::invalid_argument("Pulse: area must be > 0");
  }
}

double TwoStatePropagator::unitarity_defect() const {
  return std::abs(std::norm(a) + std::norm(b) - 1.0);
}

TwoStatePropagator TwoStatePropagator::inverse() const {
  return {std::conj(a), -b};
}

TwoStatePropagator propagate_pulse(const Pulse& p) {
  const double w = p.area * (1.0 + p.epsilon) / kPi;  // Rabi in units of W0
  const double g = std::hypot(w, p.delta);
  if (g == 0.0) return {};  // no drive, no detuning: identity
  const double half = 0.5 * kPi * g;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const complexd a{c, (p.delta / g) * s};
  const complexd b =
      complexd{0.0, -(w / g) * s} * std::polar(1.0, p.phase);
  return {a, b};
}

TwoStatePropagator ck_product(const TwoStatePropagator& u2,
                              const TwoStatePropagator& u1) {
  return {u2.a * u1.a - u2.b * std::conj(u1.b),
          u2.a * u1.b + u2.b * std::conj(u1.a)};
}

TwoStatePropagator compose(std::span<const TwoStatePropagator> train) {
  if (train.empty()) throw std::invalid_argument("compose: empty train");
  TwoStatePropagator u = train.front();
  for (std::size_t k = 1; k < train.size(); ++k) u = ck_product(train[k], u);
  return u;
}

TwoStatePropagator compose(std::span<const Pulse> train) {
  if (train.empty()) throw std::invalid_argument("compose: empty train");
  TwoStatePropagator u = propagate_pulse(train.front());
  for (std::size_t k = 1; k < train.size(); ++k) {
    u = ck_product(propagate_pulse(train[k]), u);
  }
  return u;
}

CayleyKleinPhases cayley_klein_phases(const TwoStatePropagator& u) {
  constexpr double kDegenerate = 1e-12;
  CayleyKleinPhases out;
  if (std::abs(u.a) > kDegenerate) out.alpha = wrap_2pi(std::arg(u.a));
  if (std::abs(u.b) > kDegenerate) out.beta = wrap_2pi(std::arg(u.b));
  return out;
}

}  // namespace chiralcp
