#include "chiralcp/delta.hpp"

#include <cmath>
#include <stdexcept>

namespace chiralcp {

const char* to_string(Transition t) {
  switch (t) {
    case Transition::P: return "P";
    case Transition::S: return "S";
    case Transition::Q: return "Q";
  }
  return "?";
}

const char* to_string(Handedness h) {
  return h == Handedness::L ? "L" : "R";
}

Mat3 Mat3::identity() {
  Mat3 u;
  u(0, 0) = u(1, 1) = u(2, 2) = 1.0;
  return u;
}

Mat3 Mat3::operator*(const Mat3& rhs) const {
  Mat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      complexd acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += (*this)(r, k) * rhs(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

Mat3 Mat3::adjoint() const {
  Mat3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = std::conj((*this)(c, r));
  return out;
}

std::array<complexd, 3> Mat3::operator*(
    const std::array<complexd, 3>& v) const {
  std::array<complexd, 3> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

double Mat3::frobenius_distance(const Mat3& rhs) const {
  double acc = 0.0;
  for (int k = 0; k < 9; ++k) acc += std::norm(m[k] - rhs.m[k]);
  return std::sqrt(acc);
}

double Mat3::unitarity_defect() const {
  return (adjoint() * (*this)).frobenius_distance(identity());
}

StateVector StateVector::basis(int state) {
  switch (state) {
    case 1: return {1.0, 0.0, 0.0};
    case 2: return {0.0, 1.0, 0.0};
    case 3: return {0.0, 0.0, 1.0};
  }
  throw std::invalid_argument("StateVector::basis: state must be 1..3");
}

double StateVector::norm_defect() const {
  return std::abs(std::norm(c1) + std::norm(c2) + std::norm(c3) - 1.0);
}

LoopPropagator embed(Transition t, const TwoStatePropagator& u, Handedness h) {
  Mat3 out = Mat3::identity();
  switch (t) {
    case Transition::P:
      out(0, 0) = u.a;
      out(0, 1) = u.b;
      out(1, 0) = -std::conj(u.b);
      out(1, 1) = std::conj(u.a);
      break;
    case Transition::S:
      out(1, 1) = u.a;
      out(1, 2) = u.b;
      out(2, 1) = -std::conj(u.b);
      out(2, 2) = std::conj(u.a);
      break;
    case Transition::Q: {
      const double sign = (h == Handedness::L) ? 1.0 : -1.0;
      out(0, 0) = u.a;
      out(0, 2) = sign * u.b;
      out(2, 0) = -sign * std::conj(u.b);
      out(2, 2) = std::conj(u.a);
      break;
    }
  }
  return out;
}

LoopPropagator sequence_propagator(std::span<const SequenceStep> seq,
                                   Handedness h) {
  if (seq.empty()) {
    throw std::invalid_argument("sequence_propagator: empty sequence");
  }
  Mat3 u = Mat3::identity();
  for (const SequenceStep& step : seq) {
    if (step.pulses.empty()) {
      throw std::invalid_argument("sequence_propagator: step with empty train");
    }
    u = embed(step.transition, compose(std::span<const Pulse>(step.pulses)), h) * u;
  }
  return u;
}

std::array<double, 3> populations(const LoopPropagator& u,
                                  const StateVector& init) {
  if (init.norm_defect() > 1e-9) {
    throw std::invalid_argument("populations: init not normalized");
  }
  const auto v = u * std::array<complexd, 3>{init.c1, init.c2, init.c3};
  return {std::norm(v[0]), std::norm(v[1]), std::norm(v[2])};
}

}  // namespace chiralcp
