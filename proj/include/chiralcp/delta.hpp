#pragma once

#include <array>
#include <span>
#include <vector>

#include "chiralcp/su2.hpp"

namespace chiralcp {

/// Couplings of the closed-loop three-state system:
/// P drives 1<->2, S drives 2<->3, Q drives 1<->3.
enum class Transition { P, S, Q };

/// The two enantiomers differ only in the sign of the Q coupling;
/// R flips the sign of b on the Q transition.
enum class Handedness { L, R };

const char* to_string(Transition t);
const char* to_string(Handedness h);

/// Dense 3x3 complex matrix over the ordered basis (|1>, |2>, |3>).
struct Mat3 {
  std::array<complexd, 9> m{};

  static Mat3 identity();

  complexd& operator()(int r, int c) { return m[3 * r + c]; }
  const complexd& operator()(int r, int c) const { return m[3 * r + c]; }

  Mat3 operator*(const Mat3& rhs) const;
  Mat3 adjoint() const;
  std::array<complexd, 3> operator*(const std::array<complexd, 3>& v) const;

  double frobenius_distance(const Mat3& rhs) const;
  /// || U^dagger U - I ||_F
  double unitarity_defect() const;
};

using LoopPropagator = Mat3;

/// Normalized amplitudes (c1, c2, c3).
struct StateVector {
  complexd c1{1.0, 0.0};
  complexd c2{0.0, 0.0};
  complexd c3{0.0, 0.0};

  static StateVector basis(int state);  // state in {1, 2, 3}
  double norm_defect() const;           // | sum |ck|^2 - 1 |
};

/// Embed a two-state propagator on one transition into the loop, identity on
/// the idle state. For t = Q and h = R the off-diagonal coupling flips sign.
LoopPropagator embed(Transition t, const TwoStatePropagator& u, Handedness h);

/// One step of a sequence: a pulse train applied to a single transition.
struct SequenceStep {
  Transition transition;
  std::vector<Pulse> pulses;
};

/// Time-ordered propagator of a full sequence (first step acts first).
LoopPropagator sequence_propagator(std::span<const SequenceStep> seq,
                                   Handedness h);

/// Pk = |(u * init)_k|^2, k = 1..3.
std::array<double, 3> populations(const LoopPropagator& u,
                                  const StateVector& init);

}  // namespace chiralcp
