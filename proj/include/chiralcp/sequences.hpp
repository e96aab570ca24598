#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "chiralcp/delta.hpp"

namespace chiralcp {

enum class PulseRole { kHalf, kFull };  // pi/2 or pi

/// One three-pulse candidate: each step is a single resonant pulse on its own
/// transition; exactly one step carries a pi/2 field-phase shift.
struct SequenceSpec {
  struct Step {
    Transition transition;
    PulseRole role;
    bool phase_shifted;
  };
  std::array<Step, 3> steps;

  std::vector<SequenceStep> realize(double eps = 0.0, double delta = 0.0) const;
  std::string name() const;  // e.g. "P(pi/2) S(pi) iQ(pi/2)"
};

struct ResolutionOutcome {
  int final_L;      // 1..3
  int final_R;      // 1..3
  double contrast;  // |P_{final_L}(L) - P_{final_L}(R)|
};

/// Exhaustively test all transition orderings, pi-pulse placements and single
/// pi/2 phase-shift placements; return the perfect-contrast sequences
/// (populations within 1e-12 of 1), ordered as in the reference table:
/// shift on Q first, then S, then P; within a group by transition order.
std::vector<std::pair<SequenceSpec, ResolutionOutcome>>
enumerate_resolving_sequences();

/// Classification of a composite-phase tuple against the two resolving phase
/// conditions (sums mod 2*pi):
///   alphaP + alphaQ + betaP + betaS = betaQ        -> L stays in |1>, R -> |3>
///   alphaP + alphaQ + betaP + betaS = betaQ + pi   -> L -> |3>, R stays in |1>
enum class PhaseBranch { kResolvingL1R3, kResolvingL3R1, kNonResolving };

PhaseBranch check_phase_condition(double alpha_p, double beta_p, double beta_s,
                                  double alpha_q, double beta_q,
                                  double tol = 1e-9);

/// Final-state amplitudes for the ideal composite blocks
/// (|a_P| = |a_Q| = 1/sqrt(2), |b_S| = 1), starting from |1>.
/// Returns {L, R}.
std::pair<StateVector, StateVector> final_state_formula(double alpha_p,
                                                        double beta_p,
                                                        double beta_s,
                                                        double alpha_q,
                                                        double beta_q);

/// The same final states evaluated through the propagator engine (blocks
/// constructed from the phases, embedded and multiplied); used to cross-check
/// the closed-form expression.
std::pair<StateVector, StateVector> final_state_engine(double alpha_p,
                                                       double beta_p,
                                                       double beta_s,
                                                       double alpha_q,
                                                       double beta_q);

}  // namespace chiralcp
