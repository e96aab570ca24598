#include "chiralcp/sequences.hpp"

#include <algorithm>
#include <cmath>

namespace chiralcp {

namespace {

constexpr double kPerfect = 1e-12;

// P < Q < S, used for the table ordering
int alpha_rank(Transition t) {
  switch (t) {
    case Transition::P: return 0;
    case Transition::Q: return 1;
    case Transition::S: return 2;
  }
  return 3;
}

int shift_rank(Transition t) {
  switch (t) {
    case Transition::Q: return 0;
    case Transition::S: return 1;
    case Transition::P: return 2;
  }
  return 3;
}

}  // namespace

std::vector<SequenceStep> SequenceSpec::realize(double eps,
                                                double delta) const {
  std::vector<SequenceStep> out;
  out.reserve(3);
  for (const Step& s : steps) {
    const double area = (s.role == PulseRole::kFull) ? kPi : 0.5 * kPi;
    const double phase = s.phase_shifted ? 0.5 * kPi : 0.0;
    out.push_back({s.transition, {Pulse(area, phase, eps, delta)}});
  }
  return out;
}

std::string SequenceSpec::name() const {
  std::string out;
  for (const Step& s : steps) {
    if (!out.empty()) out += ' ';
    if (s.phase_shifted) out += 'i';
    out += to_string(s.transition);
    out += (s.role == PulseRole::kFull) ? "(pi)" : "(pi/2)";
  }
  return out;
}

std::vector<std::pair<SequenceSpec, ResolutionOutcome>>
enumerate_resolving_sequences() {
  std::vector<std::pair<SequenceSpec, ResolutionOutcome>> found;

  std::array<Transition, 3> order{Transition::P, Transition::S, Transition::Q};
  std::sort(order.begin(), order.end());
  do {
    for (int full_pos = 0; full_pos < 3; ++full_pos) {
      for (int shift_pos = 0; shift_pos < 3; ++shift_pos) {
        SequenceSpec spec;
        for (int k = 0; k < 3; ++k) {
          spec.steps[k] = {order[k],
                           k == full_pos ? PulseRole::kFull : PulseRole::kHalf,
                           k == shift_pos};
        }
        const auto steps = spec.realize();
        const auto pl = populations(
            sequence_propagator(steps, Handedness::L), StateVector::basis(1));
        const auto pr = populations(
            sequence_propagator(steps, Handedness::R), StateVector::basis(1));
        const int li =
            static_cast<int>(std::max_element(pl.begin(), pl.end()) - pl.begin());
        const int ri =
            static_cast<int>(std::max_element(pr.begin(), pr.end()) - pr.begin());
        if (li != ri && pl[li] > 1.0 - kPerfect && pr[ri] > 1.0 - kPerfect) {
          found.push_back(
              {spec, {li + 1, ri + 1, std::abs(pl[li] - pr[li])}});
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));

  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    const SequenceSpec& a = x.first;
    const SequenceSpec& b = y.first;
    auto key = [](const SequenceSpec& s) {
      Transition shifted = s.steps[0].transition;
      for (const auto& st : s.steps)
        if (st.phase_shifted) shifted = st.transition;
      return std::array<int, 3>{shift_rank(shifted),
                                alpha_rank(s.steps[0].transition),
                                alpha_rank(s.steps[1].transition)};
    };
    return key(a) < key(b);
  });
  return found;
}

PhaseBranch check_phase_condition(double alpha_p, double beta_p, double beta_s,
                                  double alpha_q, double beta_q, double tol) {
  const double sum =
      wrap_2pi(alpha_p + alpha_q + beta_p + beta_s - beta_q);
  const double dist0 = std::min(sum, kTwoPi - sum);
  const double dist_pi = std::abs(sum - kPi);
  if (dist0 <= tol) return PhaseBranch::kResolvingL1R3;
  if (dist_pi <= tol) return PhaseBranch::kResolvingL3R1;
  return PhaseBranch::kNonResolving;
}

std::pair<StateVector, StateVector> final_state_formula(double alpha_p,
                                                        double beta_p,
                                                        double beta_s,
                                                        double alpha_q,
                                                        double beta_q) {
  const complexd t1 = 0.5 * std::polar(1.0, alpha_p + alpha_q);
  const complexd t2 = 0.5 * std::polar(1.0, beta_q - beta_p - beta_s);
  const complexd t3 = 0.5 * std::polar(1.0, alpha_p - beta_q);
  const complexd t4 = 0.5 * std::polar(1.0, -(alpha_q + beta_p + beta_s));
  StateVector l{t1 + t2, 0.0, -t3 + t4};
  StateVector r{t1 - t2, 0.0, t3 + t4};
  return {l, r};
}

std::pair<StateVector, StateVector> final_state_engine(double alpha_p,
                                                       double beta_p,
                                                       double beta_s,
                                                       double alpha_q,
                                                       double beta_q) {
  const double rt = 1.0 / std::sqrt(2.0);
  const TwoStatePropagator up{rt * std::polar(1.0, alpha_p),
                              rt * std::polar(1.0, beta_p)};
  const TwoStatePropagator us{0.0, std::polar(1.0, beta_s)};
  const TwoStatePropagator uq{rt * std::polar(1.0, alpha_q),
                              rt * std::polar(1.0, beta_q)};
  auto run = [&](Handedness h) {
    const Mat3 u = embed(Transition::Q, uq, h) *
                   (embed(Transition::S, us, h) * embed(Transition::P, up, h));
    const auto v = u * std::array<complexd, 3>{1.0, 0.0, 0.0};
    return StateVector{v[0], v[1], v[2]};
  };
  return {run(Handedness::L), run(Handedness::R)};
}

}  // namespace chiralcp
