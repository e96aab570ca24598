#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chiralcp/composite.hpp"

namespace chiralcp {

/// Magnitudes of the Taylor coefficients of the composed propagator around
/// (eps, delta) = (0, 0), by multi-index (i, j) over eps^i delta^j.
/// (0,0) is the deviation from the ideal target at the origin. Magnitudes are
/// Frobenius norms of the 2x2 coefficient matrices, Richardson-refined
/// central differences with base step h = 1e-3. A coefficient is flagged
/// unstable when the h and h/2 estimates disagree beyond 1e-5 relative
/// (absolute floor 1).
struct ErrorCoefficients {
  int max_order = 1;
  double c00 = 0.0;
  double c10 = 0.0, c01 = 0.0;
  double c20 = 0.0, c02 = 0.0, c11 = 0.0;
  bool unstable10 = false, unstable01 = false;
  bool unstable20 = false, unstable02 = false, unstable11 = false;

  double at(int i, int j) const;
  bool any_unstable() const;
};

/// Frobenius distance of the composed block from the ideal constant rotation
/// (target magnitudes from c.target; target phases from c's own composed
/// propagator at the origin, so an exact solution has deviation 0 there).
double deviation(const CompositeSequence& c, double eps, double delta);

/// Central finite differences (h = 1e-3, Richardson-checked with h/2) of the
/// composed propagator matrix elements. max_order must be 1 or 2.
ErrorCoefficients taylor_coefficients(const CompositeSequence& c,
                                      int max_order);

/// True when every first-order coefficient is below tol1 (and, for order 2,
/// every second-order coefficient is below tol2) with stable estimates.
bool certify(const CompositeSequence& c, int order, double tol1 = 1e-6,
             double tol2 = 1e-5);

/// Parametric family of composite sequences searched by the optimizer.
/// Parameters are listed as [free areas..., phases...] in units of pi, over
/// the independent slots (first half for palindromic symmetries).
struct Template {
  enum class Symmetry {
    kPalindromicPhases,          // phases mirrored, areas fixed per slot
    kPalindromicAreasAndPhases,  // both mirrored, areas may be free
    kFree
  };

  std::string name;
  int n_pulses = 0;
  Symmetry symmetry = Symmetry::kFree;
  std::vector<bool> area_free;        // per independent slot
  std::vector<double> fixed_area_pi;  // per independent slot (ignored if free)
  Target target = Target::kFull;
  double target_alpha = 0.0;  // required arg(a) of the ideal block (half only)
  double target_beta = 0.0;   // required arg(b)

  int slots() const;
  int param_count() const;
  CompositeSequence realize(std::span<const double> params,
                            std::string seq_name) const;
  /// Extract the parameter vector of a sequence of this shape.
  std::vector<double> params_of(const CompositeSequence& c) const;
  /// Ideal propagator of this template's target.
  TwoStatePropagator ideal() const;
};

/// Built-in templates: eq14 (5 pulses, outer areas free, half),
/// eq15 (5 pi pulses, full), eq16 (9 pulses, areas free, half),
/// eq16pi (9 pi pulses, full).
Template builtin_template(std::string_view name);

struct OptimizeOptions {
  int order = 1;
  int restarts = 1;
  std::uint64_t seed = 0;
  int jobs = 0;  // <= 0: OpenMP default
};

struct OptimizeResult {
  CompositeSequence best;
  ErrorCoefficients best_certificate;
  double best_cost = 0.0;
  int best_restart = -1;
  bool converged = false;  // best cost < 1e-10
  /// Certified restart solutions, deduplicated by equivalent_up_to_symmetry,
  /// sorted by (cost, restart index).
  std::vector<CompositeSequence> certified;
};

/// Derivative-free search (Nelder-Mead with uniform random restarts) driving
/// the origin deviation and the error coefficients up to `order` to zero.
/// Deterministic for fixed (template, options), independent of jobs.
OptimizeResult optimize(const Template& t, const OptimizeOptions& opts);

/// Deterministic local refinement from a given start (no randomness).
CompositeSequence polish(const Template& t, std::span<const double> start,
                         int order, std::string seq_name);

/// True when c2 maps onto c1 under a global phase shift of all pulses,
/// simultaneous phase negation, or order reversal with negation (the
/// transpose identity), comparing the composed propagator jets to 1e-8.
bool equivalent_up_to_symmetry(const CompositeSequence& c1,
                               const CompositeSequence& c2);

}  // namespace chiralcp
