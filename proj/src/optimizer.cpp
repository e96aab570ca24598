#include "chiralcp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chiralcp {

namespace {

constexpr double kStep = 1e-3;          // finite-difference base step
constexpr double kConvergedCost = 1e-10;

// derivative of [[x, y], [-y*, x*]]; norm is the Frobenius norm
struct CkJet {
  complexd x{0.0, 0.0};
  complexd y{0.0, 0.0};

  CkJet operator-(const CkJet& o) const { return {x - o.x, y - o.y}; }
  CkJet operator+(const CkJet& o) const { return {x + o.x, y + o.y}; }
  CkJet scaled(double s) const { return {s * x, s * y}; }
  double norm() const {
    return std::sqrt(2.0 * (std::norm(x) + std::norm(y)));
  }
};

CkJet jet_of(const TwoStatePropagator& u) { return {u.a, u.b}; }

using BlockFn = std::function<TwoStatePropagator(double, double)>;

struct JetSet {
  CkJet u0, d10, d01, d20, d02, d11;
};

JetSet central_jets(const BlockFn& U, double h, int order = 2) {
  const CkJet u0 = jet_of(U(0.0, 0.0));
  const CkJet up = jet_of(U(h, 0.0)), um = jet_of(U(-h, 0.0));
  const CkJet vp = jet_of(U(0.0, h)), vm = jet_of(U(0.0, -h));
  JetSet j;
  j.u0 = u0;
  j.d10 = (up - um).scaled(0.5 / h);
  j.d01 = (vp - vm).scaled(0.5 / h);
  if (order >= 2) {
    const CkJet pp = jet_of(U(h, h)), pm = jet_of(U(h, -h));
    const CkJet mp = jet_of(U(-h, h)), mm = jet_of(U(-h, -h));
    j.d20 = (up - u0.scaled(2.0) + um).scaled(1.0 / (h * h));
    j.d02 = (vp - u0.scaled(2.0) + vm).scaled(1.0 / (h * h));
    j.d11 = (pp - pm - mp + mm).scaled(0.25 / (h * h));
  }
  return j;
}

// Two Richardson extrapolations, from (h, h/2) and (h/2, h/4); their
// disagreement is the convergence check the instability flag reports.
struct RichardsonJets {
  JetSet jets;  // extrapolated from (h/2, h/4)
  double dis10, dis01, dis20, dis02, dis11;
};

JetSet extrapolate(const JetSet& coarse, const JetSet& fine) {
  auto one = [](const CkJet& ja, const CkJet& jb) {
    return (jb.scaled(4.0) - ja).scaled(1.0 / 3.0);
  };
  JetSet out;
  out.u0 = fine.u0;
  out.d10 = one(coarse.d10, fine.d10);
  out.d01 = one(coarse.d01, fine.d01);
  out.d20 = one(coarse.d20, fine.d20);
  out.d02 = one(coarse.d02, fine.d02);
  out.d11 = one(coarse.d11, fine.d11);
  return out;
}

RichardsonJets richardson_jets(const BlockFn& U, double h) {
  const JetSet a = central_jets(U, h);
  const JetSet b = central_jets(U, 0.5 * h);
  const JetSet c = central_jets(U, 0.25 * h);
  const JetSet r1 = extrapolate(a, b);
  const JetSet r2 = extrapolate(b, c);
  RichardsonJets out;
  out.jets = r2;
  out.dis10 = (r1.d10 - r2.d10).norm();
  out.dis01 = (r1.d01 - r2.d01).norm();
  out.dis20 = (r1.d20 - r2.d20).norm();
  out.dis02 = (r1.d02 - r2.d02).norm();
  out.dis11 = (r1.d11 - r2.d11).norm();
  return out;
}

bool unstable(double disagreement, double magnitude) {
  return disagreement > 1e-5 * std::max(1.0, magnitude);
}

TwoStatePropagator ideal_target(Target target, double alpha, double beta) {
  const double rt = 1.0 / std::sqrt(2.0);
  if (target == Target::kHalf) {
    return {rt * std::polar(1.0, alpha), rt * std::polar(1.0, beta)};
  }
  return {complexd{0.0, 0.0}, std::polar(1.0, beta)};
}

double frobenius(const TwoStatePropagator& u, const TwoStatePropagator& v) {
  return std::sqrt(2.0 * (std::norm(u.a - v.a) + std::norm(u.b - v.b)));
}

TwoStatePropagator self_gauged_target(const CompositeSequence& c) {
  const TwoStatePropagator u0 = c.propagator(0.0, 0.0);
  const double beta = std::arg(u0.b);
  if (c.target == Target::kHalf) {
    return ideal_target(Target::kHalf, std::arg(u0.a), beta);
  }
  return ideal_target(Target::kFull, 0.0, beta);
}

}  // namespace

double ErrorCoefficients::at(int i, int j) const {
  if (i == 0 && j == 0) return c00;
  if (i == 1 && j == 0) return c10;
  if (i == 0 && j == 1) return c01;
  if (i == 2 && j == 0) return c20;
  if (i == 0 && j == 2) return c02;
  if (i == 1 && j == 1) return c11;
  throw std::out_of_range("ErrorCoefficients::at: unsupported multi-index");
}

bool ErrorCoefficients::any_unstable() const {
  if (unstable10 || unstable01) return true;
  if (max_order >= 2 && (unstable20 || unstable02 || unstable11)) return true;
  return false;
}

double deviation(const CompositeSequence& c, double eps, double delta) {
  return frobenius(c.propagator(eps, delta), self_gauged_target(c));
}

ErrorCoefficients taylor_coefficients(const CompositeSequence& c,
                                      int max_order) {
  if (max_order < 1 || max_order > 2) {
    throw std::invalid_argument("taylor_coefficients: max_order must be 1 or 2");
  }
  const BlockFn U = [&c](double e, double d) { return c.propagator(e, d); };
  const RichardsonJets r = richardson_jets(U, kStep);

  ErrorCoefficients co;
  co.max_order = max_order;
  co.c00 = deviation(c, 0.0, 0.0);
  co.c10 = r.jets.d10.norm();
  co.c01 = r.jets.d01.norm();
  co.unstable10 = unstable(r.dis10, r.jets.d10.norm());
  co.unstable01 = unstable(r.dis01, r.jets.d01.norm());
  if (max_order >= 2) {
    co.c20 = 0.5 * r.jets.d20.norm();  // Taylor coefficient: f''/2!
    co.c02 = 0.5 * r.jets.d02.norm();
    co.c11 = r.jets.d11.norm();
    co.unstable20 = unstable(r.dis20, r.jets.d20.norm());
    co.unstable02 = unstable(r.dis02, r.jets.d02.norm());
    co.unstable11 = unstable(r.dis11, r.jets.d11.norm());
  }
  return co;
}

bool certify(const CompositeSequence& c, int order, double tol1, double tol2) {
  const ErrorCoefficients co = taylor_coefficients(c, order);
  if (co.any_unstable()) return false;
  if (co.c10 >= tol1 || co.c01 >= tol1) return false;
  if (order >= 2 && (co.c20 >= tol2 || co.c02 >= tol2 || co.c11 >= tol2)) {
    return false;
  }
  return true;
}

int Template::slots() const {
  return symmetry == Symmetry::kFree ? n_pulses : (n_pulses + 1) / 2;
}

int Template::param_count() const {
  int n = slots();  // one phase per slot
  for (bool f : area_free)
    if (f) ++n;
  return n;
}

CompositeSequence Template::realize(std::span<const double> params,
                                    std::string seq_name) const {
  if (static_cast<int>(params.size()) != param_count()) {
    throw std::invalid_argument("Template::realize: wrong parameter count");
  }
  const int ns = slots();
  std::vector<double> areas(ns), phases(ns);
  std::size_t k = 0;
  for (int s = 0; s < ns; ++s) {
    areas[s] = area_free[s] ? params[k++] : fixed_area_pi[s];
  }
  for (int s = 0; s < ns; ++s) phases[s] = params[k++] * kPi;

  CompositeSequence c;
  c.name = std::move(seq_name);
  c.target = target;
  c.stabilized = true;
  c.pulses.reserve(n_pulses);
  for (int p = 0; p < n_pulses; ++p) {
    const int s =
        (symmetry == Symmetry::kFree) ? p : std::min(p, n_pulses - 1 - p);
    c.pulses.push_back({areas[s], wrap_2pi(phases[s])});
  }
  return c;
}

std::vector<double> Template::params_of(const CompositeSequence& c) const {
  if (static_cast<int>(c.pulses.size()) != n_pulses) {
    throw std::invalid_argument("Template::params_of: pulse count mismatch");
  }
  const int ns = slots();
  std::vector<double> out;
  for (int s = 0; s < ns; ++s) {
    if (area_free[s]) out.push_back(c.pulses[s].area_pi);
  }
  for (int s = 0; s < ns; ++s) out.push_back(c.pulses[s].phase / kPi);
  return out;
}

TwoStatePropagator Template::ideal() const {
  return ideal_target(target, target_alpha, target_beta);
}

Template builtin_template(std::string_view name) {
  Template t;
  t.name = std::string(name);
  if (name == "eq14") {
    t.n_pulses = 5;
    t.symmetry = Template::Symmetry::kPalindromicAreasAndPhases;
    t.area_free = {true, false, false};
    t.fixed_area_pi = {0.0, 1.0, 1.0};
    t.target = Target::kHalf;
    t.target_alpha = kPi;
    t.target_beta = 0.5 * kPi;
  } else if (name == "eq15") {
    t.n_pulses = 5;
    t.symmetry = Template::Symmetry::kPalindromicPhases;
    t.area_free = {false, false, false};
    t.fixed_area_pi = {1.0, 1.0, 1.0};
    t.target = Target::kFull;
    t.target_beta = kPi;
  } else if (name == "eq16") {
    t.n_pulses = 9;
    t.symmetry = Template::Symmetry::kPalindromicAreasAndPhases;
    t.area_free = {true, true, true, true, true};
    t.fixed_area_pi = {0.0, 0.0, 0.0, 0.0, 0.0};
    t.target = Target::kHalf;
    t.target_alpha = kPi;
    t.target_beta = 0.5 * kPi;
  } else if (name == "eq16pi") {
    t.n_pulses = 9;
    t.symmetry = Template::Symmetry::kPalindromicPhases;
    t.area_free = {false, false, false, false, false};
    t.fixed_area_pi = {1.0, 1.0, 1.0, 1.0, 1.0};
    t.target = Target::kFull;
    t.target_beta = 1.5 * kPi;
  } else {
    throw std::invalid_argument("unknown template: " + std::string(name));
  }
  return t;
}

namespace {

// cost = 1e3 * deviation(0,0)^2 + sum of squared coefficient norms
// (plain central differences; the final certificate re-measures with
// Richardson refinement independently of this cost)
// refined = false: plain central differences at h (cheap, for the coarse
// basin search). refined = true: Richardson-extrapolated differences, whose
// zero coincides with the certificate measurement (the plain-FD truncation
// bias ~ h^2 f''' is above the 1e-6 certificate level).
double cost_of(const Template& t, std::span<const double> params, int order,
               bool refined) {
  const CompositeSequence c = t.realize(params, "cand");
  for (const PulseSpec& p : c.pulses) {
    if (p.area_pi <= 1e-6) return 1e6;  // reject degenerate areas
  }
  const TwoStatePropagator tgt = t.ideal();
  const BlockFn U = [&c](double e, double d) { return c.propagator(e, d); };
  const JetSet coarse = central_jets(U, kStep, order);
  const JetSet j = refined
                       ? extrapolate(coarse, central_jets(U, 0.5 * kStep, order))
                       : coarse;
  auto sq = [](double v) { return v * v; };
  const double dev0 = std::sqrt(
      2.0 * (std::norm(coarse.u0.x - tgt.a) + std::norm(coarse.u0.y - tgt.b)));
  double acc = 1e3 * dev0 * dev0;
  acc += sq(j.d10.norm()) + sq(j.d01.norm());
  if (order >= 2) {
    acc += sq(0.5 * j.d20.norm()) + sq(0.5 * j.d02.norm()) + sq(j.d11.norm());
  }
  return acc;
}

using CostFn = std::function<double(std::span<const double>)>;

struct NmResult {
  std::vector<double> x;
  double f = 0.0;
};

// standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2)
NmResult nelder_mead(const CostFn& f, std::vector<double> x0, double step,
                     int max_iter) {
  const int n = static_cast<int>(x0.size());
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (int i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (int it = 0; it < max_iter; ++it) {
    // order ascending by cost
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (int i = 0; i <= n; ++i) {
        s2[i] = simplex[idx[i]];
        f2[i] = fv[idx[i]];
      }
      simplex.swap(s2);
      fv.swap(f2);
    }
    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < n; ++k)
        diam = std::max(diam, std::abs(simplex[i][k] - simplex[0][k]));
    if (diam < 1e-14 || fv[n] - fv[0] < 1e-26 * (1.0 + std::abs(fv[0]))) break;

    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += simplex[i][k];
      centroid[k] = acc / n;
    }
    for (int k = 0; k < n; ++k) xr[k] = 2.0 * centroid[k] - simplex[n][k];
    const double fr = f(xr);
    if (fr < fv[0]) {
      for (int k = 0; k < n; ++k) xe[k] = 3.0 * centroid[k] - 2.0 * simplex[n][k];
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      for (int k = 0; k < n; ++k) {
        xc[k] = outside ? 0.5 * (centroid[k] + xr[k])
                        : 0.5 * (centroid[k] + simplex[n][k]);
      }
      const double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < n; ++k) {
            simplex[i][k] = 0.5 * (simplex[0][k] + simplex[i][k]);
          }
          fv[i] = f(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return {simplex[best], fv[best]};
}

// restart chain from the incumbent with shrinking initial simplexes; the
// restarts recover from premature simplex collapse and grind the converged
// basins down to the finite-difference floor
NmResult nm_polish_chain(const CostFn& f, NmResult r, int dim) {
  const int iters = 2500 * std::max(3, dim);
  for (int round = 0; round < 2 && r.f > 1e-24; ++round) {
    for (double s : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8}) {
      NmResult r2 = nelder_mead(f, r.x, s, iters);
      if (r2.f < r.f) r = std::move(r2);
      if (r.f < 1e-24) break;
    }
  }
  return r;
}

// coarse basin search with the cheap cost; only solutions that reach the
// plausible-basin level get the refined-cost polish
NmResult nm_refine(const CostFn& f_fast, const CostFn& f_acc,
                   std::vector<double> x0, double step, int max_iter) {
  NmResult r = nelder_mead(f_fast, std::move(x0), step, max_iter);
  const int dim = static_cast<int>(r.x.size());
  r.f = f_acc(r.x);
  if (r.f < 1e-4) r = nm_polish_chain(f_acc, std::move(r), dim);
  return r;
}

double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> random_start(const Template& t, std::mt19937_64& rng) {
  std::vector<double> p;
  p.reserve(t.param_count());
  for (int s = 0; s < t.slots(); ++s) {
    if (t.area_free[s]) p.push_back(0.05 + 1.45 * canonical_uniform(rng));
  }
  for (int s = 0; s < t.slots(); ++s) p.push_back(2.0 * canonical_uniform(rng));
  return p;
}

CompositeSequence negate_phases(const CompositeSequence& c) {
  CompositeSequence out = c;
  for (PulseSpec& p : out.pulses) p.phase = wrap_2pi(-p.phase);
  return out;
}

}  // namespace

OptimizeResult optimize(const Template& t, const OptimizeOptions& opts) {
  if (opts.restarts < 1) {
    throw std::invalid_argument("optimize: restarts must be >= 1");
  }
  if (opts.order < 1 || opts.order > 2) {
    throw std::invalid_argument("optimize: order must be 1 or 2");
  }

  const int n_restarts = opts.restarts;
  std::vector<NmResult> results(n_restarts);

  const CostFn f_fast = [&t, &opts](std::span<const double> p) {
    return cost_of(t, p, opts.order, false);
  };
  const CostFn f_acc = [&t, &opts](std::span<const double> p) {
    return cost_of(t, p, opts.order, true);
  };
  const int max_iter = 400 * std::max(4, t.param_count());

#ifdef _OPENMP
  const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
  for (int r = 0; r < n_restarts; ++r) {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * (r + 1));
    results[r] = nm_refine(f_fast, f_acc, random_start(t, rng), 0.25, max_iter);
  }

  int best = 0;
  for (int r = 1; r < n_restarts; ++r) {
    if (results[r].f < results[best].f) best = r;
  }

  OptimizeResult out;
  out.best = t.realize(results[best].x, t.name + "_opt");
  out.best_cost = results[best].f;
  out.best_restart = best;
  out.converged = results[best].f < kConvergedCost;
  out.best_certificate = taylor_coefficients(out.best, opts.order);

  // deduplicated certified solutions, in (cost, restart) order
  std::vector<int> order_idx(n_restarts);
  for (int r = 0; r < n_restarts; ++r) order_idx[r] = r;
  std::sort(order_idx.begin(), order_idx.end(), [&](int a, int b) {
    if (results[a].f != results[b].f) return results[a].f < results[b].f;
    return a < b;
  });
  for (int r : order_idx) {
    if (results[r].f >= kConvergedCost) continue;
    CompositeSequence cand =
        t.realize(results[r].x, t.name + "_opt" + std::to_string(r));
    if (!certify(cand, opts.order)) continue;
    const bool dup =
        std::any_of(out.certified.begin(), out.certified.end(),
                    [&](const CompositeSequence& c) {
                      return equivalent_up_to_symmetry(c, cand);
                    });
    if (!dup) out.certified.push_back(std::move(cand));
  }
  return out;
}

CompositeSequence polish(const Template& t, std::span<const double> start,
                         int order, std::string seq_name) {
  const CostFn f = [&t, order](std::span<const double> p) {
    return cost_of(t, p, order, true);
  };
  NmResult r = nelder_mead(f, {start.begin(), start.end()}, 0.02,
                           2500 * std::max(3, t.param_count()));
  r = nm_polish_chain(f, std::move(r), t.param_count());
  return t.realize(r.x, std::move(seq_name));
}

bool equivalent_up_to_symmetry(const CompositeSequence& c1,
                               const CompositeSequence& c2) {
  if (c1.pulses.size() != c2.pulses.size() || c1.target != c2.target) {
    return false;
  }
  const auto jets1 = richardson_jets(
      [&c1](double e, double d) { return c1.propagator(e, d); }, kStep).jets;

  auto areas_match = [&c1](const CompositeSequence& c) {
    for (std::size_t k = 0; k < c.pulses.size(); ++k) {
      if (std::abs(c.pulses[k].area_pi - c1.pulses[k].area_pi) > 1e-9) {
        return false;
      }
    }
    return true;
  };

  auto jets_match = [&jets1](const CompositeSequence& c) {
    const auto jets2 = richardson_jets(
        [&c](double e, double d) { return c.propagator(e, d); }, kStep).jets;
    // global phase freedom rotates only the b column
    complexd rot{1.0, 0.0};
    if (std::abs(jets1.u0.y) > 1e-9 && std::abs(jets2.u0.y) > 1e-9) {
      rot = (jets1.u0.y / std::abs(jets1.u0.y)) *
            std::conj(jets2.u0.y / std::abs(jets2.u0.y));
    }
    const CkJet* a[6] = {&jets1.u0,  &jets1.d10, &jets1.d01,
                         &jets1.d20, &jets1.d02, &jets1.d11};
    const CkJet* b[6] = {&jets2.u0,  &jets2.d10, &jets2.d01,
                         &jets2.d20, &jets2.d02, &jets2.d11};
    for (int k = 0; k < 6; ++k) {
      const CkJet diff{a[k]->x - b[k]->x, a[k]->y - rot * b[k]->y};
      if (diff.norm() > 1e-8 * std::max(1.0, a[k]->norm())) return false;
    }
    return true;
  };

  const CompositeSequence candidates[3] = {
      c2, negate_phases(c2), reverse(negate_phases(c2))};
  for (const CompositeSequence& cand : candidates) {
    if (areas_match(cand) && jets_match(cand)) return true;
  }
  return false;
}

}  // namespace chiralcp
