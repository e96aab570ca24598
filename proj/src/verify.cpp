#include "chiralcp/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>

#include "chiralcp/optimizer.hpp"
#include "chiralcp/sequences.hpp"

namespace chiralcp {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

struct TableRow {
  const char* sequence;
  int final_l, final_r;
};

// the twelve published chiral-resolving pulse sequences
constexpr TableRow kTableRows[12] = {
    {"P(pi/2) iQ(pi) S(pi/2)", 3, 2},  {"P(pi/2) S(pi) iQ(pi/2)", 3, 1},
    {"iQ(pi/2) P(pi) S(pi/2)", 3, 2},  {"iQ(pi/2) S(pi) P(pi/2)", 1, 2},
    {"P(pi/2) Q(pi) iS(pi/2)", 2, 3},  {"P(pi/2) iS(pi) Q(pi/2)", 1, 3},
    {"Q(pi/2) P(pi) iS(pi/2)", 2, 3},  {"Q(pi/2) iS(pi) P(pi/2)", 2, 1},
    {"iP(pi/2) Q(pi) S(pi/2)", 2, 3},  {"iP(pi/2) S(pi) Q(pi/2)", 1, 3},
    {"Q(pi/2) iP(pi) S(pi/2)", 2, 3},  {"Q(pi/2) S(pi) iP(pi/2)", 2, 1},
};

ClaimResult claim_table1(int) {
  ClaimResult out{"table1", false, "", 0.0};
  const auto found = enumerate_resolving_sequences();
  if (found.size() != 12) {
    out.detail = fmt("expected 12 resolving sequences, found %zu", found.size());
    return out;
  }
  for (int k = 0; k < 12; ++k) {
    const auto& [spec, res] = found[k];
    if (spec.name() != kTableRows[k].sequence ||
        res.final_L != kTableRows[k].final_l ||
        res.final_R != kTableRows[k].final_r ||
        std::abs(res.contrast - 1.0) > 1e-12) {
      out.detail = fmt("row %d mismatch: %s -> %d,%d", k + 1,
                       spec.name().c_str(), res.final_L, res.final_R);
      return out;
    }
  }
  out.pass = true;
  out.detail = "12/12 rows reproduced with perfect contrast";
  return out;
}

ClaimResult claim_eq5(int) {
  ClaimResult out{"eq5", false, "", 0.0};
  const std::vector<SequenceStep> seq{{Transition::P, {Pulse(kPi / 2)}},
                                      {Transition::S, {Pulse(kPi)}},
                                      {Transition::Q, {Pulse(kPi / 2, kPi / 2)}}};
  Mat3 el, er;
  el(0, 1) = el(1, 2) = complexd{0.0, -1.0};
  el(2, 0) = complexd{-1.0, 0.0};
  er(0, 0) = complexd{1.0, 0.0};
  er(1, 2) = er(2, 1) = complexd{0.0, -1.0};
  const double dl =
      sequence_propagator(seq, Handedness::L).frobenius_distance(el);
  const double dr =
      sequence_propagator(seq, Handedness::R).frobenius_distance(er);
  out.pass = dl < 1e-12 && dr < 1e-12;
  out.detail = fmt("|U_L - ref| = %.2e, |U_R - ref| = %.2e", dl, dr);
  return out;
}

ClaimResult claim_phase_formula(int) {
  ClaimResult out{"phase-formula", false, "", 0.0};
  std::mt19937_64 rng(987654321);
  auto u01 = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * kTwoPi;
  };
  double worst = 0.0;
  int classified = 0;
  for (int k = 0; k < 1000; ++k) {
    const double ap = u01(), bp = u01(), bs = u01(), aq = u01();
    double bq = u01();
    if (k % 3 == 1) bq = wrap_2pi(ap + aq + bp + bs);
    if (k % 3 == 2) bq = wrap_2pi(ap + aq + bp + bs - kPi);
    const auto [fl, fr] = final_state_formula(ap, bp, bs, aq, bq);
    const auto [el, er] = final_state_engine(ap, bp, bs, aq, bq);
    worst = std::max({worst, std::abs(fl.c1 - el.c1), std::abs(fl.c3 - el.c3),
                      std::abs(fr.c1 - er.c1), std::abs(fr.c3 - er.c3),
                      std::abs(fl.c2 - el.c2), std::abs(fr.c2 - er.c2)});
    const bool perfect =
        (std::norm(el.c1) > 1.0 - 1e-9 && std::norm(er.c3) > 1.0 - 1e-9) ||
        (std::norm(el.c3) > 1.0 - 1e-9 && std::norm(er.c1) > 1.0 - 1e-9);
    const PhaseBranch branch = check_phase_condition(ap, bp, bs, aq, bq);
    if ((branch != PhaseBranch::kNonResolving) != perfect) {
      out.detail = fmt("classifier/engine disagreement at tuple %d", k);
      return out;
    }
    if (branch != PhaseBranch::kNonResolving) ++classified;
  }
  if (worst > 1e-10) {
    out.detail = fmt("formula/engine deviation %.2e > 1e-10", worst);
    return out;
  }
  out.pass = true;
  out.detail =
      fmt("1000 tuples: max amplitude deviation %.2e, %d resolving", worst,
          classified);
  return out;
}

ClaimResult claim_single_profile(int) {
  ClaimResult out{"single-profile", false, "", 0.0};
  const auto a = assemble("single");
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double eps = -0.5 + i / 1000.0;
    const double c = std::cos(kPi * (1.0 + eps) / 4);
    const double s = std::sin(kPi * (1.0 + eps) / 4);
    const double S = std::sin(kPi * (1.0 + eps) / 2);
    const auto pl = populations(a.propagator(eps, 0.0, Handedness::L),
                                StateVector::basis(1));
    const auto pr = populations(a.propagator(eps, 0.0, Handedness::R),
                                StateVector::basis(1));
    worst = std::max({worst,
                      std::abs(pr[2] - c * c * s * s * (1 + S) * (1 + S)),
                      std::abs(pl[2] - c * c * s * s * (1 - S) * (1 - S))});
  }
  out.pass = worst < 1e-12;
  out.detail = fmt("max |engine - closed form| = %.2e over 1001 points", worst);
  return out;
}

ClaimResult claim_order_cp5(int) {
  ClaimResult out{"order-cp5", false, "", 0.0};
  // the pi variants are exact solutions; certify the printed tables directly
  for (const char* name : {"D1_full", "D2_full"}) {
    if (!certify(builtin(name), 1)) {
      out.detail = fmt("%s failed the order-1 certificate", name);
      return out;
    }
  }
  // the half-pi tables are printed to 4 decimals; certify the class solution
  // polished from the printed start
  const auto t = builtin_template("eq14");
  for (const char* name : {"D1_half", "D2_half"}) {
    const auto start = t.params_of(builtin(name));
    const auto refined = polish(t, start, 1, std::string(name) + "_ref");
    if (!certify(refined, 1)) {
      out.detail = fmt("polished %s failed the order-1 certificate", name);
      return out;
    }
    const auto p = t.params_of(refined);
    double moved = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      moved = std::max(moved, std::abs(p[k] - start[k]));
    }
    if (moved > 5e-4) {
      out.detail = fmt("%s drifted %.1e from print (not the same solution)",
                       name, moved);
      return out;
    }
  }
  out.pass = true;
  out.detail = "five-pulse classes certified at order 1 (coefficients < 1e-6)";
  return out;
}

ClaimResult claim_order_cp9(int) {
  ClaimResult out{"order-cp9", false, "", 0.0};
  const struct {
    const char* tpl;
    const char* seq;
  } cases[] = {{"eq16", "D9_half"}, {"eq16pi", "D9_full"}};
  for (const auto& c : cases) {
    const auto t = builtin_template(c.tpl);
    const auto start = t.params_of(builtin(c.seq));
    const auto refined = polish(t, start, 2, std::string(c.seq) + "_ref");
    if (!certify(refined, 2)) {
      const auto co = taylor_coefficients(refined, 2);
      out.detail = fmt("%s: c10=%.1e c01=%.1e c20=%.1e c02=%.1e c11=%.1e",
                       c.seq, co.c10, co.c01, co.c20, co.c02, co.c11);
      return out;
    }
    const auto p = t.params_of(refined);
    double moved = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      moved = std::max(moved, std::abs(p[k] - start[k]));
    }
    if (moved > 5e-4) {
      out.detail = fmt("%s drifted %.1e from print", c.seq, moved);
      return out;
    }
  }
  out.pass = true;
  out.detail =
      "nine-pulse classes certified at order 2 (first < 1e-6, second < 1e-5)";
  return out;
}

ClaimResult claim_fig4(int jobs) {
  ClaimResult out{"fig4-ordering", false, "", 0.0};
  ScanGrid g;
  g.eps_steps = 1001;
  g.delta_min = g.delta_max = 0.0;
  g.delta_steps = 1;
  const char* names[] = {"single", "T5", "T6", "T7", "T9"};
  double w[5];
  for (int k = 0; k < 5; ++k) {
    w[k] = high_fidelity_width(scan(assemble(names[k]), g,
                                    StateVector::basis(1), jobs),
                               0.99);
  }
  out.pass = w[0] < w[1] && w[1] <= w[2] && w[2] <= w[3] && w[3] <= w[4];
  out.detail = fmt("widths at 0.99: %.4f < %.4f <= %.4f <= %.4f <= %.4f", w[0],
                   w[1], w[2], w[3], w[4]);
  return out;
}

ClaimResult claim_fig5(int jobs) {
  ClaimResult out{"fig5-ordering", false, "", 0.0};
  ScanGrid g;  // default 101 x 101 over [-0.5, 0.5] x [-1, 1]
  const char* names[] = {"single", "CP5", "CP9"};
  double area[3], point[3];
  for (int k = 0; k < 3; ++k) {
    const auto a = assemble(names[k]);
    area[k] = high_fidelity_width(scan(a, g, StateVector::basis(1), jobs), 0.99);
    point[k] = a.contrast(0.1, 0.1);
  }
  const bool order_ok = area[0] < area[1] && area[1] < area[2];
  const bool point_ok = point[0] < 0.99 && point[1] >= 0.99 && point[2] >= 0.99;
  out.pass = order_ok && point_ok;
  out.detail = fmt(
      "areas at 0.99: %.4f < %.4f < %.4f; contrast(0.1,0.1): %.4f, %.4f, %.4f",
      area[0], area[1], area[2], point[0], point[1], point[2]);
  return out;
}

ClaimResult claim_optimizer_eq15(int jobs) {
  ClaimResult out{"optimizer-eq15", false, "", 0.0};
  OptimizeOptions opts;
  opts.order = 1;
  opts.restarts = 200;
  opts.seed = 42;
  opts.jobs = jobs;
  const auto r = optimize(builtin_template("eq15"), opts);
  if (!r.converged) {
    out.detail = fmt("not converged: best cost %.2e", r.best_cost);
    return out;
  }
  if (r.certified.empty()) {
    out.detail = "no certified solutions";
    return out;
  }
  const auto a = builtin("D1_full");
  const auto b = builtin("D2_full");
  bool matched = false;
  for (const auto& c : r.certified) {
    if (equivalent_up_to_symmetry(a, c) || equivalent_up_to_symmetry(b, c)) {
      matched = true;
      break;
    }
  }
  out.pass = matched;
  out.detail = fmt("%zu certified solution families, best cost %.1e%s",
                   r.certified.size(), r.best_cost,
                   matched ? ", published solution recovered" : "");
  return out;
}

using ClaimFn = std::function<ClaimResult(int)>;

const std::vector<std::pair<std::string, ClaimFn>>& registry() {
  static const std::vector<std::pair<std::string, ClaimFn>> reg = {
      {"table1", claim_table1},
      {"eq5", claim_eq5},
      {"phase-formula", claim_phase_formula},
      {"single-profile", claim_single_profile},
      {"order-cp5", claim_order_cp5},
      {"order-cp9", claim_order_cp9},
      {"fig4-ordering", claim_fig4},
      {"fig5-ordering", claim_fig5},
      {"optimizer-eq15", claim_optimizer_eq15},
  };
  return reg;
}

}  // namespace

std::vector<std::string> claim_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

std::vector<ClaimResult> run_claims(const std::vector<std::string>& names,
                                    int jobs) {
  std::vector<ClaimResult> out;
  for (const std::string& name : names) {
    const ClaimFn* fn = nullptr;
    for (const auto& [n, f] : registry()) {
      if (n == name) fn = &f;
    }
    if (!fn) throw std::invalid_argument("unknown claim: " + name);
    const auto t0 = std::chrono::steady_clock::now();
    ClaimResult r = (*fn)(jobs);
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace chiralcp
