#include "doctest.h"

#include <cmath>

#include "chiralcp/optimizer.hpp"

using namespace chiralcp;

TEST_CASE("deviation") {
  SUBCASE("exact five-pulse pi composite sits on its target") {
    CHECK(deviation(builtin("D1_full"), 0.0, 0.0) < 1e-12);
    CHECK(deviation(builtin("D2_full"), 0.0, 0.0) < 1e-12);
  }
  SUBCASE("exact composition to target gives zero") {
    CHECK(deviation(builtin("C1_full"), 0.0, 0.0) < 1e-12);
    CHECK(deviation(builtin("C1_half"), 0.0, 0.0) < 1e-12);
  }
  SUBCASE("bare pi pulse at eps = 0.1") {
    // closed-form oracle: ||U - U*||_F = 2 sqrt(2) |sin(0.05 pi / 2)|
    CHECK(deviation(builtin("single_full"), 0.1, 0.0) ==
          doctest::Approx(0.221915834539695).epsilon(1e-12));
  }
}

TEST_CASE("taylor_coefficients") {
  SUBCASE("bare pi pulse first-order sensitivities") {
    const auto co = taylor_coefficients(builtin("single_full"), 2);
    CHECK(co.c10 == doctest::Approx(kPi * std::sqrt(2.0) / 2).epsilon(1e-7));
    CHECK(co.c01 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    CHECK(!co.any_unstable());
  }
  SUBCASE("exact D pi composites are first-order flat in both errors") {
    for (const char* name : {"D1_full", "D2_full"}) {
      const auto co = taylor_coefficients(builtin(name), 1);
      CHECK(co.c10 < 1e-6);
      CHECK(co.c01 < 1e-6);
      CHECK(!co.any_unstable());
      CHECK(certify(builtin(name), 1));
    }
  }
  SUBCASE("printed half-pi tables are flat to print precision") {
    for (const char* name : {"D1_half", "D2_half"}) {
      const auto co = taylor_coefficients(builtin(name), 1);
      CHECK(co.c00 < 1e-3);
      CHECK(co.c10 < 1e-4);
      CHECK(co.c01 < 1e-3);
    }
  }
  SUBCASE("printed nine-pulse tables are second-order flat to print precision") {
    for (const char* name : {"D9_half", "D9_full"}) {
      const auto co = taylor_coefficients(builtin(name), 2);
      CHECK(co.c10 < 5e-3);
      CHECK(co.c01 < 5e-3);
      CHECK(co.c20 < 2e-2);
      CHECK(co.c02 < 2e-2);
      CHECK(co.c11 < 2e-2);
    }
  }
  SUBCASE("argument validation") {
    CHECK_THROWS(taylor_coefficients(builtin("D1_full"), 0));
    CHECK_THROWS(taylor_coefficients(builtin("D1_full"), 3));
  }
}

TEST_CASE("templates") {
  SUBCASE("parameter layout round-trips the printed tables") {
    const auto t14 = builtin_template("eq14");
    const auto p = t14.params_of(builtin("D2_half"));
    REQUIRE(p.size() == 4);
    CHECK(p[0] == doctest::Approx(0.4556));
    CHECK(p[1] == doctest::Approx(0.5448));
    CHECK(p[2] == doctest::Approx(1.2358));
    CHECK(p[3] == doctest::Approx(0.6799));
    const auto c = t14.realize(p, "again");
    for (std::size_t k = 0; k < c.pulses.size(); ++k) {
      CHECK(c.pulses[k].area_pi ==
            doctest::Approx(builtin("D2_half").pulses[k].area_pi));
      CHECK(c.pulses[k].phase ==
            doctest::Approx(builtin("D2_half").pulses[k].phase));
    }
  }
  SUBCASE("eq15 has three free phases") {
    CHECK(builtin_template("eq15").param_count() == 3);
    CHECK(builtin_template("eq14").param_count() == 4);
    CHECK(builtin_template("eq16").param_count() == 10);
    CHECK(builtin_template("eq16pi").param_count() == 5);
  }
  SUBCASE("unknown template") { CHECK_THROWS(builtin_template("eq99")); }
}

TEST_CASE("polish refines the printed tables to machine-zero certificates") {
  SUBCASE("five-pulse half blocks, order 1") {
    for (const char* name : {"D1_half", "D2_half"}) {
      const auto t = builtin_template("eq14");
      const auto start = t.params_of(builtin(name));
      const auto refined = polish(t, start, 1, "refined");
      CHECK(certify(refined, 1));
      const auto p = t.params_of(refined);
      for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(std::abs(p[k] - start[k]) < 3e-4);  // print rounding only
      }
    }
  }
  SUBCASE("nine-pulse blocks, order 2") {
    {
      const auto t = builtin_template("eq16");
      const auto start = t.params_of(builtin("D9_half"));
      const auto refined = polish(t, start, 2, "refined");
      const auto co = taylor_coefficients(refined, 2);
      CAPTURE(co.c10);
      CAPTURE(co.c01);
      CAPTURE(co.c20);
      CAPTURE(co.c02);
      CAPTURE(co.c11);
      CHECK(certify(refined, 2));
    }
    {
      const auto t = builtin_template("eq16pi");
      const auto refined =
          polish(t, t.params_of(builtin("D9_full")), 2, "refined");
      CHECK(certify(refined, 2));
    }
  }
}

TEST_CASE("equivalent_up_to_symmetry") {
  const auto a = builtin("D1_full");
  const auto b = builtin("D2_full");
  SUBCASE("the two printed pi variants are distinct solutions") {
    CHECK(!equivalent_up_to_symmetry(a, b));
  }
  SUBCASE("global phase shifts are equivalences") {
    CompositeSequence shifted = a;
    for (auto& p : shifted.pulses) p.phase = wrap_2pi(p.phase + 0.3);
    CHECK(equivalent_up_to_symmetry(a, shifted));
  }
  SUBCASE("2pi wraps are equivalences") {
    CompositeSequence wrapped = a;
    wrapped.pulses[1].phase += kTwoPi;  // wrapped on construction? keep raw
    CHECK(equivalent_up_to_symmetry(a, wrapped));
  }
  SUBCASE("phase negation is an equivalence") {
    CompositeSequence neg = a;
    for (auto& p : neg.pulses) p.phase = wrap_2pi(-p.phase);
    CHECK(equivalent_up_to_symmetry(a, neg));
  }
  SUBCASE("reversal with negated phases is an equivalence") {
    CompositeSequence rn = reverse(a);
    for (auto& p : rn.pulses) p.phase = wrap_2pi(-p.phase);
    CHECK(equivalent_up_to_symmetry(a, rn));
  }
  SUBCASE("polished half variants are distinct") {
    const auto t = builtin_template("eq14");
    const auto r1 = polish(t, t.params_of(builtin("D1_half")), 1, "r1");
    const auto r2 = polish(t, t.params_of(builtin("D2_half")), 1, "r2");
    CHECK(!equivalent_up_to_symmetry(r1, r2));
    CHECK(equivalent_up_to_symmetry(r1, r1));
  }
}

TEST_CASE("optimize on the five-pulse pi template") {
  const auto t = builtin_template("eq15");
  OptimizeOptions opts;
  opts.order = 1;
  opts.restarts = 8;
  opts.seed = 7;

  const auto r1 = optimize(t, opts);
  CHECK(r1.converged);
  CHECK(r1.best_cost < 1e-10);
  CHECK(!r1.certified.empty());
  for (const auto& c : r1.certified) CHECK(certify(c, 1));

  SUBCASE("determinism: identical runs give bit-identical tables") {
    const auto r2 = optimize(t, opts);
    REQUIRE(r2.best.pulses.size() == r1.best.pulses.size());
    for (std::size_t k = 0; k < r1.best.pulses.size(); ++k) {
      CHECK(r2.best.pulses[k].area_pi == r1.best.pulses[k].area_pi);
      CHECK(r2.best.pulses[k].phase == r1.best.pulses[k].phase);
    }
    CHECK(r2.best_cost == r1.best_cost);
    CHECK(r2.best_restart == r1.best_restart);
  }
  SUBCASE("thread count does not change the answer") {
    OptimizeOptions serial = opts;
    serial.jobs = 1;
    OptimizeOptions wide = opts;
    wide.jobs = 4;
    const auto rs = optimize(t, serial);
    const auto rw = optimize(t, wide);
    CHECK(rs.best_cost == rw.best_cost);
    CHECK(rs.best_restart == rw.best_restart);
    for (std::size_t k = 0; k < rs.best.pulses.size(); ++k) {
      CHECK(rs.best.pulses[k].phase == rw.best.pulses[k].phase);
    }
  }
}

TEST_CASE("a single pulse cannot compensate") {
  Template t;
  t.name = "one";
  t.n_pulses = 1;
  t.symmetry = Template::Symmetry::kFree;
  t.area_free = {false};
  t.fixed_area_pi = {1.0};
  t.target = Target::kFull;
  t.target_beta = 1.5 * kPi;
  OptimizeOptions opts;
  opts.order = 1;
  opts.restarts = 4;
  opts.seed = 3;
  const auto r = optimize(t, opts);
  CHECK(!r.converged);
  CHECK(r.certified.empty());
}

TEST_CASE("optimize argument validation") {
  const auto t = builtin_template("eq15");
  OptimizeOptions opts;
  opts.restarts = 0;
  CHECK_THROWS(optimize(t, opts));
  opts.restarts = 1;
  opts.order = 3;
  CHECK_THROWS(optimize(t, opts));
}
