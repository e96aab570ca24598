#include "doctest.h"

#include <cmath>
#include <sstream>

#include "chiralcp/scan.hpp"

using namespace chiralcp;

TEST_CASE("grid validation") {
  ScanGrid g;
  g.eps_min = 0.5;
  g.eps_max = -0.5;
  CHECK_THROWS(g.validate());
  g = ScanGrid{};
  g.eps_steps = 0;
  CHECK_THROWS(g.validate());
  g = ScanGrid{};
  g.delta_min = std::nan("");
  CHECK_THROWS(g.validate());
  CHECK_NOTHROW(ScanGrid{}.validate());
}

TEST_CASE("single-point grid matches the direct evaluation") {
  const auto a = assemble("T5");
  ScanGrid g;
  g.eps_min = g.eps_max = 0.07;
  g.eps_steps = 1;
  g.delta_min = g.delta_max = -0.11;
  g.delta_steps = 1;
  const auto r = scan(a, g);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].eps == 0.07);
  CHECK(r.rows[0].delta == -0.11);
  CHECK(r.rows[0].contrast == a.contrast(0.07, -0.11));
  const auto pl =
      populations(a.propagator(0.07, -0.11, Handedness::L), StateVector::basis(1));
  for (int k = 0; k < 3; ++k) CHECK(r.rows[0].pop_l[k] == pl[k]);
}

TEST_CASE("parallel scan is bit-identical to the serial reference") {
  const auto a = assemble("CP5");
  ScanGrid g;
  g.eps_steps = 21;
  g.delta_steps = 17;
  const auto serial = scan_serial(a, g);
  for (int jobs : {0, 1, 2, 4}) {
    const auto par = scan(a, g, StateVector::basis(1), jobs);
    REQUIRE(par.rows.size() == serial.rows.size());
    for (std::size_t k = 0; k < serial.rows.size(); ++k) {
      CHECK(par.rows[k].eps == serial.rows[k].eps);
      CHECK(par.rows[k].delta == serial.rows[k].delta);
      CHECK(par.rows[k].contrast == serial.rows[k].contrast);
      for (int s = 0; s < 3; ++s) {
        CHECK(par.rows[k].pop_l[s] == serial.rows[k].pop_l[s]);
        CHECK(par.rows[k].pop_r[s] == serial.rows[k].pop_r[s]);
      }
    }
  }
}

TEST_CASE("row order is delta outer, eps inner") {
  ScanGrid g;
  g.eps_steps = 5;
  g.delta_steps = 3;
  const auto r = scan(assemble("single"), g);
  REQUIRE(r.rows.size() == 15);
  CHECK(r.rows[0].delta == g.delta_at(0));
  CHECK(r.rows[4].delta == g.delta_at(0));
  CHECK(r.rows[5].delta == g.delta_at(1));
  CHECK(r.rows[1].eps == g.eps_at(1));
  CHECK(&r.at(2, 1) == &r.rows[7]);
}

TEST_CASE("population rows are normalized") {
  ScanGrid g;
  g.eps_steps = 31;
  g.delta_steps = 11;
  for (const char* name : {"single", "T7", "CP9"}) {
    const auto r = scan(assemble(name), g);
    for (const auto& row : r.rows) {
      CHECK(std::abs(row.pop_l[0] + row.pop_l[1] + row.pop_l[2] - 1.0) < 1e-9);
      CHECK(std::abs(row.pop_r[0] + row.pop_r[1] + row.pop_r[2] - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("single assembly matches the closed-form oracle at delta = 0") {
  ScanGrid g;
  g.eps_steps = 101;
  g.delta_min = g.delta_max = 0.0;
  g.delta_steps = 1;
  const auto r = scan(assemble("single"), g);
  for (const auto& row : r.rows) {
    const double c = std::cos(kPi * (1.0 + row.eps) / 4);
    const double s = std::sin(kPi * (1.0 + row.eps) / 4);
    const double S = std::sin(kPi * (1.0 + row.eps) / 2);
    CHECK(std::abs(row.pop_r[2] - c * c * s * s * (1 + S) * (1 + S)) < 1e-12);
    CHECK(std::abs(row.pop_l[2] - c * c * s * s * (1 - S) * (1 - S)) < 1e-12);
  }
  // frozen spot values at eps = 0.1 (oracle evaluated before the build)
  const auto a = assemble("single");
  const auto pl = populations(a.propagator(0.1, 0.0, Handedness::L),
                              StateVector::basis(1));
  const auto pr = populations(a.propagator(0.1, 0.0, Handedness::R),
                              StateVector::basis(1));
  CHECK(pr[2] == doctest::Approx(0.963554853394728).epsilon(1e-12));
  CHECK(pl[2] == doctest::Approx(3.696690128287031e-05).epsilon(1e-9));
}

TEST_CASE("delta mirror symmetry holds for single and breaks for the rest") {
  auto asym = [](const char* name) {
    const auto a = assemble(name);
    double worst = 0.0;
    for (double e : {-0.3, 0.0, 0.25}) {
      for (double d : {0.1, 0.4, 0.8}) {
        worst = std::max(worst,
                         std::abs(a.contrast(e, d) - a.contrast(e, -d)));
      }
    }
    return worst;
  };
  CHECK(asym("single") < 1e-9);
  // verified per assembly: the composite assemblies are not mirror-symmetric
  CHECK(asym("T5") > 1e-3);
  CHECK(asym("CP5") > 1e-3);
  CHECK(asym("CP9") > 1e-3);
}

TEST_CASE("high_fidelity_width") {
  SUBCASE("argument validation") {
    const auto r = scan(assemble("single"), ScanGrid{-0.1, 0.1, 3, 0, 0, 1});
    CHECK_THROWS(high_fidelity_width(r, 0.0));
    CHECK_THROWS(high_fidelity_width(r, 1.0));
  }
  SUBCASE("flat profile spans the full grid") {
    ScanResult fake;
    fake.grid = ScanGrid{-0.5, 0.5, 11, -1.0, 1.0, 5};
    fake.rows.resize(55);
    for (int j = 0; j < 5; ++j) {
      for (int i = 0; i < 11; ++i) {
        auto& row = fake.rows[j * 11 + i];
        row.eps = fake.grid.eps_at(i);
        row.delta = fake.grid.delta_at(j);
        row.contrast = 1.0;
      }
    }
    CHECK(high_fidelity_width(fake, 0.99) == 1.0);
    fake.grid.delta_steps = 1;
    fake.rows.resize(11);
    CHECK(high_fidelity_width(fake, 0.99) == 1.0);
  }
  SUBCASE("empty region returns 0") {
    ScanResult fake;
    fake.grid = ScanGrid{-0.5, 0.5, 11, 0.0, 0.0, 1};
    fake.rows.resize(11);
    for (int i = 0; i < 11; ++i) {
      fake.rows[i].eps = fake.grid.eps_at(i);
      fake.rows[i].delta = 0.0;
      fake.rows[i].contrast = 0.5;
    }
    CHECK(high_fidelity_width(fake, 0.99) == 0.0);
  }
  SUBCASE("frozen width of the bare sequence") {
    ScanGrid g;
    g.eps_steps = 1001;
    g.delta_min = g.delta_max = 0.0;
    g.delta_steps = 1;
    const auto r = scan(assemble("single"), g);
    CHECK(high_fidelity_width(r, 0.99) == doctest::Approx(0.104).epsilon(1e-9));
  }
}

TEST_CASE("csv output") {
  ScanGrid g;
  g.eps_min = -0.1;
  g.eps_max = 0.1;
  g.eps_steps = 2;
  g.delta_min = 0.0;
  g.delta_max = 0.0;
  g.delta_steps = 1;
  const auto r = scan(assemble("single"), g);
  std::ostringstream os;
  write_csv(os, r, {{"assembly", "single"}, {"eps", "-0.1:0.1:2"}});
  const std::string text = os.str();
  CHECK(text.starts_with("# assembly: single\n# eps: -0.1:0.1:2\n"));
  CHECK(text.find("epsilon,delta,P1_L,P2_L,P3_L,P1_R,P2_R,P3_R,contrast\n") !=
        std::string::npos);
  CHECK(text.find("\n-0.1,0,") != std::string::npos);

  std::ostringstream om;
  write_matrix(om, r, {});
  CHECK(om.str().find("# contrast matrix") != std::string::npos);
}
