#include "chiralcp/scan.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chiralcp {

void ScanGrid::validate() const {
  if (eps_steps < 1 || delta_steps < 1) {
    throw std::invalid_argument("ScanGrid: steps must be >= 1");
  }
  if (eps_steps > 1 && !(eps_min < eps_max)) {
    throw std::invalid_argument("ScanGrid: eps_min must be < eps_max");
  }
  if (delta_steps > 1 && !(delta_min < delta_max)) {
    throw std::invalid_argument("ScanGrid: delta_min must be < delta_max");
  }
  if (!std::isfinite(eps_min) || !std::isfinite(eps_max) ||
      !std::isfinite(delta_min) || !std::isfinite(delta_max)) {
    throw std::invalid_argument("ScanGrid: non-finite bounds");
  }
}

double ScanGrid::eps_at(int i) const {
  if (eps_steps == 1) return eps_min;
  return eps_min + (eps_max - eps_min) * i / (eps_steps - 1);
}

double ScanGrid::delta_at(int j) const {
  if (delta_steps == 1) return delta_min;
  return delta_min + (delta_max - delta_min) * j / (delta_steps - 1);
}

const ScanRow& ScanResult::at(int eps_idx, int delta_idx) const {
  return rows[static_cast<std::size_t>(delta_idx) * grid.eps_steps + eps_idx];
}

namespace {

ScanRow eval_point(const ChiralAssembly& assembly, double eps, double delta,
                   const StateVector& init) {
  ScanRow row;
  row.eps = eps;
  row.delta = delta;
  row.pop_l = populations(assembly.propagator(eps, delta, Handedness::L), init);
  row.pop_r = populations(assembly.propagator(eps, delta, Handedness::R), init);
  row.contrast = row.pop_r[2] - row.pop_l[2];
  return row;
}

}  // namespace

ScanResult scan_serial(const ChiralAssembly& assembly, const ScanGrid& grid,
                       const StateVector& init) {
  grid.validate();
  ScanResult out;
  out.grid = grid;
  out.rows.resize(static_cast<std::size_t>(grid.eps_steps) * grid.delta_steps);
  for (int j = 0; j < grid.delta_steps; ++j) {
    for (int i = 0; i < grid.eps_steps; ++i) {
      out.rows[static_cast<std::size_t>(j) * grid.eps_steps + i] =
          eval_point(assembly, grid.eps_at(i), grid.delta_at(j), init);
    }
  }
  return out;
}

ScanResult scan(const ChiralAssembly& assembly, const ScanGrid& grid,
                const StateVector& init, int jobs) {
  grid.validate();
  ScanResult out;
  out.grid = grid;
  out.rows.resize(static_cast<std::size_t>(grid.eps_steps) * grid.delta_steps);
#ifdef _OPENMP
  const int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for collapse(2) schedule(static) num_threads(nthreads)
#endif
  for (int j = 0; j < grid.delta_steps; ++j) {
    for (int i = 0; i < grid.eps_steps; ++i) {
      out.rows[static_cast<std::size_t>(j) * grid.eps_steps + i] =
          eval_point(assembly, grid.eps_at(i), grid.delta_at(j), init);
    }
  }
  return out;
}

double high_fidelity_width(const ScanResult& result, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("high_fidelity_width: threshold not in (0,1)");
  }
  const ScanGrid& g = result.grid;

  // index closest to the origin on each axis
  int i0 = 0, j0 = 0;
  for (int i = 1; i < g.eps_steps; ++i) {
    if (std::abs(g.eps_at(i)) < std::abs(g.eps_at(i0))) i0 = i;
  }
  for (int j = 1; j < g.delta_steps; ++j) {
    if (std::abs(g.delta_at(j)) < std::abs(g.delta_at(j0))) j0 = j;
  }

  if (g.delta_steps == 1) {
    if (result.at(i0, 0).contrast < threshold) return 0.0;
    int lo = i0, hi = i0;
    while (lo > 0 && result.at(lo - 1, 0).contrast >= threshold) --lo;
    while (hi + 1 < g.eps_steps && result.at(hi + 1, 0).contrast >= threshold)
      ++hi;
    return g.eps_at(hi) - g.eps_at(lo);
  }

  if (result.at(i0, j0).contrast < threshold) return 0.0;
  std::vector<char> seen(result.rows.size(), 0);
  std::deque<std::pair<int, int>> queue;
  auto idx = [&g](int i, int j) {
    return static_cast<std::size_t>(j) * g.eps_steps + i;
  };
  seen[idx(i0, j0)] = 1;
  queue.push_back({i0, j0});
  std::size_t count = 0;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    ++count;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ii = i + di[k], jj = j + dj[k];
      if (ii < 0 || ii >= g.eps_steps || jj < 0 || jj >= g.delta_steps) continue;
      if (seen[idx(ii, jj)]) continue;
      if (result.at(ii, jj).contrast < threshold) continue;
      seen[idx(ii, jj)] = 1;
      queue.push_back({ii, jj});
    }
  }
  return static_cast<double>(count) / static_cast<double>(result.rows.size());
}

namespace {

void write_config(std::ostream& os,
                  const std::vector<std::pair<std::string, std::string>>& cfg) {
  for (const auto& [key, value] : cfg) os << "# " << key << ": " << value << "\n";
}

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const ScanResult& result,
               const std::vector<std::pair<std::string, std::string>>& config) {
  write_config(os, config);
  os << "epsilon,delta,P1_L,P2_L,P3_L,P1_R,P2_R,P3_R,contrast\n";
  for (const ScanRow& r : result.rows) {
    os << fmt12(r.eps) << ',' << fmt12(r.delta);
    for (double p : r.pop_l) os << ',' << fmt12(p);
    for (double p : r.pop_r) os << ',' << fmt12(p);
    os << ',' << fmt12(r.contrast) << '\n';
  }
}

void write_matrix(std::ostream& os, const ScanResult& result,
                  const std::vector<std::pair<std::string, std::string>>& config) {
  write_config(os, config);
  const ScanGrid& g = result.grid;
  os << "# contrast matrix: rows delta (" << fmt12(g.delta_min) << ".."
     << fmt12(g.delta_max) << "), columns eps (" << fmt12(g.eps_min) << ".."
     << fmt12(g.eps_max) << ")\n";
  for (int j = 0; j < g.delta_steps; ++j) {
    for (int i = 0; i < g.eps_steps; ++i) {
      if (i) os << ' ';
      os << fmt12(result.at(i, j).contrast);
    }
    os << '\n';
  }
}

}  // namespace chiralcp
