#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chiralcp/composite.hpp"

namespace chiralcp {

/// Rectangular (eps, delta) grid; delta_steps = 1 makes a 1D eps scan.
struct ScanGrid {
  double eps_min = -0.5, eps_max = 0.5;
  int eps_steps = 101;
  double delta_min = -1.0, delta_max = 1.0;
  int delta_steps = 101;

  void validate() const;  // throws on bad bounds/steps
  double eps_at(int i) const;
  double delta_at(int j) const;
};

struct ScanRow {
  double eps, delta;
  std::array<double, 3> pop_l, pop_r;
  double contrast;
};

/// Grid evaluation, rows in delta-major order (delta outer, eps inner).
struct ScanResult {
  ScanGrid grid;
  std::vector<ScanRow> rows;

  const ScanRow& at(int eps_idx, int delta_idx) const;
};

/// Serial reference implementation (plain loop, kept for testing).
ScanResult scan_serial(const ChiralAssembly& assembly, const ScanGrid& grid,
                       const StateVector& init = StateVector::basis(1));

/// OpenMP-parallel scan; grid points are independent and written into fixed
/// slots, so the result is identical to scan_serial for any thread count.
/// jobs <= 0 uses the OpenMP default.
ScanResult scan(const ChiralAssembly& assembly, const ScanGrid& grid,
                const StateVector& init = StateVector::basis(1), int jobs = 0);

/// Measure of the connected region around the origin with
/// contrast >= threshold: interval length of the eps window for 1D scans,
/// fractional grid area (flood fill, 4-neighborhood) for 2D scans.
/// 0 when the origin itself is below threshold.
double high_fidelity_width(const ScanResult& result, double threshold);

/// CSV with `# key: value` provenance lines, a fixed header and 12
/// significant digits. config pairs are echoed verbatim.
void write_csv(std::ostream& os, const ScanResult& result,
               const std::vector<std::pair<std::string, std::string>>& config);

/// gnuplot-compatible matrix of the contrast (rows: delta, columns: eps).
void write_matrix(std::ostream& os, const ScanResult& result,
                  const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace chiralcp
