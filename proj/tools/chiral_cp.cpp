// chiral-cp: simulator, composite-pulse library and numerical optimizer for
// chirality-dependent population transfer in a closed-loop three-state system.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chiralcp/optimizer.hpp"
#include "chiralcp/scan.hpp"
#include "chiralcp/sequences.hpp"
#include "chiralcp/verify.hpp"

using json = nlohmann::json;
using namespace chiralcp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitNotConverged = 3;

int default_jobs() {
  if (const char* env = std::getenv("CHIRAL_CP_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // OpenMP default
}

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int steps = 1;
  std::string text;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  g.text = text;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  try {
    if (c1 == std::string::npos) {  // single value
      g.lo = g.hi = std::stod(text);
      g.steps = 1;
      return g;
    }
    if (c2 == std::string::npos) throw std::invalid_argument(text);
    g.lo = std::stod(text.substr(0, c1));
    g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    g.steps = std::stoi(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("grid",
                               "expected min:max:steps, got '" + text + "'");
  }
  return g;
}

json sequence_to_json(const CompositeSequence& c) {
  json pulses = json::array();
  for (const PulseSpec& p : c.pulses) {
    pulses.push_back({{"area_pi_units", p.area_pi}, {"phase_rad", p.phase}});
  }
  return {{"name", c.name},
          {"target", to_string(c.target)},
          {"pulses", pulses},
          {"stabilized", c.stabilized},
          {"eps_order", c.eps_order},
          {"delta_order", c.delta_order}};
}

CompositeSequence sequence_from_json(const json& j) {
  CompositeSequence c;
  c.name = j.at("name").get<std::string>();
  const std::string target = j.at("target").get<std::string>();
  if (target != "half" && target != "full") {
    throw std::invalid_argument("sequence target must be 'half' or 'full'");
  }
  c.target = target == "half" ? Target::kHalf : Target::kFull;
  for (const json& p : j.at("pulses")) {
    c.pulses.push_back({p.at("area_pi_units").get<double>(),
                        p.at("phase_rad").get<double>()});
  }
  c.stabilized = j.value("stabilized", true);
  c.eps_order = j.value("eps_order", 0);
  c.delta_order = j.value("delta_order", 0);
  if (c.pulses.empty()) throw std::invalid_argument("sequence without pulses");
  return c;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

CompositeSequence block_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.size() > 5 && s.ends_with(".json")) {
      return sequence_from_json(load_json_file(s));
    }
    return builtin(s);
  }
  return sequence_from_json(j);
}

/// Builtin assembly name, or a JSON file describing one:
/// {"name": ..., "p_block": <name|file.json|inline>, "s_block": ..., "q_block": ...}
ChiralAssembly resolve_assembly(const std::string& ref) {
  if (ref.size() > 5 && ref.ends_with(".json")) {
    const json j = load_json_file(ref);
    return make_assembly(j.value("name", std::string("custom")),
                         block_from_json(j.at("p_block")),
                         block_from_json(j.at("s_block")),
                         block_from_json(j.at("q_block")));
  }
  return assemble(ref);
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return file;
}

// ---------------------------------------------------------------- enumerate

int cmd_enumerate(const std::string& format, const std::string& out_path,
                  bool quiet) {
  const auto found = enumerate_resolving_sequences();

  std::ostringstream text;
  text << "# chiral-cp enumerate\n# format: " << format << "\n";
  if (format == "csv") {
    text << "sequence,final_L,final_R,contrast\n";
    for (const auto& [spec, res] : found) {
      text << spec.name() << ',' << res.final_L << ',' << res.final_R << ','
           << fmt12(res.contrast) << '\n';
    }
  } else {
    text << "#\n# pulse sequence            final(L)  final(R)  contrast\n";
    for (const auto& [spec, res] : found) {
      char line[96];
      std::snprintf(line, sizeof(line), "%-26s %7d %9d  %.12f\n",
                    spec.name().c_str(), res.final_L, res.final_R,
                    res.contrast);
      text << line;
    }
  }

  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) {
      std::cerr << "cannot write " << out_path << "\n";
      return kExitUsage;
    }
    file << text.str();
  }
  if (!quiet) std::cout << text.str();
  return found.size() == 12 ? kExitOk : kExitVerification;
}

// ----------------------------------------------------------------- simulate

int cmd_simulate(const std::string& assembly_ref, const std::string& hand_s,
                 double eps, double delta, bool show_propagator) {
  const ChiralAssembly a = resolve_assembly(assembly_ref);
  const Handedness hand = hand_s == "L" ? Handedness::L : Handedness::R;
  const LoopPropagator u = a.propagator(eps, delta, hand);
  const auto p = populations(u, StateVector::basis(1));
  std::cout << "# chiral-cp simulate\n# assembly: " << a.name
            << "\n# hand: " << hand_s << "\n# eps: " << fmt12(eps)
            << "\n# delta: " << fmt12(delta) << "\n";
  std::cout << "P1 = " << fmt12(p[0]) << "\nP2 = " << fmt12(p[1])
            << "\nP3 = " << fmt12(p[2]) << "\n";
  std::cout << "contrast = " << fmt12(a.contrast(eps, delta)) << "\n";
  if (show_propagator) {
    std::cout << "# propagator (row-major):\n";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        const complexd z = u(r, c);
        std::cout << (c ? "  " : "") << fmt12(z.real())
                  << (z.imag() < 0 ? "-" : "+") << fmt12(std::abs(z.imag()))
                  << "i";
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------------- scan

int cmd_scan(const std::string& assembly_ref, const GridSpec& eps,
             const GridSpec& delta, const std::string& out_path,
             const std::string& format, int jobs) {
  const ChiralAssembly a = resolve_assembly(assembly_ref);
  ScanGrid grid{eps.lo, eps.hi, eps.steps, delta.lo, delta.hi, delta.steps};
  const ScanResult result = scan(a, grid, StateVector::basis(1), jobs);

  const std::vector<std::pair<std::string, std::string>> config{
      {"tool", "chiral-cp scan"}, {"assembly", a.name}, {"eps", eps.text},
      {"delta", delta.text},      {"format", format},
      {"jobs", std::to_string(jobs)},
  };
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "matrix") {
    write_matrix(os, result, config);
  } else {
    write_csv(os, result, config);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- optimize

Template resolve_template(const std::string& ref) {
  if (ref.size() > 5 && ref.ends_with(".json")) {
    const json j = load_json_file(ref);
    Template t;
    t.name = j.value("name", std::string("custom"));
    t.n_pulses = j.at("n_pulses").get<int>();
    const std::string sym = j.value("symmetry", std::string("free"));
    if (sym == "palindromic-phases") {
      t.symmetry = Template::Symmetry::kPalindromicPhases;
    } else if (sym == "palindromic-areas-and-phases") {
      t.symmetry = Template::Symmetry::kPalindromicAreasAndPhases;
    } else if (sym == "free") {
      t.symmetry = Template::Symmetry::kFree;
    } else {
      throw std::invalid_argument("unknown symmetry: " + sym);
    }
    const std::string target = j.at("target").get<std::string>();
    t.target = target == "half" ? Target::kHalf : Target::kFull;
    t.target_alpha = j.value("target_alpha_pi", 0.0) * kPi;
    t.target_beta = j.value("target_beta_pi", 1.5) * kPi;
    const int slots = t.slots();
    t.area_free.assign(slots, false);
    t.fixed_area_pi.assign(slots, 1.0);
    if (j.contains("free_areas")) {
      const auto v = j.at("free_areas").get<std::vector<bool>>();
      if (static_cast<int>(v.size()) != slots) {
        throw std::invalid_argument("free_areas must have one entry per slot");
      }
      t.area_free = v;
    }
    if (j.contains("areas_pi")) {
      const auto v = j.at("areas_pi").get<std::vector<double>>();
      if (static_cast<int>(v.size()) != slots) {
        throw std::invalid_argument("areas_pi must have one entry per slot");
      }
      t.fixed_area_pi = v;
    }
    return t;
  }
  return builtin_template(ref);
}

int cmd_optimize(const std::string& template_ref, int order, int restarts,
                 std::uint64_t seed, const std::string& out_path, int jobs) {
  const Template t = resolve_template(template_ref);
  OptimizeOptions opts;
  opts.order = order;
  opts.restarts = restarts;
  opts.seed = seed;
  opts.jobs = jobs;
  const OptimizeResult r = optimize(t, opts);

  json cert = {{"order", order},
               {"coefficients",
                {{"00", r.best_certificate.c00},
                 {"10", r.best_certificate.c10},
                 {"01", r.best_certificate.c01}}},
               {"unstable", r.best_certificate.any_unstable()}};
  if (order >= 2) {
    cert["coefficients"]["20"] = r.best_certificate.c20;
    cert["coefficients"]["02"] = r.best_certificate.c02;
    cert["coefficients"]["11"] = r.best_certificate.c11;
  }
  json out = sequence_to_json(r.best);
  out["certificate"] = cert;
  out["converged"] = r.converged;
  out["best_cost"] = r.best_cost;
  out["config"] = {{"template", template_ref},
                   {"order", order},
                   {"restarts", restarts},
                   {"seed", seed},
                   {"jobs", jobs}};
  json families = json::array();
  for (const auto& c : r.certified) families.push_back(sequence_to_json(c));
  out["certified_families"] = families;

  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  os << out.dump(2) << "\n";
  if (!out_path.empty()) {
    std::cerr << (r.converged ? "converged" : "not converged") << ", best cost "
              << fmt12(r.best_cost) << ", " << r.certified.size()
              << " certified families -> " << out_path << "\n";
  }
  return r.converged ? kExitOk : kExitNotConverged;
}

// ------------------------------------------------------------------ catalog

int cmd_catalog(const std::string& format) {
  const Catalog& cat = Catalog::builtin();
  if (format == "json") {
    json seqs = json::array();
    for (const auto& name : cat.sequence_names()) {
      seqs.push_back(sequence_to_json(cat.sequence(name)));
    }
    json asms = json::array();
    for (const auto& name : cat.assembly_names()) {
      const auto& a = cat.assembly(name);
      asms.push_back({{"name", a.name},
                      {"p_block", a.p_block.name},
                      {"s_block", a.s_block.name},
                      {"q_block", a.q_block.name},
                      {"s_offset_rad", a.s_offset},
                      {"pulses", a.pulse_count()},
                      {"total_area_pi", a.total_area_pi()}});
    }
    std::cout << json{{"sequences", seqs}, {"assemblies", asms}}.dump(2)
              << "\n";
    return kExitOk;
  }
  if (format == "csv") {
    std::cout << "# chiral-cp catalog\n"
              << "name,kind,target,pulses,total_area_pi,stabilized,eps_order,"
                 "delta_order,areas_pi,phases_rad\n";
    for (const auto& name : cat.sequence_names()) {
      const auto& c = cat.sequence(name);
      std::string areas, phases;
      for (const auto& p : c.pulses) {
        areas += (areas.empty() ? "" : " ") + fmt12(p.area_pi);
        phases += (phases.empty() ? "" : " ") + fmt12(p.phase);
      }
      std::cout << c.name << ",sequence," << to_string(c.target) << ','
                << c.pulses.size() << ',' << fmt12(c.total_area_pi()) << ','
                << (c.stabilized ? 1 : 0) << ',' << c.eps_order << ','
                << c.delta_order << ',' << areas << ',' << phases << '\n';
    }
    for (const auto& name : cat.assembly_names()) {
      const auto& a = cat.assembly(name);
      std::cout << a.name << ",assembly,," << a.pulse_count() << ','
                << fmt12(a.total_area_pi()) << ",,,,,\n";
    }
    return kExitOk;
  }
  std::printf("%-12s %-6s %7s %9s %11s %5s/%-5s\n", "name", "target", "pulses",
              "area(pi)", "stabilized", "eps", "delta");
  for (const auto& name : cat.sequence_names()) {
    const auto& c = cat.sequence(name);
    std::printf("%-12s %-6s %7zu %9.4f %11s %5d/%-5d\n", c.name.c_str(),
                to_string(c.target), c.pulses.size(), c.total_area_pi(),
                c.stabilized ? "yes" : "no", c.eps_order, c.delta_order);
  }
  std::printf("\n%-12s %-30s %7s %9s\n", "assembly", "blocks (P, S, Q)",
              "pulses", "area(pi)");
  for (const auto& name : cat.assembly_names()) {
    const auto& a = cat.assembly(name);
    const std::string blocks =
        a.p_block.name + ", " + a.s_block.name + ", " + a.q_block.name;
    std::printf("%-12s %-30s %7d %9.4f\n", a.name.c_str(), blocks.c_str(),
                a.pulse_count(), a.total_area_pi());
  }
  return kExitOk;
}

// ------------------------------------------------------------------- verify

int cmd_verify(const std::string& claims_csv, int jobs) {
  std::vector<std::string> names;
  if (claims_csv.empty() || claims_csv == "all") {
    names = claim_names();
  } else {
    std::stringstream ss(claims_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
  }
  const auto results = run_claims(names, jobs);
  bool all_pass = true;
  std::printf("# chiral-cp verify\n# claims: %s\n# jobs: %d\n",
              claims_csv.empty() ? "all" : claims_csv.c_str(), jobs);
  for (const auto& r : results) {
    std::printf("%-16s %s  (%.2fs)  %s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "chiral-cp: chirality-resolving pulse sequences in a closed-loop "
      "three-state system"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  int jobs = default_jobs();
  app.add_option("--jobs", jobs,
                 "worker cap for scans/optimization (default CHIRAL_CP_JOBS "
                 "or all cores)");

  auto* enumerate = app.add_subcommand(
      "enumerate", "exhaustively find the chiral-resolving three-pulse "
                   "sequences and print the table");
  std::string enum_format = "table", enum_out;
  bool enum_quiet = false;
  enumerate->add_option("--format", enum_format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));
  enumerate->add_option("--out", enum_out, "also write the report to a file");
  enumerate->add_flag("--quiet", enum_quiet, "suppress stdout");

  auto* simulate = app.add_subcommand(
      "simulate", "single-point populations for one assembly and handedness");
  std::string sim_assembly, sim_hand = "L";
  double sim_eps = 0.0, sim_delta = 0.0;
  bool sim_show = false;
  simulate
      ->add_option("--assembly", sim_assembly,
                   "builtin assembly name or assembly JSON file")
      ->required();
  simulate->add_option("--hand", sim_hand, "L|R")
      ->check(CLI::IsMember({"L", "R"}));
  simulate->add_option("--eps", sim_eps, "pulse-area error");
  simulate->add_option("--delta", sim_delta, "detuning in units of W0");
  simulate->add_flag("--show-propagator", sim_show,
                     "print the 3x3 propagator");

  auto* scan_cmd = app.add_subcommand(
      "scan", "populations and contrast over an (eps, delta) grid");
  std::string scan_assembly, scan_eps = "-0.5:0.5:101",
                             scan_delta = "-1:1:101", scan_out,
                             scan_format = "csv";
  scan_cmd
      ->add_option("--assembly", scan_assembly,
                   "builtin assembly name or assembly JSON file")
      ->required();
  scan_cmd->add_option("--eps", scan_eps, "min:max:steps or a single value");
  scan_cmd->add_option("--delta", scan_delta,
                       "min:max:steps or a single value");
  scan_cmd->add_option("--out", scan_out, "output file (default stdout)");
  scan_cmd->add_option("--format", scan_format, "csv|matrix")
      ->check(CLI::IsMember({"csv", "matrix"}));

  auto* opt_cmd = app.add_subcommand(
      "optimize", "derive error-compensated composite pulses numerically");
  std::string opt_template, opt_out;
  int opt_order = 1, opt_restarts = 20;
  std::uint64_t opt_seed = 0;
  opt_cmd
      ->add_option("--template", opt_template,
                   "eq14|eq15|eq16|eq16pi or a template JSON file")
      ->required();
  opt_cmd->add_option("--order", opt_order, "compensation order")
      ->check(CLI::IsMember({1, 2}));
  opt_cmd->add_option("--restarts", opt_restarts, "random restarts")
      ->check(CLI::PositiveNumber);
  opt_cmd->add_option("--seed", opt_seed, "random seed");
  opt_cmd->add_option("--out", opt_out,
                      "sequence.json output (default stdout)");

  auto* cat_cmd = app.add_subcommand(
      "catalog", "list the built-in composite pulses and assemblies");
  std::string cat_format = "table";
  cat_cmd->add_option("--format", cat_format, "table|csv|json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  auto* verify_cmd = app.add_subcommand(
      "verify", "run the published-claims certificate suite");
  std::string verify_claims;
  verify_cmd->add_option(
      "--claims", verify_claims,
      "comma-separated claim names (default all): table1, eq5, phase-formula, "
      "single-profile, order-cp5, order-cp9, fig4-ordering, fig5-ordering, "
      "optimizer-eq15");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enumerate) return cmd_enumerate(enum_format, enum_out, enum_quiet);
    if (*simulate) {
      return cmd_simulate(sim_assembly, sim_hand, sim_eps, sim_delta,
                          sim_show);
    }
    if (*scan_cmd) {
      return cmd_scan(scan_assembly, parse_grid(scan_eps),
                      parse_grid(scan_delta), scan_out, scan_format, jobs);
    }
    if (*opt_cmd) {
      return cmd_optimize(opt_template, opt_order, opt_restarts, opt_seed,
                          opt_out, jobs);
    }
    if (*cat_cmd) return cmd_catalog(cat_format);
    if (*verify_cmd) return cmd_verify(verify_claims, jobs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (std::string(e.what()).find("unknown assembly") != std::string::npos) {
      std::cerr << "available assemblies:";
      for (const auto& n : Catalog::builtin().assembly_names()) {
        std::cerr << " " << n;
      }
      std::cerr << "\n";
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
