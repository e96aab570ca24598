#include "chiralcp/composite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chiralcp {

const char* to_string(Target t) { return t == Target::kHalf ? "half" : "full"; }

double CompositeSequence::total_area_pi() const {
  double acc = 0.0;
  for (const PulseSpec& p : pulses) acc += p.area_pi;
  return acc;
}

std::vector<Pulse> CompositeSequence::realize(double eps, double delta,
                                              double offset) const {
  std::vector<Pulse> out;
  out.reserve(pulses.size());
  for (const PulseSpec& p : pulses) {
    out.emplace_back(p.area_pi * kPi, p.phase + offset, eps, delta);
  }
  return out;
}

TwoStatePropagator CompositeSequence::propagator(double eps, double delta,
                                                 double offset) const {
  if (pulses.empty()) {
    throw std::logic_error("CompositeSequence::propagator: no pulses");
  }
  TwoStatePropagator u =
      propagate_pulse(Pulse(pulses[0].area_pi * kPi, pulses[0].phase + offset,
                            eps, delta));
  for (std::size_t k = 1; k < pulses.size(); ++k) {
    u = ck_product(propagate_pulse(Pulse(pulses[k].area_pi * kPi,
                                         pulses[k].phase + offset, eps, delta)),
                   u);
  }
  return u;
}

CompositeSequence reverse(const CompositeSequence& c) {
  CompositeSequence out = c;
  std::reverse(out.pulses.begin(), out.pulses.end());
  if (out.name.ends_with("_rev")) {
    out.name.resize(out.name.size() - 4);
  } else {
    out.name += "_rev";
  }
  return out;
}

int ChiralAssembly::pulse_count() const {
  return static_cast<int>(p_block.pulses.size() + s_block.pulses.size() +
                          q_block.pulses.size());
}

double ChiralAssembly::total_area_pi() const {
  return p_block.total_area_pi() + s_block.total_area_pi() +
         q_block.total_area_pi();
}

std::vector<SequenceStep> ChiralAssembly::steps(double eps,
                                                double delta) const {
  return {{Transition::P, p_block.realize(eps, delta)},
          {Transition::S, s_block.realize(eps, delta, s_offset)},
          {Transition::Q, q_block.realize(eps, delta)}};
}

LoopPropagator ChiralAssembly::propagator(double eps, double delta,
                                          Handedness h) const {
  const Mat3 up = embed(Transition::P, p_block.propagator(eps, delta), h);
  const Mat3 us =
      embed(Transition::S, s_block.propagator(eps, delta, s_offset), h);
  const Mat3 uq = embed(Transition::Q, q_block.propagator(eps, delta), h);
  return uq * (us * up);
}

double ChiralAssembly::contrast(double eps, double delta) const {
  const auto init = StateVector::basis(1);
  const auto pl = populations(propagator(eps, delta, Handedness::L), init);
  const auto pr = populations(propagator(eps, delta, Handedness::R), init);
  return pr[2] - pl[2];
}

ChiralAssembly make_assembly(std::string name, CompositeSequence p,
                             CompositeSequence s, CompositeSequence q) {
  if (s.target != Target::kFull || p.target != Target::kHalf ||
      q.target != Target::kHalf) {
    throw std::invalid_argument(
        "make_assembly: outer blocks must be half, middle block full");
  }
  ChiralAssembly a;
  a.name = std::move(name);
  a.p_block = std::move(p);
  a.s_block = std::move(s);
  a.q_block = std::move(q);
  // phase the S block so its composed pulse acts as iS(pi): b real positive
  const TwoStatePropagator us = a.s_block.propagator(0.0, 0.0);
  a.s_offset = wrap_2pi(-std::arg(us.b));
  return a;
}

namespace {

std::vector<PulseSpec> half_pi_each(std::initializer_list<double> phases_pi) {
  std::vector<PulseSpec> out;
  for (double f : phases_pi) out.push_back({0.5, f * kPi});
  return out;
}

std::vector<PulseSpec> pi_each(std::initializer_list<double> phases_pi) {
  std::vector<PulseSpec> out;
  for (double f : phases_pi) out.push_back({1.0, f * kPi});
  return out;
}

Catalog build_builtin() {
  const double kChi = std::acos(-0.25);
  Catalog cat;

  cat.add({"single_half", Target::kHalf, {{0.5, 0.0}}, false, 0, 0});
  cat.add({"single_full", Target::kFull, {{1.0, 0.0}}, false, 0, 0});

  // composite pi/2 pulses, variable rotations compensating the pulse area
  cat.add({"C1_half", Target::kHalf, half_pi_each({0.0, 0.5}), false, 1, 0});
  cat.add({"C2_half", Target::kHalf,
           {{0.5, 0.0}, {1.0, 2.0 * kPi / 3.0}}, false, 1, 0});
  cat.add({"C3_half", Target::kHalf,
           {{0.5, 0.0}, {1.0, 0.75 * kPi}, {0.5, kPi}}, false, 1, 0});
  cat.add({"C4_half", Target::kHalf, half_pi_each({0.0, 0.5, 0.0, 1.5}),
           false, 1, 0});

  // phase-stabilized composite pi pulses (constant rotations)
  cat.add({"C1_full", Target::kFull,
           {{1.0, kPi / 3.0}, {1.0, 5.0 * kPi / 3.0}, {1.0, kPi / 3.0}},
           true, 1, 0});
  cat.add({"C2_full", Target::kFull,
           {{1.0, kChi}, {1.0, 3.0 * kChi}, {1.0, 3.0 * kChi}, {1.0, kChi},
            {1.0, 0.0}},
           true, 2, 0});

  // doubly compensated five-pulse sequences (printed to 4 decimals)
  const double ap = 0.4556;
  cat.add({"D1_half", Target::kHalf,
           {{ap, 0.5448 * kPi}, {1.0, 0.3476 * kPi}, {1.0, 0.9035 * kPi},
            {1.0, 0.3476 * kPi}, {ap, 0.5448 * kPi}},
           true, 1, 1});
  cat.add({"D2_half", Target::kHalf,
           {{ap, 0.5448 * kPi}, {1.0, 1.2358 * kPi}, {1.0, 0.6799 * kPi},
            {1.0, 1.2358 * kPi}, {ap, 0.5448 * kPi}},
           true, 1, 1});
  cat.add({"D1_full", Target::kFull,
           pi_each({5.0 / 6.0, 2.0 / 3.0, 7.0 / 6.0, 2.0 / 3.0, 5.0 / 6.0}),
           true, 1, 1});
  cat.add({"D2_full", Target::kFull,
           pi_each({5.0 / 6.0, 5.0 / 3.0, 7.0 / 6.0, 5.0 / 3.0, 5.0 / 6.0}),
           true, 1, 1});

  // doubly compensated nine-pulse sequences, second order
  {
    const double a9[5] = {0.6771, 0.8579, 0.6623, 0.5174, 0.8812};
    const double f9[5] = {1.7517, 0.9043, 0.8820, 0.9809, 1.6481};
    CompositeSequence d9h{"D9_half", Target::kHalf, {}, true, 2, 2};
    for (int k : {0, 1, 2, 3, 4, 3, 2, 1, 0}) {
      d9h.pulses.push_back({a9[k], f9[k] * kPi});
    }
    cat.add(std::move(d9h));

    const double f9p[5] = {1.0 / 3.0, 0.7379, 1.8092, 1.7379, 2.0 / 3.0};
    CompositeSequence d9f{"D9_full", Target::kFull, {}, true, 2, 2};
    for (int k : {0, 1, 2, 3, 4, 3, 2, 1, 0}) {
      d9f.pulses.push_back({1.0, f9p[k] * kPi});
    }
    cat.add(std::move(d9f));
  }

  auto t_assembly = [&cat](std::string name, const char* half,
                           const char* full) {
    return make_assembly(std::move(name), cat.sequence(half),
                         cat.sequence(full), reverse(cat.sequence(half)));
  };
  cat.add(make_assembly("single", cat.sequence("single_half"),
                        cat.sequence("single_full"),
                        cat.sequence("single_half")));
  cat.add(t_assembly("T5", "C1_half", "C1_full"));
  cat.add(t_assembly("T6", "C2_half", "C1_full"));
  cat.add(t_assembly("T7", "C3_half", "C1_full"));
  cat.add(t_assembly("T9", "C3_half", "C2_full"));
  // constant-rotation assemblies: the same half block on P and Q, no reversal
  cat.add(make_assembly("CP5", cat.sequence("D2_half"),
                        cat.sequence("D2_full"), cat.sequence("D2_half")));
  cat.add(make_assembly("CP9", cat.sequence("D9_half"),
                        cat.sequence("D9_full"), cat.sequence("D9_half")));
  return cat;
}

}  // namespace

Catalog::Catalog() = default;

const Catalog& Catalog::builtin() {
  static const Catalog cat = build_builtin();
  return cat;
}

bool Catalog::has_sequence(std::string_view name) const {
  return std::any_of(sequences_.begin(), sequences_.end(),
                     [&](const auto& c) { return c.name == name; });
}

const CompositeSequence& Catalog::sequence(std::string_view name) const {
  for (const auto& c : sequences_)
    if (c.name == name) return c;
  throw std::invalid_argument("unknown composite sequence: " +
                              std::string(name));
}

std::vector<std::string> Catalog::sequence_names() const {
  std::vector<std::string> out;
  out.reserve(sequences_.size());
  for (const auto& c : sequences_) out.push_back(c.name);
  return out;
}

bool Catalog::has_assembly(std::string_view name) const {
  return std::any_of(assemblies_.begin(), assemblies_.end(),
                     [&](const auto& a) { return a.name == name; });
}

const ChiralAssembly& Catalog::assembly(std::string_view name) const {
  for (const auto& a : assemblies_)
    if (a.name == name) return a;
  throw std::invalid_argument("unknown assembly: " + std::string(name));
}

std::vector<std::string> Catalog::assembly_names() const {
  std::vector<std::string> out;
  out.reserve(assemblies_.size());
  for (const auto& a : assemblies_) out.push_back(a.name);
  return out;
}

void Catalog::add(CompositeSequence c) {
  if (c.pulses.empty()) {
    throw std::invalid_argument("Catalog::add: sequence without pulses");
  }
  sequences_.push_back(std::move(c));
}

void Catalog::add(ChiralAssembly a) { assemblies_.push_back(std::move(a)); }

CompositeSequence builtin(std::string_view name) {
  return Catalog::builtin().sequence(name);
}

ChiralAssembly assemble(std::string_view name) {
  return Catalog::builtin().assembly(name);
}

}  // namespace chiralcp
