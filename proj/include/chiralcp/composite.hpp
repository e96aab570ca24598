#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chiralcp/delta.hpp"

namespace chiralcp {

enum class Target { kHalf, kFull };  // effective pi/2 or pi pulse

const char* to_string(Target t);

/// One entry of a composite pulse: nominal area as a multiple of pi, and the
/// relative field phase in radians.
struct PulseSpec {
  double area_pi;
  double phase;
};

/// An ordered pulse train on a single transition acting as one effective
/// pi/2 or pi pulse. `stabilized` marks constant rotations (robust in the
/// full propagator including phases); unstabilized entries are variable
/// rotations (robust in |b| only).
struct CompositeSequence {
  std::string name;
  Target target = Target::kHalf;
  std::vector<PulseSpec> pulses;
  bool stabilized = false;
  int eps_order = 0;    // compensated orders in the pulse-area error
  int delta_order = 0;  // compensated orders in the detuning

  double total_area_pi() const;

  /// Concrete pulses at (eps, delta) with a global phase offset added to
  /// every constituent phase.
  std::vector<Pulse> realize(double eps, double delta,
                             double offset = 0.0) const;

  /// Composed two-state propagator of the train.
  TwoStatePropagator propagator(double eps, double delta,
                                double offset = 0.0) const;
};

/// Same pulses applied in the opposite order; phases unchanged.
CompositeSequence reverse(const CompositeSequence& c);

/// Three composite blocks in time order P -> S -> Q. The S block carries the
/// global phase offset that makes its composed propagator act as an i-shifted
/// pi pulse (b real positive at zero error); this equals +pi/2 exactly for
/// every exact-algebra block.
struct ChiralAssembly {
  std::string name;
  CompositeSequence p_block;
  CompositeSequence s_block;
  CompositeSequence q_block;
  double s_offset = 0.5 * kPi;

  int pulse_count() const;
  double total_area_pi() const;

  std::vector<SequenceStep> steps(double eps, double delta) const;
  LoopPropagator propagator(double eps, double delta, Handedness h) const;
  /// P3(R) - P3(L) starting from |1>; 1 means perfect resolution (the
  /// cataloged assemblies all send R to |3>).
  double contrast(double eps, double delta) const;
};

/// Build an assembly from arbitrary half/full blocks (S offset computed).
ChiralAssembly make_assembly(std::string name, CompositeSequence p,
                             CompositeSequence s, CompositeSequence q);

/// Named composite pulses and assemblies. The built-in catalog carries the
/// published tables verbatim; optimizer output can be added at runtime.
class Catalog {
 public:
  Catalog();  // built-ins only

  static const Catalog& builtin();

  bool has_sequence(std::string_view name) const;
  const CompositeSequence& sequence(std::string_view name) const;
  std::vector<std::string> sequence_names() const;  // insertion order

  bool has_assembly(std::string_view name) const;
  const ChiralAssembly& assembly(std::string_view name) const;
  std::vector<std::string> assembly_names() const;

  void add(CompositeSequence c);
  void add(ChiralAssembly a);

 private:
  std::vector<CompositeSequence> sequences_;
  std::vector<ChiralAssembly> assemblies_;
};

/// Catalog::builtin() lookups.
CompositeSequence builtin(std::string_view name);
ChiralAssembly assemble(std::string_view name);

}  // namespace chiralcp
