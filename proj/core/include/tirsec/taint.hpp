#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tirsec/callgraph.hpp"
#include "tirsec/context.hpp"
#include "tirsec/hssa.hpp"
#include "tirsec/rules.hpp"

namespace tirsec {

enum class TaintValue : std::uint8_t { Untainted, Tainted };

/// Lattice element tagged with the origins (rule, source-site ids) that
/// tainted it. Untainted is the top element.
struct TaintState {
  TaintValue value = TaintValue::Untainted;
  std::vector<std::uint32_t> origins;  // sorted, unique

  bool operator==(const TaintState&) const = default;
};

TaintState taint_meet(const TaintState& a, const TaintState& b);

/// Attaches the branch predicates controlling each instruction as pseudo-use
/// operands: every instruction that defines a value, stores to the heap or
/// calls a function.
void insert_pseudo_uses(Function& f, const ControlDependence& cd);
void insert_pseudo_uses(Program& p, const std::vector<FunctionContext>& ctx);

enum class HopKind : std::uint8_t { Scalar, Heap, Pseudo, Call, External };

std::string_view hop_kind_name(HopKind k);

/// A node of the taint graph: an SSA value or an HSSA node of one function.
struct TaintNode {
  FunctionId function = kNone;
  bool heap = false;
  std::uint32_t id = 0;

  auto operator<=>(const TaintNode&) const = default;
};

struct Hop {
  HopKind kind = HopKind::Scalar;
  TaintNode from;
  TaintNode to;
};

struct Finding {
  std::string rule;
  std::size_t rule_index = 0;
  int severity = 0;
  Site source;
  Site sink;
  /// Witness from the source value to the sink argument.
  std::vector<Hop> witness;
  int call_distance = 0;
  std::optional<std::uint32_t> control_distance;
  std::optional<PairTag> pair;
};

/// Context-insensitive propagation over scalar, heap, pseudo-use and call
/// edges. Only functions reachable in `cg` contribute seeds and sinks.
/// Findings come back ordered by (rule, source, sink) with metrics unset.
std::vector<Finding> run_taint_analysis(const Program& p, const RuleSet& rs, const std::vector<HssaForm>& hssa,
                                        const CallGraph& cg, const std::vector<FunctionContext>& ctx);

std::string format_taint_node(const Program& p, const TaintNode& n);

}  // namespace tirsec

namespace tirsec {

/// A producer finding of one program joined with a consumer finding of
/// another through an equal `pair` tag.
struct CollusionEntry {
  std::string tag;
  Finding producer;
  Finding consumer;
};

std::vector<CollusionEntry> join_colluding(const std::vector<Finding>& producer_findings,
                                           const std::vector<Finding>& consumer_findings);

}  // namespace tirsec
