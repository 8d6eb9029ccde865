#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tirsec/class_hierarchy.hpp"
#include "tirsec/context.hpp"
#include "tirsec/diagnostics.hpp"
#include "tirsec/ir.hpp"

namespace tirsec {

struct TypeMap;

using CallNode = std::uint32_t;

struct CallEdge {
  Site site;
  CallNode callee = kNone;

  auto operator<=>(const CallEdge&) const = default;
};

/// Nodes `0..defined_count-1` are the program's functions (same ids as
/// `Program::functions`); higher nodes are external callees named by direct
/// calls to undefined functions.
class CallGraph {
public:
  std::vector<std::string> names;
  std::size_t defined_count = 0;
  std::vector<FunctionId> roots;
  std::vector<bool> reachable;
  /// Sorted by (site, callee); unique.
  std::vector<CallEdge> edges;
  /// icall sites whose function pointer may hold an address not visible to
  /// the intraprocedural points-to analysis.
  std::set<Site> unresolved_icalls;

  bool is_external(CallNode n) const noexcept { return n >= defined_count; }
  std::size_t node_count() const noexcept { return names.size(); }
  std::optional<CallNode> find(std::string_view name) const;
  std::span<const CallEdge> edges_at(const Site& s) const;
  /// Distinct callees of a node, ordered by name.
  const std::vector<CallNode>& callees(CallNode n) const { return succ_[n]; }
  bool has_edge(const Site& s, CallNode callee) const;

  /// Sorts edges and rebuilds the adjacency index.
  void finalize();

private:
  std::vector<std::vector<CallNode>> succ_;
};

/// Entry and event functions in declaration order. Appends a warning when
/// there are none.
std::vector<FunctionId> entry_functions(const Program& p, std::vector<Diagnostic>* diags = nullptr);

/// Conservative graph: a vcall may reach the slot's entry in every class's
/// resolved vtable; icalls resolve through intraprocedural points-to sets with
/// an arity-matched fallback. Covers every function when `all_functions` is
/// set, otherwise only functions reachable from the roots.
CallGraph build_cha_call_graph(const Program& p, const ClassHierarchy& h, const std::vector<FunctionContext>& ctx,
                               bool all_functions = true);

/// Refined graph: vcalls resolve through the receiver's class type set.
CallGraph build_call_graph(const Program& p, const ClassHierarchy& h, const TypeMap& types,
                           const std::vector<FunctionContext>& ctx);

/// Simple paths from `from` to `to` with at most `bound` edges, ordered
/// lexicographically by callee-name sequence.
std::vector<std::vector<CallNode>> enumerate_paths(const CallGraph& cg, CallNode from, CallNode to,
                                                   std::size_t bound = 64);

/// `caller -> callee @ site`, one line per edge.
std::string dump_call_graph(const Program& p, const CallGraph& cg);

/// Functions whose address is taken anywhere and whose arity matches.
std::vector<FunctionId> address_taken_with_arity(const Program& p, std::size_t arity);

}  // namespace tirsec
