#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tirsec/callgraph.hpp"
#include "tirsec/class_hierarchy.hpp"
#include "tirsec/context.hpp"
#include "tirsec/hssa.hpp"

namespace tirsec {

/// Set of class ids stored as a bitset.
class ClassSet {
public:
  ClassSet() = default;
  explicit ClassSet(std::size_t universe) : words_((universe + 63) / 64, 0) {}

  void insert(ClassId c) { words_[c / 64] |= std::uint64_t{1} << (c % 64); }
  bool contains(ClassId c) const { return c / 64 < words_.size() && (words_[c / 64] >> (c % 64)) & 1; }
  bool empty() const;
  std::size_t count() const;
  /// Returns true when `other` added a member.
  bool merge(const ClassSet& other);
  std::vector<ClassId> members() const;
  bool operator==(const ClassSet&) const = default;

private:
  std::vector<std::uint64_t> words_;
};

/// Possible run-time classes of every SSA value and HSSA node. Functions not
/// reachable from an entry keep empty sets.
struct TypeMap {
  std::size_t class_count = 0;
  std::vector<std::vector<ClassSet>> values;  // [function][value]
  std::vector<std::vector<ClassSet>> heap;    // [function][hssa node]
  std::vector<bool> analyzed;

  const ClassSet& of(FunctionId f, ValueId v) const { return values[f][v]; }
  std::vector<std::string> names(const ClassHierarchy& h, FunctionId f, ValueId v) const;
};

struct ClassTypeResult {
  TypeMap types;
  /// The call graph discovered on the fly, restricted to reachable functions.
  CallGraph call_graph;
};

/// Sparse fixpoint over scalar def-use, heap def-use and call edges, starting
/// from the entry and event functions.
ClassTypeResult run_class_type_analysis(const Program& p, const ClassHierarchy& h,
                                        const std::vector<FunctionContext>& ctx, const std::vector<HssaForm>& hssa);

/// `fn %v : {A, B}` per object-holding value, for debugging.
std::string dump_types(const Program& p, const ClassHierarchy& h, const TypeMap& t);

}  // namespace tirsec
