#pragma once

#include <cstdint>
#include <vector>

#include "tirsec/cfg.hpp"
#include "tirsec/ir.hpp"

namespace tirsec {

/// Abstract object id standing for any address not created in this function
/// (parameters, heap loads, call results).
inline constexpr std::uint32_t kUnknownObject = kNone;

/// An allocation site (`new`) or function-address site (`funcaddr`).
struct AbstractObject {
  DefPoint site;
  Opcode kind = Opcode::New;
  std::string symbol;  // class or function name
};

/// Flow-insensitive, intraprocedural allocation-site points-to sets.
struct PointsToMap {
  /// Sorted object ids per value; may contain kUnknownObject (sorted last).
  std::vector<std::vector<std::uint32_t>> sets;
  std::vector<AbstractObject> objects;

  const std::vector<std::uint32_t>& of(ValueId v) const { return sets[v]; }
  bool has_unknown(ValueId v) const { return !sets[v].empty() && sets[v].back() == kUnknownObject; }
  bool address_valued(ValueId v) const { return !sets[v].empty(); }
};

PointsToMap run_pointer_analysis(const Function& f, const Cfg& cfg);

/// Hash-based value numbering; equal numbers imply equal run-time values.
struct ValueNumbering {
  std::vector<std::uint32_t> number;
};

ValueNumbering value_number(const Function& f, const Cfg& cfg);

/// Heap offset: a static field offset, a dynamic index value, or any offset.
struct HeapOffset {
  enum class Kind : std::uint8_t { Static, Dynamic, Any };
  Kind kind = Kind::Static;
  std::int64_t value = 0;
  ValueId index = kNone;

  static HeapOffset fixed(std::int64_t v) { return {Kind::Static, v, kNone}; }
  static HeapOffset dynamic(ValueId i) { return {Kind::Dynamic, 0, i}; }
  static HeapOffset any() { return {Kind::Any, 0, kNone}; }
  bool operator==(const HeapOffset&) const = default;
};

struct HeapLocation {
  ValueId base = kNone;
  HeapOffset offset;
};

/// May/must alias oracle over one function's SSA values, combining points-to
/// sets and value numbers.
class AliasOracle {
public:
  AliasOracle(const Function& f, const Cfg& cfg);

  bool may_alias(ValueId a, ValueId b) const;
  bool must_alias(ValueId a, ValueId b) const;

  bool may_alias(const HeapLocation& a, const HeapLocation& b) const;
  bool must_alias(const HeapLocation& a, const HeapLocation& b) const;

  /// True when the object is allocated at most once per activation.
  bool statically_unique(std::uint32_t object) const;

  const PointsToMap& points_to() const noexcept { return pts_; }
  const ValueNumbering& numbering() const noexcept { return vn_; }

private:
  PointsToMap pts_;
  ValueNumbering vn_;
  std::vector<bool> in_cycle_;
};

bool offsets_may_overlap(const HeapOffset& a, const HeapOffset& b);

}  // namespace tirsec
