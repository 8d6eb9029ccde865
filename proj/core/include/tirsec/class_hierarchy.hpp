#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tirsec/ir.hpp"

namespace tirsec {

/// Raised for whole-program inconsistencies that make an analysis undefined.
class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Single-inheritance class tree with resolved vtables and subclass cones.
/// Class ids are the declaration indices in `Program::classes`.
class ClassHierarchy {
public:
  ClassHierarchy() = default;

  std::size_t size() const noexcept { return parent_.size(); }
  ClassId parent(ClassId c) const { return parent_[c]; }
  const std::vector<ClassId>& children(ClassId c) const { return children_[c]; }
  const std::string& name(ClassId c) const { return names_[c]; }
  std::optional<ClassId> find(std::string_view name) const;

  /// `c` plus all transitive subclasses, ascending by id.
  const std::vector<ClassId>& subclass_cone(ClassId c) const { return cones_[c]; }
  /// Throws std::out_of_range for an unknown class name.
  std::vector<std::string> subclass_cone(std::string_view name) const;

  /// Slot -> function after override resolution along the ancestor chain.
  const std::map<std::int64_t, std::string>& resolved_vtable(ClassId c) const { return vtables_[c]; }
  const std::string* lookup(ClassId c, std::int64_t slot) const;
  bool is_subclass(ClassId c, ClassId ancestor) const;

private:
  friend ClassHierarchy build_class_hierarchy(const Program& p);

  std::vector<std::string> names_;
  std::vector<ClassId> parent_;
  std::vector<std::vector<ClassId>> children_;
  std::vector<std::vector<ClassId>> cones_;
  std::vector<std::map<std::int64_t, std::string>> vtables_;
};

/// Throws AnalysisError on a parent cycle, an undefined parent or a vtable
/// slot naming a missing function.
ClassHierarchy build_class_hierarchy(const Program& p);

}  // namespace tirsec
