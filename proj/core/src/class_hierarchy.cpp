#include "tirsec/class_hierarchy.hpp"

#include <algorithm>

namespace tirsec {

std::optional<ClassId> ClassHierarchy::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ClassId>(it - names_.begin());
}

std::vector<std::string> ClassHierarchy::subclass_cone(std::string_view name) const {
  auto id = find(name);
  if (!id) throw std::out_of_range("unknown class '" + std::string(name) + "'");
  std::vector<std::string> out;
  for (ClassId c : cones_[*id]) out.push_back(names_[c]);
  return out;
}

const std::string* ClassHierarchy::lookup(ClassId c, std::int64_t slot) const {
  auto it = vtables_[c].find(slot);
  return it == vtables_[c].end() ? nullptr : &it->second;
}

bool ClassHierarchy::is_subclass(ClassId c, ClassId ancestor) const {
  for (ClassId x = c; x != kNone; x = parent_[x]) {
    if (x == ancestor) return true;
  }
  return false;
}

ClassHierarchy build_class_hierarchy(const Program& p) {
  ClassHierarchy h;
  const std::size_t n = p.classes.size();
  h.names_.reserve(n);
  for (const auto& c : p.classes) h.names_.push_back(c.name);
  h.parent_.assign(n, kNone);
  h.children_.assign(n, {});
  for (ClassId c = 0; c < n; ++c) {
    const ClassDecl& decl = p.classes[c];
    if (decl.parent.empty()) continue;
    auto parent = h.find(decl.parent);
    if (!parent) throw AnalysisError("class '" + decl.name + "' names undefined parent '" + decl.parent + "'");
    h.parent_[c] = *parent;
    h.children_[*parent].push_back(c);
  }
  for (ClassId c = 0; c < n; ++c) {
    ClassId x = c;
    for (std::size_t steps = 0; x != kNone; ++steps) {
      if (steps > n) throw AnalysisError("cycle in class hierarchy through '" + p.classes[c].name + "'");
      x = h.parent_[x];
    }
  }

  h.vtables_.assign(n, {});
  for (ClassId c = 0; c < n; ++c) {
    for (const auto& [slot, fn] : p.classes[c].vtable) {
      if (!p.find_function(fn))
        throw AnalysisError("vtable slot " + std::to_string(slot) + " of class '" + p.classes[c].name +
                            "' references missing function '" + fn + "'");
    }
    std::vector<ClassId> chain;
    for (ClassId x = c; x != kNone; x = h.parent_[x]) chain.push_back(x);
    // Root first so that overriding entries replace inherited ones.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      for (const auto& [slot, fn] : p.classes[*it].vtable) h.vtables_[c][slot] = fn;
    }
  }

  h.cones_.assign(n, {});
  for (ClassId c = 0; c < n; ++c) {
    for (ClassId x = c; x != kNone; x = h.parent_[x]) h.cones_[x].push_back(c);
  }
  return h;
}

}  // namespace tirsec
