#ifndef CFL_TYPE_LATTICE_HPP
#define CFL_TYPE_LATTICE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfl/diagnostic.hpp"

namespace cfl {

// Interned type and feature handles. Both index into tables owned by a
// TypeLattice; they are meaningless across lattices.
struct TypeId {
  std::uint32_t value = 0;
  friend bool operator==(TypeId, TypeId) = default;
  friend auto operator<=>(TypeId, TypeId) = default;
};

struct FeatureId {
  std::uint32_t value = 0;
  friend bool operator==(FeatureId, FeatureId) = default;
  friend auto operator<=>(FeatureId, FeatureId) = default;
};

inline constexpr std::string_view kTopTypeName = "*top*";

// Thrown when a GLB is requested for a pair with several maximal common
// lower bounds. Only reachable on lattices that failed validation.
class MultipleGlbError : public Error {
 public:
  using Error::Error;
};

struct GlbResult {
  enum class Status { Ok, None, Multiple };
  Status status = Status::None;
  TypeId type{};

  explicit operator bool() const { return status == Status::Ok; }
};

class LatticeBuilder;

// Subsumption ordering over atomic types plus per-type appropriateness.
// Immutable once built; GLBs are tabulated at build time.
class TypeLattice {
 public:
  TypeId top() const { return TypeId{0}; }
  std::size_t size() const { return names_.size(); }

  std::optional<TypeId> find(std::string_view name) const;
  const std::string& name(TypeId t) const { return names_[t.value]; }

  std::span<const TypeId> parents(TypeId t) const { return parents_[t.value]; }
  std::span<const TypeId> children(TypeId t) const { return children_[t.value]; }

  // Reflexive-transitive: true iff a is at-or-below b.
  bool subtype(TypeId a, TypeId b) const;

  GlbResult glb(TypeId a, TypeId b) const;
  // Like glb() but throws MultipleGlbError instead of reporting it.
  std::optional<TypeId> meet(TypeId a, TypeId b) const;

  // Features, numbered in lexicographic order of their names.
  std::size_t feature_count() const { return feature_names_.size(); }
  std::optional<FeatureId> feature(std::string_view name) const;
  const std::string& feature_name(FeatureId f) const { return feature_names_[f.value]; }

  // Effective (inherited) appropriateness.
  std::optional<TypeId> approp(TypeId t, FeatureId f) const;
  const std::vector<std::pair<FeatureId, TypeId>>& approp_list(TypeId t) const {
    return approp_[t.value];
  }
  // Most general types at which `f` becomes appropriate.
  std::span<const TypeId> introducers(FeatureId f) const { return introducers_[f.value]; }

  const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  friend class LatticeBuilder;
  TypeLattice() = default;

  bool bit(const std::vector<std::uint64_t>& row, std::uint32_t i) const {
    return (row[i / 64] >> (i % 64)) & 1u;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> by_name_;
  std::vector<std::vector<TypeId>> parents_;
  std::vector<std::vector<TypeId>> children_;
  std::vector<std::vector<std::uint64_t>> below_;  // descendants incl. self
  std::vector<std::int32_t> glb_table_;            // -1 none, -2 multiple
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, FeatureId> feature_by_name_;
  std::vector<std::vector<std::pair<FeatureId, TypeId>>> approp_;  // sorted by feature
  std::vector<std::vector<TypeId>> introducers_;
  Diagnostics diagnostics_;
};

// Accumulates declarations; build() closes the hierarchy, computes the GLB
// table and effective appropriateness, and records diagnostics.
class LatticeBuilder {
 public:
  LatticeBuilder();

  // Returns the existing id when the type was already declared.
  TypeId declare(std::string_view name);
  bool declared(std::string_view name) const { return ids_.count(std::string(name)) != 0; }
  void add_parent(TypeId child, TypeId parent);
  void declare_approp(TypeId type, std::string_view feature, TypeId value);
  // Types that were declared without any parent get *top* as their parent.
  void attach_orphans_to_top();

  std::shared_ptr<const TypeLattice> build() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> ids_;
  std::vector<std::vector<TypeId>> parents_;
  struct ApprDecl {
    TypeId type;
    std::string feature;
    TypeId value;
  };
  std::vector<ApprDecl> approp_;
};

// Diagnostics for cycles, unreachable types, non-unique GLBs and
// non-monotone or conflicting appropriateness. Empty iff well-formed.
Diagnostics validate(const TypeLattice& lattice);

}  // namespace cfl

#endif  // CFL_TYPE_LATTICE_HPP
