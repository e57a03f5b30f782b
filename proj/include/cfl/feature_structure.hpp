#ifndef CFL_FEATURE_STRUCTURE_HPP
#define CFL_FEATURE_STRUCTURE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfl/type_lattice.hpp"

namespace cfl {

inline constexpr std::string_view kStringAtomTypeName = "string-atom";

// The label on a node: a lattice type, or a string atom. Atoms behave as
// leaf types directly below `string-atom`; two atoms meet iff identical.
struct Sort {
  TypeId type{};
  std::optional<std::string> atom;

  static Sort of(TypeId t) { return Sort{t, std::nullopt}; }
  friend bool operator==(const Sort&, const Sort&) = default;
};

std::optional<Sort> meet(const TypeLattice& lattice, const Sort& a, const Sort& b);
// True iff a is at-or-below b.
bool sort_leq(const TypeLattice& lattice, const Sort& a, const Sort& b);
std::string sort_name(const TypeLattice& lattice, const Sort& s);

using NodeIndex = std::uint32_t;
using Path = std::vector<FeatureId>;

std::string path_string(const TypeLattice& lattice, std::span<const FeatureId> path);
// "args.dir-obj.case" -> feature ids. Throws Error on unknown features.
Path parse_path(const TypeLattice& lattice, std::string_view dotted);

struct Arc {
  FeatureId feature;
  NodeIndex target;
};

struct Node {
  Sort sort;
  std::vector<Arc> arcs;  // sorted by feature
};

// Why a unification or construction failed.
struct Clash {
  enum class Kind { TypeClash, InappropriateFeature, Cycle };
  Kind kind = Kind::TypeClash;
  std::string path;   // dotted feature path, empty for the root
  std::string left;   // type (or the carrying type for InappropriateFeature)
  std::string right;  // type (or the offending feature)

  std::string describe() const;
};

class FeatureStructure;

// Either a structure or the clash that prevented it.
class UnifyResult {
 public:
  UnifyResult(FeatureStructure fs);
  UnifyResult(Clash clash);
  ~UnifyResult();
  UnifyResult(const UnifyResult&);
  UnifyResult(UnifyResult&&) noexcept;
  UnifyResult& operator=(const UnifyResult&);
  UnifyResult& operator=(UnifyResult&&) noexcept;

  explicit operator bool() const { return fs_ != nullptr; }
  const FeatureStructure& value() const;
  const FeatureStructure& operator*() const { return value(); }
  const FeatureStructure* operator->() const { return &value(); }
  const Clash& clash() const { return clash_; }

 private:
  std::unique_ptr<FeatureStructure> fs_;
  Clash clash_;
};

// Rooted, acyclic, typed DAG with structure sharing. Immutable; node 0 is
// the root and nodes are stored in canonical depth-first order.
class FeatureStructure {
 public:
  // A single node carrying `sort`.
  static FeatureStructure atomic(std::shared_ptr<const TypeLattice> lattice, Sort sort);

  const TypeLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const TypeLattice>& lattice_ptr() const { return lattice_; }

  NodeIndex root() const { return 0; }
  std::size_t node_count() const { return nodes_->size(); }
  const Node& node(NodeIndex i) const { return (*nodes_)[i]; }
  const Sort& sort(NodeIndex i = 0) const { return node(i).sort; }

  std::optional<NodeIndex> arc(NodeIndex from, FeatureId f) const;
  std::optional<NodeIndex> walk(std::span<const FeatureId> path, NodeIndex from = 0) const;
  std::optional<NodeIndex> walk(std::string_view dotted, NodeIndex from = 0) const;

  // Sub-structure rooted at `i` (sharing inside it is kept).
  FeatureStructure substructure(NodeIndex i) const;

  // Number of arcs entering each node.
  std::vector<std::size_t> in_degrees() const;

 private:
  friend class FsEditor;
  FeatureStructure(std::shared_ptr<const TypeLattice> lattice,
                   std::shared_ptr<const std::vector<Node>> nodes)
      : lattice_(std::move(lattice)), nodes_(std::move(nodes)) {}

  std::shared_ptr<const TypeLattice> lattice_;
  std::shared_ptr<const std::vector<Node>> nodes_;
};

// Mutable scratch graph. Nodes may be added, arcs re-hung and nodes
// equated; finish() closes the equations by unification, drops unreachable
// nodes, rejects cycles and enforces appropriateness (narrowing each value
// to the GLB of its type and the feature's declared value type).
class FsEditor {
 public:
  explicit FsEditor(std::shared_ptr<const TypeLattice> lattice);
  // Starts from a copy of `fs`; its root becomes node 0 of the editor.
  explicit FsEditor(const FeatureStructure& fs);

  const TypeLattice& lattice() const { return *lattice_; }

  NodeIndex add(Sort sort);
  // Copies `fs` into the editor and returns the index of its root.
  NodeIndex graft(const FeatureStructure& fs);

  const Sort& sort(NodeIndex n) const { return nodes_[n].sort; }
  void set_sort(NodeIndex n, Sort sort) { nodes_[n].sort = std::move(sort); }

  std::optional<NodeIndex> arc(NodeIndex from, FeatureId f) const;
  std::optional<NodeIndex> walk(NodeIndex from, std::span<const FeatureId> path) const;
  // Replaces any existing arc.
  void set_arc(NodeIndex from, FeatureId f, NodeIndex to);
  void remove_arc(NodeIndex from, FeatureId f);
  // Adds the arc, or equates the existing target with `to`.
  void merge_arc(NodeIndex from, FeatureId f, NodeIndex to);
  // Follows `path`, creating missing nodes typed by appropriateness. Throws
  // Error when a feature is not appropriate along the way.
  NodeIndex ensure_path(NodeIndex from, std::span<const FeatureId> path);
  // Every arc into `from` is moved to `to`.
  void redirect(NodeIndex from, NodeIndex to);

  void equate(NodeIndex a, NodeIndex b) { equations_.push_back({a, b}); }

  UnifyResult finish(NodeIndex root = 0) const;

 private:
  struct RawNode {
    Sort sort;
    std::vector<Arc> arcs;
  };
  std::shared_ptr<const TypeLattice> lattice_;
  std::vector<RawNode> nodes_;
  std::vector<std::pair<NodeIndex, NodeIndex>> equations_;
};

// Most general structure subsumed by both, or the clash.
UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b);
// Unifies `guest` into `host` at node `at`; the result is rooted at host's root.
UnifyResult unify_at(const FeatureStructure& host, NodeIndex at, const FeatureStructure& guest);

// True iff b carries all of a's information (types, arcs and sharing).
bool subsumes(const FeatureStructure& a, const FeatureStructure& b);
bool iso_equal(const FeatureStructure& a, const FeatureStructure& b);

std::optional<FeatureStructure> get(const FeatureStructure& fs, std::span<const FeatureId> path);

class InappropriateFeatureError : public Error {
 public:
  using Error::Error;
};

// Unifies `value` in at `path`, creating intermediate nodes. Throws
// InappropriateFeatureError when a step is not appropriate.
UnifyResult put(const FeatureStructure& fs, std::span<const FeatureId> path,
                const FeatureStructure& value);

// Keeps only the given root features.
FeatureStructure restrict_root(const FeatureStructure& fs, std::span<const FeatureId> keep);

// Returns the first well-formedness violation, if any.
std::optional<Clash> check_well_formed(const FeatureStructure& fs);

}  // namespace cfl

#endif  // CFL_FEATURE_STRUCTURE_HPP
