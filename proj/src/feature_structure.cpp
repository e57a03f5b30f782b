#include "cfl/feature_structure.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace cfl {

std::optional<Sort> meet(const TypeLattice& lattice, const Sort& a, const Sort& b) {
  if (a.atom && b.atom) {
    if (*a.atom != *b.atom) return std::nullopt;
    return a;
  }
  if (a.atom || b.atom) {
    const Sort& atom = a.atom ? a : b;
    const Sort& other = a.atom ? b : a;
    if (!lattice.subtype(atom.type, other.type)) return std::nullopt;
    return atom;
  }
  auto t = lattice.meet(a.type, b.type);
  if (!t) return std::nullopt;
  return Sort::of(*t);
}

bool sort_leq(const TypeLattice& lattice, const Sort& a, const Sort& b) {
  if (b.atom) return a.atom && *a.atom == *b.atom;
  return lattice.subtype(a.type, b.type);
}

std::string sort_name(const TypeLattice& lattice, const Sort& s) {
  if (s.atom) return "\"" + *s.atom + "\"";
  return lattice.name(s.type);
}

std::string path_string(const TypeLattice& lattice, std::span<const FeatureId> path) {
  std::string out;
  for (FeatureId f : path) {
    if (!out.empty()) out += '.';
    out += lattice.feature_name(f);
  }
  return out;
}

Path parse_path(const TypeLattice& lattice, std::string_view dotted) {
  Path path;
  while (!dotted.empty()) {
    auto dot = dotted.find('.');
    std::string_view head = dotted.substr(0, dot);
    auto f = lattice.feature(head);
    if (!f) throw Error("unknown feature '" + std::string(head) + "'");
    path.push_back(*f);
    dotted = dot == std::string_view::npos ? std::string_view{} : dotted.substr(dot + 1);
  }
  return path;
}

std::string Clash::describe() const {
  std::string where = path.empty() ? "<root>" : path;
  switch (kind) {
    case Kind::TypeClash:
      return "at " + where + ": " + left + " does not unify with " + right;
    case Kind::InappropriateFeature:
      return "at " + where + ": feature " + right + " is not appropriate for " + left;
    case Kind::Cycle:
      return "at " + where + ": structure would become cyclic";
  }
  return where;
}

UnifyResult::UnifyResult(FeatureStructure fs) : fs_(std::make_unique<FeatureStructure>(std::move(fs))) {}
UnifyResult::UnifyResult(Clash clash) : clash_(std::move(clash)) {}
UnifyResult::~UnifyResult() = default;
UnifyResult::UnifyResult(const UnifyResult& o)
    : fs_(o.fs_ ? std::make_unique<FeatureStructure>(*o.fs_) : nullptr), clash_(o.clash_) {}
UnifyResult::UnifyResult(UnifyResult&&) noexcept = default;
UnifyResult& UnifyResult::operator=(const UnifyResult& o) {
  if (this != &o) {
    fs_ = o.fs_ ? std::make_unique<FeatureStructure>(*o.fs_) : nullptr;
    clash_ = o.clash_;
  }
  return *this;
}
UnifyResult& UnifyResult::operator=(UnifyResult&&) noexcept = default;

const FeatureStructure& UnifyResult::value() const {
  if (!fs_) throw Error("no structure: " + clash_.describe());
  return *fs_;
}

// ---------------------------------------------------------------------------

FeatureStructure FeatureStructure::atomic(std::shared_ptr<const TypeLattice> lattice, Sort sort) {
  auto nodes = std::make_shared<std::vector<Node>>();
  nodes->push_back(Node{std::move(sort), {}});
  return FeatureStructure(std::move(lattice), std::move(nodes));
}

std::optional<NodeIndex> FeatureStructure::arc(NodeIndex from, FeatureId f) const {
  for (const Arc& a : node(from).arcs)
    if (a.feature == f) return a.target;
  return std::nullopt;
}

std::optional<NodeIndex> FeatureStructure::walk(std::span<const FeatureId> path, NodeIndex from) const {
  std::optional<NodeIndex> cur = from;
  for (FeatureId f : path) {
    cur = arc(*cur, f);
    if (!cur) return std::nullopt;
  }
  return cur;
}

std::optional<NodeIndex> FeatureStructure::walk(std::string_view dotted, NodeIndex from) const {
  Path p;
  try {
    p = parse_path(lattice(), dotted);
  } catch (const Error&) {
    return std::nullopt;
  }
  return walk(p, from);
}

FeatureStructure FeatureStructure::substructure(NodeIndex i) const {
  if (i == 0) return *this;
  FsEditor ed(*this);
  return ed.finish(i).value();
}

std::vector<std::size_t> FeatureStructure::in_degrees() const {
  std::vector<std::size_t> deg(node_count(), 0);
  for (const Node& n : *nodes_)
    for (const Arc& a : n.arcs) ++deg[a.target];
  return deg;
}

// ---------------------------------------------------------------------------

FsEditor::FsEditor(std::shared_ptr<const TypeLattice> lattice) : lattice_(std::move(lattice)) {}

FsEditor::FsEditor(const FeatureStructure& fs) : lattice_(fs.lattice_ptr()) {
  nodes_.reserve(fs.node_count());
  for (NodeIndex i = 0; i < fs.node_count(); ++i) nodes_.push_back({fs.node(i).sort, fs.node(i).arcs});
}

NodeIndex FsEditor::add(Sort sort) {
  nodes_.push_back({std::move(sort), {}});
  return static_cast<NodeIndex>(nodes_.size() - 1);
}

NodeIndex FsEditor::graft(const FeatureStructure& fs) {
  const auto offset = static_cast<NodeIndex>(nodes_.size());
  for (NodeIndex i = 0; i < fs.node_count(); ++i) {
    RawNode n{fs.node(i).sort, fs.node(i).arcs};
    for (Arc& a : n.arcs) a.target += offset;
    nodes_.push_back(std::move(n));
  }
  return offset;
}

std::optional<NodeIndex> FsEditor::arc(NodeIndex from, FeatureId f) const {
  for (const Arc& a : nodes_[from].arcs)
    if (a.feature == f) return a.target;
  return std::nullopt;
}

std::optional<NodeIndex> FsEditor::walk(NodeIndex from, std::span<const FeatureId> path) const {
  std::optional<NodeIndex> cur = from;
  for (FeatureId f : path) {
    cur = arc(*cur, f);
    if (!cur) return std::nullopt;
  }
  return cur;
}

void FsEditor::set_arc(NodeIndex from, FeatureId f, NodeIndex to) {
  for (Arc& a : nodes_[from].arcs) {
    if (a.feature == f) {
      a.target = to;
      return;
    }
  }
  nodes_[from].arcs.push_back({f, to});
}

void FsEditor::remove_arc(NodeIndex from, FeatureId f) {
  auto& arcs = nodes_[from].arcs;
  arcs.erase(std::remove_if(arcs.begin(), arcs.end(), [f](const Arc& a) { return a.feature == f; }),
             arcs.end());
}

void FsEditor::merge_arc(NodeIndex from, FeatureId f, NodeIndex to) {
  if (auto existing = arc(from, f)) {
    equate(*existing, to);
  } else {
    nodes_[from].arcs.push_back({f, to});
  }
}

NodeIndex FsEditor::ensure_path(NodeIndex from, std::span<const FeatureId> path) {
  NodeIndex cur = from;
  for (FeatureId f : path) {
    if (auto next = arc(cur, f)) {
      cur = *next;
      continue;
    }
    const Sort& s = nodes_[cur].sort;
    auto value = s.atom ? std::nullopt : lattice_->approp(s.type, f);
    if (!value) {
      throw InappropriateFeatureError("feature " + lattice_->feature_name(f) +
                                      " is not appropriate for " + sort_name(*lattice_, s));
    }
    NodeIndex fresh = add(Sort::of(*value));
    nodes_[cur].arcs.push_back({f, fresh});
    cur = fresh;
  }
  return cur;
}

void FsEditor::redirect(NodeIndex from, NodeIndex to) {
  for (RawNode& n : nodes_)
    for (Arc& a : n.arcs)
      if (a.target == from) a.target = to;
}

namespace {

// Union-find closure state used by FsEditor::finish.
struct Closure {
  std::vector<NodeIndex> parent;
  std::vector<Sort> sorts;
  std::vector<std::vector<Arc>> arcs;

  NodeIndex find(NodeIndex x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // Dotted path from `root` to the class of `target`, by breadth-first search.
  std::string path_to(const TypeLattice& lat, NodeIndex root, NodeIndex target) {
    root = find(root);
    target = find(target);
    std::vector<std::pair<NodeIndex, FeatureId>> via(parent.size(), {~NodeIndex{0}, {}});
    std::vector<bool> seen(parent.size(), false);
    std::deque<NodeIndex> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
      NodeIndex v = queue.front();
      queue.pop_front();
      if (v == target) break;
      auto sorted = arcs[v];
      std::sort(sorted.begin(), sorted.end(), [](const Arc& a, const Arc& b) { return a.feature < b.feature; });
      for (const Arc& a : sorted) {
        NodeIndex w = find(a.target);
        if (seen[w]) continue;
        seen[w] = true;
        via[w] = {v, a.feature};
        queue.push_back(w);
      }
    }
    if (!seen[target]) return {};
    Path p;
    for (NodeIndex v = target; v != root; v = via[v].first) p.push_back(via[v].second);
    std::reverse(p.begin(), p.end());
    return path_string(lat, p);
  }
};

std::string join_path(std::string base, const std::string& feature) {
  if (!base.empty()) base += '.';
  return base + feature;
}

}  // namespace

UnifyResult FsEditor::finish(NodeIndex root) const {
  const TypeLattice& lat = *lattice_;
  const std::size_t n = nodes_.size();
  Closure c;
  c.parent.resize(n);
  std::iota(c.parent.begin(), c.parent.end(), NodeIndex{0});
  c.sorts.reserve(n);
  c.arcs.reserve(n);
  for (const RawNode& r : nodes_) {
    c.sorts.push_back(r.sort);
    c.arcs.push_back(r.arcs);
  }

  std::vector<std::pair<NodeIndex, NodeIndex>> work(equations_.rbegin(), equations_.rend());
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    NodeIndex rx = c.find(x), ry = c.find(y);
    if (rx == ry) continue;
    auto m = meet(lat, c.sorts[rx], c.sorts[ry]);
    if (!m) {
      return Clash{Clash::Kind::TypeClash, c.path_to(lat, root, rx), sort_name(lat, c.sorts[rx]),
                   sort_name(lat, c.sorts[ry])};
    }
    c.parent[ry] = rx;
    c.sorts[rx] = std::move(*m);
    for (const Arc& a : c.arcs[ry]) {
      auto it = std::find_if(c.arcs[rx].begin(), c.arcs[rx].end(),
                             [&](const Arc& b) { return b.feature == a.feature; });
      if (it != c.arcs[rx].end()) {
        work.push_back({it->target, a.target});
      } else {
        c.arcs[rx].push_back(a);
      }
    }
    c.arcs[ry].clear();
  }

  // Canonical depth-first traversal of the closed graph.
  const NodeIndex start = c.find(root);
  for (NodeIndex v = 0; v < n; ++v) {
    if (c.parent[v] != v) continue;
    for (Arc& a : c.arcs[v]) a.target = c.find(a.target);
    std::sort(c.arcs[v].begin(), c.arcs[v].end(),
              [](const Arc& a, const Arc& b) { return a.feature < b.feature; });
  }
  constexpr NodeIndex kUnset = ~NodeIndex{0};
  std::vector<int> colour(n, 0);
  std::vector<NodeIndex> index(n, kUnset);
  std::vector<std::string> paths(n);
  std::vector<NodeIndex> preorder, postorder;
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{start, 0}};
  colour[start] = 1;
  index[start] = 0;
  preorder.push_back(start);
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < c.arcs[v].size()) {
      const Arc& a = c.arcs[v][i++];
      NodeIndex w = a.target;
      if (colour[w] == 1) {
        return Clash{Clash::Kind::Cycle, join_path(paths[v], lat.feature_name(a.feature)), {}, {}};
      }
      if (colour[w] == 0) {
        colour[w] = 1;
        index[w] = static_cast<NodeIndex>(preorder.size());
        preorder.push_back(w);
        paths[w] = join_path(paths[v], lat.feature_name(a.feature));
        stack.push_back({w, 0});
      }
    } else {
      colour[v] = 2;
      postorder.push_back(v);
      stack.pop_back();
    }
  }

  // Appropriateness, parents before children.
  for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
    NodeIndex v = *it;
    const Sort& s = c.sorts[v];
    for (const Arc& a : c.arcs[v]) {
      auto value = s.atom ? std::nullopt : lat.approp(s.type, a.feature);
      if (!value) {
        return Clash{Clash::Kind::InappropriateFeature, paths[v], sort_name(lat, s),
                     lat.feature_name(a.feature)};
      }
      auto narrowed = meet(lat, c.sorts[a.target], Sort::of(*value));
      if (!narrowed) {
        return Clash{Clash::Kind::TypeClash, join_path(paths[v], lat.feature_name(a.feature)),
                     sort_name(lat, c.sorts[a.target]), lat.name(*value)};
      }
      c.sorts[a.target] = std::move(*narrowed);
    }
  }

  auto out = std::make_shared<std::vector<Node>>();
  out->reserve(preorder.size());
  for (NodeIndex v : preorder) {
    Node node{std::move(c.sorts[v]), std::move(c.arcs[v])};
    for (Arc& a : node.arcs) a.target = index[a.target];
    out->push_back(std::move(node));
  }
  return FeatureStructure(lattice_, std::move(out));
}

// ---------------------------------------------------------------------------

UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b) { return unify_at(a, a.root(), b); }

UnifyResult unify_at(const FeatureStructure& host, NodeIndex at, const FeatureStructure& guest) {
  if (host.lattice_ptr() != guest.lattice_ptr()) throw Error("unify: structures use different lattices");
  FsEditor ed(host);
  NodeIndex g = ed.graft(guest);
  ed.equate(at, g);
  return ed.finish(0);
}

bool subsumes(const FeatureStructure& a, const FeatureStructure& b) {
  const TypeLattice& lat = a.lattice();
  constexpr NodeIndex kUnset = ~NodeIndex{0};
  std::vector<NodeIndex> image(a.node_count(), kUnset);
  std::vector<std::pair<NodeIndex, NodeIndex>> todo{{a.root(), b.root()}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (image[x] != kUnset) {
      if (image[x] != y) return false;
      continue;
    }
    image[x] = y;
    if (!sort_leq(lat, b.sort(y), a.sort(x))) return false;
    for (const Arc& arc : a.node(x).arcs) {
      auto target = b.arc(y, arc.feature);
      if (!target) return false;
      todo.push_back({arc.target, *target});
    }
  }
  return true;
}

bool iso_equal(const FeatureStructure& a, const FeatureStructure& b) {
  return subsumes(a, b) && subsumes(b, a);
}

std::optional<FeatureStructure> get(const FeatureStructure& fs, std::span<const FeatureId> path) {
  auto n = fs.walk(path);
  if (!n) return std::nullopt;
  return fs.substructure(*n);
}

UnifyResult put(const FeatureStructure& fs, std::span<const FeatureId> path, const FeatureStructure& value) {
  FsEditor ed(fs);
  NodeIndex target = ed.ensure_path(0, path);
  NodeIndex g = ed.graft(value);
  ed.equate(target, g);
  return ed.finish(0);
}

FeatureStructure restrict_root(const FeatureStructure& fs, std::span<const FeatureId> keep) {
  FsEditor ed(fs);
  for (const Arc& a : fs.node(0).arcs) {
    if (std::find(keep.begin(), keep.end(), a.feature) == keep.end()) ed.remove_arc(0, a.feature);
  }
  return ed.finish(0).value();
}

std::optional<Clash> check_well_formed(const FeatureStructure& fs) {
  const TypeLattice& lat = fs.lattice();
  // Canonical storage is a preorder of an acyclic graph, so a back arc to an
  // ancestor would be the only way to form a cycle.
  std::vector<int> colour(fs.node_count(), 0);
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{0, 0}};
  colour[0] = 1;
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < fs.node(v).arcs.size()) {
      NodeIndex w = fs.node(v).arcs[i++].target;
      if (colour[w] == 1) return Clash{Clash::Kind::Cycle, {}, {}, {}};
      if (colour[w] == 0) {
        colour[w] = 1;
        stack.push_back({w, 0});
      }
    } else {
      colour[v] = 2;
      stack.pop_back();
    }
  }
  for (NodeIndex v = 0; v < fs.node_count(); ++v) {
    const Sort& s = fs.sort(v);
    for (const Arc& a : fs.node(v).arcs) {
      auto value = s.atom ? std::nullopt : lat.approp(s.type, a.feature);
      if (!value) {
        return Clash{Clash::Kind::InappropriateFeature, {}, sort_name(lat, s), lat.feature_name(a.feature)};
      }
      if (!sort_leq(lat, fs.sort(a.target), Sort::of(*value))) {
        return Clash{Clash::Kind::TypeClash, lat.feature_name(a.feature), sort_name(lat, fs.sort(a.target)),
                     lat.name(*value)};
      }
    }
  }
  return std::nullopt;
}

}  // namespace cfl
