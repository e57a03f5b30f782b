#include "cfl/type_lattice.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cfl {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits make_bits(std::size_t n) { return Bits((n + 63) / 64, 0); }
void set_bit(Bits& b, std::uint32_t i) { b[i / 64] |= (std::uint64_t{1} << (i % 64)); }

}  // namespace

std::optional<TypeId> TypeLattice::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

bool TypeLattice::subtype(TypeId a, TypeId b) const { return bit(below_[b.value], a.value); }

GlbResult TypeLattice::glb(TypeId a, TypeId b) const {
  std::int32_t v = glb_table_[static_cast<std::size_t>(a.value) * size() + b.value];
  if (v >= 0) return {GlbResult::Status::Ok, TypeId{static_cast<std::uint32_t>(v)}};
  if (v == -2) return {GlbResult::Status::Multiple, {}};
  return {GlbResult::Status::None, {}};
}

std::optional<TypeId> TypeLattice::meet(TypeId a, TypeId b) const {
  GlbResult r = glb(a, b);
  if (r.status == GlbResult::Status::Multiple) {
    throw MultipleGlbError("types " + name(a) + " and " + name(b) +
                           " have no unique greatest lower bound");
  }
  if (!r) return std::nullopt;
  return r.type;
}

std::optional<FeatureId> TypeLattice::feature(std::string_view name) const {
  auto it = feature_by_name_.find(std::string(name));
  if (it == feature_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<TypeId> TypeLattice::approp(TypeId t, FeatureId f) const {
  const auto& list = approp_[t.value];
  auto it = std::lower_bound(list.begin(), list.end(), f,
                             [](const auto& p, FeatureId x) { return p.first < x; });
  if (it == list.end() || it->first != f) return std::nullopt;
  return it->second;
}

LatticeBuilder::LatticeBuilder() { declare(kTopTypeName); }

TypeId LatticeBuilder::declare(std::string_view name) {
  auto [it, inserted] = ids_.try_emplace(std::string(name), TypeId{});
  if (inserted) {
    it->second = TypeId{static_cast<std::uint32_t>(names_.size())};
    names_.emplace_back(name);
    parents_.emplace_back();
  }
  return it->second;
}

void LatticeBuilder::add_parent(TypeId child, TypeId parent) {
  auto& ps = parents_[child.value];
  if (std::find(ps.begin(), ps.end(), parent) == ps.end()) ps.push_back(parent);
}

void LatticeBuilder::declare_approp(TypeId type, std::string_view feature, TypeId value) {
  approp_.push_back({type, std::string(feature), value});
}

void LatticeBuilder::attach_orphans_to_top() {
  for (std::uint32_t i = 1; i < names_.size(); ++i) {
    if (parents_[i].empty()) parents_[i].push_back(TypeId{0});
  }
}

std::shared_ptr<const TypeLattice> LatticeBuilder::build() const {
  std::shared_ptr<TypeLattice> lat(new TypeLattice());
  const std::size_t n = names_.size();
  lat->names_ = names_;
  lat->by_name_ = ids_;
  lat->parents_ = parents_;
  lat->children_.assign(n, {});
  for (std::uint32_t c = 0; c < n; ++c) {
    for (TypeId p : parents_[c]) lat->children_[p.value].push_back(TypeId{c});
  }
  Diagnostics& diags = lat->diagnostics_;

  // Cycles: colour DFS along parent edges.
  bool cyclic = false;
  {
    std::vector<int> colour(n, 0);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (colour[s]) continue;
      stack.push_back({s, 0});
      colour[s] = 1;
      while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < parents_[v].size()) {
          std::uint32_t w = parents_[v][i++].value;
          if (colour[w] == 0) {
            colour[w] = 1;
            stack.push_back({w, 0});
          } else if (colour[w] == 1) {
            cyclic = true;
            diags.push_back({"Cycle", "type hierarchy cycle through " + names_[w] + " and " + names_[v],
                             {names_[w], names_[v]}});
          }
        } else {
          colour[v] = 2;
          stack.pop_back();
        }
      }
    }
  }

  // Descendant closure (reflexive), by search from each type.
  lat->below_.assign(n, make_bits(n));
  std::vector<Bits> above(n, make_bits(n));
  for (std::uint32_t t = 0; t < n; ++t) {
    std::vector<std::uint32_t> todo{t};
    std::vector<bool> seen(n, false);
    seen[t] = true;
    while (!todo.empty()) {
      std::uint32_t v = todo.back();
      todo.pop_back();
      set_bit(lat->below_[t], v);
      set_bit(above[v], t);
      for (TypeId c : lat->children_[v]) {
        if (!seen[c.value]) {
          seen[c.value] = true;
          todo.push_back(c.value);
        }
      }
    }
  }
  for (std::uint32_t t = 1; t < n; ++t) {
    if (!lat->bit(lat->below_[0], t)) {
      diags.push_back({"Unreachable", "type " + names_[t] + " is not reachable from " +
                                          std::string(kTopTypeName), {names_[t]}});
    }
  }

  // GLB table.
  lat->glb_table_.assign(n * n, -1);
  const std::size_t words = (n + 63) / 64;
  Bits common(words);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a; b < n; ++b) {
      std::int32_t result = -1;
      if (lat->bit(lat->below_[b], a)) {
        result = static_cast<std::int32_t>(a);
      } else if (lat->bit(lat->below_[a], b)) {
        result = static_cast<std::int32_t>(b);
      } else {
        bool any = false;
        for (std::size_t w = 0; w < words; ++w) {
          common[w] = lat->below_[a][w] & lat->below_[b][w];
          any = any || common[w] != 0;
        }
        if (any) {
          std::vector<std::uint32_t> maximal;
          for (std::uint32_t c = 0; c < n; ++c) {
            if (!lat->bit(common, c)) continue;
            bool dominated = false;
            for (std::size_t w = 0; w < words && !dominated; ++w) {
              std::uint64_t m = above[c][w] & common[w];
              if (w == c / 64) m &= ~(std::uint64_t{1} << (c % 64));
              dominated = m != 0;
            }
            if (!dominated) maximal.push_back(c);
          }
          if (maximal.size() == 1) {
            result = static_cast<std::int32_t>(maximal.front());
          } else {
            result = -2;
            if (!cyclic) {
              std::string bounds;
              for (auto m : maximal) bounds += (bounds.empty() ? "" : ", ") + names_[m];
              diags.push_back({"MultipleGlb",
                               "types " + names_[a] + " and " + names_[b] +
                                   " have several maximal common subtypes: " + bounds,
                               {names_[a], names_[b]}});
            }
          }
        }
      }
      lat->glb_table_[a * n + b] = result;
      lat->glb_table_[b * n + a] = result;
    }
  }

  // Features in lexicographic order.
  std::set<std::string> feature_set;
  for (const auto& d : approp_) feature_set.insert(d.feature);
  for (const auto& f : feature_set) {
    FeatureId id{static_cast<std::uint32_t>(lat->feature_names_.size())};
    lat->feature_names_.push_back(f);
    lat->feature_by_name_.emplace(f, id);
  }

  // Effective appropriateness, parents before children.
  lat->approp_.assign(n, {});
  lat->introducers_.assign(lat->feature_names_.size(), {});
  if (cyclic) return lat;

  std::vector<std::map<FeatureId, TypeId>> own(n);
  for (const auto& d : approp_) {
    FeatureId f = lat->feature_by_name_.at(d.feature);
    auto [it, inserted] = own[d.type.value].try_emplace(f, d.value);
    if (!inserted && it->second != d.value) {
      diags.push_back({"ApprConflict",
                       "feature " + d.feature + " declared twice on " + names_[d.type.value] +
                           " with different value types",
                       {names_[d.type.value], d.feature}});
    }
  }

  std::vector<std::uint32_t> order;
  {
    std::vector<std::size_t> pending(n);
    for (std::uint32_t t = 0; t < n; ++t) pending[t] = parents_[t].size();
    std::vector<std::uint32_t> ready;
    for (std::uint32_t t = 0; t < n; ++t)
      if (pending[t] == 0) ready.push_back(t);
    while (!ready.empty()) {
      std::uint32_t t = ready.back();
      ready.pop_back();
      order.push_back(t);
      for (TypeId c : lat->children_[t])
        if (--pending[c.value] == 0) ready.push_back(c.value);
    }
  }

  std::vector<std::map<FeatureId, TypeId>> eff(n);
  for (std::uint32_t t : order) {
    auto& mine = eff[t];
    for (TypeId p : parents_[t]) {
      for (auto [f, v] : eff[p.value]) {
        auto [it, inserted] = mine.try_emplace(f, v);
        if (inserted || it->second == v) continue;
        GlbResult g = lat->glb(it->second, v);
        if (g) {
          it->second = g.type;
        } else {
          diags.push_back({"ApprConflict",
                           "type " + names_[t] + " inherits feature " +
                               lat->feature_names_[f.value] + " with incompatible value types " +
                               names_[it->second.value] + " and " + names_[v.value],
                           {names_[t], lat->feature_names_[f.value]}});
        }
      }
    }
    for (auto [f, w] : own[t]) {
      auto it = mine.find(f);
      if (it != mine.end() && !lat->subtype(w, it->second)) {
        diags.push_back({"NonMonotoneApprop",
                         "type " + names_[t] + " declares " + lat->feature_names_[f.value] + ": " +
                             names_[w.value] + " which is not below inherited " +
                             names_[it->second.value],
                         {names_[t], lat->feature_names_[f.value]}});
      }
      mine[f] = w;
    }
  }
  for (std::uint32_t t = 0; t < n; ++t) {
    lat->approp_[t].assign(eff[t].begin(), eff[t].end());
    for (auto [f, v] : eff[t]) {
      bool inherited = std::any_of(parents_[t].begin(), parents_[t].end(),
                                   [&](TypeId p) { return eff[p.value].count(f) != 0; });
      if (!inherited) lat->introducers_[f.value].push_back(TypeId{t});
    }
  }
  return lat;
}

Diagnostics validate(const TypeLattice& lattice) { return lattice.diagnostics(); }

}  // namespace cfl
