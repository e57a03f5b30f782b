#include <doctest.h>

#include <functional>

#include "cfl/dsl.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cfl;

namespace {

FeatureStructure parse(std::string_view text) { return test::turkish()->parse_frame(text); }

const FeatureStructure& constraint(std::string_view name) {
  const NamedConstraint* c = test::turkish()->constraint(name);
  REQUIRE_MESSAGE(c != nullptr, name);
  return c->fs;
}

Path path(std::string_view dotted) { return parse_path(test::turkish()->lattice(), dotted); }

// Every tree-shaped (no sharing) structure under `bound` up to `depth`;
// nullopt once more than `cap` would be produced.
std::optional<std::vector<FeatureStructure>> enumerate_trees(const std::shared_ptr<const TypeLattice>& lat,
                                                             TypeId bound, int depth, std::size_t cap) {
  std::vector<FeatureStructure> out;
  for (std::uint32_t t = 0; t < lat->size(); ++t) {
    if (!lat->subtype(TypeId{t}, bound) || lat->name(TypeId{t}) == kStringAtomTypeName) continue;
    std::vector<std::pair<FeatureId, std::vector<FeatureStructure>>> choices;
    if (depth > 0) {
      for (auto [f, v] : lat->approp_list(TypeId{t})) {
        auto sub = enumerate_trees(lat, v, depth - 1, cap);
        if (!sub) return std::nullopt;
        choices.emplace_back(f, std::move(*sub));
      }
    }
    // Odometer over (absent | each child) per feature.
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      FsEditor ed(lat);
      NodeIndex root = ed.add(Sort::of(TypeId{t}));
      for (std::size_t i = 0; i < choices.size(); ++i)
        if (pick[i] > 0) ed.set_arc(root, choices[i].first, ed.graft(choices[i].second[pick[i] - 1]));
      UnifyResult r = ed.finish(root);
      if (r) out.push_back(*r);
      if (out.size() > cap) return std::nullopt;
      std::size_t i = 0;
      while (i < choices.size() && ++pick[i] > choices[i].second.size()) pick[i++] = 0;
      if (i == choices.size()) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("unify merges disjoint features") {
  auto r = unify(parse("[args: [dir-obj: [case: acc]]]"), parse("[args: [dir-obj: [poss: none]]]"));
  REQUIRE(r);
  CHECK(iso_equal(*r, parse("[args: [dir-obj: [case: acc, poss: none]]]")));
}

TEST_CASE("a filled dative slot does not unify with the no-dative constraint") {
  auto frame = test::frame_file(*test::turkish(), "ye-eat1-dative");
  auto r = unify(frame, constraint("NO-DATIVE-OBL-OBJ"));
  REQUIRE_FALSE(r);
  CHECK(r.clash().path == "args.dat-obl");
}

TEST_CASE("resolving the kafa frame coindexes the experiencer with the subject") {
  auto lex = test::turkish();
  auto frame = test::frame_file(*lex, "ye-mentally-deranged");
  auto r = unify(frame, lex->sense("SENSE-GET-MENTALLY-DERANGED")->compiled);
  REQUIRE(r);
  auto subject = r->walk("args.subject");
  auto experiencer = r->walk("sem.experiencer");
  REQUIRE(subject);
  REQUIRE(experiencer);
  CHECK(*subject == *experiencer);
  CHECK(r->sort(*r->walk("args.subject.head.lex")).atom == "adam");
}

TEST_CASE("unification failure reports a cycle distinctly") {
  LatticeBuilder b;
  TypeId t = b.declare("t");
  b.add_parent(t, TypeId{0});
  b.declare_approp(t, "f", t);
  auto lat = b.build();
  FsEditor ed(lat);
  NodeIndex a = ed.add(Sort::of(t));
  NodeIndex c = ed.add(Sort::of(t));
  ed.set_arc(a, *lat->feature("f"), c);
  ed.equate(a, c);
  auto r = ed.finish(a);
  REQUIRE_FALSE(r);
  CHECK(r.clash().kind == Clash::Kind::Cycle);
}

TEST_CASE("subsumption") {
  auto x = parse("[args: [subject: [case: nom]]]");
  auto y = parse("[verb: [stem: \"ye\"]]");
  auto xy = unify(x, y);
  REQUIRE(xy);
  CHECK(subsumes(x, *xy));
  CHECK(subsumes(y, *xy));
  CHECK_FALSE(subsumes(*xy, x));

  auto acc = parse("[args: [dir-obj: [case: acc]]]");
  auto nom = parse("[args: [dir-obj: [case: nom]]]");
  CHECK_FALSE(subsumes(acc, nom));
  CHECK_FALSE(subsumes(nom, acc));

  SUBCASE("sharing is information") {
    auto shared = parse("[args: [subject: #1 [case: nom]], sem: [agent: #1]]");
    auto copies = parse("[args: [subject: [case: nom]], sem: [agent: [case: nom]]]");
    CHECK_FALSE(subsumes(shared, copies));
    CHECK(subsumes(copies, shared));
    CHECK_FALSE(iso_equal(shared, copies));
  }
}

TEST_CASE("iso_equal is mutual subsumption") {
  auto a = parse("[args: [subject: #1 [case: nom]], sem: [agent: #1]]");
  auto b = parse("[sem: [agent: #2], args: [subject: #2 [case: nom]]]");
  CHECK(iso_equal(a, b));
  CHECK(subsumes(a, b));
  CHECK(subsumes(b, a));
  CHECK_FALSE(iso_equal(a, parse("[args: [subject: [case: nom]]]")));
  CHECK(iso_equal(a, a));
}

TEST_CASE("get and put") {
  auto lex = test::turkish();
  auto frame = test::frame_file(*lex, "ye-accept-bribe");
  auto stem = get(frame, path("verb.stem"));
  REQUIRE(stem);
  CHECK(stem->sort().atom == "ye");
  CHECK(lex->lattice().name(stem->sort().type) == "string-atom");

  SUBCASE("put then get round-trips") {
    auto value = FeatureStructure::atomic(lex->lattice_ptr(), Sort::of(*lex->lattice().find("1pl")));
    auto skeleton = lex->skeleton();
    auto put_r = put(skeleton, path("verb.agr"), value);
    REQUIRE(put_r);
    auto back = get(*put_r, path("verb.agr"));
    REQUIRE(back);
    CHECK(iso_equal(*back, value));
  }
  SUBCASE("inappropriate steps are rejected") {
    CHECK_THROWS_AS(parse_path(lex->lattice(), "verb.bogus"), Error);
    auto value = FeatureStructure::atomic(lex->lattice_ptr(), Sort::of(lex->lattice().top()));
    CHECK_THROWS_AS(put(frame, path("verb.head"), value), InappropriateFeatureError);
  }
  CHECK_FALSE(get(frame, path("args.subject.head.sem.rel")).has_value());
}

TEST_CASE("unification algebra on random structures") {
  std::mt19937 rng(2024);
  int unified = 0;
  std::size_t nodes = 0, shared = 0;
  for (int lattice_round = 0; lattice_round < 10; ++lattice_round) {
    auto lat = oracle::build(oracle::random_typed_lattice(rng, 30, 8));
    REQUIRE(validate(*lat).empty());
    std::vector<FeatureStructure> pool;
    for (int i = 0; i < 40; ++i) {
      pool.push_back(oracle::random_structure(rng, lat, 4));
      nodes += pool.back().node_count();
      for (auto d : pool.back().in_degrees()) shared += d > 1;
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (const auto& a : pool) {
      REQUIRE_FALSE(check_well_formed(a));
      auto aa = unify(a, a);
      REQUIRE(aa);
      REQUIRE(iso_equal(*aa, a));
      REQUIRE(oracle::canonical(*aa) == oracle::canonical(a));
    }
    for (int k = 0; k < 150; ++k) {
      const auto& a = pool[pick(rng)];
      const auto& b = pool[pick(rng)];
      const auto& c = pool[pick(rng)];
      auto ab = unify(a, b);
      auto ba = unify(b, a);
      auto naive = oracle::naive_unify(a, b);
      REQUIRE(bool(ab) == bool(ba));
      REQUIRE(bool(ab) == naive.has_value());
      if (ab) {
        ++unified;
        REQUIRE_FALSE(check_well_formed(*ab));
        REQUIRE(iso_equal(*ab, *ba));
        REQUIRE(oracle::canonical(*ab) == *naive);
        REQUIRE(subsumes(a, *ab));
        REQUIRE(subsumes(b, *ab));
      }
      auto bc = unify(b, c);
      std::optional<FeatureStructure> left, right;
      if (ab)
        if (auto r = unify(*ab, c)) left = *r;
      if (bc)
        if (auto r = unify(a, *bc)) right = *r;
      REQUIRE(left.has_value() == right.has_value());
      if (left) REQUIRE(iso_equal(*left, *right));
    }
  }
  CHECK(unified > 100);
  CHECK(nodes > 400 * 3);
  CHECK(shared > 20);
}

TEST_CASE("unify succeeds iff a common lower bound exists among small trees") {
  std::mt19937 rng(99);
  int lattices = 0;
  while (lattices < 4) {
    auto raw = oracle::random_typed_lattice(rng, 6, 2);
    auto lat = oracle::build(raw);
    auto all = enumerate_trees(lat, lat->top(), 2, 1500);
    if (!all || all->size() < 20) continue;
    ++lattices;
    std::uniform_int_distribution<std::size_t> pick(0, all->size() - 1);
    for (int k = 0; k < 60; ++k) {
      const auto& a = (*all)[pick(rng)];
      const auto& b = (*all)[pick(rng)];
      bool bound = false;
      for (const auto& c : *all)
        if (subsumes(a, c) && subsumes(b, c)) {
          bound = true;
          break;
        }
      auto u = unify(a, b);
      REQUIRE(bool(u) == bound);
    }
  }
}

TEST_CASE("restrict_root keeps only the named features") {
  auto lex = test::turkish();
  auto frame = test::frame_file(*lex, "ye-accept-bribe");
  std::vector<FeatureId> keep{*lex->lattice().feature("verb")};
  auto r = restrict_root(frame, keep);
  CHECK(r.walk("verb.stem"));
  CHECK_FALSE(r.walk("args"));
}
