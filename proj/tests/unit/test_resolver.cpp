#include <doctest.h>

#include <future>
#include <set>

#include "cfl/dsl.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cfl;

namespace {

FeatureStructure frame(const std::string& name) { return test::frame_file(*test::turkish(), name); }

std::optional<std::string> lex_at(const FeatureStructure& fs, std::string_view path) {
  auto n = fs.walk(std::string(path) + ".head.lex");
  if (!n) return std::nullopt;
  return fs.sort(*n).atom;
}

std::string type_at(const FeatureStructure& fs, std::string_view path) {
  auto n = fs.walk(path);
  REQUIRE_MESSAGE(n.has_value(), path);
  return fs.lattice().name(fs.sort(*n).type);
}

using Hits = std::multiset<std::pair<std::string, int>>;

Hits hit_set(const Resolution& r) {
  Hits out;
  for (const auto& s : r.senses) out.insert({s.sense_id, s.stage});
  return out;
}

void check_against_oracle(const CompiledLexicon& lex, const FeatureStructure& fs) {
  Resolution r = resolve(lex, fs, {.all_stages = true});
  auto expected = oracle::brute_force_resolve(lex, fs);
  Hits oracle_hits;
  for (const auto& h : expected) oracle_hits.insert({h.sense, h.stage});
  CHECK(hit_set(r) == oracle_hits);
  // Frames: every engine result has an oracle twin with the same canonical form.
  std::multiset<std::string> engine_frames, oracle_frames;
  for (const auto& s : r.senses) engine_frames.insert(s.sense_id + "@" + oracle::canonical(s.frame));
  for (const auto& h : expected) oracle_frames.insert(h.sense + "@" + h.frame);
  CHECK(engine_frames == oracle_frames);
}

std::shared_ptr<const CompiledLexicon> ambiguity_lexicon() {
  auto r = test::compile_with_prelude({test::read_file(test::fixture("ambiguity.cfl"))}, true);
  REQUIRE(r.ok());
  return r.lexicon;
}

const FailureEntry* failure(const FailureReport& report, std::string_view id, int stage) {
  const FailureEntry* e = report.find(id, stage);
  REQUIRE_MESSAGE(e != nullptr, id);
  return e;
}

}  // namespace

TEST_CASE("ye with para resolves to accepting a bribe") {
  auto r = resolve(*test::turkish(), frame("ye-accept-bribe"));
  CHECK(test::sense_ids(r) == std::vector<std::string>{"SENSE-ACCEPT-BRIBE"});
  CHECK(r.senses[0].stage == 0);
  CHECK(r.senses[0].stage_label() == "stage:0 (surface)");
}

TEST_CASE("şaş with an ablative object resolves to deviating") {
  auto r = resolve(*test::turkish(), frame("sas-deviate-from"));
  CHECK(test::sense_ids(r) == std::vector<std::string>{"SENSE-DEVIATE-FROM"});
}

TEST_CASE("tut with a clausal subject records the embedded resolution") {
  auto r = resolve(*test::turkish(), frame("tut-feel-like"));
  REQUIRE(test::sense_ids(r) == std::vector<std::string>{"SENSE-FEEL-LIKE"});
  const auto& hit = r.senses[0];
  REQUIRE(hit.embedded.size() == 1);
  CHECK(hit.embedded[0].first == "args.subject");
  CHECK(hit.embedded[0].second.sense_id == "SENSE-GO");
  const auto& f = hit.frame;
  CHECK(*f.walk("sem.agent") == *f.walk("args.subject.args.subject"));
  CHECK(*f.walk("sem.theme") == *f.walk("args.subject.sem"));
  CHECK(type_at(f, "sem.theme.rel") == "go");
  CHECK(resolve(*test::turkish(), frame("tut-feel-like-3pl")).senses.empty());
}

TEST_CASE("geçirildi resolves after stripping passive and causative") {
  auto lex = test::turkish();
  auto r = resolve(*lex, frame("gec-passive-causative"));
  CHECK(r.stages == std::vector<int>{0, 1, 2});
  REQUIRE(test::sense_ids(r) == std::vector<std::string>{"SENSE-PASS-TO"});
  const auto& f = r.senses[0].frame;
  CHECK(r.senses[0].stage == 2);
  CHECK(r.senses[0].stage_label() == "stage:2 (-CAUS)");
  CHECK(lex_at(f, "sem.causer") == "adam");
  CHECK(lex_at(f, "args.subject") == "çocuk");
  CHECK(*f.walk("sem.theme") == *f.walk("args.subject"));
  CHECK(lex_at(f, "sem.goal") == "karşı");
  // The causer is the very node that was the agentive object on the surface.
  auto surface = frame("gec-passive-causative");
  CHECK(iso_equal(f.substructure(*f.walk("sem.causer")), surface.substructure(*surface.walk("args.agn-obj"))));
}

TEST_CASE("baş classed as both human and edible gives two senses") {
  auto lex = ambiguity_lexicon();
  auto fs = lex->parse_frame(test::read_file(test::fixture("ambiguity-bas.frm")));
  auto r = resolve(*lex, fs);
  CHECK(test::sense_ids(r) == std::vector<std::string>{"SENSE-WASTE-PERSON", "SENSE-EAT1"});
  check_against_oracle(*lex, fs);
}

TEST_CASE("the passive of the kafa idiom is blocked at every stage") {
  auto lex = test::turkish();
  auto fs = frame("ye-deranged-passive");
  auto r = resolve(*lex, fs, {.all_stages = true});
  CHECK(r.senses.empty());
  CHECK(r.stages == std::vector<int>{0, 1});
  auto report = explain(*lex, fs);
  for (int stage : {0, 1}) CHECK(failure(report, "SENSE-GET-MENTALLY-DERANGED", stage));
}

TEST_CASE("earliest stage wins unless all stages are requested") {
  auto lex = test::turkish();
  auto fs = frame("ye-eat1-agentless-passive");
  auto first = resolve(*lex, fs);
  auto all = resolve(*lex, fs, {.all_stages = true});
  REQUIRE_FALSE(first.senses.empty());
  for (const auto& s : first.senses) CHECK(s.stage == first.senses[0].stage);
  CHECK(all.senses.size() >= first.senses.size());
  for (std::size_t i = 1; i < all.senses.size(); ++i) {
    const auto& a = all.senses[i - 1];
    const auto& b = all.senses[i];
    CHECK(a.stage <= b.stage);
    if (a.stage == b.stage) CHECK(lex->sense(a.sense_id)->index <= lex->sense(b.sense_id)->index);
  }
  REQUIRE_FALSE(first.notes.empty());
  CHECK(first.notes[0].rfind("stage:1 (-PASS): agentless passive", 0) == 0);
}

TEST_CASE("explain attributes failures to tiers") {
  auto lex = test::turkish();
  SUBCASE("nominative kafa fails the morphological tier") {
    auto report = explain(*lex, frame("ye-deranged-nominative"));
    const FailureEntry* e = failure(report, "SENSE-GET-MENTALLY-DERANGED", 0);
    REQUIRE(e->tier);
    CHECK(*e->tier == Tier::Morph);
    CHECK(e->clash.path == "args.dir-obj.case");
    CHECK(e->term == "DIR-OBJ-IS-ACC");
    CHECK(e->describe().find("[morph]") != std::string::npos);
  }
  SUBCASE("a filled dative fails plain eating at the co-occurrence tier") {
    auto report = explain(*lex, frame("ye-eat1-dative"));
    const FailureEntry* e = failure(report, "SENSE-EAT1", 0);
    REQUIRE(e->tier);
    CHECK(*e->tier == Tier::Cooccur);
    CHECK(e->clash.path == "args.dat-obl");
  }
  SUBCASE("a matching sense is absent from the report") {
    auto report = explain(*lex, frame("ye-accept-bribe"));
    for (const auto& e : report.entries) CHECK(e.sense_id != "SENSE-ACCEPT-BRIBE");
    CHECK_FALSE(report.entries.empty());
  }
  SUBCASE("resolve fills the report only when nothing resolved") {
    auto none = resolve(*lex, frame("ye-deranged-nominative"), {.explain_failures = true});
    CHECK(none.senses.empty());
    CHECK_FALSE(none.failures.entries.empty());
    auto some = resolve(*lex, frame("ye-accept-bribe"), {.explain_failures = true});
    CHECK(some.failures.entries.empty());
  }
}

TEST_CASE("a clausal argument with no resolution sinks the parent") {
  auto lex = test::turkish();
  std::string text = test::read_file(test::fixture("frames/tut-feel-like.frm"));
  auto at = text.find("\"git\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 5, "\"uç\"");
  auto fs = lex->parse_frame(text);
  CHECK(resolve(*lex, fs, {.all_stages = true}).senses.empty());
  CHECK(oracle::brute_force_resolve(*lex, fs).empty());
  auto report = explain(*lex, fs);
  REQUIRE_FALSE(report.entries.empty());
  for (const auto& e : report.entries) CHECK(e.where == "args.subject");
  CHECK(failure(report, "SENSE-GO", 0)->term == "VERB-IS-GIT");
}

TEST_CASE("embedding deeper than the configured limit is an error") {
  auto r = test::compile_with_prelude({"pragma max-embed-depth 0."}, true);
  REQUIRE(r.ok());
  auto fs = r.lexicon->parse_frame(test::read_file(test::fixture("frames/tut-feel-like.frm")));
  try {
    resolve(*r.lexicon, fs);
    FAIL("expected EmbedDepthExceeded");
  } catch (const ResolveError& e) {
    CHECK(e.kind() == ResolveError::Kind::EmbedDepthExceeded);
  }
  // Frames without clausal arguments are unaffected.
  auto flat = r.lexicon->parse_frame(test::read_file(test::fixture("frames/ye-accept-bribe.frm")));
  CHECK(resolve(*r.lexicon, flat).senses.size() == 1);
}

TEST_CASE("malformed frames are rejected") {
  auto lex = test::turkish();
  auto expect_malformed = [&](const FeatureStructure& fs) {
    try {
      resolve(*lex, fs);
      FAIL("expected MalformedFrame");
    } catch (const ResolveError& e) {
      CHECK(e.kind() == ResolveError::Kind::MalformedFrame);
    }
  };
  expect_malformed(lex->parse_frame("[rel: go]", "sem-frame"));
  auto other = test::compile_with_prelude({}, true);
  REQUIRE(other.ok());
  expect_malformed(other.lexicon->parse_frame(test::read_file(test::fixture("frames/ye-eat1.frm"))));
  CHECK_THROWS_AS(generate(*lex, frame("ye-eat1")), ResolveError);
}

TEST_CASE("generation from a semantic frame") {
  auto lex = test::turkish();
  SUBCASE("getting mentally deranged") {
    auto sem = lex->parse_frame("[rel: get-mentally-deranged, experiencer: [head: [sem: human]]]", "sem-frame");
    auto out = generate(*lex, sem);
    REQUIRE(out.size() == 1);
    CHECK(out[0].sense_id == "SENSE-GET-MENTALLY-DERANGED");
    const auto& f = out[0].frame;
    CHECK(lex_at(f, "args.dir-obj") == "kafa");
    CHECK(type_at(f, "args.dir-obj.case") == "acc");
    CHECK(type_at(f, "args.dir-obj.poss") == "none");
    CHECK(*f.walk("args.subject") == *f.walk("sem.experiencer"));
    CHECK(type_at(f, "args.subject.head.sem") == "human");
  }
  SUBCASE("an unused relation generates nothing") {
    auto r = test::compile_with_prelude({"type unknown-rel < *top-rel*."}, true);
    REQUIRE(r.ok());
    CHECK(generate(*r.lexicon, r.lexicon->parse_frame("[rel: unknown-rel]", "sem-frame")).empty());
  }
  SUBCASE("plain eating") {
    auto sem = lex->parse_frame("[rel: eat1, agent: [noun-phrase head: [sem: human]]]", "sem-frame");
    auto out = generate(*lex, sem);
    REQUIRE(out.size() == 1);
    CHECK(out[0].sense_id == "SENSE-EAT1");
    CHECK(type_at(out[0].frame, "args.dat-obl") == "nil");
    CHECK(type_at(out[0].frame, "args.dir-obj") == "optional-edible");
    CHECK(*out[0].frame.walk("args.subject") == *out[0].frame.walk("sem.agent"));
  }
  SUBCASE("without a relation every compatible sense is tried in order") {
    auto out = generate(*lex, lex->parse_frame("[experiencer: [head: [sem: human]]]", "sem-frame"));
    // Roles a sense leaves unlinked stay free, so every sense accepts an
    // extra experiencer; only the linked ones tie it to the subject.
    REQUIRE(out.size() == lex->senses().size());
    std::vector<std::string> linked;
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].sense_id == lex->senses()[i].id);
      const auto& f = out[i].frame;
      if (*f.walk("sem.experiencer") == *f.walk("args.subject")) linked.push_back(out[i].sense_id);
    }
    CHECK(linked == std::vector<std::string>{"SENSE-GET-MENTALLY-DERANGED", "SENSE-BE-SURPRISED-AT",
                                             "SENSE-BE-CONFUSED-ABOUT"});
  }
}

TEST_CASE("all-stages resolution matches the brute-force oracle on every fixture") {
  auto lex = test::turkish();
  for (const auto& p : test::frame_files()) {
    CAPTURE(p.filename().string());
    check_against_oracle(*lex, lex->parse_frame(test::read_file(p)));
  }
}

TEST_CASE("resolution is deterministic and safe to run concurrently") {
  auto lex = test::turkish();
  auto render = [&](const std::filesystem::path& p) {
    std::string out;
    auto r = resolve(*lex, lex->parse_frame(test::read_file(p)), {.all_stages = true});
    for (const auto& s : r.senses) out += s.sense_id + "\n" + dsl::serialize_frame(s.frame) + "---\n";
    return out;
  };
  std::vector<std::string> serial;
  for (const auto& p : test::frame_files()) serial.push_back(render(p));
  std::vector<std::future<std::string>> parallel;
  for (const auto& p : test::frame_files()) parallel.push_back(std::async(std::launch::async, render, p));
  for (std::size_t i = 0; i < parallel.size(); ++i) CHECK(parallel[i].get() == serial[i]);
}

TEST_CASE("generating from a resolution's semantics subsumes its verb and arguments") {
  auto lex = test::turkish();
  std::vector<FeatureId> keep{*lex->lattice().feature("verb"), *lex->lattice().feature("args")};
  int checked = 0;
  for (const auto& p : test::frame_files()) {
    auto r = resolve(*lex, lex->parse_frame(test::read_file(p)), {.all_stages = true});
    for (const auto& s : r.senses) {
      CAPTURE(s.sense_id);
      auto sem = s.frame.substructure(*s.frame.walk("sem"));
      bool found = false;
      for (const auto& g : generate(*lex, sem))
        found |= g.sense_id == s.sense_id && subsumes(restrict_root(g.frame, keep), restrict_root(s.frame, keep));
      CHECK(found);
      ++checked;
    }
  }
  CHECK(checked >= 15);
}
