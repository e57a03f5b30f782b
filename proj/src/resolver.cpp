#include "cfl/resolver.hpp"

#include <algorithm>
#include <set>

namespace cfl {

std::string FailureEntry::describe() const {
  std::string out = sense_id + " " + stage_label(stage);
  if (!where.empty()) out += " in " + where;
  out += ": " + term;
  out += " [" + std::string(tier ? dsl::tier_name(*tier) : "untiered") + "] ";
  out += clash.describe();
  return out;
}

const FailureEntry* FailureReport::find(std::string_view sense_id, int stage) const {
  for (const auto& e : entries)
    if (e.sense_id == sense_id && e.stage == stage) return &e;
  return nullptr;
}

namespace {

struct Alternative {
  FeatureStructure frame;
  std::vector<std::pair<std::string, ResolvedSense>> embedded;
};

struct ClausalSlot {
  std::string path;
  Path ids;
  NodeIndex node;
};

void check_frame(const CompiledLexicon& lex, const FeatureStructure& frame) {
  if (frame.lattice_ptr() != lex.lattice_ptr()) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "frame was built against a different lexicon");
  }
  auto case_frame = lex.lattice().find("case-frame");
  const Sort& root = frame.sort();
  if (!case_frame || root.atom || !lex.lattice().subtype(root.type, *case_frame)) {
    throw ResolveError(ResolveError::Kind::MalformedFrame,
                       "frame root is " + sort_name(lex.lattice(), root) + ", expected a case-frame");
  }
  if (auto clash = check_well_formed(frame)) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "ill-formed frame " + clash->describe());
  }
}

std::vector<ClausalSlot> clausal_slots(const CompiledLexicon& lex, const FeatureStructure& frame) {
  std::vector<ClausalSlot> out;
  const TypeLattice& lat = lex.lattice();
  auto args = lat.feature("args");
  auto case_frame = lat.find("case-frame");
  if (!args || !case_frame) return out;
  auto node = frame.arc(frame.root(), *args);
  if (!node) return out;
  for (const Arc& a : frame.node(*node).arcs) {
    const Sort& s = frame.sort(a.target);
    if (!s.atom && lat.subtype(s.type, *case_frame)) {
      out.push_back({"args." + lat.feature_name(a.feature), Path{*args, a.feature}, a.target});
    }
  }
  return out;
}

// Replaces the node at `path` by `replacement`. Unification keeps outside
// sharing when the replacement refines the old node; otherwise (a clause
// resolved after voice stripping) arcs are re-hung onto a copy.
std::optional<FeatureStructure> splice(const FeatureStructure& host, const Path& path,
                                       const FeatureStructure& replacement) {
  auto at = host.walk(path);
  if (!at) return std::nullopt;
  UnifyResult u = unify_at(host, *at, replacement);
  if (u) return *u;
  FsEditor ed(host);
  NodeIndex g = ed.graft(replacement);
  ed.redirect(*at, g);
  UnifyResult r = ed.finish(0);
  if (!r) return std::nullopt;
  return *r;
}

class Resolver {
 public:
  Resolver(const CompiledLexicon& lex, const ResolveOptions& options)
      : lex_(lex), options_(options), plan_(StagePlan::from(lex.config())) {}

  // nullopt when a clausal argument has no resolution; `failed_slot` then
  // names it.
  std::optional<std::vector<Alternative>> alternatives(const FeatureStructure& frame, int depth,
                                                       ClausalSlot* failed_slot = nullptr) {
    std::vector<Alternative> alts{{frame, {}}};
    for (const ClausalSlot& slot : clausal_slots(lex_, frame)) {
      if (depth + 1 > lex_.config().max_embed_depth) {
        throw ResolveError(ResolveError::Kind::EmbedDepthExceeded,
                           "clausal arguments nest deeper than " + std::to_string(lex_.config().max_embed_depth));
      }
      std::vector<ResolvedSense> inner = run(frame.substructure(slot.node), depth + 1).senses;
      if (inner.empty()) {
        if (failed_slot) *failed_slot = slot;
        return std::nullopt;
      }
      std::vector<Alternative> next;
      for (const Alternative& alt : alts) {
        for (const ResolvedSense& r : inner) {
          auto spliced = splice(alt.frame, slot.ids, r.frame);
          if (!spliced) continue;
          Alternative a{*spliced, alt.embedded};
          a.embedded.emplace_back(slot.path, r);
          next.push_back(std::move(a));
        }
      }
      alts = std::move(next);
    }
    return alts;
  }

  Resolution run(const FeatureStructure& frame, int depth) {
    check_frame(lex_, frame);
    Resolution res;
    auto alts = alternatives(frame, depth);
    if (!alts || alts->empty()) {
      for (const Stage& s : stages(frame, plan_)) res.stages.push_back(s.number);
      return res;
    }
    std::vector<std::vector<Stage>> staged;
    std::set<int> numbers;
    for (const Alternative& a : *alts) {
      staged.push_back(stages(a.frame, plan_));
      for (const Stage& s : staged.back()) numbers.insert(s.number);
    }
    for (const Stage& s : staged.front()) {
      res.stages.push_back(s.number);
      for (const auto& n : s.notes) res.notes.push_back(s.label() + ": " + n);
    }
    for (int number : numbers) {
      std::vector<ResolvedSense> hits;
      for (const SenseEntry& sense : lex_.senses()) {
        for (std::size_t i = 0; i < alts->size(); ++i) {
          auto st = std::find_if(staged[i].begin(), staged[i].end(), [&](const Stage& s) { return s.number == number; });
          if (st == staged[i].end()) continue;
          UnifyResult u = unify(st->frame, sense.compiled);
          if (!u) continue;
          hits.push_back(ResolvedSense{sense.id, *u, number, (*alts)[i].embedded, st->notes});
        }
      }
      bool found = !hits.empty();
      for (auto& h : hits) res.senses.push_back(std::move(h));
      if (found && !options_.all_stages) break;
    }
    return res;
  }

 private:
  const CompiledLexicon& lex_;
  ResolveOptions options_;
  StagePlan plan_;
};

int tier_rank(const std::optional<Tier>& t) { return t ? static_cast<int>(*t) : 5; }

void explain_into(const CompiledLexicon& lex, const FeatureStructure& frame, const std::string& where, int depth,
                  FailureReport& report) {
  ResolveOptions all{true, false};
  Resolver resolver(lex, all);
  check_frame(lex, frame);
  ClausalSlot failed{};
  auto alts = resolver.alternatives(frame, depth, &failed);
  if (!alts) {
    std::string inner = where.empty() ? failed.path : where + "." + failed.path;
    explain_into(lex, frame.substructure(failed.node), inner, depth + 1, report);
    return;
  }
  std::set<std::string> matched;
  for (const auto& r : resolver.run(frame, depth).senses) matched.insert(r.sense_id);

  StagePlan plan = StagePlan::from(lex.config());
  std::set<std::pair<std::string, int>> seen;
  for (const Alternative& alt : *alts) {
    for (const Stage& stage : stages(alt.frame, plan)) {
      for (const SenseEntry& sense : lex.senses()) {
        if (matched.count(sense.id) || !seen.insert({sense.id, stage.number}).second) continue;
        FailureEntry entry{sense.id, stage.number, where, "<skeleton>", std::nullopt, {}};
        UnifyResult acc = unify(stage.frame, lex.skeleton());
        if (!acc) {
          entry.clash = acc.clash();
          report.entries.push_back(std::move(entry));
          continue;
        }
        std::vector<const SenseTerm*> order;
        for (const auto& t : sense.terms) order.push_back(&t);
        std::stable_sort(order.begin(), order.end(),
                         [](const SenseTerm* a, const SenseTerm* b) { return tier_rank(a->tier) < tier_rank(b->tier); });
        bool failed_term = false;
        for (const SenseTerm* t : order) {
          UnifyResult next = unify(*acc, t->fs);
          if (!next) {
            entry.term = t->label;
            entry.tier = t->tier;
            entry.clash = next.clash();
            failed_term = true;
            break;
          }
          acc = std::move(next);
        }
        if (!failed_term) {
          UnifyResult whole = unify(stage.frame, sense.compiled);
          entry.term = "<sense>";
          entry.clash = whole ? Clash{} : whole.clash();
        }
        report.entries.push_back(std::move(entry));
      }
    }
  }
}

}  // namespace

Resolution resolve(const CompiledLexicon& lexicon, const FeatureStructure& frame, const ResolveOptions& options) {
  Resolver r(lexicon, options);
  Resolution res = r.run(frame, 0);
  if (options.explain_failures && res.senses.empty()) res.failures = explain(lexicon, frame);
  return res;
}

FailureReport explain(const CompiledLexicon& lexicon, const FeatureStructure& frame) {
  FailureReport report;
  explain_into(lexicon, frame, "", 0, report);
  return report;
}

std::vector<Generated> generate(const CompiledLexicon& lexicon, const FeatureStructure& sem) {
  const TypeLattice& lat = lexicon.lattice();
  if (sem.lattice_ptr() != lexicon.lattice_ptr()) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "semantic frame was built against a different lexicon");
  }
  auto sem_frame = lat.find("sem-frame");
  auto case_frame = lat.find("case-frame");
  auto sem_f = lat.feature("sem");
  auto rel_f = lat.feature("rel");
  if (!sem_frame || !case_frame || !sem_f) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "lexicon schema has no sem-frame");
  }
  if (sem.sort().atom || !lat.subtype(sem.sort().type, *sem_frame)) {
    throw ResolveError(ResolveError::Kind::MalformedFrame,
                       "semantic input is " + sort_name(lat, sem.sort()) + ", expected a sem-frame");
  }
  if (auto clash = check_well_formed(sem)) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "ill-formed semantic frame " + clash->describe());
  }
  std::vector<const SenseEntry*> candidates;
  auto rel = rel_f ? sem.arc(sem.root(), *rel_f) : std::nullopt;
  if (rel && !sem.sort(*rel).atom) {
    candidates = sense_lookup(lexicon, sem.sort(*rel).type);
  } else {
    for (const auto& s : lexicon.senses()) candidates.push_back(&s);
  }
  FsEditor ed(lexicon.lattice_ptr());
  NodeIndex root = ed.add(Sort::of(*case_frame));
  ed.set_arc(root, *sem_f, ed.graft(sem));
  UnifyResult skeleton = ed.finish(root);
  if (!skeleton) {
    throw ResolveError(ResolveError::Kind::MalformedFrame, "ill-formed semantic frame " + skeleton.clash().describe());
  }
  std::vector<Generated> out;
  for (const SenseEntry* s : candidates) {
    UnifyResult u = unify(*skeleton, s->compiled);
    if (u) out.push_back({s->id, *u});
  }
  return out;
}

}  // namespace cfl
