#include "cfl/valency.hpp"

namespace cfl {

namespace {

// Feature and type handles the rules need, looked up once per call.
struct Schema {
  std::optional<FeatureId> verb, args, sem, passive, caus, rflx, subject, dir_obj, agn_obj, causer, agent, patient;
  std::optional<TypeId> plus, minus, nil, noun_phrase;

  explicit Schema(const TypeLattice& lat)
      : verb(lat.feature("verb")),
        args(lat.feature("args")),
        sem(lat.feature("sem")),
        passive(lat.feature("passive")),
        caus(lat.feature("caus")),
        rflx(lat.feature("rflx")),
        subject(lat.feature("subject")),
        dir_obj(lat.feature("dir-obj")),
        agn_obj(lat.feature("agn-obj")),
        causer(lat.feature("causer")),
        agent(lat.feature("agent")),
        patient(lat.feature("patient")),
        plus(lat.find("voice-plus")),
        minus(lat.find("voice-minus")),
        nil(lat.find("nil")),
        noun_phrase(lat.find("noun-phrase")) {}

  bool marked(const FeatureStructure& fs, std::optional<FeatureId> marker) const {
    if (!verb || !marker || !plus || !minus) return false;
    auto v = fs.arc(fs.root(), *verb);
    auto m = v ? fs.arc(*v, *marker) : std::nullopt;
    return m && fs.sort(*m) == Sort::of(*plus);
  }
};

std::optional<RuleOutput> done(const FsEditor& ed, std::vector<std::string> notes) {
  UnifyResult r = ed.finish(0);
  if (!r) return std::nullopt;
  return RuleOutput{*r, std::move(notes)};
}

}  // namespace

int stage_number(VoiceRule rule) {
  switch (rule) {
    case VoiceRule::Passive: return 1;
    case VoiceRule::Causative: return 2;
    case VoiceRule::Reflexive: return 3;
  }
  return 0;
}

std::string stage_label(int stage) {
  switch (stage) {
    case 0: return "stage:0 (surface)";
    case 1: return "stage:1 (-PASS)";
    case 2: return "stage:2 (-CAUS)";
    case 3: return "stage:3 (-RFLX)";
  }
  return "stage:" + std::to_string(stage);
}

StagePlan StagePlan::from(const LexiconConfig& config) {
  StagePlan plan;
  plan.rules.clear();
  if (config.passive_rule) plan.rules.push_back(VoiceRule::Passive);
  if (config.causative_rule) plan.rules.push_back(VoiceRule::Causative);
  if (config.reflexive_rule) plan.rules.push_back(VoiceRule::Reflexive);
  return plan;
}

std::optional<RuleOutput> strip_passive(const FeatureStructure& frame) {
  Schema s(frame.lattice());
  if (!s.marked(frame, s.passive) || !s.args || !s.subject || !s.dir_obj || !s.agn_obj || !s.nil ||
      !s.noun_phrase)
    return std::nullopt;
  std::vector<std::string> notes;
  FsEditor ed(frame);
  NodeIndex verb = *ed.arc(0, *s.verb);
  ed.set_arc(verb, *s.passive, ed.add(Sort::of(*s.minus)));
  NodeIndex args = ed.ensure_path(0, std::span(&*s.args, 1));
  auto subject = ed.arc(args, *s.subject);
  auto agent = ed.arc(args, *s.agn_obj);
  if (subject) {
    ed.set_arc(args, *s.dir_obj, *subject);
  } else {
    ed.remove_arc(args, *s.dir_obj);
  }
  NodeIndex new_subject;
  if (agent && !ed.sort(*agent).atom && frame.lattice().subtype(ed.sort(*agent).type, *s.noun_phrase)) {
    new_subject = *agent;
  } else {
    new_subject = ed.add(Sort::of(*s.noun_phrase));
    notes.push_back("agentless passive: underlying subject left as an underspecified noun-phrase");
  }
  ed.set_arc(args, *s.subject, new_subject);
  ed.set_arc(args, *s.agn_obj, ed.add(Sort::of(*s.nil)));
  return done(ed, std::move(notes));
}

std::optional<RuleOutput> strip_causative(const FeatureStructure& frame) {
  Schema s(frame.lattice());
  if (!s.marked(frame, s.caus) || !s.args || !s.sem || !s.subject || !s.dir_obj || !s.causer || !s.nil)
    return std::nullopt;
  FsEditor ed(frame);
  NodeIndex verb = *ed.arc(0, *s.verb);
  ed.set_arc(verb, *s.caus, ed.add(Sort::of(*s.minus)));
  NodeIndex args = ed.ensure_path(0, std::span(&*s.args, 1));
  NodeIndex sem = ed.ensure_path(0, std::span(&*s.sem, 1));
  auto subject = ed.arc(args, *s.subject);
  auto causee = ed.arc(args, *s.dir_obj);
  if (subject) {
    ed.set_arc(sem, *s.causer, *subject);
  } else {
    ed.remove_arc(sem, *s.causer);
  }
  if (causee) {
    ed.set_arc(args, *s.subject, *causee);
  } else {
    ed.remove_arc(args, *s.subject);
  }
  ed.set_arc(args, *s.dir_obj, ed.add(Sort::of(*s.nil)));
  return done(ed, {});
}

std::optional<RuleOutput> strip_reflexive(const FeatureStructure& frame) {
  Schema s(frame.lattice());
  if (!s.marked(frame, s.rflx) || !s.sem || !s.agent || !s.patient) return std::nullopt;
  FsEditor ed(frame);
  NodeIndex verb = *ed.arc(0, *s.verb);
  ed.set_arc(verb, *s.rflx, ed.add(Sort::of(*s.minus)));
  NodeIndex sem = ed.ensure_path(0, std::span(&*s.sem, 1));
  NodeIndex agent = ed.ensure_path(sem, std::span(&*s.agent, 1));
  NodeIndex patient = ed.ensure_path(sem, std::span(&*s.patient, 1));
  ed.equate(agent, patient);
  return done(ed, {});
}

std::optional<RuleOutput> apply_rule(VoiceRule rule, const FeatureStructure& frame) {
  switch (rule) {
    case VoiceRule::Passive: return strip_passive(frame);
    case VoiceRule::Causative: return strip_causative(frame);
    case VoiceRule::Reflexive: return strip_reflexive(frame);
  }
  return std::nullopt;
}

std::vector<Stage> stages(const FeatureStructure& frame, const StagePlan& plan) {
  std::vector<Stage> out{Stage{0, frame, {}}};
  for (VoiceRule rule : plan.rules) {
    if (auto next = apply_rule(rule, out.back().frame)) {
      out.push_back(Stage{stage_number(rule), std::move(next->frame), std::move(next->notes)});
    }
  }
  return out;
}

}  // namespace cfl
