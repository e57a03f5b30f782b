#ifndef CFL_VALENCY_HPP
#define CFL_VALENCY_HPP

#include <optional>
#include <string>
#include <vector>

#include "cfl/feature_structure.hpp"
#include "cfl/lexicon.hpp"

namespace cfl {

// Built-in voice-stripping lexical rules. Each maps a frame whose voice
// marker is voice-plus to the frame of the unmarked verb, shuffling
// argument nodes (never copying them) and setting the marker to voice-minus.
enum class VoiceRule { Passive, Causative, Reflexive };

// Stage numbers are fixed per rule: 0 surface, 1 -PASS, 2 -CAUS, 3 -RFLX.
int stage_number(VoiceRule rule);
std::string stage_label(int stage);

// Rules are tried in reverse order of suffix attachment, each at most once.
struct StagePlan {
  std::vector<VoiceRule> rules{VoiceRule::Passive, VoiceRule::Causative, VoiceRule::Reflexive};

  static StagePlan from(const LexiconConfig& config);
};

struct RuleOutput {
  FeatureStructure frame;
  std::vector<std::string> notes;
};

// Each returns nullopt when the rule is not applicable.
//
// Passive: surface subject becomes the direct object; the agentive object
// (if it is a noun phrase) becomes the subject, otherwise the subject is an
// underspecified noun phrase; agn-obj becomes nil.
std::optional<RuleOutput> strip_passive(const FeatureStructure& frame);
// Causative (intransitive base): subject becomes sem.causer, the direct
// object (the causee) becomes the subject, dir-obj becomes nil.
std::optional<RuleOutput> strip_causative(const FeatureStructure& frame);
// Reflexive: arguments untouched, sem.agent and sem.patient coindexed.
std::optional<RuleOutput> strip_reflexive(const FeatureStructure& frame);

std::optional<RuleOutput> apply_rule(VoiceRule rule, const FeatureStructure& frame);

struct Stage {
  int number = 0;
  FeatureStructure frame;
  std::vector<std::string> notes;

  std::string label() const { return stage_label(number); }
};

// Stage 0 is the input; each applicable rule in plan order adds a stage
// computed from the previous one.
std::vector<Stage> stages(const FeatureStructure& frame, const StagePlan& plan = {});

}  // namespace cfl

#endif  // CFL_VALENCY_HPP
