#ifndef CFL_RESOLVER_HPP
#define CFL_RESOLVER_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfl/feature_structure.hpp"
#include "cfl/lexicon.hpp"
#include "cfl/valency.hpp"

namespace cfl {

struct ResolvedSense {
  std::string sense_id;
  FeatureStructure frame;  // stage frame & compiled sense
  int stage = 0;
  // Resolutions of clausal arguments, keyed by dotted path ("args.subject").
  std::vector<std::pair<std::string, ResolvedSense>> embedded;
  std::vector<std::string> notes;

  std::string stage_label() const { return cfl::stage_label(stage); }
};

// The first constraint term (in tier order) that failed for one sense at
// one stage. `where` is the embedded path when the failure is inside a
// clausal argument, empty at top level.
struct FailureEntry {
  std::string sense_id;
  int stage = 0;
  std::string where;
  std::string term;
  std::optional<Tier> tier;
  Clash clash;

  std::string describe() const;
};

struct FailureReport {
  std::vector<FailureEntry> entries;

  const FailureEntry* find(std::string_view sense_id, int stage) const;
};

struct ResolveOptions {
  bool all_stages = false;       // collect from every stage, not just the first that matches
  bool explain_failures = false; // fill Resolution::failures when nothing resolves
};

struct Resolution {
  std::vector<ResolvedSense> senses;
  std::vector<int> stages;  // stage numbers of the top-level frame
  std::vector<std::string> notes;
  FailureReport failures;
};

class ResolveError : public Error {
 public:
  enum class Kind { EmbedDepthExceeded, MalformedFrame };
  ResolveError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Case frame -> senses. Clausal arguments are resolved first; every
// alternative of theirs is spliced in and tried. Results come from the
// earliest stage with a match unless all_stages is set, ordered by stage,
// then sense declaration, then embedded alternative.
Resolution resolve(const CompiledLexicon& lexicon, const FeatureStructure& frame, const ResolveOptions& options = {});

// Per failed (sense, stage): first failing term in tier order.
FailureReport explain(const CompiledLexicon& lexicon, const FeatureStructure& frame);

struct Generated {
  std::string sense_id;
  FeatureStructure frame;
};

// Semantic frame -> constrained case frames, in declaration order.
std::vector<Generated> generate(const CompiledLexicon& lexicon, const FeatureStructure& sem);

}  // namespace cfl

#endif  // CFL_RESOLVER_HPP
