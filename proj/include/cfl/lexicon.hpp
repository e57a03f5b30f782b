#ifndef CFL_LEXICON_HPP
#define CFL_LEXICON_HPP

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfl/dsl.hpp"
#include "cfl/feature_structure.hpp"

namespace cfl {

using dsl::Tier;

struct NamedConstraint {
  std::string name;
  std::optional<Tier> tier;
  FeatureStructure fs;
};

// One conjunct of a sense declaration, kept for tier-attributed diagnostics.
struct SenseTerm {
  std::string label;  // constraint name, or "[literal N]"
  std::optional<Tier> tier;
  FeatureStructure fs;
};

struct SenseEntry {
  std::string id;
  FeatureStructure compiled;  // skeleton & every term
  std::vector<SenseTerm> terms;
  std::map<std::string, Tier> tiers;
  std::size_t index = 0;  // declaration order
  std::optional<TypeId> relation;
};

struct LexiconConfig {
  int max_embed_depth = 8;
  bool passive_rule = true;
  bool causative_rule = true;
  bool reflexive_rule = true;
};

class CompiledLexicon {
 public:
  const TypeLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const TypeLattice>& lattice_ptr() const { return lattice_; }
  const std::vector<SenseEntry>& senses() const { return senses_; }
  const SenseEntry* sense(std::string_view id) const;
  const std::vector<NamedConstraint>& constraints() const { return constraints_; }
  const NamedConstraint* constraint(std::string_view name) const;
  const LexiconConfig& config() const { return config_; }
  // The bare well-formed case frame every sense is unified with.
  const FeatureStructure& skeleton() const { return *skeleton_; }

  // Parses a frame against this lexicon's types; named constraints may be
  // referenced as conjuncts.
  FeatureStructure parse_frame(std::string_view text, std::string_view context_type = "case-frame",
                               std::string_view source = "<input>") const;

 private:
  friend class LexiconCompiler;
  std::shared_ptr<const TypeLattice> lattice_;
  std::vector<NamedConstraint> constraints_;
  std::vector<SenseEntry> senses_;
  LexiconConfig config_;
  std::optional<FeatureStructure> skeleton_;
};

struct ParsedFile {
  std::string source;
  std::vector<dsl::Statement> statements;
};

struct CompileResult {
  std::shared_ptr<const CompiledLexicon> lexicon;  // null when diagnostics exist
  Diagnostics diagnostics;

  bool ok() const { return lexicon != nullptr; }
};

// Builds and validates the lattice, evaluates named constraints and
// compiles every sense. All diagnostics are collected.
CompileResult compile(std::span<const ParsedFile> files);
CompileResult compile(std::span<const dsl::Statement> statements);

struct SourceText {
  std::string source;
  std::string text;
};

// Parses then compiles; syntax errors are reported as diagnostics.
CompileResult load_lexicon(std::span<const SourceText> files);

// Schema, ontology core and voice values shipped with the library.
std::string_view prelude_text();

// Senses whose relation is at-or-below `relation`, in declaration order.
std::vector<const SenseEntry*> sense_lookup(const CompiledLexicon& lexicon, TypeId relation);
std::vector<const SenseEntry*> sense_lookup(const CompiledLexicon& lexicon, std::string_view relation);

}  // namespace cfl

#endif  // CFL_LEXICON_HPP
