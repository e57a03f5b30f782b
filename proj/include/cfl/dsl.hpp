#ifndef CFL_DSL_HPP
#define CFL_DSL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfl/feature_structure.hpp"

// Lexicon description language (.cfl) and frame files (.frm).
//
//   statement  := 'type' ID ('=' ID ('|' ID)* | '<' ID ('&' ID)*)? '.'
//               | 'approp' ID '{' (ID ':' ID (',' ID ':' ID)*)? '}' '.'
//               | 'constraint' ID TIER? ':=' expr '.'
//               | 'sense' ID ':=' expr '.'
//               | 'frame' ID ':=' expr '.'
//               | 'pragma' ID+ '.'
//   expr       := term ('&' term)*
//   term       := ID | avm
//   avm        := '[' ID? (pair (',' pair)*)? ']'
//   pair       := ID ('|' ID)* ':' value
//   value      := avm | ID | STRING | TAG value?
//   TIER       := verb | morph | cooccur | lexical | semantic
//   ID         := [A-Za-z0-9*+-]+        TAG := '#' [0-9]+
//
// Comments run from ';' to end of line. Tags are scoped to one avm term.
namespace cfl::dsl {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string source, SourcePos pos, const std::string& message);
  const std::string& source() const { return source_; }
  SourcePos pos() const { return pos_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string source_;
  SourcePos pos_;
  std::string bare_;
};

enum class Tier { Verb, Morph, Cooccur, Lexical, Semantic };
std::string_view tier_name(Tier t);
std::optional<Tier> parse_tier(std::string_view s);

struct AvmValue;

struct AvmPair {
  std::string feature;
  std::shared_ptr<AvmValue> value;
  SourcePos pos;
};

struct AvmValue {
  enum class Kind { Node, Type, Atom, Tag };
  Kind kind = Kind::Node;
  std::string text;  // type name (empty = untyped node) or atom text
  int tag = 0;
  std::shared_ptr<AvmValue> bound;  // value carried by a binding tag occurrence
  std::vector<AvmPair> pairs;
  SourcePos pos;
};

struct Term {
  std::string name;                    // set for named-constraint references
  std::shared_ptr<AvmValue> literal;   // set for avm literals
  SourcePos pos;
  bool is_reference() const { return literal == nullptr; }
};

struct Expr {
  std::vector<Term> terms;
};

struct TypeDecl {
  enum class Form { Plain, Subtypes, Parents };
  std::string name;
  Form form = Form::Plain;
  std::vector<std::string> related;
  SourcePos pos;
};

struct AppropDecl {
  std::string type;
  std::vector<std::pair<std::string, std::string>> features;
  SourcePos pos;
};

struct ConstraintDecl {
  std::string name;
  std::optional<Tier> tier;
  Expr body;
  SourcePos pos;
};

struct SenseDecl {
  std::string name;
  Expr body;
  SourcePos pos;
};

struct FrameDecl {
  std::string name;
  Expr body;
  SourcePos pos;
};

struct PragmaDecl {
  std::vector<std::string> words;
  SourcePos pos;
};

using Statement = std::variant<TypeDecl, AppropDecl, ConstraintDecl, SenseDecl, FrameDecl, PragmaDecl>;

// Statements in file order. Throws SyntaxError on malformed input,
// duplicate names within one kind, and misused tags.
std::vector<Statement> parse_lexicon(std::string_view text, std::string_view source = "<input>");

// A frame file (exactly one `frame` declaration) or a bare expression.
Expr parse_frame_expr(std::string_view text, std::string_view source = "<input>");

// Looks up an already evaluated named constraint; nullptr when unknown.
using NameLookup = std::function<const FeatureStructure*(std::string_view)>;

// Error raised while turning syntax into structures: undeclared type or
// feature, ambiguous type inference, unknown constraint name.
class BuildError : public Error {
 public:
  BuildError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

// Builds one term. Untyped avm nodes take the appropriate value type of
// the feature leading to them (or `context` at the root), narrowed by the
// introducing types of their own features. `+`, `-` and `nil` become
// voice-plus, voice-minus and voice-nil where a voice value is expected.
UnifyResult build_term(const std::shared_ptr<const TypeLattice>& lattice, const Term& term,
                       TypeId context, const NameLookup& lookup = {});

// Left fold of unification over the terms.
UnifyResult evaluate(const std::shared_ptr<const TypeLattice>& lattice, const Expr& expr, TypeId context,
                     const NameLookup& lookup = {});

// Parses and evaluates a frame; throws BuildError/SyntaxError, or Error
// naming the violating path when the result is not well-formed.
FeatureStructure parse_frame(std::string_view text, const std::shared_ptr<const TypeLattice>& lattice,
                             std::string_view context_type = "case-frame", const NameLookup& lookup = {},
                             std::string_view source = "<input>");

// Canonical text: features sorted, shared nodes tagged #1, #2, ... in
// order of first appearance, two-space indentation, trailing newline.
std::string serialize_frame(const FeatureStructure& fs);

}  // namespace cfl::dsl

#endif  // CFL_DSL_HPP
