#include "cfl/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

namespace cfl {

const SenseEntry* CompiledLexicon::sense(std::string_view id) const {
  for (const auto& s : senses_)
    if (s.id == id) return &s;
  return nullptr;
}

const NamedConstraint* CompiledLexicon::constraint(std::string_view name) const {
  for (const auto& c : constraints_)
    if (c.name == name) return &c;
  return nullptr;
}

FeatureStructure CompiledLexicon::parse_frame(std::string_view text, std::string_view context_type,
                                              std::string_view source) const {
  dsl::NameLookup lookup = [this](std::string_view name) -> const FeatureStructure* {
    const NamedConstraint* c = constraint(name);
    return c ? &c->fs : nullptr;
  };
  return dsl::parse_frame(text, lattice_, context_type, lookup, source);
}

namespace {

std::string where(const std::string& source, dsl::SourcePos pos) {
  return source + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

// Raised inside constraint lookup when a dependency already failed; the
// diagnostic has been recorded, so the dependent is skipped silently.
struct DependencyFailed {};

}  // namespace

class LexiconCompiler {
 public:
  explicit LexiconCompiler(std::span<const ParsedFile> files) : files_(files) {}

  CompileResult run() {
    auto lex = std::make_shared<CompiledLexicon>();
    build_lattice();
    if (!diags_.empty()) return {nullptr, std::move(diags_)};
    lex->lattice_ = lattice_;
    lex->config_ = pragmas();
    lex->skeleton_ = skeleton();
    skeleton_ = &*lex->skeleton_;

    collect_declarations();
    for (const auto& name : constraint_order_) {
      try {
        evaluate_constraint(name);
      } catch (const DependencyFailed&) {
      }
    }
    for (const auto& name : constraint_order_) {
      if (auto it = evaluated_.find(name); it != evaluated_.end()) {
        lex->constraints_.push_back({name, constraint_decls_.at(name).decl->tier, it->second});
      }
    }
    for (const auto& [decl, source] : sense_decls_) compile_sense(*decl, source, lex->senses_);
    if (!diags_.empty()) return {nullptr, std::move(diags_)};
    return {std::move(lex), {}};
  }

 private:
  struct ConstraintInfo {
    const dsl::ConstraintDecl* decl;
    std::string source;
  };

  void build_lattice() {
    LatticeBuilder b;
    for (const auto& f : files_) {
      for (const auto& s : f.statements) {
        const auto* t = std::get_if<dsl::TypeDecl>(&s);
        if (!t) continue;
        TypeId self = b.declare(t->name);
        for (const auto& other : t->related) {
          TypeId o = b.declare(other);
          if (t->form == dsl::TypeDecl::Form::Subtypes) {
            b.add_parent(o, self);
          } else {
            b.add_parent(self, o);
          }
        }
      }
    }
    for (const auto& f : files_) {
      for (const auto& s : f.statements) {
        const auto* a = std::get_if<dsl::AppropDecl>(&s);
        if (!a) continue;
        if (!b.declared(a->type)) {
          undeclared(where(f.source, a->pos), "type", a->type);
          continue;
        }
        for (const auto& [feature, value] : a->features) {
          if (!b.declared(value)) {
            undeclared(where(f.source, a->pos), "type", value);
            continue;
          }
          b.declare_approp(b.declare(a->type), feature, b.declare(value));
        }
      }
    }
    b.attach_orphans_to_top();
    lattice_ = b.build();
    for (const auto& d : validate(*lattice_)) diags_.push_back(d);
    if (auto top_rel = lattice_->find("*top-rel*")) top_rel_ = *top_rel;
    context_ = lattice_->find("case-frame").value_or(lattice_->top());
  }

  LexiconConfig pragmas() {
    LexiconConfig cfg;
    for (const auto& f : files_) {
      for (const auto& s : f.statements) {
        const auto* p = std::get_if<dsl::PragmaDecl>(&s);
        if (!p) continue;
        const auto& w = p->words;
        if (w.size() == 2 && w[0] == "no-rule" && (w[1] == "passive" || w[1] == "causative" || w[1] == "reflexive")) {
          (w[1] == "passive" ? cfg.passive_rule : w[1] == "causative" ? cfg.causative_rule : cfg.reflexive_rule) =
              false;
        } else if (w.size() == 2 && w[0] == "max-embed-depth") {
          int depth = -1;
          auto [ptr, ec] = std::from_chars(w[1].data(), w[1].data() + w[1].size(), depth);
          if (ec != std::errc{} || ptr != w[1].data() + w[1].size() || depth < 0) {
            diags_.push_back({"BadPragma", where(f.source, p->pos) + ": max-embed-depth needs a non-negative integer",
                              {}});
          } else {
            cfg.max_embed_depth = depth;
          }
        } else {
          std::string text;
          for (const auto& x : w) text += (text.empty() ? "" : " ") + x;
          diags_.push_back({"BadPragma", where(f.source, p->pos) + ": unknown pragma '" + text + "'", {text}});
        }
      }
    }
    return cfg;
  }

  FeatureStructure skeleton() const {
    auto wf = lattice_->find("wf-case-frame");
    TypeId root = wf ? *wf : context_;
    FsEditor ed(lattice_);
    NodeIndex r = ed.add(Sort::of(root));
    for (auto [f, v] : lattice_->approp_list(root)) ed.set_arc(r, f, ed.add(Sort::of(v)));
    return ed.finish(r).value();
  }

  void collect_declarations() {
    std::set<std::string> sense_names;
    for (const auto& f : files_) {
      for (const auto& s : f.statements) {
        if (const auto* c = std::get_if<dsl::ConstraintDecl>(&s)) {
          if (constraint_decls_.count(c->name)) {
            diags_.push_back({"DuplicateName", where(f.source, c->pos) + ": constraint " + c->name +
                                                   " is declared more than once", {c->name}});
            continue;
          }
          constraint_decls_.emplace(c->name, ConstraintInfo{c, f.source});
          constraint_order_.push_back(c->name);
        } else if (const auto* d = std::get_if<dsl::SenseDecl>(&s)) {
          if (!sense_names.insert(d->name).second) {
            diags_.push_back({"DuplicateName", where(f.source, d->pos) + ": sense " + d->name +
                                                   " is declared more than once", {d->name}});
            continue;
          }
          sense_decls_.push_back({d, f.source});
        }
      }
    }
  }

  dsl::NameLookup lookup() {
    return [this](std::string_view name) -> const FeatureStructure* {
      std::string key(name);
      if (!constraint_decls_.count(key)) return nullptr;
      const FeatureStructure* fs = evaluate_constraint(key);
      if (!fs) throw DependencyFailed{};
      return fs;
    };
  }

  const FeatureStructure* evaluate_constraint(const std::string& name) {
    if (auto it = evaluated_.find(name); it != evaluated_.end()) return &it->second;
    if (failed_.count(name)) return nullptr;
    const ConstraintInfo& info = constraint_decls_.at(name);
    if (!in_progress_.insert(name).second) {
      diags_.push_back({"CyclicConstraint", where(info.source, info.decl->pos) + ": constraint " + name +
                                                " refers to itself", {name}});
      failed_.insert(name);
      return nullptr;
    }
    std::optional<FeatureStructure> result;
    try {
      UnifyResult r = dsl::evaluate(lattice_, info.decl->body, context_, lookup());
      if (r) {
        result = *r;
      } else {
        diags_.push_back({"UnsatisfiableConstraint",
                          where(info.source, info.decl->pos) + ": constraint " + name + " is unsatisfiable " +
                              r.clash().describe(),
                          {name, r.clash().path, r.clash().left, r.clash().right}});
      }
    } catch (const dsl::BuildError& e) {
      report_build_error(info.source, e);
    } catch (const DependencyFailed&) {
    }
    in_progress_.erase(name);
    if (!result) {
      failed_.insert(name);
      return nullptr;
    }
    return &evaluated_.emplace(name, std::move(*result)).first->second;
  }

  void compile_sense(const dsl::SenseDecl& decl, const std::string& source, std::vector<SenseEntry>& out) {
    SenseEntry entry{decl.name, *skeleton_, {}, {}, out.size(), std::nullopt};
    std::optional<FeatureStructure> acc = *skeleton_;
    int literal = 0;
    try {
      for (const auto& term : decl.body.terms) {
        UnifyResult r = dsl::build_term(lattice_, term, context_, lookup());
        std::optional<Tier> tier;
        std::string label;
        if (term.is_reference()) {
          label = term.name;
          tier = constraint_decls_.at(term.name).decl->tier;
          if (tier) entry.tiers[label] = *tier;
        } else {
          label = "[literal " + std::to_string(++literal) + "]";
        }
        if (!r) {
          unsatisfiable(decl, source, r.clash());
          return;
        }
        entry.terms.push_back({label, tier, *r});
        if (acc) {
          UnifyResult next = unify(*acc, *r);
          if (!next) {
            unsatisfiable(decl, source, next.clash());
            return;
          }
          acc = *next;
        }
      }
    } catch (const dsl::BuildError& e) {
      report_build_error(source, e);
      return;
    } catch (const DependencyFailed&) {
      return;
    }
    entry.compiled = *acc;
    if (top_rel_) {
      auto rel = entry.compiled.walk("sem.rel");
      const Sort* s = rel ? &entry.compiled.sort(*rel) : nullptr;
      if (!s || s->atom || s->type == *top_rel_ || !lattice_->subtype(s->type, *top_rel_)) {
        diags_.push_back({"UninstantiatedRelation",
                          where(source, decl.pos) + ": sense " + decl.name + " does not fix sem.rel to a relation",
                          {decl.name}});
        return;
      }
      entry.relation = s->type;
    }
    out.push_back(std::move(entry));
  }

  void unsatisfiable(const dsl::SenseDecl& decl, const std::string& source, const Clash& c) {
    diags_.push_back({"UnsatisfiableSense",
                      where(source, decl.pos) + ": sense " + decl.name + " is unsatisfiable " + c.describe(),
                      {decl.name, c.path, c.left, c.right}});
  }

  void undeclared(const std::string& at, const std::string& kind, const std::string& name) {
    diags_.push_back({"UndeclaredName", at + ": undeclared " + kind + " '" + name + "'", {name}});
  }

  void report_build_error(const std::string& source, const dsl::BuildError& e) {
    std::string msg = e.what();
    std::string code = msg.find("undeclared") != std::string::npos || msg.find("unknown feature") != std::string::npos
                           ? "UndeclaredName"
                           : "BuildError";
    diags_.push_back({code, source + ":" + msg, {}});
  }

  std::span<const ParsedFile> files_;
  Diagnostics diags_;
  std::shared_ptr<const TypeLattice> lattice_;
  std::optional<TypeId> top_rel_;
  TypeId context_{};
  const FeatureStructure* skeleton_ = nullptr;
  std::unordered_map<std::string, ConstraintInfo> constraint_decls_;
  std::vector<std::string> constraint_order_;
  std::vector<std::pair<const dsl::SenseDecl*, std::string>> sense_decls_;
  std::unordered_map<std::string, FeatureStructure> evaluated_;
  std::set<std::string> failed_;
  std::set<std::string> in_progress_;
};

CompileResult compile(std::span<const ParsedFile> files) { return LexiconCompiler(files).run(); }

CompileResult compile(std::span<const dsl::Statement> statements) {
  std::vector<ParsedFile> one{{"<input>", {statements.begin(), statements.end()}}};
  return compile(std::span<const ParsedFile>(one));
}

CompileResult load_lexicon(std::span<const SourceText> files) {
  std::vector<ParsedFile> parsed;
  Diagnostics diags;
  for (const auto& f : files) {
    try {
      parsed.push_back({f.source, dsl::parse_lexicon(f.text, f.source)});
    } catch (const dsl::SyntaxError& e) {
      diags.push_back({"SyntaxError", e.what(), {f.source}});
    }
  }
  if (!diags.empty()) return {nullptr, std::move(diags)};
  return compile(std::span<const ParsedFile>(parsed));
}

std::vector<const SenseEntry*> sense_lookup(const CompiledLexicon& lexicon, TypeId relation) {
  std::vector<const SenseEntry*> out;
  for (const auto& s : lexicon.senses())
    if (s.relation && lexicon.lattice().subtype(*s.relation, relation)) out.push_back(&s);
  return out;
}

std::vector<const SenseEntry*> sense_lookup(const CompiledLexicon& lexicon, std::string_view relation) {
  auto t = lexicon.lattice().find(relation);
  if (!t) return {};
  return sense_lookup(lexicon, *t);
}

}  // namespace cfl
