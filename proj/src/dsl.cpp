#include "cfl/dsl.hpp"

#include <cctype>
#include <map>
#include <set>

namespace cfl::dsl {

SyntaxError::SyntaxError(std::string source, SourcePos pos, const std::string& message)
    : Error(source + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      source_(std::move(source)),
      pos_(pos),
      bare_(message) {}

BuildError::BuildError(SourcePos pos, const std::string& message)
    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message), pos_(pos) {}

std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::Verb: return "verb";
    case Tier::Morph: return "morph";
    case Tier::Cooccur: return "cooccur";
    case Tier::Lexical: return "lexical";
    case Tier::Semantic: return "semantic";
  }
  return "?";
}

std::optional<Tier> parse_tier(std::string_view s) {
  for (Tier t : {Tier::Verb, Tier::Morph, Tier::Cooccur, Tier::Lexical, Tier::Semantic})
    if (tier_name(t) == s) return t;
  return std::nullopt;
}

namespace {

enum class Tok { Ident, String, Tag, Define, Colon, LBracket, RBracket, LBrace, RBrace, Comma, Dot, Bar, Amp, Less,
                 Equals, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int number = 0;
  SourcePos pos;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '*' || c == '+' || c == '-';
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = pos_;
      if (i_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[i_];
      if (ident_char(c)) {
        std::size_t start = i_;
        while (i_ < text_.size() && ident_char(text_[i_])) advance();
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(start, i_ - start));
      } else if (c == '"') {
        t.kind = Tok::String;
        advance();
        for (;;) {
          if (i_ >= text_.size() || text_[i_] == '\n') fail(t.pos, "unterminated string");
          char d = text_[i_];
          advance();
          if (d == '"') break;
          if (d == '\\') {
            if (i_ >= text_.size()) fail(t.pos, "unterminated string");
            d = text_[i_];
            advance();
            if (d != '"' && d != '\\') fail(pos_, "unknown escape in string");
          }
          t.text += d;
        }
      } else if (c == '#') {
        advance();
        std::size_t start = i_;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) advance();
        if (start == i_ || i_ - start > 6) fail(t.pos, "expected tag number after '#'");
        t.kind = Tok::Tag;
        t.number = std::stoi(std::string(text_.substr(start, i_ - start)));
      } else if (c == ':') {
        advance();
        if (i_ < text_.size() && text_[i_] == '=') {
          advance();
          t.kind = Tok::Define;
        } else {
          t.kind = Tok::Colon;
        }
      } else {
        switch (c) {
          case '[': t.kind = Tok::LBracket; break;
          case ']': t.kind = Tok::RBracket; break;
          case '{': t.kind = Tok::LBrace; break;
          case '}': t.kind = Tok::RBrace; break;
          case ',': t.kind = Tok::Comma; break;
          case '.': t.kind = Tok::Dot; break;
          case '|': t.kind = Tok::Bar; break;
          case '&': t.kind = Tok::Amp; break;
          case '<': t.kind = Tok::Less; break;
          case '=': t.kind = Tok::Equals; break;
          default: fail(t.pos, std::string("unexpected character '") + printable(c) + "'");
        }
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static std::string printable(char c) {
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
      static const char* hex = "0123456789abcdef";
      auto u = static_cast<unsigned char>(c);
      return std::string("\\x") + hex[u >> 4] + hex[u & 15];
    }
    return std::string(1, c);
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(SourcePos p, const std::string& msg) { throw SyntaxError(source_, p, msg); }

  std::string_view text_;
  std::string source_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

const char* tok_name(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Tag: return "tag";
    case Tok::Define: return "':='";
    case Tok::Colon: return "':'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::Amp: return "'&'";
    case Tok::Less: return "'<'";
    case Tok::Equals: return "'='";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : source_(source), toks_(Lexer(text, source).run()) {}

  std::vector<Statement> statements() {
    std::vector<Statement> out;
    std::map<std::string, std::set<std::string>> names;
    while (peek().kind != Tok::End) {
      Token kw = expect(Tok::Ident, "statement keyword");
      if (kw.text == "type") {
        out.push_back(type_decl(kw.pos));
      } else if (kw.text == "approp") {
        out.push_back(approp_decl(kw.pos));
      } else if (kw.text == "constraint" || kw.text == "sense" || kw.text == "frame") {
        Token name = expect(Tok::Ident, kw.text + " name");
        if (!names[kw.text].insert(name.text).second) fail(name.pos, "duplicate " + kw.text + " " + name.text);
        std::optional<Tier> tier;
        if (kw.text == "constraint" && peek().kind == Tok::Ident) {
          Token t = next();
          tier = parse_tier(t.text);
          if (!tier) fail(t.pos, "unknown tier '" + t.text + "'");
        }
        expect(Tok::Define, "':='");
        Expr body = expr();
        expect(Tok::Dot, "'.'");
        if (kw.text == "constraint") {
          out.push_back(ConstraintDecl{name.text, tier, std::move(body), kw.pos});
        } else if (kw.text == "sense") {
          out.push_back(SenseDecl{name.text, std::move(body), kw.pos});
        } else {
          out.push_back(FrameDecl{name.text, std::move(body), kw.pos});
        }
      } else if (kw.text == "pragma") {
        PragmaDecl p{{}, kw.pos};
        while (peek().kind == Tok::Ident) p.words.push_back(next().text);
        if (p.words.empty()) fail(peek().pos, "expected pragma words");
        expect(Tok::Dot, "'.'");
        out.push_back(std::move(p));
      } else {
        fail(kw.pos, "unknown statement '" + kw.text + "'");
      }
    }
    return out;
  }

  bool starts_with_keyword(std::string_view kw) const {
    return toks_.front().kind == Tok::Ident && toks_.front().text == kw;
  }

  Expr bare_expr() {
    Expr e = expr();
    if (peek().kind == Tok::Dot) next();
    if (peek().kind != Tok::End) fail(peek().pos, std::string("unexpected ") + tok_name(peek().kind));
    return e;
  }

 private:
  TypeDecl type_decl(SourcePos pos) {
    TypeDecl d;
    d.pos = pos;
    d.name = expect(Tok::Ident, "type name").text;
    if (peek().kind == Tok::Equals) {
      next();
      d.form = TypeDecl::Form::Subtypes;
      d.related.push_back(expect(Tok::Ident, "subtype name").text);
      while (peek().kind == Tok::Bar) {
        next();
        d.related.push_back(expect(Tok::Ident, "subtype name").text);
      }
    } else if (peek().kind == Tok::Less) {
      next();
      d.form = TypeDecl::Form::Parents;
      d.related.push_back(expect(Tok::Ident, "supertype name").text);
      while (peek().kind == Tok::Amp) {
        next();
        d.related.push_back(expect(Tok::Ident, "supertype name").text);
      }
    }
    expect(Tok::Dot, "'.'");
    return d;
  }

  AppropDecl approp_decl(SourcePos pos) {
    AppropDecl d;
    d.pos = pos;
    d.type = expect(Tok::Ident, "type name").text;
    expect(Tok::LBrace, "'{'");
    if (peek().kind != Tok::RBrace) {
      for (;;) {
        std::string f = expect(Tok::Ident, "feature name").text;
        expect(Tok::Colon, "':'");
        std::string v = expect(Tok::Ident, "value type").text;
        d.features.emplace_back(std::move(f), std::move(v));
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RBrace, "'}'");
    expect(Tok::Dot, "'.'");
    return d;
  }

  Expr expr() {
    Expr e;
    std::map<int, std::size_t> tag_term;
    for (;;) {
      Term t;
      t.pos = peek().pos;
      if (peek().kind == Tok::Ident) {
        t.name = next().text;
      } else if (peek().kind == Tok::LBracket) {
        t.literal = avm();
        check_tags(*t.literal);
        std::set<int> used;
        collect_tags(*t.literal, used);
        for (int tag : used) {
          auto [it, inserted] = tag_term.try_emplace(tag, e.terms.size());
          if (!inserted) fail(t.pos, "tag #" + std::to_string(tag) + " is used in more than one conjunct");
        }
      } else {
        fail(peek().pos, std::string("expected constraint name or '[' but found ") + tok_name(peek().kind));
      }
      e.terms.push_back(std::move(t));
      if (peek().kind != Tok::Amp) break;
      next();
    }
    return e;
  }

  std::shared_ptr<AvmValue> avm() {
    auto node = std::make_shared<AvmValue>();
    node->kind = AvmValue::Kind::Node;
    node->pos = expect(Tok::LBracket, "'['").pos;
    if (peek().kind == Tok::Ident && peek(1).kind != Tok::Colon && peek(1).kind != Tok::Bar) {
      node->text = next().text;
    }
    if (peek().kind != Tok::RBracket) {
      for (;;) {
        pair_into(*node);
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RBracket, "']'");
    return node;
  }

  // `a|b|c: v` is sugar for `a: [b: [c: v]]`.
  void pair_into(AvmValue& node) {
    Token first = expect(Tok::Ident, "feature name");
    std::vector<Token> path{first};
    while (peek().kind == Tok::Bar) {
      next();
      path.push_back(expect(Tok::Ident, "feature name"));
    }
    expect(Tok::Colon, "':'");
    std::shared_ptr<AvmValue> v = value();
    for (std::size_t i = path.size(); i-- > 1;) {
      auto wrap = std::make_shared<AvmValue>();
      wrap->kind = AvmValue::Kind::Node;
      wrap->pos = path[i].pos;
      wrap->pairs.push_back({path[i].text, std::move(v), path[i].pos});
      v = std::move(wrap);
    }
    node.pairs.push_back({first.text, std::move(v), first.pos});
  }

  std::shared_ptr<AvmValue> value() {
    const Token& t = peek();
    if (t.kind == Tok::LBracket) return avm();
    auto v = std::make_shared<AvmValue>();
    v->pos = t.pos;
    if (t.kind == Tok::Ident) {
      v->kind = AvmValue::Kind::Type;
      v->text = next().text;
    } else if (t.kind == Tok::String) {
      v->kind = AvmValue::Kind::Atom;
      v->text = next().text;
    } else if (t.kind == Tok::Tag) {
      v->kind = AvmValue::Kind::Tag;
      v->tag = next().number;
      Tok k = peek().kind;
      if (k == Tok::LBracket || k == Tok::Ident || k == Tok::String) v->bound = value();
      if (k == Tok::Tag) fail(peek().pos, "a tag cannot be bound to another tag");
    } else {
      fail(t.pos, std::string("expected a value but found ") + tok_name(t.kind));
    }
    return v;
  }

  void collect_tags(const AvmValue& v, std::set<int>& out) const {
    if (v.kind == AvmValue::Kind::Tag) {
      out.insert(v.tag);
      if (v.bound) collect_tags(*v.bound, out);
    }
    for (const auto& p : v.pairs) collect_tags(*p.value, out);
  }

  void check_tags(const AvmValue& root) {
    struct Use {
      int occurrences = 0;
      int bindings = 0;
      SourcePos first;
    };
    std::map<int, Use> uses;
    std::function<void(const AvmValue&)> walk = [&](const AvmValue& v) {
      if (v.kind == AvmValue::Kind::Tag) {
        Use& u = uses[v.tag];
        if (u.occurrences++ == 0) u.first = v.pos;
        if (v.bound) {
          if (++u.bindings > 1) fail(v.pos, "tag #" + std::to_string(v.tag) + " is bound more than once");
          walk(*v.bound);
        }
      }
      for (const auto& p : v.pairs) walk(*p.value);
    };
    walk(root);
    for (const auto& [tag, u] : uses) {
      if (u.occurrences == 1 && u.bindings == 0) fail(u.first, "unbound tag #" + std::to_string(tag));
    }
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = std::min(i_ + ahead, toks_.size() - 1);
    return toks_[j];
  }
  Token next() {
    Token t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(peek().pos, "expected " + what + " but found " + describe(peek()));
    return next();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    return tok_name(t.kind);
  }
  [[noreturn]] void fail(SourcePos p, const std::string& msg) const { throw SyntaxError(source_, p, msg); }

  std::string source_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// Turns one avm literal into nodes of an editor.
class LiteralBuilder {
 public:
  LiteralBuilder(const std::shared_ptr<const TypeLattice>& lattice, const AvmValue& root)
      : lat_(*lattice), ed_(lattice) {
    collect_bindings(root);
    voice_val_ = lat_.find("voice-val");
    string_atom_ = lat_.find(kStringAtomTypeName);
  }

  NodeIndex build(const AvmValue& v, std::optional<TypeId> expected) {
    switch (v.kind) {
      case AvmValue::Kind::Tag: {
        if (auto it = tags_.find(v.tag); it != tags_.end()) return it->second;
        auto bind = bindings_.find(v.tag);
        if (bind == bindings_.end()) {
          NodeIndex n = ed_.add(Sort::of(expected.value_or(lat_.top())));
          tags_[v.tag] = n;
          return n;
        }
        return build_value(*bind->second, expected, v.tag);
      }
      default:
        return build_value(v, expected, std::nullopt);
    }
  }

  FsEditor& editor() { return ed_; }

 private:
  void collect_bindings(const AvmValue& v) {
    if (v.kind == AvmValue::Kind::Tag && v.bound) {
      bindings_[v.tag] = v.bound.get();
      collect_bindings(*v.bound);
    }
    for (const auto& p : v.pairs) collect_bindings(*p.value);
  }

  TypeId resolve_type(const std::string& name, SourcePos pos, std::optional<TypeId> expected) const {
    if (voice_val_ && expected && lat_.subtype(*expected, *voice_val_)) {
      const char* mapped = name == "+" ? "voice-plus" : name == "-" ? "voice-minus" : name == "nil" ? "voice-nil"
                                                                                                     : nullptr;
      if (mapped) {
        if (auto t = lat_.find(mapped)) return *t;
      }
    }
    auto t = lat_.find(name);
    if (!t) throw BuildError(pos, "undeclared type '" + name + "'");
    return *t;
  }

  NodeIndex build_value(const AvmValue& v, std::optional<TypeId> expected, std::optional<int> tag) {
    NodeIndex n;
    switch (v.kind) {
      case AvmValue::Kind::Type:
        n = ed_.add(Sort::of(resolve_type(v.text, v.pos, expected)));
        break;
      case AvmValue::Kind::Atom:
        if (!string_atom_) throw BuildError(v.pos, "string atoms need a '" + std::string(kStringAtomTypeName) + "' type");
        n = ed_.add(Sort{*string_atom_, v.text});
        break;
      case AvmValue::Kind::Tag:
        // A tag bound to a tag is rejected by the parser.
        throw BuildError(v.pos, "tag bound to a tag");
      case AvmValue::Kind::Node:
      default: {
        TypeId type = v.text.empty() ? infer(v, expected.value_or(lat_.top())) : resolve_type(v.text, v.pos, expected);
        n = ed_.add(Sort::of(type));
        if (tag) tags_[*tag] = n;
        for (const auto& p : v.pairs) {
          auto f = lat_.feature(p.feature);
          if (!f) throw BuildError(p.pos, "unknown feature '" + p.feature + "'");
          std::optional<TypeId> child_expected = lat_.approp(type, *f);
          NodeIndex child = build(*p.value, child_expected);
          ed_.merge_arc(n, *f, child);
        }
        return n;
      }
    }
    if (tag) tags_[*tag] = n;
    return n;
  }

  // Narrow `start` by the introducing types of the node's features.
  TypeId infer(const AvmValue& v, TypeId start) const {
    TypeId type = start;
    for (const auto& p : v.pairs) {
      auto f = lat_.feature(p.feature);
      if (!f) throw BuildError(p.pos, "unknown feature '" + p.feature + "'");
      if (lat_.approp(type, *f)) continue;
      std::vector<TypeId> options;
      for (TypeId intro : lat_.introducers(*f)) {
        GlbResult g = lat_.glb(type, intro);
        if (g && std::find(options.begin(), options.end(), g.type) == options.end()) options.push_back(g.type);
      }
      if (options.size() > 1) {
        throw BuildError(p.pos, "cannot infer a type for a node with feature '" + p.feature +
                                    "'; write the type explicitly");
      }
      if (options.size() == 1) type = options.front();
    }
    return type;
  }

  const TypeLattice& lat_;
  FsEditor ed_;
  std::map<int, const AvmValue*> bindings_;
  std::map<int, NodeIndex> tags_;
  std::optional<TypeId> voice_val_;
  std::optional<TypeId> string_atom_;
};

void escape_atom(std::string& out, const std::string& atom) {
  out += '"';
  for (char c : atom) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace

std::vector<Statement> parse_lexicon(std::string_view text, std::string_view source) {
  Parser p(text, std::string(source));
  return p.statements();
}

Expr parse_frame_expr(std::string_view text, std::string_view source) {
  Parser p(text, std::string(source));
  if (p.starts_with_keyword("frame")) {
    auto stmts = p.statements();
    const FrameDecl* frame = nullptr;
    for (const auto& s : stmts) {
      if (const auto* f = std::get_if<FrameDecl>(&s)) {
        if (frame) throw SyntaxError(std::string(source), f->pos, "a frame file holds exactly one frame");
        frame = f;
      } else {
        throw SyntaxError(std::string(source), {1, 1}, "a frame file may only contain a frame declaration");
      }
    }
    return frame->body;
  }
  Parser bare(text, std::string(source));
  return bare.bare_expr();
}

UnifyResult build_term(const std::shared_ptr<const TypeLattice>& lattice, const Term& term, TypeId context,
                       const NameLookup& lookup) {
  if (term.is_reference()) {
    const FeatureStructure* fs = lookup ? lookup(term.name) : nullptr;
    if (!fs) throw BuildError(term.pos, "undeclared constraint '" + term.name + "'");
    return *fs;
  }
  LiteralBuilder b(lattice, *term.literal);
  NodeIndex root = b.build(*term.literal, context);
  return b.editor().finish(root);
}

UnifyResult evaluate(const std::shared_ptr<const TypeLattice>& lattice, const Expr& expr, TypeId context,
                     const NameLookup& lookup) {
  std::optional<UnifyResult> acc;
  for (const Term& t : expr.terms) {
    UnifyResult r = build_term(lattice, t, context, lookup);
    if (!r) return r;
    if (!acc) {
      acc = std::move(r);
    } else {
      acc = unify(**acc, *r);
      if (!*acc) return *acc;
    }
  }
  if (!acc) return FeatureStructure::atomic(lattice, Sort::of(context));
  return *acc;
}

FeatureStructure parse_frame(std::string_view text, const std::shared_ptr<const TypeLattice>& lattice,
                             std::string_view context_type, const NameLookup& lookup, std::string_view source) {
  Expr e = parse_frame_expr(text, source);
  auto ctx = lattice->find(context_type);
  if (!ctx) throw Error("unknown context type '" + std::string(context_type) + "'");
  UnifyResult r = evaluate(lattice, e, *ctx, lookup);
  if (!r) throw Error("ill-formed frame " + r.clash().describe());
  return *r;
}

std::string serialize_frame(const FeatureStructure& fs) {
  const TypeLattice& lat = fs.lattice();
  std::vector<std::size_t> indeg = fs.in_degrees();
  std::vector<int> tag(fs.node_count(), 0);
  std::vector<bool> printed(fs.node_count(), false);
  int next_tag = 0;
  std::string out;

  std::function<void(NodeIndex, int)> emit = [&](NodeIndex n, int depth) {
    if (indeg[n] > 1) {
      if (printed[n]) {
        out += "#" + std::to_string(tag[n]);
        return;
      }
      tag[n] = ++next_tag;
      out += "#" + std::to_string(tag[n]) + " ";
    }
    printed[n] = true;
    const Node& node = fs.node(n);
    if (node.sort.atom) {
      escape_atom(out, *node.sort.atom);
      return;
    }
    if (node.arcs.empty() && n != fs.root()) {
      out += lat.name(node.sort.type);
      return;
    }
    out += "[" + lat.name(node.sort.type);
    for (std::size_t i = 0; i < node.arcs.size(); ++i) {
      out += '\n';
      out.append(static_cast<std::size_t>(depth + 1) * 2, ' ');
      out += lat.feature_name(node.arcs[i].feature) + ": ";
      emit(node.arcs[i].target, depth + 1);
      if (i + 1 < node.arcs.size()) out += ',';
    }
    out += ']';
  };
  emit(fs.root(), 0);
  out += '\n';
  return out;
}

}  // namespace cfl::dsl
