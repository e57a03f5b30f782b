#include "cfl/cfl.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "cfl/dsl.hpp"
#include "cfl/lexicon.hpp"
#include "cfl/resolver.hpp"

struct cfl_lexicon {
  std::shared_ptr<const cfl::CompiledLexicon> lexicon;
  std::vector<std::string> diagnostics;
  std::vector<std::string> codes;
};

struct cfl_result {
  struct Embedded {
    std::string path;
    std::string sense;
  };
  struct Entry {
    std::string sense;
    int stage = -1;
    std::string label;
    std::string frame;
    std::vector<Embedded> embedded;
  };
  std::string error;
  std::vector<Entry> entries;
  std::vector<std::string> trace;
  std::vector<std::string> notes;
  std::vector<std::string> failures;
};

namespace {

const char* at(const std::vector<std::string>& v, size_t i) { return i < v.size() ? v[i].c_str() : nullptr; }

cfl_status load(std::vector<cfl::SourceText> files, unsigned flags, cfl_lexicon* handle) {
  if (!(flags & CFL_NO_PRELUDE)) files.insert(files.begin(), {"<prelude>", std::string(cfl::prelude_text())});
  cfl::CompileResult r = cfl::load_lexicon(files);
  for (const auto& d : r.diagnostics) {
    handle->diagnostics.push_back(d.to_string());
    handle->codes.push_back(d.code);
  }
  handle->lexicon = r.lexicon;
  return r.ok() ? CFL_OK : CFL_LEXICON_ERROR;
}

void flatten(const std::string& prefix, const cfl::ResolvedSense& r, std::vector<cfl_result::Embedded>& out) {
  for (const auto& [path, inner] : r.embedded) {
    std::string full = prefix.empty() ? path : prefix + "." + path;
    out.push_back({full, inner.sense_id});
    flatten(full, inner, out);
  }
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

cfl_status cfl_lexicon_load(const char* const* paths, size_t count, unsigned flags, cfl_lexicon** out) {
  if (!out || (count && !paths)) return CFL_INVALID_ARGUMENT;
  for (size_t i = 0; i < count; ++i)
    if (!paths[i]) return CFL_INVALID_ARGUMENT;
  auto* handle = new (std::nothrow) cfl_lexicon;
  if (!handle) return CFL_INTERNAL_ERROR;
  *out = handle;
  try {
    std::vector<cfl::SourceText> files;
    bool unreadable = false;
    for (size_t i = 0; i < count; ++i) {
      std::ifstream in(paths[i], std::ios::binary);
      std::ostringstream text;
      if (in) text << in.rdbuf();
      if (!in) {
        handle->diagnostics.push_back(std::string("UnreadableFile: cannot read ") + paths[i]);
        handle->codes.push_back("UnreadableFile");
        unreadable = true;
        continue;
      }
      files.push_back({paths[i], text.str()});
    }
    if (unreadable) return CFL_LEXICON_ERROR;
    return load(std::move(files), flags, handle);
  } catch (const std::exception& e) {
    handle->diagnostics.push_back(std::string("InternalError: ") + e.what());
    handle->codes.push_back("InternalError");
    return CFL_INTERNAL_ERROR;
  }
}

cfl_status cfl_lexicon_load_text(const char* const* names, const char* const* texts, size_t count, unsigned flags,
                                 cfl_lexicon** out) {
  if (!out || (count && (!names || !texts))) return CFL_INVALID_ARGUMENT;
  for (size_t i = 0; i < count; ++i)
    if (!names[i] || !texts[i]) return CFL_INVALID_ARGUMENT;
  auto* handle = new (std::nothrow) cfl_lexicon;
  if (!handle) return CFL_INTERNAL_ERROR;
  *out = handle;
  try {
    std::vector<cfl::SourceText> files;
    for (size_t i = 0; i < count; ++i) files.push_back({names[i], texts[i]});
    return load(std::move(files), flags, handle);
  } catch (const std::exception& e) {
    handle->diagnostics.push_back(std::string("InternalError: ") + e.what());
    handle->codes.push_back("InternalError");
    return CFL_INTERNAL_ERROR;
  }
}

void cfl_lexicon_free(cfl_lexicon* lexicon) { delete lexicon; }

size_t cfl_lexicon_diagnostic_count(const cfl_lexicon* lexicon) { return lexicon ? lexicon->diagnostics.size() : 0; }

const char* cfl_lexicon_diagnostic(const cfl_lexicon* lexicon, size_t index) {
  return lexicon ? at(lexicon->diagnostics, index) : nullptr;
}

const char* cfl_lexicon_diagnostic_code(const cfl_lexicon* lexicon, size_t index) {
  return lexicon ? at(lexicon->codes, index) : nullptr;
}

size_t cfl_lexicon_sense_count(const cfl_lexicon* lexicon) {
  return lexicon && lexicon->lexicon ? lexicon->lexicon->senses().size() : 0;
}

const char* cfl_lexicon_sense_id(const cfl_lexicon* lexicon, size_t index) {
  if (!lexicon || !lexicon->lexicon || index >= lexicon->lexicon->senses().size()) return nullptr;
  return lexicon->lexicon->senses()[index].id.c_str();
}

cfl_status cfl_resolve(const cfl_lexicon* lexicon, const char* frame_text, unsigned flags, cfl_result** out) {
  if (!lexicon || !lexicon->lexicon || !frame_text || !out) return CFL_INVALID_ARGUMENT;
  auto* result = new (std::nothrow) cfl_result;
  if (!result) return CFL_INTERNAL_ERROR;
  *out = result;
  const cfl::CompiledLexicon& lex = *lexicon->lexicon;
  try {
    if (flags & CFL_GENERATE) {
      cfl::FeatureStructure sem = lex.parse_frame(frame_text, "sem-frame");
      for (auto& g : cfl::generate(lex, sem)) {
        result->entries.push_back({g.sense_id, -1, "", cfl::dsl::serialize_frame(g.frame), {}});
      }
    } else {
      cfl::FeatureStructure frame = lex.parse_frame(frame_text, "case-frame");
      cfl::ResolveOptions options;
      options.all_stages = flags & CFL_ALL_STAGES;
      options.explain_failures = flags & CFL_EXPLAIN;
      cfl::Resolution res = cfl::resolve(lex, frame, options);
      for (int s : res.stages) result->trace.push_back(cfl::stage_label(s));
      result->notes = res.notes;
      for (const auto& f : res.failures.entries) result->failures.push_back(f.describe());
      for (const auto& r : res.senses) {
        cfl_result::Entry e{r.sense_id, r.stage, r.stage_label(), cfl::dsl::serialize_frame(r.frame), {}};
        flatten("", r, e.embedded);
        result->entries.push_back(std::move(e));
      }
    }
  } catch (const cfl::Error& e) {
    result->error = e.what();
    return CFL_INPUT_ERROR;
  } catch (const std::exception& e) {
    result->error = std::string("internal error: ") + e.what();
    return CFL_INTERNAL_ERROR;
  }
  return result->entries.empty() ? CFL_NO_RESULT : CFL_OK;
}

void cfl_result_free(cfl_result* result) { delete result; }

const char* cfl_result_error(const cfl_result* result) { return result ? result->error.c_str() : nullptr; }

size_t cfl_result_count(const cfl_result* result) { return result ? result->entries.size() : 0; }

const char* cfl_result_sense_id(const cfl_result* result, size_t index) {
  return result && index < result->entries.size() ? result->entries[index].sense.c_str() : nullptr;
}

int cfl_result_stage(const cfl_result* result, size_t index) {
  return result && index < result->entries.size() ? result->entries[index].stage : -1;
}

const char* cfl_result_stage_label(const cfl_result* result, size_t index) {
  return result && index < result->entries.size() ? result->entries[index].label.c_str() : nullptr;
}

const char* cfl_result_frame(const cfl_result* result, size_t index) {
  return result && index < result->entries.size() ? result->entries[index].frame.c_str() : nullptr;
}

size_t cfl_result_embedded_count(const cfl_result* result, size_t index) {
  return result && index < result->entries.size() ? result->entries[index].embedded.size() : 0;
}

const char* cfl_result_embedded_path(const cfl_result* result, size_t index, size_t embedded) {
  if (!result || index >= result->entries.size() || embedded >= result->entries[index].embedded.size()) return nullptr;
  return result->entries[index].embedded[embedded].path.c_str();
}

const char* cfl_result_embedded_sense(const cfl_result* result, size_t index, size_t embedded) {
  if (!result || index >= result->entries.size() || embedded >= result->entries[index].embedded.size()) return nullptr;
  return result->entries[index].embedded[embedded].sense.c_str();
}

size_t cfl_result_trace_count(const cfl_result* result) { return result ? result->trace.size() : 0; }
const char* cfl_result_trace(const cfl_result* result, size_t index) { return result ? at(result->trace, index) : nullptr; }
size_t cfl_result_note_count(const cfl_result* result) { return result ? result->notes.size() : 0; }
const char* cfl_result_note(const cfl_result* result, size_t index) { return result ? at(result->notes, index) : nullptr; }
size_t cfl_result_failure_count(const cfl_result* result) { return result ? result->failures.size() : 0; }
const char* cfl_result_failure(const cfl_result* result, size_t index) {
  return result ? at(result->failures, index) : nullptr;
}

cfl_status cfl_format_frame(const cfl_lexicon* lexicon, const char* frame_text, char** out) {
  if (!lexicon || !lexicon->lexicon || !frame_text || !out) return CFL_INVALID_ARGUMENT;
  cfl_status status = CFL_OK;
  std::string text;
  try {
    text = cfl::dsl::serialize_frame(lexicon->lexicon->parse_frame(frame_text, "case-frame"));
  } catch (const cfl::Error& e) {
    text = e.what();
    status = CFL_INPUT_ERROR;
  } catch (const std::exception& e) {
    text = e.what();
    status = CFL_INTERNAL_ERROR;
  }
  *out = duplicate(text);
  return *out ? status : CFL_INTERNAL_ERROR;
}

void cfl_string_free(char* text) { std::free(text); }

const char* cfl_status_string(cfl_status status) {
  switch (status) {
    case CFL_OK: return "ok";
    case CFL_NO_RESULT: return "no resolution";
    case CFL_INPUT_ERROR: return "input error";
    case CFL_LEXICON_ERROR: return "lexicon error";
    case CFL_INVALID_ARGUMENT: return "invalid argument";
    case CFL_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* cfl_version(void) { return "0.1.0"; }

}  // extern "C"
