// cfl: check lexicons, resolve or generate single frames, run gold batches.
//
// stdout carries only canonical frames and "---" separators; everything
// else goes to stderr. Exit codes: 0 ok, 1 no resolution / batch mismatch,
// 2 input error, 3 lexicon error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfl/cfl.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoResult = 1;
constexpr int kExitInput = 2;
constexpr int kExitLexicon = 3;

struct LexiconDeleter {
  void operator()(cfl_lexicon* p) const { cfl_lexicon_free(p); }
};
struct ResultDeleter {
  void operator()(cfl_result* p) const { cfl_result_free(p); }
};
using LexiconPtr = std::unique_ptr<cfl_lexicon, LexiconDeleter>;
using ResultPtr = std::unique_ptr<cfl_result, ResultDeleter>;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return static_cast<bool>(in) || in.eof();
}

// CFL_PRELUDE replaces the built-in prelude with a file.
LexiconPtr load(const std::vector<std::string>& files, bool no_prelude, int& exit_code) {
  std::vector<std::string> paths;
  unsigned flags = 0;
  if (no_prelude) {
    flags |= CFL_NO_PRELUDE;
  } else if (const char* env = std::getenv("CFL_PRELUDE"); env && *env) {
    paths.emplace_back(env);
    flags |= CFL_NO_PRELUDE;
  }
  paths.insert(paths.end(), files.begin(), files.end());
  std::vector<const char*> raw;
  for (const auto& p : paths) raw.push_back(p.c_str());
  cfl_lexicon* lex = nullptr;
  cfl_status st = cfl_lexicon_load(raw.data(), raw.size(), flags, &lex);
  LexiconPtr handle(lex);
  for (size_t i = 0; i < cfl_lexicon_diagnostic_count(lex); ++i) std::cerr << cfl_lexicon_diagnostic(lex, i) << "\n";
  if (st != CFL_OK) {
    std::cerr << "cfl: lexicon not loaded (" << cfl_status_string(st) << ")\n";
    exit_code = kExitLexicon;
    return nullptr;
  }
  exit_code = kExitOk;
  return handle;
}

int cmd_check(const std::vector<std::string>& files, bool no_prelude) {
  int code = kExitOk;
  LexiconPtr lex = load(files, no_prelude, code);
  if (!lex) return code;
  std::cerr << "ok: " << cfl_lexicon_sense_count(lex.get()) << " senses\n";
  return kExitOk;
}

struct ResolveFlags {
  bool all_stages = false;
  bool trace = false;
  bool generate = false;
};

int cmd_resolve(const std::vector<std::string>& files, bool no_prelude, const std::string& frame_path,
                const ResolveFlags& opts) {
  std::string text;
  if (!read_file(frame_path, text)) {
    std::cerr << "cfl: cannot read frame file " << frame_path << "\n";
    return kExitInput;
  }
  int code = kExitOk;
  LexiconPtr lex = load(files, no_prelude, code);
  if (!lex) return code;

  unsigned flags = 0;
  if (opts.all_stages) flags |= CFL_ALL_STAGES;
  if (opts.generate) flags |= CFL_GENERATE;
  if (opts.trace) flags |= CFL_EXPLAIN;
  cfl_result* raw = nullptr;
  cfl_status st = cfl_resolve(lex.get(), text.c_str(), flags, &raw);
  ResultPtr res(raw);
  if (st == CFL_INPUT_ERROR || st == CFL_INTERNAL_ERROR || st == CFL_INVALID_ARGUMENT) {
    std::cerr << frame_path << ": " << (res ? cfl_result_error(res.get()) : cfl_status_string(st)) << "\n";
    return kExitInput;
  }
  const cfl_result* r = res.get();
  if (opts.trace) {
    for (size_t i = 0; i < cfl_result_trace_count(r); ++i) std::cerr << "trace: " << cfl_result_trace(r, i) << "\n";
    for (size_t i = 0; i < cfl_result_note_count(r); ++i) std::cerr << "note: " << cfl_result_note(r, i) << "\n";
  }
  for (size_t i = 0; i < cfl_result_count(r); ++i) {
    if (i) std::cout << "---\n";
    std::cout << cfl_result_frame(r, i);
    if (opts.trace) {
      std::cerr << "result: " << cfl_result_sense_id(r, i);
      if (cfl_result_stage(r, i) >= 0) std::cerr << " at " << cfl_result_stage_label(r, i);
      std::cerr << "\n";
      for (size_t j = 0; j < cfl_result_embedded_count(r, i); ++j) {
        std::cerr << "  embedded " << cfl_result_embedded_path(r, i, j) << ": " << cfl_result_embedded_sense(r, i, j)
                  << "\n";
      }
    }
  }
  std::cout.flush();
  if (st == CFL_NO_RESULT) {
    std::cerr << "no resolution\n";
    for (size_t i = 0; i < cfl_result_failure_count(r); ++i) std::cerr << "  failed: " << cfl_result_failure(r, i) << "\n";
    return kExitNoResult;
  }
  return kExitOk;
}

struct GoldLine {
  std::set<std::string> senses;  // empty = NONE
  int stage = -1;                // -1 = '-'
};

bool parse_gold(const std::string& path, std::map<std::string, GoldLine>& gold, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot read gold file " + path;
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    auto bad = [&](const std::string& why) {
      error = path + ":" + std::to_string(lineno) + ": " + why;
      return false;
    };
    if (cols.size() != 3) return bad("expected 3 tab-separated columns");
    GoldLine g;
    if (cols[1] != "NONE") {
      std::stringstream ids(cols[1]);
      for (std::string id; std::getline(ids, id, ',');)
        if (!id.empty()) g.senses.insert(id);
      if (g.senses.empty()) return bad("empty sense list");
    }
    if (cols[2] == "-") {
      g.stage = -1;
    } else if (cols[2].size() == 1 && cols[2][0] >= '0' && cols[2][0] <= '3') {
      g.stage = cols[2][0] - '0';
    } else {
      return bad("stage must be 0-3 or -");
    }
    if (!gold.emplace(cols[0], g).second) return bad("duplicate entry for " + cols[0]);
  }
  return true;
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string describe(const std::set<std::string>& ids, int stage) {
  if (ids.empty()) return "NONE";
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out + " at stage " + std::to_string(stage);
}

Outcome run_one(const cfl_lexicon* lex, const fs::path& file, const GoldLine* expected) {
  if (!expected) return {false, "no gold entry"};
  std::string text;
  if (!read_file(file.string(), text)) return {false, "cannot read frame file"};
  cfl_result* raw = nullptr;
  cfl_status st = cfl_resolve(lex, text.c_str(), 0, &raw);
  ResultPtr res(raw);
  if (st != CFL_OK && st != CFL_NO_RESULT) {
    return {false, std::string("error: ") + (res ? cfl_result_error(res.get()) : cfl_status_string(st))};
  }
  std::set<std::string> got;
  int stage = -1;
  for (size_t i = 0; i < cfl_result_count(res.get()); ++i) {
    got.insert(cfl_result_sense_id(res.get(), i));
    stage = cfl_result_stage(res.get(), i);
  }
  if (got == expected->senses && stage == expected->stage) return {true, describe(got, stage)};
  return {false, "expected " + describe(expected->senses, expected->stage) + ", got " + describe(got, stage)};
}

int cmd_batch(const std::vector<std::string>& files, bool no_prelude, const std::string& dir,
              const std::string& gold_path) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::cerr << "cfl: not a directory: " << dir << "\n";
    return kExitInput;
  }
  std::vector<fs::path> frames;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".frm") frames.push_back(e.path());
  if (ec) {
    std::cerr << "cfl: cannot list " << dir << ": " << ec.message() << "\n";
    return kExitInput;
  }
  if (frames.empty()) {
    std::cerr << "cfl: no .frm files in " << dir << "\n";
    return kExitInput;
  }
  std::sort(frames.begin(), frames.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::map<std::string, GoldLine> gold;
  std::string error;
  if (!parse_gold(gold_path, gold, error)) {
    std::cerr << "cfl: " << error << "\n";
    return kExitInput;
  }
  int code = kExitOk;
  LexiconPtr lex = load(files, no_prelude, code);
  if (!lex) return code;

  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : frames) {
    auto it = gold.find(f.filename().string());
    const GoldLine* expected = it == gold.end() ? nullptr : &it->second;
    jobs.push_back(std::async(std::launch::async, run_one, lex.get(), f, expected));
  }
  int failed = 0;
  for (size_t i = 0; i < frames.size(); ++i) {
    Outcome o = jobs[i].get();
    if (!o.ok) ++failed;
    std::cerr << (o.ok ? "PASS " : "FAIL ") << frames[i].filename().string() << ": " << o.detail << "\n";
  }
  std::set<std::string> seen;
  for (const auto& f : frames) seen.insert(f.filename().string());
  size_t total = frames.size();
  for (const auto& [name, g] : gold) {
    if (!seen.count(name)) {
      ++failed;
      ++total;
      std::cerr << "FAIL " << name << ": frame file missing\n";
    }
  }
  std::cerr << "batch: " << total - failed << "/" << total << " passed\n";
  return failed ? kExitNoResult : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Case-frame lexicon: check lexicons, resolve frames to senses, run gold batches"};
  app.require_subcommand(1);

  bool no_prelude = false;
  std::vector<std::string> lexicons;

  auto* check = app.add_subcommand("check", "Compile lexicon files and report diagnostics");
  check->add_flag("--no-prelude", no_prelude, "Do not load the built-in prelude");
  std::vector<std::string> check_files;
  check->add_option("lexicon", check_files, "Lexicon files (.cfl)")->required();

  ResolveFlags ropts;
  std::string frame_path;
  auto* resolve = app.add_subcommand("resolve", "Resolve a frame file against a lexicon");
  resolve->add_flag("--no-prelude", no_prelude, "Do not load the built-in prelude");
  resolve->add_flag("--all-stages", ropts.all_stages, "Collect matches from every rule stage");
  resolve->add_flag("--trace", ropts.trace, "Report stages, results and failures on stderr");
  resolve->add_flag("--generate", ropts.generate, "Input is a semantic frame; print constrained case frames");
  resolve->add_option("-l,--lexicon", lexicons, "Lexicon files (.cfl)")->required();
  resolve->add_option("frame", frame_path, "Frame file (.frm)")->required();

  std::string frames_dir, gold_path;
  std::vector<std::string> batch_lexicons;
  auto* batch = app.add_subcommand("batch", "Resolve every .frm in a directory and compare with a gold TSV");
  batch->add_flag("--no-prelude", no_prelude, "Do not load the built-in prelude");
  batch->add_option("-l,--lexicon", batch_lexicons, "Lexicon files (.cfl)")->required();
  batch->add_option("frames", frames_dir, "Directory of frame files")->required();
  batch->add_option("gold", gold_path, "Gold TSV: file, sense ids or NONE, stage 0-3 or -")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, std::cerr, std::cerr);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return kExitInput;
  }

  if (*check) return cmd_check(check_files, no_prelude);
  if (*resolve) return cmd_resolve(lexicons, no_prelude, frame_path, ropts);
  return cmd_batch(batch_lexicons, no_prelude, frames_dir, gold_path);
}
