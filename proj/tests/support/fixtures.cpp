#include "fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace cfl::test {

std::filesystem::path source_dir() { return CFL_SOURCE_DIR; }

std::filesystem::path fixture(const std::string& relative) { return source_dir() / "tests" / "fixtures" / relative; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CompileResult compile_with_prelude(const std::vector<std::string>& extra, bool with_turkish) {
  std::vector<SourceText> files{{"prelude.cfl", std::string(prelude_text())}};
  if (with_turkish) files.push_back({"turkish.cfl", read_file(source_dir() / "data" / "turkish.cfl")});
  for (std::size_t i = 0; i < extra.size(); ++i) files.push_back({"extra" + std::to_string(i) + ".cfl", extra[i]});
  return load_lexicon(files);
}

std::shared_ptr<const CompiledLexicon> turkish() {
  static std::once_flag once;
  static std::shared_ptr<const CompiledLexicon> lex;
  std::call_once(once, [] {
    CompileResult r = compile_with_prelude({}, true);
    if (!r.ok()) {
      std::string msg = "shipped lexicon failed to compile:";
      for (const auto& d : r.diagnostics) msg += "\n  " + d.to_string();
      throw std::runtime_error(msg);
    }
    lex = r.lexicon;
  });
  return lex;
}

FeatureStructure frame_file(const CompiledLexicon& lex, const std::string& name) {
  auto p = fixture("frames/" + name + ".frm");
  return lex.parse_frame(read_file(p), "case-frame", p.filename().string());
}

std::vector<std::filesystem::path> frame_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture("frames")))
    if (e.path().extension() == ".frm") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GoldLine> gold() {
  std::vector<GoldLine> out;
  std::istringstream in(read_file(fixture("gold.tsv")));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    GoldLine g;
    std::string senses, stage;
    std::getline(fields, g.file, '\t');
    std::getline(fields, senses, '\t');
    std::getline(fields, stage, '\t');
    if (senses != "NONE") {
      std::istringstream ids(senses);
      for (std::string id; std::getline(ids, id, ',');) g.senses.push_back(id);
    }
    g.stage = stage == "-" ? -1 : std::stoi(stage);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<std::string> sense_ids(const Resolution& r) {
  std::vector<std::string> ids;
  for (const auto& s : r.senses) ids.push_back(s.sense_id);
  return ids;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

Run run_cli(const std::string& args) {
  auto err_path = std::filesystem::temp_directory_path() /
                  ("cfl-test-" + std::to_string(::getpid()) + "-" + std::to_string(std::rand()) + ".err");
  std::string cmd = shell_quote(CFL_CLI_PATH) + " " + args + " 2>" + shell_quote(err_path.string());
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_path);
  std::filesystem::remove(err_path);
  return r;
}

}  // namespace cfl::test
