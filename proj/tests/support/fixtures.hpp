#ifndef CFL_TESTS_FIXTURES_HPP
#define CFL_TESTS_FIXTURES_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cfl/lexicon.hpp"
#include "cfl/resolver.hpp"

namespace cfl::test {

std::filesystem::path source_dir();
std::filesystem::path fixture(const std::string& relative);  // under tests/fixtures
std::string read_file(const std::filesystem::path& p);

// Prelude plus the shipped Turkish lexicon, compiled once per process.
std::shared_ptr<const CompiledLexicon> turkish();
// Prelude plus the given extra sources (compiled fresh).
CompileResult compile_with_prelude(const std::vector<std::string>& extra, bool with_turkish = false);

FeatureStructure frame_file(const CompiledLexicon& lex, const std::string& name);  // frames/<name>.frm
std::vector<std::filesystem::path> frame_files();                                   // sorted

struct GoldLine {
  std::string file;
  std::vector<std::string> senses;  // empty for NONE
  int stage = -1;
};
std::vector<GoldLine> gold();

std::vector<std::string> sense_ids(const Resolution& r);

struct Run {
  int exit = -1;
  std::string out;
  std::string err;
};
// Runs the built command-line tool with `args` (already shell-quoted).
Run run_cli(const std::string& args);
std::string shell_quote(const std::string& s);

}  // namespace cfl::test

#endif  // CFL_TESTS_FIXTURES_HPP
