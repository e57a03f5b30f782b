#ifndef CFL_DIAGNOSTIC_HPP
#define CFL_DIAGNOSTIC_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace cfl {

// A single load-time problem. `code` is a stable identifier such as
// "MultipleGlb" or "UnsatisfiableSense"; `message` is for humans.
struct Diagnostic {
  std::string code;
  std::string message;
  std::vector<std::string> subjects;

  std::string to_string() const { return code + ": " + message; }
};

using Diagnostics = std::vector<Diagnostic>;

// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfl

#endif  // CFL_DIAGNOSTIC_HPP
