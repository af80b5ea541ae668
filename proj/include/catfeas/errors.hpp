#pragma once

#include <stdexcept>
#include <string>

namespace catfeas {

// Validation / geometry / configuration failure. `code` is a stable
// kebab-case identifier suitable for machine parsing (e.g.
// "point-outside-cap", "empty-intersection-detected").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// A mathematical guarantee that should hold by theory failed numerically.
// `inequality` names the violated statement (e.g. "convexity-inequality").
class CheckFailure : public Error {
 public:
  CheckFailure(std::string inequality, const std::string& message)
      : Error(std::move(inequality), message) {}
};

}  // namespace catfeas
