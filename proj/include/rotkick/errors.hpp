#pragma once

#include <stdexcept>
#include <string>

namespace rotkick {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorClass {
  Config = 2,     // bad input: config file, CLI usage, molecule data
  Numerical = 3,  // simulation failed a numerical invariant
  Analysis = 4,   // analysis could not resolve the requested feature
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string code, const std::string& what)
      : std::runtime_error(what), cls_(cls), code_(std::move(code)) {}

  ErrorClass error_class() const { return cls_; }
  const std::string& code() const { return code_; }
  int exit_code() const { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
  std::string code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string code = "E_CONFIG")
      : Error(ErrorClass::Config, std::move(code), what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::string code = "E_NUMERIC")
      : Error(ErrorClass::Numerical, std::move(code), what) {}
};

class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& what, std::string code = "E_UNRESOLVED")
      : Error(ErrorClass::Analysis, std::move(code), what) {}
};

}  // namespace rotkick
