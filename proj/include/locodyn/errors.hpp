#pragma once

#include <stdexcept>
#include <string>

namespace locodyn {

// Exit-code categories used by the CLI: 2 usage, 3 data, 4 numeric divergence.
enum class ErrorKind { usage = 2, data = 3, divergence = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

class InvalidParameterError : public Error {
public:
  explicit InvalidParameterError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericInputError : public Error {
public:
  explicit NumericInputError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class DataFormatError : public Error {
public:
  explicit DataFormatError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class SingularConfigurationError : public Error {
public:
  explicit SingularConfigurationError(const std::string& what)
      : Error(ErrorKind::divergence, what) {}
};

class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, int step)
      : Error(ErrorKind::divergence, what), step_(step) {}
  int step() const { return step_; }

private:
  int step_ = -1;
};

}  // namespace locodyn
