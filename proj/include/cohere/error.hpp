#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cohere
{
enum class ErrorCode
{
  invalid_argument,
  unsupported_family,
  capacity,
  type_mismatch,
  config,
  numerical,
  non_convergence,
  io
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, std::string const& what)
      : std::runtime_error(what), code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Configuration error; `field` names the offending JSON key.
class ConfigError : public Error
{
public:
  ConfigError(std::string field, std::string const& what)
      : Error(ErrorCode::config, field + ": " + what), field_(std::move(field))
  {}

  std::string const& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Raised by the solver; carries the feasibility residual per iteration.
class NonConvergenceError : public Error
{
public:
  NonConvergenceError(std::string const& what, std::vector<double> history)
      : Error(ErrorCode::non_convergence, what), history_(std::move(history))
  {}

  std::vector<double> const& residual_history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string const& what)
{
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, std::string const& what)
{
  if (!cond)
    fail(code, what);
}

} // namespace cohere
