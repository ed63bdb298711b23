#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fintime {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidTimeSet : public Error {
public:
  using Error::Error;
};

class TimeNotInSet : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class DegenerateFrame : public Error {
public:
  using Error::Error;
};

class NormNotDifferentiableAtZero : public Error {
public:
  using Error::Error;
};

class InvalidNorm : public Error {
public:
  using Error::Error;
};

class IllConditionedProcess : public Error {
public:
  using Error::Error;
};

class IntegrationBlowup : public Error {
public:
  using Error::Error;
};

class RequiresIntervalTimeSet : public Error {
public:
  using Error::Error;
};

class NonpositiveNorm : public Error {
public:
  using Error::Error;
};

class TrajectoryCollision : public Error {
public:
  using Error::Error;
};

class NotHyperbolic : public Error {
public:
  using Error::Error;
};

class NotAttractive : public Error {
public:
  using Error::Error;
};

class NotInvertible : public Error {
public:
  using Error::Error;
};

class ComplementarityFailure : public Error {
public:
  using Error::Error;
};

class InvalidDirectionClass : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

// Carries every validation problem found in a scenario, not just the first.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string out = "scenario validation failed:";
    for (const auto& p : ps) {
      out += "\n  - " + p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace fintime
