#pragma once

#include <stdexcept>
#include <string>

namespace pwhyp {

enum class ErrorKind {
  OnSingularity,
  OutsideDomain,
  ImageEscapesDomain,
  DegenerateImage,
  InvalidParameters,
  InvalidForRhoZero,
  CriterionInapplicable,
  NotFound,
  ConeViolation,
  InsufficientData,
  InsufficientPoints,
  BudgetExceeded,
  OrbitEscaped,
  SignError,
  DomainError,
  Inconclusive,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OnSingularity: return "OnSingularity";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::ImageEscapesDomain: return "ImageEscapesDomain";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::InvalidForRhoZero: return "InvalidForRhoZero";
    case ErrorKind::CriterionInapplicable: return "CriterionInapplicable";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::ConeViolation: return "ConeViolation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::OrbitEscaped: return "OrbitEscaped";
    case ErrorKind::SignError: return "SignError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace pwhyp
