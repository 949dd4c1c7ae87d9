#pragma once

#include <stdexcept>
#include <string>

namespace geomflow {

enum class ErrorKind {
  InvalidInput,
  UnsupportedOrder,
  Unsolvable,
  SingularOperator,
  BlowUp,
  DegenerateCurve,
  FrameDegenerate,
  Precondition,
  Inconsistency,
  OracleUnreliable,
  ShapeMismatch,
  MissingField,
  InsufficientSnapshots,
  GeometryMismatch,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind and, where one exists, the
/// numeric quantity that tripped it (a residual, a margin, a mean value).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::Unsolvable: return "unsolvable";
    case ErrorKind::SingularOperator: return "singular-operator";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::DegenerateCurve: return "degenerate-curve";
    case ErrorKind::FrameDegenerate: return "frame-degenerate";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::OracleUnreliable: return "oracle-unreliable";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::InsufficientSnapshots: return "insufficient-snapshots";
    case ErrorKind::GeometryMismatch: return "geometry-mismatch";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace geomflow
