#pragma once

#include <stdexcept>
#include <string>

namespace plumbcalc {

// Every failure mode the library reports deliberately.  The CLI maps these to
// process exit codes, so the set is part of the external interface.
enum class Errc {
  parse,                  // malformed input text/JSON
  validation,             // well-formed but not a plumbing tree with one unframed vertex
  invalid_params,         // bad arguments (t outside [0,2], p,q not coprime, ...)
  not_negative_definite,  // intersection form fails the definiteness check
  capacity,               // complex would exceed the configured cell budget
  hypothesis,             // operation's side condition violated (e.g. v adjacent to v0)
  audit_failure,          // a certified value failed an independent bound
  exactness_failure,      // surgery sequence check failed
  missing_free_part,      // barcode lacks the expected infinite bar
  grading_mismatch,       // relation audit found inconsistent gradings
  overflow,               // exact arithmetic left the representable range
  internal                // broken invariant inside the library itself
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Errc::parse, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(Errc::validation, w) {}
};
struct InvalidParamsError : Error {
  explicit InvalidParamsError(const std::string& w) : Error(Errc::invalid_params, w) {}
};
struct NotNegativeDefiniteError : Error {
  NotNegativeDefiniteError(const std::string& w, int minor_index)
      : Error(Errc::not_negative_definite, w), minor_index(minor_index) {}
  int minor_index;  // 1-based order of the leading principal minor that failed
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error(Errc::capacity, w) {}
};
struct HypothesisError : Error {
  explicit HypothesisError(const std::string& w) : Error(Errc::hypothesis, w) {}
};
struct AuditFailureError : Error {
  explicit AuditFailureError(const std::string& w) : Error(Errc::audit_failure, w) {}
};
struct ExactnessFailureError : Error {
  explicit ExactnessFailureError(const std::string& w) : Error(Errc::exactness_failure, w) {}
};
struct MissingFreePartError : Error {
  explicit MissingFreePartError(const std::string& w) : Error(Errc::missing_free_part, w) {}
};
struct GradingMismatchError : Error {
  explicit GradingMismatchError(const std::string& w) : Error(Errc::grading_mismatch, w) {}
};
struct OverflowError : Error {
  explicit OverflowError(const std::string& w) : Error(Errc::overflow, w) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(Errc::internal, w) {}
};

}  // namespace plumbcalc
