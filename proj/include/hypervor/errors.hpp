#pragma once

#include <stdexcept>
#include <string>

namespace hypervor {

// Base of every error raised by the library. `kind()` is a stable
// machine-readable tag used in reports and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define HYPERVOR_DEFINE_ERROR(Name, tag)                               \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(tag, what) {}       \
  };

HYPERVOR_DEFINE_ERROR(InvariantViolation, "invariant-violation")
HYPERVOR_DEFINE_ERROR(DegenerateSites, "degenerate-sites")
HYPERVOR_DEFINE_ERROR(DegenerateInput, "degenerate-input")
HYPERVOR_DEFINE_ERROR(EmptyPolyhedron, "empty-polyhedron")
HYPERVOR_DEFINE_ERROR(PreconditionError, "precondition")
HYPERVOR_DEFINE_ERROR(ResolutionError, "resolution")
HYPERVOR_DEFINE_ERROR(WeakSimplicityViolation, "weak-simplicity-violation")
HYPERVOR_DEFINE_ERROR(ComplexInconsistency, "complex-inconsistency")
HYPERVOR_DEFINE_ERROR(SizeError, "size")
HYPERVOR_DEFINE_ERROR(DomainError, "domain")
HYPERVOR_DEFINE_ERROR(RankDeficient, "rank-deficient")
HYPERVOR_DEFINE_ERROR(EmptyNet, "empty-net")
HYPERVOR_DEFINE_ERROR(InputError, "input")
HYPERVOR_DEFINE_ERROR(IoError, "io")

#undef HYPERVOR_DEFINE_ERROR

}  // namespace hypervor
