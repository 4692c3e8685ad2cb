#ifndef AHCERT_ERRORS_HPP
#define AHCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ahcert {

// Error categories used across the library.  HorizonExhausted means
// "undetermined at this horizon", not a disproof; callers (and the CLI
// exit-status contract) treat it differently from hard failures.
enum class Errc {
  EmptySet,
  Overlap,
  BoundViolated,
  SizeMismatch,
  SpaceMismatch,
  ChainMismatch,
  BadIndices,
  NotSingular,
  NotUnitary,
  HypothesisFailed,
  EmptyF,
  NotCovering,
  HorizonExhausted,
  ToleranceTooLarge,
  CornerTooSmall,
  MissingStructure,
  SlotOverlap,
  ZeroInput,
  ParseError,
  ValidationError,
  UnknownDemo,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace ahcert

#endif
