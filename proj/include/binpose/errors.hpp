#pragma once

#include <stdexcept>
#include <string>

namespace binpose {

// Base class for all library errors. The error name is embedded in what()
// so callers (and the CLI) can surface which failure occurred.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define BINPOSE_DEFINE_ERROR(NAME)                 \
  struct NAME : Error {                            \
    explicit NAME(const std::string& message = "") \
        : Error(#NAME, message) {}                 \
  }

// geometry
BINPOSE_DEFINE_ERROR(WrongSegmentCount);
BINPOSE_DEFINE_ERROR(DegenerateGeometry);
BINPOSE_DEFINE_ERROR(AmbiguousOrientation);
BINPOSE_DEFINE_ERROR(ZeroDirection);
BINPOSE_DEFINE_ERROR(ParallelVectors);
BINPOSE_DEFINE_ERROR(TooFewPoints);

// metrics
BINPOSE_DEFINE_ERROR(InvalidRotation);
BINPOSE_DEFINE_ERROR(LengthMismatch);
BINPOSE_DEFINE_ERROR(EmptySet);

// matching
BINPOSE_DEFINE_ERROR(InvalidCost);
BINPOSE_DEFINE_ERROR(InvalidParams);

// cloud
BINPOSE_DEFINE_ERROR(NoValidPixels);

// synth / config
BINPOSE_DEFINE_ERROR(ConfigInvalid);

// detect
BINPOSE_DEFINE_ERROR(NoPlaneFound);
BINPOSE_DEFINE_ERROR(DegenerateRim);

// io
BINPOSE_DEFINE_ERROR(CorruptFile);
BINPOSE_DEFINE_ERROR(SchemaMismatch);
BINPOSE_DEFINE_ERROR(SplitLeakage);
BINPOSE_DEFINE_ERROR(DuplicateSample);

#undef BINPOSE_DEFINE_ERROR

}  // namespace binpose
