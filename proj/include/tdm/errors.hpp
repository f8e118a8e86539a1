#pragma once

#include <stdexcept>
#include <string>

namespace tdm {

enum class Errc {
  NonSymmetric,
  DiagonalNotOne,
  EntryOutOfRange,
  PairExceedsMarginal,
  NotFinite,
  BadShape,
  DimensionTooLarge,
  NumericalBreakdown,
  IterationLimit,
  WrongLength,
  InvalidSubset,
  PreconditionFailed,
  UnsupportedDimension,
  UnknownCase,
  InvalidWeights,
  TooFewExceedances,
  NoConvergence,
  ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace tdm
