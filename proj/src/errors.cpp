#include "tdm/errors.hpp"

namespace tdm {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonSymmetric: return "NonSymmetric";
    case Errc::DiagonalNotOne: return "DiagonalNotOne";
    case Errc::EntryOutOfRange: return "EntryOutOfRange";
    case Errc::PairExceedsMarginal: return "PairExceedsMarginal";
    case Errc::NotFinite: return "NotFinite";
    case Errc::BadShape: return "BadShape";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NumericalBreakdown: return "NumericalBreakdown";
    case Errc::IterationLimit: return "IterationLimit";
    case Errc::WrongLength: return "WrongLength";
    case Errc::InvalidSubset: return "InvalidSubset";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::UnknownCase: return "UnknownCase";
    case Errc::InvalidWeights: return "InvalidWeights";
    case Errc::TooFewExceedances: return "TooFewExceedances";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace tdm
