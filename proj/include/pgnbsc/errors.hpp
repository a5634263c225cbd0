#ifndef PGNBSC_ERRORS_HPP
#define PGNBSC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pgnbsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// signal_io
struct MalformedFile : Error { using Error::Error; };
struct InconsistentRates : Error { using Error::Error; };
struct MissingChannel : Error { using Error::Error; };
struct AmbiguousChannel : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct InvertedInterval : Error { using Error::Error; };
struct BadDuration : Error { using Error::Error; };
struct BadRate : Error { using Error::Error; };

// preprocess
struct RateTooLow : Error { using Error::Error; };
struct WrongRate : Error { using Error::Error; };

// features
struct TooShort : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct DegeneratePath : Error { using Error::Error; };

// dataset / nbayes / bgwo
struct EmptyClass : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };
struct WidthMismatch : Error { using Error::Error; };
struct RegistryMismatch : Error { using Error::Error; };
struct Exhausted : Error { using Error::Error; };

// evalreport
struct EmptyEval : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace pgnbsc

#endif
