#ifndef DIMSC_ERRORS_HPP
#define DIMSC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dimsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes or index ranges do not line up.
struct DimensionError : Error {
  using Error::Error;
};

// A required singular value sits below the rank floor.
struct RankDeficiencyError : Error {
  using Error::Error;
};

// Input values outside their mathematical domain (probabilities, norms).
struct DomainError : Error {
  using Error::Error;
};

// A population edge probability exceeds 1.
struct ProbabilityOverflowError : Error {
  using Error::Error;
};

// Pruning removed everything, or zero rows reached normalization.
struct DegenerateNetworkError : Error {
  using Error::Error;
};

// Successive projection ran out of residual mass before K picks.
struct CornerDeficiencyError : Error {
  using Error::Error;
};

// The convex hull of the rows contains the origin.
struct DegenerateConeError : Error {
  using Error::Error;
};

// The closed-form cone solution's positivity condition fails.
struct ConeConditionError : Error {
  using Error::Error;
};

// The gamma schedule ran out without K distinct clusters.
struct ConeHuntingError : Error {
  using Error::Error;
};

// Fewer points than clusters requested.
struct InsufficientPointsError : Error {
  using Error::Error;
};

// Corner matrix condition number above the solve threshold.
struct IllConditionedError : Error {
  using Error::Error;
};

// Configuration file or experiment grid problems.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed data file contents.
struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace dimsc

#endif
