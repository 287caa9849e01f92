#pragma once

#include <stdexcept>
#include <string>

namespace stormwarn {

// Two aligned sequences disagree in length or timeline.
struct AlignmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A skill score has no defined value for the given table (empty class,
// all-zero relevant entries).
struct UndefinedScoreError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed or inconsistent input (files, configs, constructed types).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitUndefinedScore = 3;

}  // namespace stormwarn
