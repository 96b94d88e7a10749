#ifndef TREEMC_ERRORS_HPP
#define TREEMC_ERRORS_HPP

#include <stdexcept>

namespace treemc {

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: configs, file contents, violated call contracts.
// The CLI maps these to exit code 1, everything else to 2.
struct ValidationError : Error {
  using Error::Error;
};

// tree walking
struct IndexOutOfRange : Error { using Error::Error; };
struct ExtendPastLeaf : Error { using Error::Error; };
struct MaxRetriesExceeded : Error { using Error::Error; };
struct NonterminatingTree : Error { using Error::Error; };
struct LimitExceeded : Error { using Error::Error; };

// proposals
struct NoUnblockedBranch : Error { using Error::Error; };
struct SameLeaf : Error { using Error::Error; };

// model space
struct InconsistentConstraints : ValidationError { using ValidationError::ValidationError; };
struct Overflow : Error { using Error::Error; };

// scoring
struct UnknownVariable : ValidationError { using ValidationError::ValidationError; };
struct ChildInParents : ValidationError { using ValidationError::ValidationError; };
struct VariableMismatch : ValidationError { using ValidationError::ValidationError; };

// analysis
struct EmptyTrace : Error { using Error::Error; };
struct FeatureMismatch : ValidationError { using ValidationError::ValidationError; };

// files and configs
struct ConfigError : ValidationError { using ValidationError::ValidationError; };
struct SpaceTooLarge : ValidationError { using ValidationError::ValidationError; };
struct IoError : Error { using Error::Error; };

}  // namespace treemc

#endif
