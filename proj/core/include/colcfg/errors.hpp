#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace colcfg {

// Input violates a documented invariant (bad field, unresolved machine ref, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Same machine name with different fields on both sides of a merge.
class MergeConflictError : public ValidationError {
 public:
  explicit MergeConflictError(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// Not enough (or degenerate) data to fit the requested model.
class UndertrainedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Every candidate training row was filtered out by the similarity cutoff.
class NoUsableDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace colcfg
