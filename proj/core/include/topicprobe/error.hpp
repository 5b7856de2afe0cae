#pragma once

#include <stdexcept>
#include <string>

namespace topicprobe {

// Bad input: malformed files, violated preconditions, inconsistent arguments.
// The command-line tool maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantity that is mathematically undefined for the given input, e.g. AUC
// on a single-class test set or correlation of a constant series. Callers are
// expected to catch this and skip or report, not abort.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Failure while carrying out a valid request (I/O, numerical breakdown).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topicprobe
