#pragma once

#include <stdexcept>
#include <string>

namespace layergraph {

/// A limit object is not defined for the given inputs, e.g. a mixed binomial
/// law whose normalising cross moment is zero or infinite.
class UndefinedQuantity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver hit its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or corrupt input (configs, dumps, serialized distributions).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace layergraph
