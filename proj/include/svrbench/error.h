// include/svrbench/error.h

// Copyright 2026  SVRBench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SVRBENCH_ERROR_H_
#define SVRBENCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace svrbench {

// Base class for all errors raised by this library.  The CLI maps the
// concrete type to an exit code, so throw the most specific one that applies.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Data or format problems: broken input files, unresolvable ids,
// inconsistent shapes, too little data for the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class MissingUtterance : public DataError {
 public:
  using DataError::DataError;
};

class MissingLabels : public DataError {
 public:
  using DataError::DataError;
};

class EmptyClass : public DataError {
 public:
  using DataError::DataError;
};

class MissingCell : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateCohort : public DataError {
 public:
  using DataError::DataError;
};

// Numerical failures: degenerate vectors, diverging optimization,
// covariances that stay singular after regularization.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalDivergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularCovariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace svrbench

#endif  // SVRBENCH_ERROR_H_
