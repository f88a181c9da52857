// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace qrtlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

inline void require_dim(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

inline void require_size(bool ok, const std::string& msg) {
  if (!ok) throw SizeGuardError(msg);
}

}  // namespace qrtlab
