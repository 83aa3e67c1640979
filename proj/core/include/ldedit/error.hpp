// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ldedit {

/// Precondition violated by the caller (bad range, shape mismatch, unknown key).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while running a computation or touching the filesystem.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file contents.
class FormatError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

namespace detail {

[[noreturn]] inline void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace detail

#define LDEDIT_REQUIRE(cond, msg)                                  \
  do {                                                             \
    if (!(cond)) ::ldedit::detail::throw_invalid(std::string(msg)); \
  } while (false)

}  // namespace ldedit
