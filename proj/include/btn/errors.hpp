/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace btn {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension or shape mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter value (rank out of range, bad configuration, ...).
class ValueError : public Error {
public:
    using Error::Error;
};

/// Solver-side failure (variable limit exceeded, backend error, ...).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Inconsistent tensor network topology.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// File I/O or format violation.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace btn
