/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace dwq {

/// Base for every error raised by the library. The CLI maps the subclasses
/// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the physical or mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical invariant (norm, trace, positivity, energy) broke beyond its
/// tolerance; usually the step size is too coarse.
class ToleranceError : public Error {
public:
    using Error::Error;
};

/// Grid too small or too coarse for the state it has to hold.
class GridError : public Error {
public:
    using Error::Error;
};

/// Estimated memory or work exceeds the configured ceiling.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Malformed experiment document.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Analysis could not find the structure it was asked to measure.
class NoFringeError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw DomainError(what);
}

} // namespace detail
} // namespace dwq
