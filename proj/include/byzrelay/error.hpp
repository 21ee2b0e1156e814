/*
 * Copyright 2026 The byzrelay Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BYZRELAY_ERROR_HPP
#define BYZRELAY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace byzrelay {

/// Caller supplied something malformed: bad lengths, symbols outside the
/// alphabet, invalid pmfs, unparsable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Target rates outside what the channel supports.
class RateError : public InputError {
 public:
  using InputError::InputError;
};

/// The admissible operating-rate window is empty.
class InfeasibleError : public InputError {
 public:
  using InputError::InputError;
};

/// A configured size cap (codebook size, decoder work) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typical-set sampling could not produce a member.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace byzrelay

#endif  // BYZRELAY_ERROR_HPP
