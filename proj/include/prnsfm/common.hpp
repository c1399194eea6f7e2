// Copyright 2026 The PRNSFM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PRNSFM_COMMON_HPP_
#define PRNSFM_COMMON_HPP_

#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prnsfm {

// Error categories surfaced on the command line as `code=<name>`.
enum class ErrorCode {
  kParse,
  kIo,
  kContract,
  kChecksum,
  kVersion,
  kDimension,
  kNumeric,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure carrying the 1-based line number of the offending record.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// 64-bit FNV-1a. Used for vocabulary checksums and run manifests.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update(const void *data, std::size_t size);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t value);

// Seedable generator with platform-independent derived draws. The standard
// distributions are implementation-defined, so uniform draws are computed
// directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Document-global token address.
struct TokenPosition {
  int sentence = 0;
  int token = 0;

  friend auto operator<=>(const TokenPosition &, const TokenPosition &) = default;
};

// Splits on a single character; keeps empty fields.
std::vector<std::string> split(std::string_view text, char delimiter);

std::string to_lower(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace prnsfm

#endif  // PRNSFM_COMMON_HPP_
