/*
 * Copyright (c) 2026 the mixmine authors.
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

#ifndef MIXMINE_ERROR_HPP
#define MIXMINE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mixmine {

/// Every failure the library can surface, one code per contract violation.
enum class Errc {
  // parameter validation
  NotPrime,
  ModulusTooSmall,
  BitLengthTooSmall,
  TooFewSites,
  // modular arithmetic
  NotInvertible,
  // masking
  CountOutOfRange,
  SiteIndexOutOfRange,
  // aggregation and protocol state machines
  RoundMismatch,
  IncompleteSet,
  DuplicateUpload,
  LengthMismatch,
  StaleRound,
  CountOverflow,
  MissingSubsetCount,
  AlignmentMismatch,
  WireOverflow,
  MalformedFrame,
  // keystream
  BadSeedLength,
  // transport and secure channel
  Closed,
  IoFailure,
  Timeout,
  AuthFailure,
  ReplayRejected,
  // dataset ingestion
  ParseError,
  EmptyDataset,
  UniverseTooLarge,
  // configuration
  BadConfig,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mixmine

#endif  // MIXMINE_ERROR_HPP
