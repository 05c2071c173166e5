// Copyright 2026 The vna Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VNA_ERROR_HPP
#define VNA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace vna {

enum class ErrorCode {
  // config
  UnknownKind,
  UnknownMode,
  EmptyInterval,
  BadIntensity,
  InfeasibleLayout,
  ParseError,
  // audio / video / text
  SegmentOutOfRange,
  AssetNotFound,
  AssetDecodeError,
  BoxOutOfBounds,
  BadPermutation,
  RangeOutOfBounds,
  EmptyLexicon,
  MissingWordTimes,
  // media_io
  TranscoderMissing,
  UnreadableMedia,
  PipeProtocolError,
  EncodeError,
  // evaluation
  BadInterval,
  MissingLevel,
  EmptyLevel,
  PredictorFailure,
  MissingLabel,
  // service
  NotFound,
  NotGenerated,
  GenerationFailed,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vna

#endif  // VNA_ERROR_HPP
