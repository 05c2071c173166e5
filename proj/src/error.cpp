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

#include "vna/error.hpp"

namespace vna {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::BadIntensity: return "BadIntensity";
    case ErrorCode::InfeasibleLayout: return "InfeasibleLayout";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SegmentOutOfRange: return "SegmentOutOfRange";
    case ErrorCode::AssetNotFound: return "AssetNotFound";
    case ErrorCode::AssetDecodeError: return "AssetDecodeError";
    case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::BadPermutation: return "BadPermutation";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::MissingWordTimes: return "MissingWordTimes";
    case ErrorCode::TranscoderMissing: return "TranscoderMissing";
    case ErrorCode::UnreadableMedia: return "UnreadableMedia";
    case ErrorCode::PipeProtocolError: return "PipeProtocolError";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::MissingLevel: return "MissingLevel";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::PredictorFailure: return "PredictorFailure";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotGenerated: return "NotGenerated";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace vna
