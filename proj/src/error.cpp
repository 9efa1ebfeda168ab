/* Copyright 2026 The dagoffload Authors
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

#include "dagoffload/error.hpp"

namespace dagoffload {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::SelfEdge: return "SelfEdge";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::InvalidTask: return "InvalidTask";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EpisodeFinished: return "EpisodeFinished";
    case ErrorCode::IncompletePlan: return "IncompletePlan";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonScalarLoss: return "NonScalarLoss";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingDataset: return "MissingDataset";
    }
    return "Unknown";
}

} // namespace dagoffload
