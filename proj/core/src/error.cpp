// ----------------------------------------------------------------------------
// Copyright 2026 The ArgueLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------

#include "argue/error.hpp"

namespace argue {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NearZeroNorm: return "NearZeroNorm";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotADistribution: return "NotADistribution";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::DuplicateToken: return "DuplicateToken";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::UnknownToken: return "UnknownToken";
    case ErrorKind::SequenceTooLong: return "SequenceTooLong";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::PhraseLengthMismatch: return "PhraseLengthMismatch";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::UnknownNegative: return "UnknownNegative";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::NoImages: return "NoImages";
    case ErrorKind::EmptyAttributeSet: return "EmptyAttributeSet";
    case ErrorKind::EmptyTextualSet: return "EmptyTextualSet";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::EmptyTask: return "EmptyTask";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
    case ErrorKind::UnknownSplit: return "UnknownSplit";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::VocabularyHashMismatch: return "VocabularyHashMismatch";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::AlreadyExists: return "AlreadyExists";
    case ErrorKind::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

}  // namespace argue
