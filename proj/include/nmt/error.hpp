// Copyright 2026 The attn-nmt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace nmt {

enum class ErrorKind {
  kDimension,
  kIndex,
  kEncoding,
  kAlignment,
  kIo,
  kContract,
  kCorruption,
  kVersion,
  kSchema,
  kEmptyInput,
  kNonFinite,
  kUsage,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the toolkit. The kind decides the CLI exit
/// code (usage → 1, I/O → 3, everything else → 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define NMT_DEFINE_ERROR(Name, Kind)                                    \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

NMT_DEFINE_ERROR(DimensionError, kDimension)
NMT_DEFINE_ERROR(IndexError, kIndex)
NMT_DEFINE_ERROR(AlignmentError, kAlignment)
NMT_DEFINE_ERROR(IoError, kIo)
NMT_DEFINE_ERROR(ContractError, kContract)
NMT_DEFINE_ERROR(CorruptionError, kCorruption)
NMT_DEFINE_ERROR(VersionError, kVersion)
NMT_DEFINE_ERROR(SchemaError, kSchema)
NMT_DEFINE_ERROR(EmptyInputError, kEmptyInput)
NMT_DEFINE_ERROR(NonFiniteLossError, kNonFinite)
NMT_DEFINE_ERROR(UsageError, kUsage)

#undef NMT_DEFINE_ERROR

class EncodingError : public Error {
 public:
  EncodingError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorKind::kEncoding, what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace nmt
