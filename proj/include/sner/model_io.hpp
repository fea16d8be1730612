#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sner/crf.hpp"
#include "sner/svm.hpp"

namespace sner {

// Model container, all integers and doubles little-endian:
//   magic      8 bytes  "SNERMODL"
//   version    u32      kModelFormatVersion
//   type       u32      1 = CRF, 2 = linear SVM
//   length     u64      payload byte count
//   payload    ...
//   checksum   u64      FNV-1a 64 of the payload bytes
// Strings are u32 byte length followed by UTF-8 bytes; doubles are IEEE-754
// binary64 bit patterns. The payload layouts are documented in
// docs/file-formats.md.
inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelType : std::uint32_t { Crf = 1, Svm = 2 };

std::uint64_t fnv1a64(std::string_view bytes);

std::string encode_model(const CrfModel& model);
std::string encode_model(const LinearModel& model);

using AnyModel = std::variant<CrfModel, LinearModel>;

// Throws DataError on bad magic, unsupported version, truncation or checksum
// mismatch.
AnyModel decode_model(std::string_view bytes);

void save_model(const std::string& path, const CrfModel& model);
void save_model(const std::string& path, const LinearModel& model);
AnyModel load_model(const std::string& path);

}  // namespace sner
