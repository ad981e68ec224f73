//
// Copyright 2026 The gdc Authors.
//
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
//

#ifndef GDC_CHECKSUM_H_
#define GDC_CHECKSUM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace gdc {

// IEEE CRC-32 (zlib polynomial).
std::uint32_t crc32(std::span<const std::byte> bytes, std::uint32_t seed = 0);
std::uint32_t crc32(std::string_view bytes, std::uint32_t seed = 0);

// Eight lowercase hex digits.
std::string crc32_hex(std::uint32_t value);

std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace gdc

#endif  // GDC_CHECKSUM_H_
