#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace xrouter {

uint32_t crc32(std::span<const unsigned char> bytes, uint32_t prior = 0);
uint32_t crc32(std::string_view bytes, uint32_t prior = 0);

/// Hex digest of a file's CRC32; used for artifact checksums in run metadata.
std::string crc32_file_hex(const std::string& path);

}  // namespace xrouter
