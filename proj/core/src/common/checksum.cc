#include "xrouter/common/checksum.h"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "xrouter/common/error.h"

namespace xrouter {

uint32_t crc32(std::span<const unsigned char> bytes, uint32_t prior) {
  uLong crc = prior;
  const unsigned char* data = bytes.data();
  size_t left = bytes.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<size_t>(left, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    left -= chunk;
  }
  return static_cast<uint32_t>(crc);
}

uint32_t crc32(std::string_view bytes, uint32_t prior) {
  return crc32(std::span(reinterpret_cast<const unsigned char*>(bytes.data()),
                         bytes.size()),
               prior);
}

std::string crc32_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", crc32(bytes));
  return buf;
}

}  // namespace xrouter
