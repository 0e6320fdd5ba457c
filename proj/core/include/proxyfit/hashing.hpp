#pragma once

#include <span>
#include <string>

namespace proxyfit {

// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::string& path);

}  // namespace proxyfit
