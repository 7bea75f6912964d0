#pragma once

#include <string>
#include <string_view>

namespace gecal {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string sha256_file(const std::string& path);

}  // namespace gecal
