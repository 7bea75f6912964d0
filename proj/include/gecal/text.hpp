#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gecal {

using Tokens = std::vector<std::string>;

/// Splits on runs of ASCII whitespace; no empty tokens.
Tokens split_ws(std::string_view text);

/// Splits on '\n'. A trailing newline does not produce a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split_on(std::string_view text, std::string_view sep);

std::string join(const Tokens& tokens, std::string_view sep = " ");

bool has_whitespace(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Fixed-precision decimal, e.g. fixed(1.4281, 3) == "1.428".
std::string fixed(double value, int decimals);

}  // namespace gecal
