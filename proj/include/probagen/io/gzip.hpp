#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace probagen::io {

bool is_gzip(std::string_view bytes);

/// Deterministic gzip (no mtime, no file name in the header).
std::string gzip_compress(std::string_view bytes);

/// Throws ParseError on corrupt or truncated input.
std::string gzip_decompress(std::string_view bytes);

/// Reads a whole file, inflating it when it carries the gzip magic.
std::string read_file(const std::filesystem::path& path);

/// Writes `bytes`, gzip-compressed when the path ends in `.gz`.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace probagen::io
