#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace oppscreen::io {

std::string read_file(const std::filesystem::path& path);

// One entry per line, trimmed; blank lines and lines starting with '#' skipped.
std::vector<std::string> read_list(const std::filesystem::path& path);

// Writes to "<path>.tmp" and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace oppscreen::io
