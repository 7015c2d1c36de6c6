#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sitehunt {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`. Parent
/// directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sitehunt
