#pragma once

#include <filesystem>
#include <string>

namespace dysalign {

// Whole-file helpers; both throw IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace dysalign
