#pragma once

#include <string>

namespace reid {

// Temp-file + rename so interrupted runs never leave truncated artifacts.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace reid
