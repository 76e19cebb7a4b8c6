#pragma once
// Small I/O helpers shared by the serializers.

#include <filesystem>
#include <string>

#include <json.hpp>

namespace learnad {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace learnad
