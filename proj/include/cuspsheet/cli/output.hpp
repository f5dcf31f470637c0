#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cuspsheet::cli {

// 17 significant digits, "nan"/"inf" spelled out.
std::string fmt(double x);

std::string sha256_hex(std::string_view bytes);

// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cuspsheet::cli
