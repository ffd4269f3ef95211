#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ac {

// Full round-trip float formatting used by every CSV/JSON artifact.
std::string fmt_double(double x);

// One CSV row from already-formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

std::string sha256_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

} // namespace ac
