#pragma once

#include <span>
#include <string>
#include <vector>

namespace sps {

// 17-significant-digit formatting; identical inputs yield byte-identical files.
std::string format_g17(double v);

std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// Writes via a temp file and rename so partial output never lands.
void write_text_atomic(const std::string& path, const std::string& content);

} // namespace sps
