#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cpppkit {

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& value);
std::vector<std::string> parse_text_list(const std::string& value);

}  // namespace cpppkit
