#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "cpppkit/capture_histories.hpp"

namespace cpppkit {

/// One real per line; blank lines and `#` comments are skipped.
std::vector<double> parse_real_vector(std::istream& in);
std::vector<double> load_real_vector(const std::filesystem::path& path);

/// One history per line as k characters from {0,1}, optionally followed by a
/// positive multiplicity. Lines are numbered from 1 in ParseError.
CaptureHistories parse_capture_histories(std::istream& in);
CaptureHistories load_capture_histories(const std::filesystem::path& path);

/// Writes identical histories once with their multiplicity, in order of
/// first appearance.
void write_capture_histories(std::ostream& out, const CaptureHistories& data);

}  // namespace cpppkit
