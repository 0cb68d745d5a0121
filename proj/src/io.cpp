#include "cpppkit/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return in;
}

}  // namespace

std::vector<double> parse_real_vector(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(strip_comment(line));
    std::string token;
    if (!(fields >> token)) continue;
    std::string extra;
    if (fields >> extra) throw ParseError("expected one value per line", number);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError("not a number: " + token, number);
    out.push_back(value);
  }
  if (out.empty()) throw ParseError("no values", number);
  return out;
}

std::vector<double> load_real_vector(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_real_vector(in);
}

CaptureHistories parse_capture_histories(std::istream& in) {
  std::vector<std::uint8_t> cells;
  std::size_t k = 0;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(strip_comment(line));
    std::string history;
    if (!(fields >> history)) continue;
    if (k == 0) k = history.size();
    if (history.size() != k)
      throw ParseError("history has " + std::to_string(history.size()) + " occasions, expected " + std::to_string(k),
                       number);
    bool any = false;
    for (char c : history) {
      if (c != '0' && c != '1') throw ParseError("histories may only contain 0 and 1", number);
      any = any || c == '1';
    }
    if (!any) throw ParseError("history with no captures", number);

    std::int64_t count = 1;
    std::string token;
    if (fields >> token) {
      const auto* end = token.data() + token.size();
      const auto [ptr, ec] = std::from_chars(token.data(), end, count);
      if (ec != std::errc() || ptr != end || count < 1)
        throw ParseError("multiplicity must be a positive integer", number);
      if (fields >> token) throw ParseError("unexpected trailing field", number);
    }
    for (std::int64_t c = 0; c < count; ++c)
      for (char ch : history) cells.push_back(ch == '1' ? 1 : 0);
  }
  if (k < 2) throw ParseError("need at least one history with two or more occasions", number);
  return CaptureHistories(k, std::move(cells));
}

CaptureHistories load_capture_histories(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_capture_histories(in);
}

void write_capture_histories(std::ostream& out, const CaptureHistories& data) {
  const auto k = data.occasions();
  std::vector<std::string> order;
  std::map<std::string, std::int64_t> counts;
  for (std::size_t i = 0; i < data.individuals(); ++i) {
    std::string h(k, '0');
    for (std::size_t t = 0; t < k; ++t)
      if (data.seen(i, t)) h[t] = '1';
    if (counts[h]++ == 0) order.push_back(h);
  }
  for (const auto& h : order) out << h << ' ' << counts[h] << '\n';
}

}  // namespace cpppkit
