#include "unred/curve_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "unred/errors.hpp"

namespace unred {
namespace {

constexpr double kGridTolerance = 1e-9;

double parse_field(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("curve csv: bad number '" + std::string(text) + "' on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_curve_csv(std::ostream& os, const DiscreteCurve& curve) {
  os << "theta,x,y\n";
  for (std::size_t j = 0; j < curve.size(); ++j) {
    os << format_double(curve.theta(j)) << ',' << format_double(curve[j].x) << ',' << format_double(curve[j].y)
       << '\n';
  }
}

void write_curve_csv(const std::filesystem::path& path, const DiscreteCurve& curve) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  write_curve_csv(os, curve);
}

DiscreteCurve read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("curve csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta,x,y") throw ParseError("curve csv: expected header 'theta,x,y', got '" + line + "'");

  std::vector<double> thetas;
  std::vector<Vec2> pts;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") {
      // Blank lines are only allowed at the very end.
      std::string rest;
      while (std::getline(is, rest)) {
        if (!rest.empty() && rest != "\r") throw ParseError("curve csv: blank line inside data at line " + std::to_string(lineno));
      }
      break;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw ParseError("curve csv: expected 3 columns on line " + std::to_string(lineno));
    }
    const std::string_view sv(line);
    thetas.push_back(parse_field(sv.substr(0, c1), lineno));
    pts.push_back({parse_field(sv.substr(c1 + 1, c2 - c1 - 1), lineno), parse_field(sv.substr(c2 + 1), lineno)});
  }

  const std::size_t n = pts.size();
  if (n == 0) throw ParseError("curve csv: no samples");
  for (std::size_t j = 0; j < n; ++j) {
    const double expected = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    if (std::abs(thetas[j] - expected) > kGridTolerance * kTwoPi) {
      throw ParseError("curve csv: theta column is not the uniform grid at row " + std::to_string(j));
    }
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path.string());
  return read_curve_csv(is);
}

}  // namespace unred
