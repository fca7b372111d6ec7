#pragma once

// CSV serialization of curves: header `theta,x,y`, one row per sample, θ in
// radians ascending from 0 on the uniform grid.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "unred/curve.hpp"

namespace unred {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_curve_csv(std::ostream& os, const DiscreteCurve& curve);
void write_curve_csv(const std::filesystem::path& path, const DiscreteCurve& curve);

/// Throws ParseError on malformed input or a θ column that is not the
/// uniform grid (relative tolerance 1e-9 of 2π); RegularityError when the
/// samples do not form a valid curve.
DiscreteCurve read_curve_csv(std::istream& is);
DiscreteCurve read_curve_csv(const std::filesystem::path& path);

}  // namespace unred
