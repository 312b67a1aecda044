#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levelfit/box.hpp"
#include "levelfit/fit.hpp"
#include "levelfit/polybasis.hpp"

namespace levelfit {

/// Malformed input file; the message carries "source:line: ...".
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV point cloud: one point per line, comma-separated reals, '#' comments
/// and blank lines ignored. The dimension is taken from the first data row.
PointCloud parse_points(std::istream& in, std::string_view source = "<input>");
PointCloud ingest_points(const std::string& path);

/// "l1,u1;l2,u2;..." -> box.
BoxDomain parse_box(std::string_view text);

/// "2,7,17" -> {2, 7, 17}.
std::vector<int> parse_degrees(std::string_view text);

/// Tensor grid (endpoints included) of `resolution` nodes per axis; columns
/// x1..xn,p,in_set. The first axis varies slowest (row-major).
void write_plot_data(std::ostream& out, const Polynomial& p, const BoxDomain& box, int resolution);

}  // namespace levelfit
