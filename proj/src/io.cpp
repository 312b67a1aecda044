#include "levelfit/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "levelfit/format.hpp"
#include "levelfit/grid.hpp"

namespace levelfit {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

}  // namespace

PointCloud parse_points(std::istream& in, std::string_view source) {
  std::vector<double> values;
  int dimension = 0;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    return IngestError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, ',');
    if (dimension == 0) {
      dimension = static_cast<int>(fields.size());
    } else if (static_cast<int>(fields.size()) != dimension) {
      throw fail("expected " + std::to_string(dimension) + " columns, found " + std::to_string(fields.size()));
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v) || !std::isfinite(v)) {
        throw fail("column " + std::to_string(k + 1) + " is not a finite number: '" + std::string(fields[k]) + "'");
      }
      values.push_back(v);
    }
  }
  if (dimension == 0) throw IngestError(std::string(source) + ": no points found");
  PointCloud cloud;
  const auto rows = static_cast<Eigen::Index>(values.size() / static_cast<std::size_t>(dimension));
  cloud.points = Eigen::Map<Points>(values.data(), rows, dimension);
  return cloud;
}

PointCloud ingest_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path + ": cannot open file");
  return parse_points(in, path);
}

BoxDomain parse_box(std::string_view text) {
  std::vector<double> lower, upper;
  for (std::string_view axis : split(text, ';')) {
    if (axis.empty()) continue;
    const auto bounds = split(axis, ',');
    double lo = 0.0, hi = 0.0;
    if (bounds.size() != 2 || !parse_double(bounds[0], lo) || !parse_double(bounds[1], hi)) {
      throw std::invalid_argument("box axis '" + std::string(axis) + "' must be 'lower,upper'");
    }
    lower.push_back(lo);
    upper.push_back(hi);
  }
  return BoxDomain(std::move(lower), std::move(upper));
}

std::vector<int> parse_degrees(std::string_view text) {
  std::vector<int> degrees;
  for (std::string_view item : split(text, ',')) {
    double v = 0.0;
    if (!parse_double(item, v) || v < 0 || v != static_cast<int>(v))
      throw std::invalid_argument("degree '" + std::string(item) + "' is not a nonnegative integer");
    degrees.push_back(static_cast<int>(v));
  }
  return degrees;
}

void write_plot_data(std::ostream& out, const Polynomial& p, const BoxDomain& box, int resolution) {
  const int n = box.dimension();
  if (p.dimension() != n) throw std::invalid_argument("plot data: dimension mismatch");
  const Points grid = build_grid(box, GridSpec::tensor(resolution));
  out << "# levelfit plot data: " << resolution << " nodes per axis, " << grid.rows()
      << " rows; first axis varies slowest (row-major), in_set = p >= 1\n";
  for (int axis = 0; axis < n; ++axis) out << "x" << axis + 1 << ",";
  out << "p,in_set\n";
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const auto x = point(grid, i);
    for (double xi : x) out << format_double(xi) << ",";
    const double value = p(x);
    out << format_double(value) << "," << (value >= 1.0 ? 1 : 0) << "\n";
  }
}

}  // namespace levelfit
