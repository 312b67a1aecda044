#include <cstdio>
#include <string>

#include "levelfit/format.hpp"
#include "levelfit/lp.hpp"

namespace levelfit {
namespace {

std::string entity_name(char prefix, Eigen::Index k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%07ld", prefix, static_cast<long>(k + 1));
  return buf;
}

// Pads `s` with spaces up to (0-based) column `col`.
void pad_to(std::string& s, std::size_t col) {
  if (s.size() < col) s.append(col - s.size(), ' ');
}

// Fixed-format data line: fields start at columns 2, 5, 15, 25. Values longer
// than the 12-character field run past it; names always fit.
std::string data_line(std::string_view code, std::string_view name1, std::string_view name2, std::string_view value) {
  std::string line = " ";
  line += code;
  pad_to(line, 4);
  line += name1;
  if (!name2.empty()) {
    pad_to(line, 14);
    line += name2;
  }
  if (!value.empty()) {
    pad_to(line, 24);
    line += value;
  }
  return line;
}

}  // namespace

void export_mps(const LpProblem& problem, std::ostream& out, std::string_view name) {
  problem.validate();
  if (problem.num_rows() > 9'999'999 || problem.num_cols() > 9'999'999)
    throw std::invalid_argument("export_mps: problem too large for 8-character names");
  const Eigen::Index m = problem.num_rows();
  const Eigen::Index n = problem.num_cols();

  out << "NAME          " << name << "\n";
  out << "OBJSENSE\n    MIN\n";
  out << "ROWS\n";
  out << " N  OBJ\n";
  for (Eigen::Index i = 0; i < m; ++i) out << " G  " << entity_name('R', i) << "\n";

  out << "COLUMNS\n";
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::string col = entity_name('C', j);
    // Objective entry always written so every column is declared.
    out << data_line("", col, "OBJ", format_double(problem.objective[j])) << "\n";
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = problem.rows(i, j);
      if (a != 0.0) out << data_line("", col, entity_name('R', i), format_double(a)) << "\n";
    }
  }

  out << "RHS\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    const double b = problem.lower[i];
    if (b != 0.0) out << data_line("", "RHS", entity_name('R', i), format_double(b)) << "\n";
  }

  out << "BOUNDS\n";
  for (Eigen::Index j = 0; j < n; ++j) out << data_line("FR", "BND", entity_name('C', j), "") << "\n";
  out << "ENDATA\n";
}

}  // namespace levelfit
