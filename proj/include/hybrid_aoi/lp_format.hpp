#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "hybrid_aoi/linear_model.hpp"

namespace hybrid_aoi {

class LpParseError : public std::runtime_error {
 public:
  LpParseError(int line, const std::string& what)
      : std::runtime_error("LP line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// CPLEX LP text format: Minimize / Subject To / Bounds / Binaries / Generals /
// End. Coefficients are written with round-trip precision.
void write_lp(const LinearModel& model, std::ostream& out);
void export_lp(const LinearModel& model, const std::filesystem::path& path);

// Reads the subset of the LP format that write_lp produces plus the usual
// variants (section aliases, bounds forms, comments, wrapped lines). Variable
// roles are recovered from the x_/s_/z_/w_ naming scheme.
LinearModel read_lp(std::istream& in);
LinearModel import_lp(const std::filesystem::path& path);

}  // namespace hybrid_aoi
