#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wermer/construction.hpp"

namespace wermer {

inline constexpr int kSchemaVersion = 1;

// Reals go out as decimal strings: doubles with 17 significant digits,
// 50-digit coefficients with their full max_digits10.
std::string format_real(double x);
double parse_real(const std::string& s);
std::string format_mp(const mp_real& x);
/// ε = 2^{-exp} as a decimal string (it underflows double past stage 3).
std::string format_dyadic(std::int64_t exp);

std::string save_string(const Construction& con);
void save(const Construction& con, const std::filesystem::path& path);
/// Throws SchemaMismatch on malformed input and InvariantViolation naming
/// the broken check (EPS_MONOTONE, DEGREE, RHO_GAP, C_LADDER, STAGE_INDEX).
Construction load_string(const std::string& text);
Construction load(const std::filesystem::path& path);
void check_invariants(const Construction& con);

enum class ExportKind { FiberSlice, PotentialSlice, MarginMap };
std::string to_string(ExportKind k);

/// Row-major table over a rectangle of the plane.  Values that hit a
/// clamp are stored as the sentinel.
struct GridExport {
  ExportKind kind = ExportKind::PotentialSlice;
  std::string x_axis = "Re", y_axis = "Im", value_name = "value", units = "";
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int nx = 1, ny = 1;
  std::vector<double> values;
  double clamp_sentinel = -1e300;
  std::vector<std::string> notes;

  double x(int i) const { return nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1); }
  double y(int j) const { return ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1); }
};

std::string to_csv(const GridExport& g);
void write_csv(const GridExport& g, const std::filesystem::path& path);
/// Binary P5 graymap; values are clamped to [lo, hi] and scaled to 0..255.
std::string to_pgm(const GridExport& g, double lo, double hi);
void write_pgm(const GridExport& g, double lo, double hi, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace wermer
