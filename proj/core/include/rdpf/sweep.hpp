#pragma once

// Multiplier-grid sweeps: run one solver over a grid of (s_D, s_P) pairs,
// classify each converged point into an operating region, and serialize the
// rows as CSV or JSON deterministically.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rdpf/divergence.hpp"
#include "rdpf/nam.hpp"
#include "rdpf/prob.hpp"
#include "rdpf/ram.hpp"

namespace rdpf {

enum class OutFormat { csv, json };
enum class Units { nats, bits };

// Operating regions of a converged point:
//   I   : perception constraint inactive (s_P ~ 0) with positive rate
//   II  : rate pinned at zero
//   III : both multipliers active with positive rate
enum class Region { I, II, III };

struct SweepConfig {
  Distribution source;
  DistortionMatrix distortion;
  std::string divergence = "kl";   // selector accepted by make_builtin
  Scheme scheme = Scheme::nam;
  std::vector<double> sD_grid;     // strictly increasing, nonnegative
  std::vector<double> sP_grid;     // strictly increasing, nonnegative
  double eps = 1e-9;
  double delta = 1e-12;            // NAM inner tolerance
  long max_outer_iters = 100000;
  SpGuard sp_guard = SpGuard::warn;
  std::string output_path;         // empty = stdout
  OutFormat format = OutFormat::csv;
  Units units = Units::nats;
  double multiplier_tol = 1e-8;    // s treated as zero below this
  double rate_floor = 1e-9;        // rate treated as zero below this
};

struct SweepRow {
  double s_D = 0.0;
  double s_P = 0.0;
  double D = 0.0;
  double P = 0.0;
  double R = 0.0;
  double R_L = 0.0;
  double R_U = 0.0;
  long iterations = 0;
  bool converged = false;
  Region region = Region::I;
  bool region_warning = false;  // set when the point was unclassifiable
};

// Classifies one row. Non-converged or NaN-rate rows are unclassifiable and
// map to region I with the warning flag set.
Region classify_region(double s_D, double s_P, double rate, bool converged,
                       double multiplier_tol, double rate_floor,
                       bool* warning = nullptr);

// Runs the grid row by row (one row = one s_D value, swept over s_P in order
// with warm starts from the previous point's marginal). Rows run in parallel
// across a thread pool capped by the RDPF_THREADS environment variable;
// results are assembled in grid order, so output is deterministic. A point
// that fails or exceeds its iteration budget yields converged = false with
// NaN rate fields.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

// Serialization. CSV uses the exact header
//   s_D,s_P,D,P,R,R_L,R_U,iterations,converged,region
// with 17-significant-digit floats; JSON is an array of objects with the same
// field names. Bits conversion (R, R_L, R_U divided by log 2) happens here at
// write time only.
std::string format_rows(const std::vector<SweepRow>& rows, OutFormat format,
                        Units units);

// Writes to cfg.output_path, or stdout when the path is empty.
void write_output(const std::vector<SweepRow>& rows, const SweepConfig& cfg);

// Loads a sweep configuration from a JSON file. Unknown keys are rejected.
SweepConfig load_config(const std::string& path);

}  // namespace rdpf
