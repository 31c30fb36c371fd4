#include "rdpf/sweep.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace rdpf {

using detail::require;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* region_name(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
  }
  return "I";
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_grid(const std::vector<double>& g, const char* name) {
  require(!g.empty(), std::string("sweep: ") + name + " is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(std::isfinite(g[i]) && g[i] >= 0.0,
            std::string("sweep: ") + name + " entries must be finite, >= 0");
    if (i > 0) {
      require(g[i] > g[i - 1],
              std::string("sweep: ") + name + " must be strictly increasing");
    }
  }
}

unsigned worker_count(std::size_t rows) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("RDPF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      hw = std::min<unsigned>(hw, unsigned(v));
    }
  }
  return unsigned(std::min<std::size_t>(hw, rows));
}

SweepRow failed_row(double s_D, double s_P, const SweepConfig& cfg) {
  SweepRow row;
  row.s_D = s_D;
  row.s_P = s_P;
  row.D = kNaN;
  row.P = kNaN;
  row.R = kNaN;
  row.R_L = kNaN;
  row.R_U = kNaN;
  row.iterations = 0;
  row.converged = false;
  row.region = classify_region(s_D, s_P, kNaN, false, cfg.multiplier_tol,
                               cfg.rate_floor, &row.region_warning);
  return row;
}

}  // namespace

Region classify_region(double s_D, double s_P, double rate, bool converged,
                       double multiplier_tol, double rate_floor,
                       bool* warning) {
  if (warning != nullptr) *warning = false;
  if (!converged || std::isnan(rate)) {
    if (warning != nullptr) *warning = true;
    return Region::I;
  }
  if (rate <= rate_floor) return Region::II;
  if (s_D > multiplier_tol && s_P > multiplier_tol) return Region::III;
  if (s_P <= multiplier_tol) return Region::I;
  // s_D ~ 0 with positive rate should not occur at an optimum.
  if (warning != nullptr) *warning = true;
  return Region::I;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  require(cfg.source.size() >= 2, "sweep: source must have >= 2 symbols");
  require(cfg.source.size() == cfg.distortion.input_size(),
          "sweep: source/distortion size mismatch");
  check_grid(cfg.sD_grid, "sD_grid");
  check_grid(cfg.sP_grid, "sP_grid");
  require(cfg.eps > 0.0, "sweep: eps must be positive");
  require(cfg.delta > 0.0, "sweep: delta must be positive");
  require(cfg.max_outer_iters > 0, "sweep: iteration cap must be positive");

  const FDivergenceSpec spec = make_builtin(cfg.divergence);
  const bool needs_sp = [&] {
    for (double sp : cfg.sP_grid) {
      if (sp > 0.0) return true;
    }
    return false;
  }();
  if (cfg.scheme == Scheme::nam && !spec.smooth && needs_sp) {
    throw std::invalid_argument(
        "sweep: divergence '" + cfg.divergence +
        "' is non-smooth; the Newton scheme cannot run it, use scheme=ram");
  }

  const std::size_t nrows = cfg.sD_grid.size();
  const std::size_t ncols = cfg.sP_grid.size();
  std::vector<std::vector<SweepRow>> grid(nrows);

  // One task per s_D row; within a row the s_P points run in order so each
  // solve warm-starts from its neighbor. Row results land in their own slot,
  // making the assembled output independent of scheduling.
  std::atomic<std::size_t> next{0};
  auto run_row = [&](std::size_t i) {
    const double s_D = cfg.sD_grid[i];
    std::vector<SweepRow>& out = grid[i];
    out.reserve(ncols);
    std::optional<Distribution> warm;
    auto solve_point = [&](const LagrangePair& s,
                           const std::optional<Distribution>& q0) {
      if (cfg.scheme == Scheme::nam) {
        NewtonConfig ncfg;
        ncfg.delta = cfg.delta;
        return solve_nam(cfg.source, s, cfg.distortion, spec, cfg.eps, ncfg,
                         q0, cfg.max_outer_iters);
      }
      RamConfig rcfg;
      rcfg.eps = cfg.eps;
      rcfg.max_iters = cfg.max_outer_iters;
      rcfg.sp_guard = cfg.sp_guard;
      return solve_ram(cfg.source, s, cfg.distortion, spec, rcfg, q0);
    };
    for (std::size_t jcol = 0; jcol < ncols; ++jcol) {
      const double s_P = cfg.sP_grid[jcol];
      const LagrangePair s{s_D, s_P};
      SweepRow row;
      try {
        SolveReport rep;
        try {
          rep = solve_point(s, warm);
        } catch (const std::exception&) {
          // A warm start inherited from a degenerate neighbor can sink the
          // solve; a cold uniform start is the deterministic fallback.
          if (!warm.has_value()) throw;
          rep = solve_point(s, std::nullopt);
        }
        warm = rep.final_marginal;
        row.s_D = s_D;
        row.s_P = s_P;
        row.iterations = rep.outer_iters;
        row.converged = rep.converged;
        if (rep.converged) {
          row.D = rep.D_s;
          row.P = rep.P_s;
          row.R = rep.rate;
          row.R_L = rep.lower_bound;
          row.R_U = rep.upper_bound;
        } else {
          // Keep the certified operating point of the last iterate but
          // flag the rate fields as unusable.
          row.D = rep.D_s;
          row.P = rep.P_s;
          row.R = kNaN;
          row.R_L = kNaN;
          row.R_U = kNaN;
        }
        row.region =
            classify_region(s_D, s_P, row.R, rep.converged,
                            cfg.multiplier_tol, cfg.rate_floor,
                            &row.region_warning);
      } catch (const std::exception&) {
        row = failed_row(s_D, s_P, cfg);
        warm.reset();
      }
      out.push_back(row);
    }
  };

  const unsigned workers = worker_count(nrows);
  if (workers <= 1) {
    for (std::size_t i = 0; i < nrows; ++i) run_row(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= nrows) break;
          run_row(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<SweepRow> rows;
  rows.reserve(nrows * ncols);
  for (auto& r : grid) {
    for (auto& row : r) rows.push_back(row);
  }
  return rows;
}

std::string format_rows(const std::vector<SweepRow>& rows, OutFormat format,
                        Units units) {
  const double scale = units == Units::bits ? 1.0 / std::log(2.0) : 1.0;
  if (format == OutFormat::csv) {
    std::string out = "s_D,s_P,D,P,R,R_L,R_U,iterations,converged,region\n";
    for (const SweepRow& r : rows) {
      out += fmt17(r.s_D) + ',' + fmt17(r.s_P) + ',' + fmt17(r.D) + ',' +
             fmt17(r.P) + ',' + fmt17(r.R * scale) + ',' +
             fmt17(r.R_L * scale) + ',' + fmt17(r.R_U * scale) + ',' +
             std::to_string(r.iterations) + ',' +
             (r.converged ? "true" : "false") + ',' + region_name(r.region) +
             '\n';
    }
    return out;
  }
  json arr = json::array();
  for (const SweepRow& r : rows) {
    json obj = json::object();
    obj["s_D"] = r.s_D;
    obj["s_P"] = r.s_P;
    obj["D"] = r.D;
    obj["P"] = r.P;
    obj["R"] = r.R * scale;
    obj["R_L"] = r.R_L * scale;
    obj["R_U"] = r.R_U * scale;
    obj["iterations"] = r.iterations;
    obj["converged"] = r.converged;
    obj["region"] = region_name(r.region);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void write_output(const std::vector<SweepRow>& rows, const SweepConfig& cfg) {
  const std::string text = format_rows(rows, cfg.format, cfg.units);
  if (cfg.output_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("sweep: cannot open output file '" +
                             cfg.output_path + "'");
  }
  f << text;
  f.flush();
  if (!f) {
    throw std::runtime_error("sweep: write failed for '" + cfg.output_path +
                             "'");
  }
}

SweepConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("config: cannot open '" + path + "'");
  }
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: parse error in '" + path +
                             "': " + e.what());
  }
  require(j.is_object(), "config: top level must be a JSON object");

  static const char* known[] = {
      "source",   "distortion", "divergence", "scheme",        "sD_grid",
      "sP_grid",  "eps",        "delta",      "max_outer_iters",
      "sp_guard", "out",        "format",     "units",
      "multiplier_tol", "rate_floor"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    require(ok, "config: unknown key '" + it.key() + "'");
  }

  SweepConfig cfg;
  require(j.contains("source") && j["source"].is_array(),
          "config: 'source' array is required");
  {
    Eigen::VectorXd v(j["source"].size());
    Eigen::Index i = 0;
    for (const auto& e : j["source"]) {
      require(e.is_number(), "config: 'source' entries must be numbers");
      v(i++) = e.get<double>();
    }
    cfg.source = Distribution(v);
  }

  if (j.contains("distortion")) {
    const auto& jd = j["distortion"];
    if (jd.is_string()) {
      require(jd.get<std::string>() == "hamming",
              "config: unknown distortion name '" + jd.get<std::string>() +
                  "'");
      cfg.distortion = DistortionMatrix::hamming(cfg.source.size());
    } else {
      require(jd.is_array() && !jd.empty(),
              "config: 'distortion' must be \"hamming\" or a 2D array");
      const Eigen::Index rows = Eigen::Index(jd.size());
      require(jd[0].is_array(), "config: 'distortion' must be a 2D array");
      const Eigen::Index cols = Eigen::Index(jd[0].size());
      Eigen::MatrixXd m(rows, cols);
      for (Eigen::Index x = 0; x < rows; ++x) {
        require(jd[std::size_t(x)].is_array() &&
                    Eigen::Index(jd[std::size_t(x)].size()) == cols,
                "config: 'distortion' rows must have equal length");
        for (Eigen::Index y = 0; y < cols; ++y) {
          const auto& e = jd[std::size_t(x)][std::size_t(y)];
          require(e.is_number(), "config: distortion entries must be numbers");
          m(x, y) = e.get<double>();
        }
      }
      cfg.distortion = DistortionMatrix(std::move(m));
    }
  } else {
    cfg.distortion = DistortionMatrix::hamming(cfg.source.size());
  }

  if (j.contains("divergence")) {
    cfg.divergence = j["divergence"].get<std::string>();
  }
  if (j.contains("scheme")) {
    const std::string sch = j["scheme"].get<std::string>();
    require(sch == "nam" || sch == "ram",
            "config: scheme must be \"nam\" or \"ram\"");
    cfg.scheme = sch == "nam" ? Scheme::nam : Scheme::ram;
  }
  auto read_grid = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    require(j[key].is_array(), std::string("config: '") + key +
                                   "' must be an array of numbers");
    out.clear();
    for (const auto& e : j[key]) {
      require(e.is_number(), std::string("config: '") + key +
                                 "' entries must be numbers");
      out.push_back(e.get<double>());
    }
  };
  read_grid("sD_grid", cfg.sD_grid);
  read_grid("sP_grid", cfg.sP_grid);

  auto read_num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    require(j[key].is_number(), std::string("config: '") + key +
                                    "' must be a number");
    out = j[key].get<double>();
  };
  read_num("eps", cfg.eps);
  read_num("delta", cfg.delta);
  read_num("multiplier_tol", cfg.multiplier_tol);
  read_num("rate_floor", cfg.rate_floor);
  if (j.contains("max_outer_iters")) {
    require(j["max_outer_iters"].is_number_integer(),
            "config: 'max_outer_iters' must be an integer");
    cfg.max_outer_iters = j["max_outer_iters"].get<long>();
  }
  if (j.contains("sp_guard")) {
    const std::string g = j["sp_guard"].get<std::string>();
    if (g == "off") {
      cfg.sp_guard = SpGuard::off;
    } else if (g == "warn") {
      cfg.sp_guard = SpGuard::warn;
    } else if (g == "reject") {
      cfg.sp_guard = SpGuard::reject;
    } else {
      throw std::invalid_argument("config: sp_guard must be off|warn|reject");
    }
  }
  if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
  if (j.contains("format")) {
    const std::string fmt = j["format"].get<std::string>();
    require(fmt == "csv" || fmt == "json",
            "config: format must be \"csv\" or \"json\"");
    cfg.format = fmt == "csv" ? OutFormat::csv : OutFormat::json;
  }
  if (j.contains("units")) {
    const std::string u = j["units"].get<std::string>();
    require(u == "nats" || u == "bits",
            "config: units must be \"nats\" or \"bits\"");
    cfg.units = u == "nats" ? Units::nats : Units::bits;
  }
  return cfg;
}

}  // namespace rdpf
