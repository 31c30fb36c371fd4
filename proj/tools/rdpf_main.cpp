// Command-line front end: multiplier sweeps, single-point solves, spectral
// diagnostics, and the brute-force reference, over a JSON config with flag
// overrides.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <rdpf/rdpf.hpp>

namespace {

using nlohmann::json;

// Grid specs: "a:b:n" (linear, inclusive) or "log:a:b:n" (geometric).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);

  bool logspace = false;
  std::size_t off = 0;
  if (!parts.empty() && parts[0] == "log") {
    logspace = true;
    off = 1;
  }
  if (parts.size() != off + 3) {
    throw std::invalid_argument("grid spec must be a:b:n or log:a:b:n, got '" +
                                text + "'");
  }
  const double a = std::stod(parts[off]);
  const double b = std::stod(parts[off + 1]);
  const long n = std::stol(parts[off + 2]);
  if (n < 1) throw std::invalid_argument("grid spec: n must be >= 1");
  std::vector<double> out;
  out.reserve(std::size_t(n));
  if (n == 1) {
    out.push_back(a);
    return out;
  }
  if (logspace) {
    if (!(a > 0.0 && b > 0.0)) {
      throw std::invalid_argument("grid spec: log grids need a, b > 0");
    }
    const double la = std::log(a), lb = std::log(b);
    for (long i = 0; i < n; ++i) {
      out.push_back(std::exp(la + (lb - la) * double(i) / double(n - 1)));
    }
  } else {
    for (long i = 0; i < n; ++i) {
      out.push_back(a + (b - a) * double(i) / double(n - 1));
    }
  }
  return out;
}

rdpf::Distribution parse_source(const std::string& text) {
  std::vector<double> vals;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      vals.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) vals.push_back(std::stod(cur));
  Eigen::VectorXd v(Eigen::Index(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(Eigen::Index(i)) = vals[i];
  return rdpf::Distribution(v);
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    json row = json::array();
    for (Eigen::Index y = 0; y < m.cols(); ++y) row.push_back(m(x, y));
    arr.push_back(std::move(row));
  }
  return arr;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output file '" + out_path + "'");
  }
  f << text;
}

struct CommonFlags {
  std::string config_path;
  std::string scheme;
  std::string divergence;
  double eps = -1.0;
  double delta = -1.0;
  std::string out;
  std::string format;
  std::string units;
  std::string sd_grid;
  std::string sp_grid;
  std::string source;
  std::string distortion;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--config", fl.config_path, "JSON config file");
  cmd->add_option("--scheme", fl.scheme, "Solver scheme: nam or ram")
      ->check(CLI::IsMember({"nam", "ram"}));
  cmd->add_option("--divergence", fl.divergence,
                  "kl | js | tv | chi2 | alpha:<float> | arctan_tv:<int>");
  cmd->add_option("--eps", fl.eps, "Duality-gap stopping tolerance");
  cmd->add_option("--delta", fl.delta, "Inner Newton stopping tolerance");
  cmd->add_option("--out", fl.out, "Output path (default: stdout)");
  cmd->add_option("--format", fl.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--units", fl.units, "Rate units: nats or bits")
      ->check(CLI::IsMember({"nats", "bits"}));
  cmd->add_option("--sd-grid", fl.sd_grid, "s_D grid: a:b:n or log:a:b:n");
  cmd->add_option("--sp-grid", fl.sp_grid, "s_P grid: a:b:n or log:a:b:n");
  cmd->add_option("--source", fl.source,
                  "Source distribution as a comma list, e.g. 0.15,0.85");
  cmd->add_option("--distortion", fl.distortion,
                  "Distortion matrix name (hamming)");
}

// Builds the effective sweep config: file first, then flag overrides.
rdpf::SweepConfig effective_config(const CommonFlags& fl) {
  rdpf::SweepConfig cfg;
  if (!fl.config_path.empty()) {
    cfg = rdpf::load_config(fl.config_path);
  }
  if (!fl.source.empty()) cfg.source = parse_source(fl.source);
  if (!fl.distortion.empty()) {
    if (fl.distortion != "hamming") {
      throw std::invalid_argument("--distortion: unknown name '" +
                                  fl.distortion + "'");
    }
    if (cfg.source.size() == 0) {
      throw std::invalid_argument("--distortion needs a source first");
    }
    cfg.distortion = rdpf::DistortionMatrix::hamming(cfg.source.size());
  }
  if (cfg.source.size() > 0 && cfg.distortion.input_size() == 0) {
    cfg.distortion = rdpf::DistortionMatrix::hamming(cfg.source.size());
  }
  if (!fl.scheme.empty()) {
    cfg.scheme = fl.scheme == "nam" ? rdpf::Scheme::nam : rdpf::Scheme::ram;
  }
  if (!fl.divergence.empty()) cfg.divergence = fl.divergence;
  if (fl.eps > 0.0) cfg.eps = fl.eps;
  if (fl.delta > 0.0) cfg.delta = fl.delta;
  if (!fl.out.empty()) cfg.output_path = fl.out;
  if (!fl.format.empty()) {
    cfg.format =
        fl.format == "csv" ? rdpf::OutFormat::csv : rdpf::OutFormat::json;
  }
  if (!fl.units.empty()) {
    cfg.units = fl.units == "nats" ? rdpf::Units::nats : rdpf::Units::bits;
  }
  if (!fl.sd_grid.empty()) cfg.sD_grid = parse_grid(fl.sd_grid);
  if (!fl.sp_grid.empty()) cfg.sP_grid = parse_grid(fl.sp_grid);
  if (cfg.source.size() == 0) {
    throw std::invalid_argument(
        "no source distribution: pass --config or --source");
  }
  return cfg;
}

int cmd_sweep(const CommonFlags& fl) {
  rdpf::SweepConfig cfg = effective_config(fl);
  const std::vector<rdpf::SweepRow> rows = rdpf::run_sweep(cfg);
  rdpf::write_output(rows, cfg);
  for (const rdpf::SweepRow& r : rows) {
    if (r.region_warning) {
      std::cerr << "warning: point (s_D=" << r.s_D << ", s_P=" << r.s_P
                << ") was not classifiable; reported as region I\n";
    }
  }
  for (const rdpf::SweepRow& r : rows) {
    if (!r.converged) return 2;
  }
  return 0;
}

int cmd_solve(const CommonFlags& fl, double s_d, double s_p) {
  rdpf::SweepConfig cfg = effective_config(fl);
  const rdpf::FDivergenceSpec spec = rdpf::make_builtin(cfg.divergence);
  const rdpf::LagrangePair s{s_d, s_p};
  rdpf::SolveReport rep;
  if (cfg.scheme == rdpf::Scheme::nam) {
    rdpf::NewtonConfig ncfg;
    ncfg.delta = cfg.delta;
    rep = rdpf::solve_nam(cfg.source, s, cfg.distortion, spec, cfg.eps, ncfg,
                          std::nullopt, cfg.max_outer_iters);
  } else {
    rdpf::RamConfig rcfg;
    rcfg.eps = cfg.eps;
    rcfg.max_iters = cfg.max_outer_iters;
    rcfg.sp_guard = cfg.sp_guard;
    rep = rdpf::solve_ram(cfg.source, s, cfg.distortion, spec, rcfg);
  }

  const double scale =
      cfg.units == rdpf::Units::bits ? 1.0 / std::log(2.0) : 1.0;
  json out = json::object();
  out["s_D"] = s_d;
  out["s_P"] = s_p;
  out["D_s"] = rep.D_s;
  out["P_s"] = rep.P_s;
  out["rate"] = rep.rate * scale;
  out["lower_bound"] = rep.lower_bound * scale;
  out["upper_bound"] = rep.upper_bound * scale;
  out["outer_iters"] = rep.outer_iters;
  out["total_inner_iters"] = rep.total_inner_iters;
  out["converged"] = rep.converged;
  out["final_marginal"] = vector_to_json(rep.final_marginal.vec());
  out["final_Q"] = matrix_to_json(rep.final_Q.mat());
  json diag = json::object();
  diag["newton_residual_inf"] = rep.diag.newton_residual_inf;
  diag["sp_above_guard"] = rep.diag.sp_above_guard;
  diag["zero_support"] = rep.diag.zero_support;
  out["diagnostics"] = diag;
  emit(out.dump(2) + "\n", cfg.output_path);
  return rep.converged ? 0 : 2;
}

int cmd_diagnose(const CommonFlags& fl, double s_d, double s_p) {
  rdpf::SweepConfig cfg = effective_config(fl);
  if (fl.eps <= 0.0) cfg.eps = 1e-10;  // tight solve behind the diagnostics
  const rdpf::FDivergenceSpec spec = rdpf::make_builtin(cfg.divergence);
  const rdpf::LagrangePair s{s_d, s_p};

  rdpf::SolveReport rep;
  if (cfg.scheme == rdpf::Scheme::nam) {
    rdpf::NewtonConfig ncfg;
    ncfg.delta = cfg.delta;
    rep = rdpf::solve_nam(cfg.source, s, cfg.distortion, spec, cfg.eps, ncfg,
                          std::nullopt, cfg.max_outer_iters);
  } else {
    rdpf::RamConfig rcfg;
    rcfg.eps = cfg.eps;
    rcfg.max_iters = cfg.max_outer_iters;
    rep = rdpf::solve_ram(cfg.source, s, cfg.distortion, spec, rcfg);
  }
  if (!rep.converged) {
    std::cerr << "diagnose: solve did not converge; spectra evaluated at the "
                 "last iterate\n";
  }

  // Error trace against the solved marginal, for the empirical-rate fit.
  std::vector<double> err;
  err.reserve(rep.trace.size());
  for (const rdpf::IterationRecord& rec : rep.trace) {
    err.push_back((rec.marginal - rep.final_marginal.vec())
                      .lpNorm<Eigen::Infinity>());
  }
  if (!err.empty()) err.pop_back();  // last entry is identically zero

  const rdpf::Scheme sch = cfg.scheme;
  const rdpf::SpectralReport sr = rdpf::spectral_report(
      sch, cfg.source, rep.final_marginal, s, cfg.distortion, spec, err);

  json out = json::object();
  out["theta_max"] = sr.theta_max;
  out["eigs"] = sr.eigs;
  out["full_rank_distortion"] = sr.full_rank_distortion;
  out["predicted_regime"] =
      sr.predicted_exponential ? "exponential" : "at_risk";
  if (sr.empirical_rate.has_value()) {
    out["empirical_rate"] = *sr.empirical_rate;
    out["fit_r2"] = *sr.fit_r2;
  } else {
    out["empirical_rate"] = nullptr;
    out["fit_r2"] = nullptr;
  }
  emit(out.dump(2) + "\n", cfg.output_path);
  return 0;
}

int cmd_oracle(const CommonFlags& fl, double s_d, double s_p, int grid_n,
               int refine) {
  rdpf::SweepConfig cfg = effective_config(fl);
  const rdpf::FDivergenceSpec spec = rdpf::make_builtin(cfg.divergence);
  const rdpf::OracleResult res = rdpf::brute_force_lagrangian(
      cfg.source, {s_d, s_p}, cfg.distortion, spec, grid_n, refine);
  json out = json::object();
  out["lagrangian_value"] = res.lagrangian_value;
  out["argmin_Q"] = matrix_to_json(res.argmin_Q.mat());
  out["D_at_min"] = res.D_at_min;
  out["P_at_min"] = res.P_at_min;
  out["refinement_levels"] = res.refinement_levels;
  emit(out.dump(2) + "\n", cfg.output_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rate-distortion-perception curves for finite sources: certified "
      "solvers, spectral diagnostics, and a brute-force reference"};
  app.require_subcommand(1);

  CommonFlags fl_sweep, fl_solve, fl_diag, fl_oracle;
  double s_d = 0.0, s_p = 0.0;
  int grid_n = 64, refine = 5;

  CLI::App* sweep =
      app.add_subcommand("sweep", "Solve over a multiplier grid");
  add_common(sweep, fl_sweep);

  CLI::App* solve = app.add_subcommand("solve", "Solve one multiplier pair");
  add_common(solve, fl_solve);
  solve->add_option("--sd", s_d, "s_D multiplier")->required();
  solve->add_option("--sp", s_p, "s_P multiplier")->required();

  CLI::App* diag = app.add_subcommand(
      "diagnose", "Fixed-point spectrum and convergence-rate fit");
  add_common(diag, fl_diag);
  diag->add_option("--sd", s_d, "s_D multiplier")->required();
  diag->add_option("--sp", s_p, "s_P multiplier")->required();

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Brute-force reference value for one multiplier pair");
  add_common(oracle, fl_oracle);
  oracle->add_option("--sd", s_d, "s_D multiplier")->required();
  oracle->add_option("--sp", s_p, "s_P multiplier")->required();
  oracle->add_option("--grid-n", grid_n, "Grid points per axis");
  oracle->add_option("--refine", refine, "Refinement levels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(fl_sweep);
    if (solve->parsed()) return cmd_solve(fl_solve, s_d, s_p);
    if (diag->parsed()) return cmd_diagnose(fl_diag, s_d, s_p);
    if (oracle->parsed()) return cmd_oracle(fl_oracle, s_d, s_p, grid_n, refine);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
