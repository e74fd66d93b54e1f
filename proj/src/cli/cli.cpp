#include "sparsecov/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>

#include "sparsecov/estimators.hpp"
#include "sparsecov/evaluation.hpp"
#include "sparsecov/io.hpp"
#include "sparsecov/proxdist.hpp"
#include "sparsecov/sparsity.hpp"
#include "sparsecov/sylvester.hpp"
#include "sparsecov/synthdata.hpp"
#include "sparsecov/tuning.hpp"

namespace sparsecov::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, const CLI::App& sub,
              const std::vector<std::string>& args, std::uint64_t seed) {
  json params = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help" || name == "-h") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
      if (results.empty()) value = "true";
    } else {
      value = opt->get_default_str();
    }
    params[name] = value;
  }
  return {{"command", command},
          {"parameters", params},
          {"argv", args},
          {"seed", seed},
          {"library_version", kLibraryVersion},
          {"timestamp", utc_timestamp()}};
}

struct FitFlags {
  double rho0 = 0.1;
  double rho_growth = 1.2;
  double rho_max = 1e8;
  double tol = 1e-6;
  int max_outer = 500;
  int max_halvings = 32;
  std::string ridge = "auto";

  void attach(CLI::App* app) {
    app->add_option("--rho0", rho0, "Initial penalty constant")->capture_default_str();
    app->add_option("--rho-growth", rho_growth, "Penalty growth factor per iteration")
        ->capture_default_str();
    app->add_option("--rho-max", rho_max, "Penalty cap")->capture_default_str();
    app->add_option("--tol", tol, "Relative objective tolerance")->capture_default_str();
    app->add_option("--max-outer", max_outer, "Outer iteration limit")->capture_default_str();
    app->add_option("--max-halvings", max_halvings, "Step-halving limit")->capture_default_str();
    app->add_option("--ridge", ridge, "Ridge added to S: 'auto' or a nonnegative value")
        ->capture_default_str();
  }

  proxdist::FitConfig config() const {
    proxdist::FitConfig cfg;
    cfg.rho0 = rho0;
    cfg.rho_growth = rho_growth;
    cfg.rho_max = rho_max;
    cfg.tol = tol;
    cfg.max_outer = max_outer;
    cfg.max_halvings = max_halvings;
    if (ridge != "auto") {
      std::size_t used = 0;
      double v = -1.0;
      try {
        v = std::stod(ridge, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != ridge.size() || !(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("--ridge must be 'auto' or a nonnegative number");
      cfg.ridge_delta = v;
    }
    cfg.validate();
    return cfg;
  }
};

std::vector<double> read_grid_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid file " + path.string());
  std::vector<double> grid;
  std::string token;
  std::stringstream all;
  all << in.rdbuf();
  std::string text = all.str();
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream tokens(text);
  while (tokens >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw std::invalid_argument("invalid grid value '" + token + "'");
    grid.push_back(v);
  }
  return grid;
}

json fit_json(const proxdist::FitResult& r, std::size_t k, ConstraintMode mode) {
  std::vector<int> halvings;
  for (const auto& h : r.history) halvings.push_back(h.halvings);
  return {{"k", k},
          {"mode", to_string(mode)},
          {"objective_trace", r.objective_trace},
          {"rho_trace", r.rho_trace},
          {"halvings_trace", halvings},
          {"iterations", r.iterations},
          {"total_halvings", r.total_halvings},
          {"converged", r.converged},
          {"polished", r.polished},
          {"polish_steps", r.polish_steps},
          {"final_rho", r.final_rho},
          {"final_penalty", r.final_penalty},
          {"ridge_applied", r.ridge_applied},
          {"reported", r.sparse_is_pd ? "projected" : "iterate"},
          {"nnz", sparsity::count_upper_nonzeros(proxdist::reported_estimate(r))}};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const sylvester::NoConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse covariance estimation by proximal distance penalization", "sparsecov"};
  app.require_subcommand(1);

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "Draw a ground-truth covariance and Gaussian data");
  std::string design = "random";
  Index sim_p = 0, sim_n = 0;
  double sparsity_frac = 0.02, band = 0.4, block_value = 0.4, mag_lo = 0.3, mag_hi = 0.6;
  Index block_size = 5;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  sim->add_option("--design", design, "independent | ma | cliques | random")->capture_default_str();
  sim->add_option("--p", sim_p, "Dimension")->required();
  sim->add_option("--n", sim_n, "Sample size")->required();
  sim->add_option("--sparsity", sparsity_frac, "Fraction of nonzero upper entries (random)")
      ->capture_default_str();
  sim->add_option("--band", band, "Off-diagonal value (ma)")->capture_default_str();
  sim->add_option("--block-size", block_size, "Clique size (cliques)")->capture_default_str();
  sim->add_option("--block-value", block_value, "Within-clique covariance (cliques)")
      ->capture_default_str();
  sim->add_option("--mag-low", mag_lo, "Smallest nonzero magnitude (random)")->capture_default_str();
  sim->add_option("--mag-high", mag_hi, "Largest nonzero magnitude (random)")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  sim->add_option("--out-dir,--out", sim_out, "Output directory")->required();

  // estimate
  CLI::App* est = app.add_subcommand("estimate", "Fit a k-sparse covariance or correlation matrix");
  std::string est_input, est_cov, est_mode = "cov", est_out;
  long long est_k = -1;
  bool est_center = false;
  FitFlags est_flags;
  auto* in_opt = est->add_option("--input", est_input, "Data CSV (n x p)");
  auto* cov_opt = est->add_option("--cov", est_cov, "Covariance CSV (p x p)");
  in_opt->excludes(cov_opt);
  est->add_option("--k", est_k, "Nonzero budget in the strict upper triangle")->required();
  est->add_option("--mode", est_mode, "cov | corr")->capture_default_str();
  est->add_flag("--center", est_center, "Center data columns before forming S");
  est_flags.attach(est);
  est->add_option("--out-dir,--out", est_out, "Output directory")->required();

  // cv
  CLI::App* cv = app.add_subcommand("cv", "Cross-validate k or lambda, then fit at the optimum");
  std::string cv_input, cv_method = "proxdist", cv_grid_file, cv_loss = "frobenius", cv_out;
  int cv_folds = 5;
  std::size_t cv_grid_size = 40;
  std::optional<std::size_t> cv_k_max;
  std::uint64_t cv_seed = 0;
  FitFlags cv_flags;
  cv->add_option("--input", cv_input, "Data CSV (n x p)")->required();
  cv->add_option("--method", cv_method, "proxdist | soft | hard")->capture_default_str();
  cv->add_option("--folds", cv_folds, "Number of folds")->capture_default_str();
  auto* gs_opt = cv->add_option("--grid-size", cv_grid_size, "Generated grid length")
                     ->capture_default_str();
  auto* gf_opt = cv->add_option("--grid-file", cv_grid_file, "Explicit ascending grid");
  gs_opt->excludes(gf_opt);
  cv->add_option("--k-max", cv_k_max, "Upper end of the generated k grid (proxdist)");
  cv->add_option("--loss", cv_loss, "frobenius | entropy")->capture_default_str();
  cv->add_option("--seed", cv_seed, "Fold assignment seed")->capture_default_str();
  cv_flags.attach(cv);
  cv->add_option("--out-dir,--out", cv_out, "Output directory")->required();

  // eval
  CLI::App* ev = app.add_subcommand("eval", "Score an estimate against the truth");
  std::string ev_truth, ev_est, ev_data, ev_out;
  double ev_gamma = evaluation::kDefaultEbicGamma;
  std::optional<double> ev_tol;
  ev->add_option("--truth", ev_truth, "True covariance CSV")->required();
  ev->add_option("--estimate", ev_est, "Estimated covariance CSV")->required();
  ev->add_option("--data", ev_data, "Data CSV for likelihood and criteria");
  ev->add_option("--gamma", ev_gamma, "EBIC gamma")->capture_default_str();
  ev->add_option("--support-tol", ev_tol, "Support threshold (default 1e-8 max|estimate|)");
  ev->add_option("--out-dir,--out", ev_out, "Output directory")->required();

  // bench
  CLI::App* bench = app.add_subcommand("bench", "Time proximal distance fits as p grows");
  std::vector<Index> bench_p{50, 100, 200, 400};
  Index bench_n = 0;
  int bench_reps = 1;
  std::string bench_design = "ma";
  double bench_sparsity = 0.02;
  std::uint64_t bench_seed = 0;
  std::string bench_out;
  bench->add_option("--p-list", bench_p, "Comma-separated dimensions")->delimiter(',')
      ->capture_default_str();
  bench->add_option("--n", bench_n, "Sample size (0: 2p)")->capture_default_str();
  bench->add_option("--reps", bench_reps, "Timings per p (median reported)")->capture_default_str();
  bench->add_option("--design", bench_design, "Truth design; k is its nonzero count")
      ->capture_default_str();
  bench->add_option("--sparsity", bench_sparsity, "Sparsity fraction (random design)")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Seed")->capture_default_str();
  bench->add_option("--out-dir,--out", bench_out, "Output directory")->required();

  // rerun
  CLI::App* rerun = app.add_subcommand("rerun", "Replay the command recorded in a manifest");
  std::string rerun_manifest;
  rerun->add_option("--manifest", rerun_manifest, "manifest.json")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failed = &app;
    for (const CLI::App* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitUsage;
  }

  if (sim->parsed()) {
    synthdata::SimDesign d;
    d.kind = synthdata::parse_design(design);
    d.p = sim_p;
    d.sparsity_frac = sparsity_frac;
    d.band_value = band;
    d.block_size = block_size;
    d.block_value = block_value;
    d.magnitude_range = {mag_lo, mag_hi};
    d.seed = sim_seed;
    d.validate();
    if (sim_n < 1) throw std::invalid_argument("--n must be >= 1");
    RngStream rng(sim_seed, 0);
    const SymmetricMatrix truth = synthdata::make_design(d, rng);
    const Matrix data = synthdata::sample_mvn(truth, sim_n, rng);
    fs::create_directories(sim_out);
    io::write_matrix_csv(fs::path(sim_out) / "truth.csv", truth.matrix());
    io::write_matrix_csv(fs::path(sim_out) / "data.csv", data);
    io::write_json(fs::path(sim_out) / "manifest.json", manifest("simulate", *sim, args, sim_seed));
    out << "wrote truth.csv, data.csv (" << sim_n << " x " << sim_p << ") to " << sim_out << "\n";
    return kExitOk;
  }

  if (est->parsed()) {
    if (est_input.empty() == est_cov.empty())
      throw std::invalid_argument("exactly one of --input or --cov is required");
    if (est_k < 0) throw std::invalid_argument("--k must be a nonnegative integer");
    if (est_mode != "cov" && est_mode != "corr")
      throw std::invalid_argument("--mode must be cov or corr");
    const proxdist::FitConfig cfg = est_flags.config();
    const SymmetricMatrix s = est_cov.empty()
                                  ? sample_covariance(io::read_matrix_csv(est_input), est_center)
                                  : io::read_symmetric_csv(est_cov);
    auto k = static_cast<std::size_t>(est_k);
    const std::size_t max_k = SparsityConstraint::max_k(s.dim());
    if (k > max_k) {
      err << "warning: --k " << k << " exceeds p(p-1)/2 = " << max_k << "; using " << max_k
          << "\n";
      k = max_k;
    }
    const ConstraintMode mode =
        est_mode == "cov" ? ConstraintMode::covariance : ConstraintMode::correlation;
    const proxdist::FitResult r =
        mode == ConstraintMode::covariance
            ? proxdist::fit(s, SparsityConstraint{k, mode}, cfg)
            : proxdist::fit_correlation(proxdist::correlation_from_covariance(s), k, cfg);
    if (r.ridge_applied > 0.0)
      err << "note: ridge " << r.ridge_applied << " added to the diagonal of S\n";
    if (!r.converged)
      err << "warning: stopped after " << r.iterations << " iterations without converging\n";
    fs::create_directories(est_out);
    if (!r.sparse_is_pd)
      err << "warning: projected estimate is not positive definite; writing the final iterate\n";
    io::write_matrix_csv(fs::path(est_out) / "sigma_hat.csv",
                         proxdist::reported_estimate(r).matrix());
    io::write_matrix_csv(fs::path(est_out) / "sigma_iterate.csv", r.sigma_hat.matrix());
    io::write_json(fs::path(est_out) / "fit.json", fit_json(r, k, mode));
    io::write_json(fs::path(est_out) / "manifest.json", manifest("estimate", *est, args, 0));
    out << "iterations " << r.iterations << ", converged " << (r.converged ? "yes" : "no")
        << ", final penalty " << r.final_penalty << "\n";
    return kExitOk;
  }

  if (cv->parsed()) {
    const Method method = parse_method(cv_method);
    const proxdist::FitConfig cfg = cv_flags.config();
    const Matrix data = io::read_matrix_csv(cv_input);
    const SymmetricMatrix s = sample_covariance(data);
    tuning::CvSpec spec;
    spec.folds = cv_folds;
    spec.loss = tuning::parse_loss(cv_loss);
    spec.seed = cv_seed;
    spec.grid = cv_grid_file.empty()
                    ? tuning::default_grid(method, s, cv_grid_size,
                                           method == Method::proxdist ? cv_k_max : std::nullopt)
                    : read_grid_file(cv_grid_file);
    const tuning::CvResult res = tuning::cross_validate(data, method, spec, cfg);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    const Estimate final_fit = estimate(s, method, res.best_param, cfg);

    fs::create_directories(cv_out);
    io::write_text(fs::path(cv_out) / "cv_table.csv", res.table_csv());
    io::write_json(fs::path(cv_out) / "best_param.json",
                   {{"method", to_string(method)},
                    {"best_param", res.best_param},
                    {"best_index", res.best_index},
                    {"boundary_warning", res.boundary_warning},
                    {"loss", to_string(spec.loss)},
                    {"folds", spec.folds},
                    {"grid", spec.grid},
                    {"warnings", res.warnings},
                    {"final_estimate_pd", final_fit.is_pd}});
    io::write_matrix_csv(fs::path(cv_out) / "sigma_hat.csv", final_fit.sigma.matrix());
    io::write_json(fs::path(cv_out) / "manifest.json", manifest("cv", *cv, args, cv_seed));
    out << "best " << to_string(method) << " parameter " << res.best_param << "\n";
    return kExitOk;
  }

  if (ev->parsed()) {
    const SymmetricMatrix truth = io::read_symmetric_csv(ev_truth);
    const SymmetricMatrix estimate_m = io::read_symmetric_csv(ev_est);
    std::optional<evaluation::SampleInfo> sample;
    if (!ev_data.empty()) {
      const Matrix data = io::read_matrix_csv(ev_data);
      sample = evaluation::SampleInfo{sample_covariance(data), static_cast<double>(data.rows())};
    }
    const double tol = ev_tol.value_or(sparsity::default_support_tol(estimate_m));
    const evaluation::MetricReport report =
        evaluation::evaluate(truth, estimate_m, sample, tol, ev_gamma);
    json j = evaluation::to_json(report);
    j["n"] = sample ? json(sample->n) : json(nullptr);
    j["support_tol"] = tol;
    j["ebic_gamma"] = ev_gamma;
    fs::create_directories(ev_out);
    io::write_json(fs::path(ev_out) / "metrics.json", j);
    io::write_json(fs::path(ev_out) / "manifest.json", manifest("eval", *ev, args, 0));
    out << j.dump() << "\n";
    return kExitOk;
  }

  if (bench->parsed()) {
    if (bench_p.empty()) throw std::invalid_argument("--p-list is empty");
    if (bench_reps < 1) throw std::invalid_argument("--reps must be >= 1");
    std::ostringstream csv;
    csv << "p,median_seconds,iterations\n";
    std::vector<double> ps, secs;
    json rows = json::array();
    for (const Index p : bench_p) {
      synthdata::SimDesign d;
      d.kind = synthdata::parse_design(bench_design);
      d.p = p;
      d.sparsity_frac = bench_sparsity;
      d.seed = bench_seed;
      d.validate();
      RngStream rng(bench_seed, static_cast<std::uint64_t>(p));
      const SymmetricMatrix truth = synthdata::make_design(d, rng);
      const Index n = bench_n > 0 ? bench_n : 2 * p;
      const SymmetricMatrix s = sample_covariance(synthdata::sample_mvn(truth, n, rng));
      const SparsityConstraint c{sparsity::count_upper_nonzeros(truth)};
      std::vector<double> times;
      int iterations = 0;
      for (int r = 0; r < bench_reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const proxdist::FitResult fr = proxdist::fit(s, c);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        iterations = fr.iterations;
      }
      std::sort(times.begin(), times.end());
      const std::size_t m = times.size();
      const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
      csv << p << ',' << io::format_double(median) << ',' << iterations << '\n';
      rows.push_back({{"p", p}, {"median_seconds", median}, {"iterations", iterations}});
      ps.push_back(static_cast<double>(p));
      secs.push_back(median);
      out << "p = " << p << ": " << median << " s (" << iterations << " iterations)\n";
    }
    const double slope = log_log_slope(ps, secs);
    fs::create_directories(bench_out);
    io::write_text(fs::path(bench_out) / "bench.csv", csv.str());
    io::write_json(fs::path(bench_out) / "bench.json",
                   {{"rows", rows}, {"log_log_slope", std::isfinite(slope) ? json(slope) : json(nullptr)}});
    io::write_json(fs::path(bench_out) / "manifest.json", manifest("bench", *bench, args, bench_seed));
    out << "log-log slope of seconds vs p: " << slope << "\n";
    return kExitOk;
  }

  if (rerun->parsed()) {
    const json m = io::read_json(rerun_manifest);
    if (!m.contains("argv") || !m["argv"].is_array())
      throw std::invalid_argument(rerun_manifest + ": manifest has no argv array");
    const auto replay = m["argv"].get<std::vector<std::string>>();
    if (replay.empty() || replay.front() == "rerun")
      throw std::invalid_argument(rerun_manifest + ": manifest does not record a runnable command");
    return run(replay, out, err);
  }

  return kExitUsage;
}

}  // namespace

}  // namespace sparsecov::cli
