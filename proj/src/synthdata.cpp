#include "sparsecov/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "sparsecov/parallel.hpp"
#include "sparsecov/sparsity.hpp"

namespace sparsecov::synthdata {

namespace {

constexpr int kMaxRedraws = 10000;

void shift_to_pd(Matrix& m, double margin) {
  const double lmin = spectral_decompose(SymmetricMatrix::symmetrized(m)).eigenvalues(0);
  if (lmin <= 0.0) m.diagonal().array() += margin - lmin;
}

SymmetricMatrix random_sparse(const SimDesign& d, RngStream& rng) {
  const Index p = d.p;
  const std::size_t slots = SparsityConstraint::max_k(p);
  const std::size_t count = random_sparse_count(p, d.sparsity_frac);
  std::vector<std::size_t> order(slots);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // partial Fisher-Yates: the first `count` slots become a uniform sample
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.below(slots - i);
      std::swap(order[i], order[j]);
    }
    Matrix m = Matrix::Identity(p, p);
    for (std::size_t e = 0; e < count; ++e) {
      // slot -> (row, col) in column-major strict-upper order
      std::size_t slot = order[e];
      Index col = 1;
      while (slot >= static_cast<std::size_t>(col)) slot -= static_cast<std::size_t>(col++);
      const Index row = static_cast<Index>(slot);
      const double mag = rng.uniform(d.magnitude_range.first, d.magnitude_range.second);
      const double value = rng.uniform() < 0.5 ? -mag : mag;
      m(row, col) = value;
      m(col, row) = value;
    }
    SymmetricMatrix candidate(std::move(m));
    if (is_positive_definite(candidate)) return candidate;
  }
  throw std::invalid_argument("make_design: no positive definite random_sparse draw after " +
                              std::to_string(kMaxRedraws) +
                              " attempts; lower the sparsity or the magnitude range");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

std::string_view to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::independent:
      return "independent";
    case DesignKind::moving_average:
      return "moving_average";
    case DesignKind::cliques:
      return "cliques";
    case DesignKind::random_sparse:
      return "random_sparse";
  }
  return "unknown";
}

DesignKind parse_design(std::string_view name) {
  if (name == "independent") return DesignKind::independent;
  if (name == "ma" || name == "moving_average") return DesignKind::moving_average;
  if (name == "cliques") return DesignKind::cliques;
  if (name == "random" || name == "random_sparse") return DesignKind::random_sparse;
  throw std::invalid_argument("unknown design '" + std::string(name) +
                              "' (expected independent, ma, cliques or random)");
}

void SimDesign::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SimDesign: " + msg); };
  if (p < 2) fail("p must be >= 2");
  if (!std::isfinite(band_value)) fail("band_value must be finite");
  if (!std::isfinite(block_value)) fail("block_value must be finite");
  if (!std::isfinite(pd_shift_margin) || !(pd_shift_margin > 0.0))
    fail("pd_shift_margin must be positive");
  if (kind == DesignKind::cliques && block_size < 1) fail("block_size must be >= 1");
  if (kind == DesignKind::random_sparse) {
    if (!(sparsity_frac > 0.0 && sparsity_frac <= 1.0)) fail("sparsity_frac must lie in (0, 1]");
    const auto [lo, hi] = magnitude_range;
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo <= hi))
      fail("magnitude_range must satisfy 0 <= low <= high");
  }
}

std::size_t random_sparse_count(Index p, double sparsity_frac) {
  const auto slots = static_cast<double>(SparsityConstraint::max_k(p));
  // absorb representation error such as 0.1 * 30 = 3.0000000000000004
  const double raw = std::round(sparsity_frac * slots * 1e9) / 1e9;
  return static_cast<std::size_t>(std::ceil(raw));
}

SymmetricMatrix make_design(const SimDesign& d, RngStream& rng) {
  d.validate();
  const Index p = d.p;
  switch (d.kind) {
    case DesignKind::independent:
      return SymmetricMatrix::identity(p);
    case DesignKind::moving_average: {
      Matrix m = Matrix::Identity(p, p);
      for (Index i = 0; i + 1 < p; ++i) m(i, i + 1) = m(i + 1, i) = d.band_value;
      shift_to_pd(m, d.pd_shift_margin);
      return SymmetricMatrix(std::move(m));
    }
    case DesignKind::cliques: {
      Matrix m = Matrix::Identity(p, p);
      for (Index start = 0; start < p; start += d.block_size) {
        const Index end = std::min(p, start + d.block_size);
        for (Index i = start; i < end; ++i)
          for (Index j = start; j < end; ++j)
            if (i != j) m(i, j) = d.block_value;
      }
      shift_to_pd(m, d.pd_shift_margin);
      return SymmetricMatrix(std::move(m));
    }
    case DesignKind::random_sparse:
      return random_sparse(d, rng);
  }
  throw std::logic_error("make_design: unhandled design kind");
}

SymmetricMatrix make_design(const SimDesign& d) {
  RngStream rng(d.seed, 0);
  return make_design(d, rng);
}

Matrix sample_mvn(const SymmetricMatrix& sigma, Index n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_mvn: n must be >= 1");
  const CholeskyFactor chol = cholesky(sigma);
  const Index p = sigma.dim();
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  // row x_i = L z_i  <=>  X = Z L^T
  return z * chol.lower().transpose();
}

const MetricSummary& MethodSummary::get(std::string_view name) const {
  for (const auto& m : metrics)
    if (m.metric == name) return m;
  throw std::out_of_range("MethodSummary: no metric named " + std::string(name));
}

std::string ReplicateTable::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "method,metric,mean,stderr,reps,kind,p,n,sparsity,seed\n";
  const auto& d = config.design;
  for (const auto& s : summaries) {
    for (const auto& m : s.metrics) {
      os << to_string(s.method) << ',' << m.metric << ',' << m.mean << ',' << m.std_error << ','
         << s.reps << ',' << to_string(d.kind) << ',' << d.p << ',' << config.n << ','
         << d.sparsity_frac << ',' << d.seed << '\n';
    }
  }
  return os.str();
}

ReplicateTable run_replicates(const ReplicateConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("run_replicates: reps must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("run_replicates: no methods given");
  if (cfg.n < 1) throw std::invalid_argument("run_replicates: n must be >= 1");
  cfg.design.validate();

  const bool fixed_truth = cfg.design.kind != DesignKind::random_sparse;
  const std::optional<SymmetricMatrix> shared_truth =
      fixed_truth ? std::optional(make_design(cfg.design)) : std::nullopt;

  const std::size_t n_methods = cfg.methods.size();
  std::vector<ReplicateRecord> records(static_cast<std::size_t>(cfg.reps) * n_methods);

  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    RngStream rng(cfg.design.seed, r);
    const SymmetricMatrix truth = fixed_truth ? *shared_truth : make_design(cfg.design, rng);
    const Matrix data = sample_mvn(truth, cfg.n, rng);
    const SymmetricMatrix s = sample_covariance(data);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const MethodSpec& spec = cfg.methods[mi];
      ReplicateRecord rec;
      rec.replicate = static_cast<int>(r);
      rec.method = spec.method;
      if (spec.fixed_param) {
        rec.param = *spec.fixed_param;
      } else {
        tuning::CvSpec cv = cfg.tuner;
        cv.seed = splitmix64(cfg.tuner.seed ^ splitmix64(r));
        if (cv.grid.empty()) {
          cv.grid = tuning::default_grid(spec.method, s, cfg.grid_size,
                                         spec.method == Method::proxdist ? cfg.k_grid_max
                                                                         : std::nullopt);
        }
        const tuning::CvResult res = tuning::cross_validate(data, spec.method, cv, cfg.fit);
        rec.param = res.best_param;
        rec.boundary = res.boundary_warning;
      }
      const Estimate est = estimate(s, spec.method, rec.param, cfg.fit);
      rec.metrics = evaluation::evaluate(truth, est.sigma, evaluation::SampleInfo{s, double(cfg.n)});
      records[r * n_methods + mi] = std::move(rec);
    }
  });

  ReplicateTable table{cfg, std::move(records), {}};
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodSummary summary;
    summary.method = cfg.methods[mi].method;
    summary.reps = cfg.reps;
    std::vector<double> entropy, rmse_v, fp, fn, nnz, param;
    for (int r = 0; r < cfg.reps; ++r) {
      const auto& rec = table.records[static_cast<std::size_t>(r) * n_methods + mi];
      if (!rec.metrics.estimate_pd) ++summary.non_pd;
      entropy.push_back(rec.metrics.entropy_loss);
      rmse_v.push_back(rec.metrics.rmse);
      fp.push_back(rec.metrics.fp_rate);
      fn.push_back(rec.metrics.fn_rate);
      nnz.push_back(static_cast<double>(rec.metrics.nnz));
      param.push_back(rec.param);
    }
    auto add = [&](const char* name, const std::vector<double>& v) {
      const double m = mean_of(v);
      summary.metrics.push_back({name, m, std::isfinite(m) ? std_error_of(v, m) : 0.0});
    };
    add("entropy_loss", entropy);
    add("rmse", rmse_v);
    add("fp_rate", fp);
    add("fn_rate", fn);
    add("nnz", nnz);
    add("param", param);
    table.summaries.push_back(std::move(summary));
  }
  return table;
}

}  // namespace sparsecov::synthdata
