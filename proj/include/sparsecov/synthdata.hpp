#pragma once

// Ground-truth covariance designs, Gaussian sampling, and the replicate
// simulation harness.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsecov/estimators.hpp"
#include "sparsecov/evaluation.hpp"
#include "sparsecov/matcore.hpp"
#include "sparsecov/rng.hpp"
#include "sparsecov/tuning.hpp"

namespace sparsecov::synthdata {

enum class DesignKind { independent, moving_average, cliques, random_sparse };

std::string_view to_string(DesignKind kind);
/// Accepts independent, ma/moving_average, cliques, random/random_sparse.
DesignKind parse_design(std::string_view name);

struct SimDesign {
  DesignKind kind = DesignKind::random_sparse;
  Index p = 20;
  double sparsity_frac = 0.02;
  double band_value = 0.4;
  Index block_size = 5;
  double block_value = 0.4;
  std::pair<double, double> magnitude_range{0.3, 0.6};
  double pd_shift_margin = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// ceil(sparsity_frac * p(p-1)/2), the exact nonzero count of random_sparse.
std::size_t random_sparse_count(Index p, double sparsity_frac);

/// Deterministic kinds ignore rng. random_sparse redraws until positive definite.
SymmetricMatrix make_design(const SimDesign& d, RngStream& rng);
/// Uses RngStream(d.seed, 0).
SymmetricMatrix make_design(const SimDesign& d);

/// n x p matrix whose rows are N(0, Sigma), computed as L z.
Matrix sample_mvn(const SymmetricMatrix& sigma, Index n, RngStream& rng);

struct MethodSpec {
  Method method = Method::proxdist;
  /// Use this parameter instead of cross-validating.
  std::optional<double> fixed_param;
};

struct ReplicateConfig {
  SimDesign design;
  Index n = 100;
  int reps = 10;
  std::vector<MethodSpec> methods;
  tuning::CvSpec tuner;  // grid left empty: tuning::default_grid per replicate
  std::size_t grid_size = 40;
  std::optional<std::size_t> k_grid_max;  // proxdist grid spans 0..k_grid_max when set
  proxdist::FitConfig fit;
};

struct ReplicateRecord {
  int replicate = 0;
  Method method = Method::proxdist;
  double param = 0.0;
  bool boundary = false;
  evaluation::MetricReport metrics;
};

struct MetricSummary {
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
};

struct MethodSummary {
  Method method = Method::proxdist;
  int reps = 0;
  int non_pd = 0;
  std::vector<MetricSummary> metrics;

  const MetricSummary& get(std::string_view name) const;
};

struct ReplicateTable {
  ReplicateConfig config;
  std::vector<ReplicateRecord> records;  // replicate-major, then method order
  std::vector<MethodSummary> summaries;

  /// Columns: method, metric, mean, stderr, reps, kind, p, n, sparsity, seed.
  std::string to_csv() const;
};

/// Replicate r draws the truth (random_sparse) and then the data from
/// RngStream(design.seed, r); deterministic kinds share one fixed truth.
ReplicateTable run_replicates(const ReplicateConfig& cfg);

}  // namespace sparsecov::synthdata
