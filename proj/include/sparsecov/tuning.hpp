#pragma once

// K-fold cross-validation over k (proximal distance) or lambda (thresholds).
//
// For each grid value and fold the estimator is fit on the training folds'
// sample covariance and scored against the held-out sample covariance
// (divisor n_test, no centering).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecov/estimators.hpp"
#include "sparsecov/matcore.hpp"

namespace sparsecov::tuning {

enum class CvLoss { frobenius, entropy };

std::string_view to_string(CvLoss loss);
CvLoss parse_loss(std::string_view name);

struct CvSpec {
  int folds = 5;
  std::vector<double> grid;  // ascending
  CvLoss loss = CvLoss::frobenius;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Partition of {0..n-1} into `folds` sorted index sets whose sizes differ by
/// at most one.
std::vector<std::vector<Index>> kfold_split(Index n, int folds, std::uint64_t seed);

struct CvRow {
  double param = 0.0;
  double mean_loss = 0.0;
  double std_error = 0.0;
  int n_folds = 0;
  bool boundary = false;  // this row is the selected one and sits on a grid end
};

struct CvResult {
  double best_param = 0.0;
  std::size_t best_index = 0;
  bool boundary_warning = false;
  std::vector<CvRow> table;
  std::vector<std::string> warnings;

  /// Columns: param, mean_loss, stderr, n_folds, boundary_flag.
  std::string table_csv() const;
};

/// Proxdist: k = round(linspace(0, p(p-1)/2, size)) (or 0..k_max when given,
/// same rounding). Thresholds: lambda = linspace(0, max off-diagonal |S|, size).
std::vector<double> default_grid(Method method, const SymmetricMatrix& s, std::size_t size = 40,
                                 std::optional<std::size_t> k_max = std::nullopt);

/// Throws std::invalid_argument on an invalid spec or n < folds. Per-cell
/// estimator failures count as +inf loss and add a warning.
CvResult cross_validate(const Matrix& data, Method method, const CvSpec& spec,
                        const proxdist::FitConfig& cfg = {},
                        ConstraintMode mode = ConstraintMode::covariance);

}  // namespace sparsecov::tuning
