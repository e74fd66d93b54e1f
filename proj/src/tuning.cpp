#include "sparsecov/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "sparsecov/evaluation.hpp"
#include "sparsecov/parallel.hpp"
#include "sparsecov/rng.hpp"
#include "sparsecov/sparsity.hpp"

namespace sparsecov::tuning {

namespace {

// Stream id reserved for fold assignment.
constexpr std::uint64_t kFoldStream = 0x6b666f6c64ULL;

Matrix take_rows(const Matrix& data, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = data.row(rows[i]);
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t size) {
  std::vector<double> v(size);
  if (size == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < size; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1);
  v.back() = hi;
  return v;
}

}  // namespace

std::string_view to_string(CvLoss loss) {
  return loss == CvLoss::frobenius ? "frobenius" : "entropy";
}

CvLoss parse_loss(std::string_view name) {
  if (name == "frobenius") return CvLoss::frobenius;
  if (name == "entropy") return CvLoss::entropy;
  throw std::invalid_argument("unknown CV loss '" + std::string(name) +
                              "' (expected frobenius or entropy)");
}

void CvSpec::validate() const {
  if (folds < 2) throw std::invalid_argument("CvSpec: folds must be >= 2");
  if (grid.empty()) throw std::invalid_argument("CvSpec: grid must be nonempty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("CvSpec: grid must be ascending");
  for (double g : grid)
    if (!std::isfinite(g) || g < 0.0)
      throw std::invalid_argument("CvSpec: grid values must be finite and nonnegative");
}

std::vector<std::vector<Index>> kfold_split(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold_split: folds must be >= 2");
  if (n < folds) {
    std::ostringstream os;
    os << "kfold_split: n = " << n << " is smaller than folds = " << folds;
    throw std::invalid_argument(os.str());
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  RngStream rng(seed, kFoldStream);
  for (std::size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);

  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < perm.size(); ++i)
    out[i % static_cast<std::size_t>(folds)].push_back(perm[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::string CvResult::table_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "param,mean_loss,stderr,n_folds,boundary_flag\n";
  for (const auto& row : table) {
    os << row.param << ',' << row.mean_loss << ',' << row.std_error << ',' << row.n_folds << ','
       << (row.boundary ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<double> default_grid(Method method, const SymmetricMatrix& s, std::size_t size,
                                 std::optional<std::size_t> k_max) {
  if (size == 0) throw std::invalid_argument("default_grid: size must be positive");
  if (method == Method::proxdist) {
    const std::size_t top = std::min(k_max.value_or(SparsityConstraint::max_k(s.dim())),
                                     SparsityConstraint::max_k(s.dim()));
    std::vector<double> grid = linspace(0.0, static_cast<double>(top), size);
    for (double& g : grid) g = std::round(g);
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
  }
  double max_off = 0.0;
  for (Index j = 1; j < s.dim(); ++j)
    for (Index i = 0; i < j; ++i) max_off = std::max(max_off, std::fabs(s(i, j)));
  std::vector<double> grid = linspace(0.0, max_off, size);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CvResult cross_validate(const Matrix& data, Method method, const CvSpec& spec,
                        const proxdist::FitConfig& cfg, ConstraintMode mode) {
  spec.validate();
  const auto folds = kfold_split(data.rows(), spec.folds, spec.seed);
  const std::size_t n_folds = folds.size();
  const std::size_t n_grid = spec.grid.size();

  struct FoldData {
    SymmetricMatrix train;
    SymmetricMatrix test;
    bool test_pd = false;
  };
  std::vector<FoldData> fold_data;
  fold_data.reserve(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<Index> train_rows;
    for (std::size_t g = 0; g < n_folds; ++g)
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    std::sort(train_rows.begin(), train_rows.end());
    SymmetricMatrix train = sample_covariance(take_rows(data, train_rows));
    SymmetricMatrix test = sample_covariance(take_rows(data, folds[f]));
    const bool pd = is_positive_definite(test);
    fold_data.push_back({std::move(train), std::move(test), pd});
  }

  CvResult result;
  if (spec.loss == CvLoss::entropy) {
    for (std::size_t f = 0; f < n_folds; ++f) {
      if (!fold_data[f].test_pd) {
        result.warnings.push_back("fold " + std::to_string(f) +
                                  ": held-out covariance is not positive definite; "
                                  "scoring with frobenius loss instead of entropy");
      }
    }
  }

  // losses[g * n_folds + f]
  std::vector<double> losses(n_grid * n_folds, std::numeric_limits<double>::infinity());
  std::vector<std::string> cell_errors(n_grid * n_folds);
  parallel_for(n_grid * n_folds, [&](std::size_t cell) {
    const std::size_t g = cell / n_folds;
    const std::size_t f = cell % n_folds;
    const FoldData& fd = fold_data[f];
    try {
      const Estimate est = estimate(fd.train, method, spec.grid[g], cfg, mode);
      if (spec.loss == CvLoss::entropy && fd.test_pd) {
        losses[cell] = est.is_pd ? evaluation::entropy_loss(fd.test, est.sigma)
                                 : std::numeric_limits<double>::infinity();
      } else {
        losses[cell] = (est.sigma.matrix() - fd.test.matrix()).norm();
      }
    } catch (const std::exception& e) {
      cell_errors[cell] = e.what();
    }
  });
  for (std::size_t cell = 0; cell < cell_errors.size(); ++cell) {
    if (!cell_errors[cell].empty()) {
      std::ostringstream os;
      os << "grid value " << spec.grid[cell / n_folds] << ", fold " << cell % n_folds
         << ": estimator failed (" << cell_errors[cell] << "); loss set to +inf";
      result.warnings.push_back(os.str());
    }
  }

  result.table.resize(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    CvRow& row = result.table[g];
    row.param = spec.grid[g];
    double sum = 0.0;
    int finite = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      sum += losses[g * n_folds + f];
      if (std::isfinite(losses[g * n_folds + f])) ++finite;
    }
    row.n_folds = finite;
    const double nf = static_cast<double>(n_folds);
    row.mean_loss = sum / nf;
    if (std::isfinite(row.mean_loss) && n_folds > 1) {
      double ss = 0.0;
      for (std::size_t f = 0; f < n_folds; ++f) {
        const double d = losses[g * n_folds + f] - row.mean_loss;
        ss += d * d;
      }
      row.std_error = std::sqrt(ss / (nf - 1.0)) / std::sqrt(nf);
    }
  }

  // Ties go to the sparser end: first index for k, last index for lambda.
  std::size_t best = smaller_is_sparser(method) ? 0 : n_grid - 1;
  for (std::size_t step = 0; step < n_grid; ++step) {
    const std::size_t g = smaller_is_sparser(method) ? step : n_grid - 1 - step;
    if (result.table[g].mean_loss < result.table[best].mean_loss) best = g;
  }
  result.best_index = best;
  result.best_param = spec.grid[best];
  if (best == 0 || best == n_grid - 1) {
    result.boundary_warning = true;
    result.table[best].boundary = true;
    std::ostringstream os;
    os << "selected " << to_string(method) << " parameter " << result.best_param
       << " lies on the boundary of the grid";
    result.warnings.push_back(os.str());
  }
  return result;
}

}  // namespace sparsecov::tuning
