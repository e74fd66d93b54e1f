#pragma once

// Entrywise thresholding of the sample covariance (soft and hard). The
// diagonal is never touched and no positive definiteness repair is made.

#include <span>
#include <string_view>
#include <vector>

#include "sparsecov/matcore.hpp"

namespace sparsecov::baselines {

enum class ThresholdKind { soft, hard };

std::string_view to_string(ThresholdKind kind);

struct ThresholdSpec {
  double lambda = 0.0;
  ThresholdKind kind = ThresholdKind::soft;
};

struct PathPoint {
  double lambda = 0.0;
  SymmetricMatrix estimate;
  bool is_pd = false;
  std::size_t nnz = 0;  // strict-upper nonzeros
};

SymmetricMatrix threshold(const SymmetricMatrix& s, const ThresholdSpec& spec);

/// One point per lambda; grid must be nonempty and ascending.
std::vector<PathPoint> threshold_path(const SymmetricMatrix& s, ThresholdKind kind,
                                      std::span<const double> grid);

}  // namespace sparsecov::baselines
