#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lowrankq {

using Index = Eigen::Index;

// Row-major so that one state's Q-values (a row) are contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using QTable = RowMatrix;

struct Cell {
  Index row = 0;
  Index col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct TDTarget {
  Cell cell;
  double value = 0.0;
};

// Q ~= left * right with left (rows x M) and right (M x cols).
// left is row-major and right column-major so that the M factors of one
// state row and of one action column are each contiguous.
struct FactorPair {
  RowMatrix left;
  Eigen::MatrixXd right;

  Index rank() const { return left.cols(); }
  Index rows() const { return left.rows(); }
  Index cols() const { return right.cols(); }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(left.size() + right.size());
  }
};

class NumericalDivergence : public std::runtime_error {
 public:
  NumericalDivergence(const std::string& what, Cell cell)
      : std::runtime_error(what), cell_(cell) {}
  Cell cell() const { return cell_; }

 private:
  Cell cell_;
};

inline constexpr double kDivergenceGuard = 1e12;
inline constexpr double kNormalizationFloor = 1e-8;

/// Uniform i.i.d. entries in [scale/2, 3*scale/2]; deterministic in `seed`.
FactorPair init_factors(Index n_rows, Index n_cols, Index rank, double scale,
                        std::uint64_t seed);

double predict_cell(const FactorPair& fp, Cell cell);
std::vector<double> predict_cells(const FactorPair& fp, std::span<const Cell> cells);

struct SgdOptions {
  double alpha = 0.01;
  double eta = 0.0;
  bool normalize = false;
};

/// One stochastic step on 0.5*(target - [LR]_cell)^2 + eta*(|l|^2 + |r|^2),
/// restricted to the touched row of `left` and column of `right`. Both factors
/// are moved from their pre-step values. On divergence `fp` is left untouched.
void sgd_update(FactorPair& fp, const TDTarget& target, const SgdOptions& opts);

/// Dense product with the single TD-target entry written over it.
QTable build_target_matrix(const FactorPair& fp, const TDTarget& target);

struct AlsResult {
  FactorPair factors;
  int damped_solves = 0;  // Gram solves that needed ridge damping
  bool damped() const { return damped_solves > 0; }
};

/// k_iters rounds of L <- Qbar R^T (R R^T)^-1 followed by R <- (L^T L)^-1 L^T Qbar,
/// starting from fp.right.
AlsResult als_sweep(const FactorPair& fp, const QTable& qbar, int k_iters);

QTable materialize(const FactorPair& fp);

double frobenius_sq_error(const QTable& a, const QTable& b);

struct SvdSummary {
  std::vector<double> singular_values;  // descending
  std::vector<double> energy_prefix;    // [k-1] = sum_{m<=k} s_m^2 / sum s_m^2
  std::vector<double> magnitude_prefix; // same with s_m instead of s_m^2
  Index k = 1;

  double energy() const { return energy_prefix.at(static_cast<std::size_t>(k - 1)); }
  double magnitude_share() const {
    return magnitude_prefix.at(static_cast<std::size_t>(k - 1));
  }
};

/// Returns std::nullopt for the zero matrix, where the energy split is undefined.
/// k is clamped to min(rows, cols).
std::optional<SvdSummary> svd_energy(const QTable& q, Index k);

}  // namespace lowrankq
