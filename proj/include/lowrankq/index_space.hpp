#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lowrankq/factor_model.hpp"

namespace lowrankq {

using Dims = std::vector<std::size_t>;

std::size_t cardinality(std::span<const std::size_t> dims);

// Row-major mixed-radix encoding, last dimension fastest.
std::size_t flatten(std::span<const std::size_t> dims, std::span<const std::size_t> idx);
std::vector<std::size_t> unflatten(std::span<const std::size_t> dims, std::size_t flat);

struct ProductSpace {
  Dims state_dims;
  Dims action_dims;

  std::size_t state_count() const { return cardinality(state_dims); }
  std::size_t action_count() const { return cardinality(action_dims); }
};

// Uniform bins over [lower, upper]; observations outside are clamped.
struct GridSpec {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t bins = 1;

  void validate() const;
};

std::size_t discretize(const GridSpec& grid, double x);
double bin_center(const GridSpec& grid, std::size_t bin);

enum class PlanMode { classic, flat_near_square };

std::string to_string(PlanMode mode);
PlanMode plan_mode_from_string(const std::string& name);

/// Bijection between (state, action) pairs and cells of the learned matrix.
///
/// classic keeps the D_S x D_A layout. flat_near_square lays the flat index
/// f = state * D_A + action row by row into a ceil(sqrt(D_S D_A)) wide
/// near-square matrix; trailing cells past D_S D_A are padding and are never
/// returned by cell_of.
class ReshapePlan {
 public:
  ReshapePlan(std::size_t state_count, std::size_t action_count, PlanMode mode);

  PlanMode mode() const { return mode_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t state_count() const { return states_; }
  std::size_t action_count() const { return actions_; }
  std::size_t total_cells() const { return states_ * actions_; }
  std::size_t padding() const { return rows_ * cols_ - total_cells(); }

  Cell cell_of(std::size_t state, std::size_t action) const;
  std::vector<Cell> action_cells(std::size_t state) const;

  // Unchecked variant of cell_of for inner loops.
  Cell cell_unchecked(std::size_t state, std::size_t action) const {
    if (mode_ == PlanMode::classic)
      return {static_cast<Index>(state), static_cast<Index>(action)};
    const std::size_t f = state * actions_ + action;
    return {static_cast<Index>(f / cols_), static_cast<Index>(f % cols_)};
  }

  /// M * (N_R + N_C), the size of a rank-M factorization of the plan's matrix.
  std::size_t factor_parameters(std::size_t rank) const { return rank * (rows_ + cols_); }
  /// N_R * N_C, the size of a dense table in the plan's layout.
  std::size_t table_parameters() const { return rows_ * cols_; }

 private:
  PlanMode mode_;
  std::size_t states_;
  std::size_t actions_;
  std::size_t rows_;
  std::size_t cols_;
};

ReshapePlan plan(const ProductSpace& space, PlanMode mode);

}  // namespace lowrankq
