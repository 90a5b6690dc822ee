#include "lowrankq/index_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lowrankq {

namespace {

std::size_t ceil_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

}  // namespace

std::size_t cardinality(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("dimension cardinality must be >= 1");
    if (n > std::numeric_limits<std::size_t>::max() / d)
      throw std::overflow_error("product space cardinality overflows");
    n *= d;
  }
  return n;
}

std::size_t flatten(std::span<const std::size_t> dims, std::span<const std::size_t> idx) {
  if (dims.size() != idx.size())
    throw std::invalid_argument("flatten: index arity does not match dims");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (idx[i] >= dims[i])
      throw std::out_of_range("flatten: component " + std::to_string(i) + " = " +
                              std::to_string(idx[i]) + " >= " + std::to_string(dims[i]));
    flat = flat * dims[i] + idx[i];
  }
  return flat;
}

std::vector<std::size_t> unflatten(std::span<const std::size_t> dims, std::size_t flat) {
  if (flat >= cardinality(dims))
    throw std::out_of_range("unflatten: flat index " + std::to_string(flat) +
                            " out of range");
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    idx[i] = flat % dims[i];
    flat /= dims[i];
  }
  return idx;
}

void GridSpec::validate() const {
  if (!(lower < upper)) throw std::invalid_argument("grid needs lower < upper");
  if (bins < 1) throw std::invalid_argument("grid needs at least one bin");
}

std::size_t discretize(const GridSpec& grid, double x) {
  if (!(x > grid.lower)) return 0;  // also maps NaN to bin 0
  if (x >= grid.upper) return grid.bins - 1;
  const double width = (grid.upper - grid.lower) / static_cast<double>(grid.bins);
  const auto bin = static_cast<std::size_t>((x - grid.lower) / width);
  return std::min(bin, grid.bins - 1);
}

double bin_center(const GridSpec& grid, std::size_t bin) {
  if (bin >= grid.bins) throw std::out_of_range("bin_center: bin out of range");
  const double width = (grid.upper - grid.lower) / static_cast<double>(grid.bins);
  return grid.lower + (static_cast<double>(bin) + 0.5) * width;
}

std::string to_string(PlanMode mode) {
  return mode == PlanMode::classic ? "classic" : "flat_near_square";
}

PlanMode plan_mode_from_string(const std::string& name) {
  if (name == "classic") return PlanMode::classic;
  if (name == "flat_near_square" || name == "reshaped") return PlanMode::flat_near_square;
  throw std::invalid_argument("unknown plan mode '" + name + "'");
}

ReshapePlan::ReshapePlan(std::size_t state_count, std::size_t action_count, PlanMode mode)
    : mode_(mode), states_(state_count), actions_(action_count) {
  if (state_count < 1 || action_count < 1)
    throw std::invalid_argument("plan needs at least one state and one action");
  if (mode == PlanMode::classic) {
    rows_ = states_;
    cols_ = actions_;
  } else {
    const std::size_t total = states_ * actions_;
    rows_ = ceil_sqrt(total);
    cols_ = (total + rows_ - 1) / rows_;
  }
}

Cell ReshapePlan::cell_of(std::size_t state, std::size_t action) const {
  if (state >= states_ || action >= actions_)
    throw std::out_of_range("cell_of: (" + std::to_string(state) + "," +
                            std::to_string(action) + ") outside the state-action space");
  return cell_unchecked(state, action);
}

std::vector<Cell> ReshapePlan::action_cells(std::size_t state) const {
  if (state >= states_) throw std::out_of_range("action_cells: state out of range");
  std::vector<Cell> cells;
  cells.reserve(actions_);
  for (std::size_t a = 0; a < actions_; ++a) cells.push_back(cell_unchecked(state, a));
  return cells;
}

ReshapePlan plan(const ProductSpace& space, PlanMode mode) {
  return ReshapePlan(space.state_count(), space.action_count(), mode);
}

}  // namespace lowrankq
