#include "lowrankq/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lowrankq {

namespace {

void check_cell(const FactorPair& fp, Cell cell) {
  if (cell.row < 0 || cell.row >= fp.rows() || cell.col < 0 || cell.col >= fp.cols()) {
    std::ostringstream os;
    os << "cell (" << cell.row << "," << cell.col << ") outside " << fp.rows() << "x"
       << fp.cols() << " factorization";
    throw std::out_of_range(os.str());
  }
}

std::string cell_text(Cell c) {
  std::ostringstream os;
  os << "(" << c.row << "," << c.col << ")";
  return os.str();
}

// Solves X * gram = rhs for X (gram symmetric M x M). Falls back to a
// ridge-damped solve when gram is singular or badly conditioned.
template <typename Rhs>
Eigen::MatrixXd solve_right(const Eigen::MatrixXd& gram, const Rhs& rhs, int& damped) {
  const Index m = gram.rows();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  // rcond() misses exact zero pivots, so check the pivot spread too
  const Eigen::VectorXd piv = ldlt.vectorD().cwiseAbs();
  const bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                  piv.minCoeff() > 1e-13 * piv.maxCoeff() && ldlt.rcond() > 1e-13;
  if (ok) return ldlt.solve(rhs.transpose()).transpose();

  ++damped;
  double lambda = 1e-8 * gram.trace() / static_cast<double>(m);
  if (!(lambda > 0.0)) lambda = 1e-8;
  Eigen::MatrixXd ridge = gram + lambda * Eigen::MatrixXd::Identity(m, m);
  Eigen::LDLT<Eigen::MatrixXd> damped_ldlt(ridge);
  return damped_ldlt.solve(rhs.transpose()).transpose();
}

}  // namespace

FactorPair init_factors(Index n_rows, Index n_cols, Index rank, double scale,
                        std::uint64_t seed) {
  if (n_rows < 1 || n_cols < 1)
    throw std::invalid_argument("factorization needs at least one row and column");
  if (rank < 1 || rank > std::min(n_rows, n_cols))
    throw std::invalid_argument("rank must lie in [1, min(rows, cols)], got " +
                                std::to_string(rank));
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("init scale must be positive");

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(0.5 * scale, 1.5 * scale);
  FactorPair fp{RowMatrix(n_rows, rank), Eigen::MatrixXd(rank, n_cols)};
  for (Index i = 0; i < n_rows; ++i)
    for (Index m = 0; m < rank; ++m) fp.left(i, m) = dist(gen);
  for (Index j = 0; j < n_cols; ++j)
    for (Index m = 0; m < rank; ++m) fp.right(m, j) = dist(gen);
  return fp;
}

double predict_cell(const FactorPair& fp, Cell cell) {
  check_cell(fp, cell);
  return fp.left.row(cell.row).dot(fp.right.col(cell.col));
}

std::vector<double> predict_cells(const FactorPair& fp, std::span<const Cell> cells) {
  for (const Cell& c : cells) check_cell(fp, c);
  std::vector<double> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) out.push_back(fp.left.row(c.row).dot(fp.right.col(c.col)));
  return out;
}

void sgd_update(FactorPair& fp, const TDTarget& target, const SgdOptions& opts) {
  const Cell cell = target.cell;
  check_cell(fp, cell);
  if (!(opts.alpha > 0.0)) throw std::invalid_argument("sgd stepsize must be positive");
  if (opts.eta < 0.0) throw std::invalid_argument("regularizer weight must be >= 0");
  if (!std::isfinite(target.value))
    throw NumericalDivergence("non-finite TD target at cell " + cell_text(cell), cell);

  const Eigen::VectorXd l = fp.left.row(cell.row).transpose();
  const Eigen::VectorXd r = fp.right.col(cell.col);
  const double delta = target.value - l.dot(r);

  Eigen::VectorXd grad_l = delta * r;
  Eigen::VectorXd grad_r = delta * l;
  if (opts.eta > 0.0) {
    grad_l -= 2.0 * opts.eta * l;
    grad_r -= 2.0 * opts.eta * r;
  }

  double step = opts.alpha;
  if (opts.normalize) {
    const double norm = std::sqrt(grad_l.squaredNorm() + grad_r.squaredNorm());
    if (norm > kNormalizationFloor) step /= norm;
  }

  const Eigen::VectorXd new_l = l + step * grad_l;
  const Eigen::VectorXd new_r = r + step * grad_r;
  const bool finite = new_l.allFinite() && new_r.allFinite();
  if (!finite || new_l.cwiseAbs().maxCoeff() > kDivergenceGuard ||
      new_r.cwiseAbs().maxCoeff() > kDivergenceGuard) {
    throw NumericalDivergence("factor entries exceeded divergence guard at cell " +
                                  cell_text(cell),
                              cell);
  }
  fp.left.row(cell.row) = new_l.transpose();
  fp.right.col(cell.col) = new_r;
}

QTable build_target_matrix(const FactorPair& fp, const TDTarget& target) {
  check_cell(fp, target.cell);
  QTable q = materialize(fp);
  q(target.cell.row, target.cell.col) = target.value;
  return q;
}

AlsResult als_sweep(const FactorPair& fp, const QTable& qbar, int k_iters) {
  if (k_iters < 1) throw std::invalid_argument("ALS needs at least one iteration");
  if (qbar.rows() != fp.rows() || qbar.cols() != fp.cols())
    throw std::invalid_argument("ALS target shape does not match the factorization");

  AlsResult res{fp, 0};
  Eigen::MatrixXd left(fp.left);
  Eigen::MatrixXd right(fp.right);
  const Eigen::MatrixXd target(qbar);
  for (int k = 0; k < k_iters; ++k) {
    // L = Qbar R^T (R R^T)^-1
    const Eigen::MatrixXd gram_r = right * right.transpose();
    left = solve_right(gram_r, target * right.transpose(), res.damped_solves);
    // R = (L^T L)^-1 L^T Qbar, i.e. R^T = Qbar^T L (L^T L)^-1
    const Eigen::MatrixXd gram_l = left.transpose() * left;
    right = solve_right(gram_l, target.transpose() * left, res.damped_solves).transpose();
  }
  res.factors.left = left;
  res.factors.right = right;
  return res;
}

QTable materialize(const FactorPair& fp) { return fp.left * fp.right; }

double frobenius_sq_error(const QTable& a, const QTable& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius_sq_error: shape mismatch");
  return (a - b).squaredNorm();
}

std::optional<SvdSummary> svd_energy(const QTable& q, Index k) {
  if (k < 1) throw std::invalid_argument("svd_energy: k must be >= 1");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(q), Eigen::ComputeThinU |
                                                                 Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total_sq = s.squaredNorm();
  const double total = s.sum();
  if (s.size() == 0 || !(total_sq > 0.0)) return std::nullopt;

  SvdSummary out;
  out.k = std::min<Index>(k, s.size());
  double acc_sq = 0.0, acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    out.singular_values.push_back(s(i));
    acc_sq += s(i) * s(i);
    acc += s(i);
    out.energy_prefix.push_back(acc_sq / total_sq);
    out.magnitude_prefix.push_back(acc / total);
  }
  out.energy_prefix.back() = 1.0;
  out.magnitude_prefix.back() = 1.0;
  return out;
}

}  // namespace lowrankq
