#include "risopt/conic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace risopt::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// ConicProblem

int ConicProblem::AddBlock(int dim, BlockKind kind) {
  if (dim < 1) throw std::invalid_argument("AddBlock: dim must be >= 1");
  blocks_.push_back({dim, kind});
  objective_.emplace_back();
  return num_blocks() - 1;
}

int ConicProblem::AddConstraint(double rhs) {
  constraints_.push_back({{}, rhs});
  return num_constraints() - 1;
}

void ConicProblem::SetRhs(int constraint, double rhs) {
  constraints_.at(constraint).rhs = rhs;
}

void ConicProblem::CheckIndex(int block, int row, int col) const {
  if (block < 0 || block >= num_blocks()) {
    throw std::invalid_argument("block index out of range");
  }
  const int n = blocks_[block].dim;
  if (row < 0 || col < 0 || row >= n || col >= n) {
    throw std::invalid_argument("entry index out of range for block");
  }
}

void ConicProblem::AddObjective(int block, int row, int col, double value) {
  CheckIndex(block, row, col);
  if (value == 0.0) return;
  objective_[block].push_back({std::min(row, col), std::max(row, col), value});
}

void ConicProblem::AddObjectiveDense(int block, const MatrixXd& c) {
  const MatrixXd sym = 0.5 * (c + c.transpose());
  for (int j = 0; j < sym.cols(); ++j) {
    for (int i = 0; i <= j; ++i) AddObjective(block, i, j, sym(i, j));
  }
}

void ConicProblem::AddCoefficient(int constraint, int block, int row, int col,
                                  double value) {
  CheckIndex(block, row, col);
  if (value == 0.0) return;
  auto& terms = constraints_.at(constraint).terms;
  auto it = std::find_if(terms.begin(), terms.end(),
                         [block](const BlockTerm& t) { return t.block == block; });
  if (it == terms.end()) {
    terms.push_back({block, {}});
    it = terms.end() - 1;
  }
  it->entries.push_back({std::min(row, col), std::max(row, col), value});
}

void ConicProblem::AddCoefficientDense(int constraint, int block,
                                       const MatrixXd& a) {
  const MatrixXd sym = 0.5 * (a + a.transpose());
  for (int j = 0; j < sym.cols(); ++j) {
    for (int i = 0; i <= j; ++i) AddCoefficient(constraint, block, i, j, sym(i, j));
  }
}

namespace {

MatrixXd ToDense(int dim, const std::vector<Entry>& entries) {
  MatrixXd m = MatrixXd::Zero(dim, dim);
  for (const auto& e : entries) {
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += e.value;
  }
  return m;
}

}  // namespace

MatrixXd ConicProblem::ObjectiveMatrix(int block) const {
  return ToDense(blocks_.at(block).dim, objective_.at(block));
}

MatrixXd ConicProblem::ConstraintMatrix(int constraint, int block) const {
  for (const auto& t : constraints_.at(constraint).terms) {
    if (t.block == block) return ToDense(blocks_.at(block).dim, t.entries);
  }
  const int n = blocks_.at(block).dim;
  return MatrixXd::Zero(n, n);
}

VectorXd ConicProblem::Rhs() const {
  VectorXd b(num_constraints());
  for (int i = 0; i < num_constraints(); ++i) b(i) = constraints_[i].rhs;
  return b;
}

void ConicProblem::Validate() const {
  auto check_entries = [this](int block, const std::vector<Entry>& entries) {
    for (const auto& e : entries) {
      CheckIndex(block, e.row, e.col);
      if (blocks_[block].kind == BlockKind::kNonneg && e.row != e.col) {
        throw std::invalid_argument(
            "off-diagonal data in a nonnegative block");
      }
      if (!std::isfinite(e.value)) {
        throw std::invalid_argument("non-finite problem data");
      }
    }
  };
  for (int k = 0; k < num_blocks(); ++k) check_entries(k, objective_[k]);
  for (const auto& c : constraints_) {
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("non-finite rhs");
    for (const auto& t : c.terms) check_entries(t.block, t.entries);
  }
}

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kMaxIterations:
      return "MaxIterations";
    case SolveStatus::kNumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

double ConicSolution::max_residual() const {
  return std::max({primal_residual, dual_residual, gap});
}

// ---------------------------------------------------------------------------
// Solver internals

namespace {

// Constraint data for one block, with both triangles expanded.
struct Term {
  int block = 0;
  std::vector<Entry> full;
  bool dense = false;
  MatrixXd mat;
};

struct Compiled {
  std::vector<int> dims;
  std::vector<MatrixXd> c;
  std::vector<std::vector<Term>> a;
  VectorXd b;
  // block -> (constraint, term index)
  std::vector<std::vector<std::pair<int, int>>> by_block;
  int total_dim = 0;
};

std::vector<Entry> Coalesce(const std::vector<Entry>& entries) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& e : entries) acc[{e.row, e.col}] += e.value;
  std::vector<Entry> out;
  for (const auto& [key, value] : acc) {
    if (value != 0.0) out.push_back({key.first, key.second, value});
  }
  return out;
}

Term MakeTerm(int block, int dim, const std::vector<Entry>& upper) {
  Term t;
  t.block = block;
  for (const auto& e : Coalesce(upper)) {
    t.full.push_back(e);
    if (e.row != e.col) t.full.push_back({e.col, e.row, e.value});
  }
  t.dense = static_cast<int>(t.full.size()) > 2 * dim;
  if (t.dense) t.mat = ToDense(dim, Coalesce(upper));
  return t;
}

double Inner(const Term& t, const MatrixXd& g) {
  if (t.dense) return t.mat.cwiseProduct(g).sum();
  double s = 0.0;
  for (const auto& e : t.full) s += e.value * g(e.row, e.col);
  return s;
}

void AddScaled(const Term& t, double alpha, MatrixXd& out) {
  if (t.dense) {
    out += alpha * t.mat;
    return;
  }
  for (const auto& e : t.full) out(e.row, e.col) += alpha * e.value;
}

using BlockVec = std::vector<MatrixXd>;

double InnerBlocks(const BlockVec& x, const BlockVec& s) {
  double v = 0.0;
  for (size_t k = 0; k < x.size(); ++k) v += x[k].cwiseProduct(s[k]).sum();
  return v;
}

double NormBlocks(const BlockVec& x) { return std::sqrt(InnerBlocks(x, x)); }

class Engine {
 public:
  Engine(const Compiled& data, const SolverOptions& options)
      : d_(data), opt_(options), m_(static_cast<int>(data.b.size())) {}

  ConicSolution Run();

 private:
  VectorXd ApplyA(const BlockVec& x) const {
    VectorXd out = VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : d_.a[i]) out(i) += Inner(t, x[t.block]);
    }
    return out;
  }

  BlockVec ApplyAT(const VectorXd& y) const {
    BlockVec out;
    for (int n : d_.dims) out.push_back(MatrixXd::Zero(n, n));
    for (int i = 0; i < m_; ++i) {
      if (y(i) == 0.0) continue;
      for (const auto& t : d_.a[i]) AddScaled(t, y(i), out[t.block]);
    }
    return out;
  }

  MatrixXd SchurComplement(const BlockVec& x, const BlockVec& s_inv) const;

  // Returns the largest alpha such that x + alpha*dx stays PSD (may be inf).
  static double MaxStep(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dx);

  struct Direction {
    BlockVec dx;
    VectorXd dy;
    BlockVec ds;
  };

  Direction Solve(const Eigen::LDLT<MatrixXd>& schur, const BlockVec& k,
                  const BlockVec& x, const BlockVec& s_inv, const VectorXd& rp,
                  const BlockVec& rd, const BlockVec& x_rd_sinv) const;

  double StepLength(const std::vector<Eigen::LLT<MatrixXd>>& chol,
                    const BlockVec& dx) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < dx.size(); ++k) {
      alpha = std::min(alpha, MaxStep(chol[k], dx[k]));
    }
    return std::min(1.0, opt_.step_fraction * alpha);
  }

  const Compiled& d_;
  const SolverOptions& opt_;
  int m_;
};

MatrixXd Engine::SchurComplement(const BlockVec& x,
                                 const BlockVec& s_inv) const {
  MatrixXd schur = MatrixXd::Zero(m_, m_);
  for (size_t k = 0; k < d_.dims.size(); ++k) {
    const auto& list = d_.by_block[k];
    const MatrixXd& xk = x[k];
    const MatrixXd& sk = s_inv[k];
    std::vector<MatrixXd> g(list.size());
    for (size_t p = 0; p < list.size(); ++p) {
      const Term& t = d_.a[list[p].first][list[p].second];
      if (t.dense) g[p] = xk * t.mat * sk;
    }
    for (size_t p = 0; p < list.size(); ++p) {
      const Term& ti = d_.a[list[p].first][list[p].second];
      for (size_t q = p; q < list.size(); ++q) {
        const Term& tj = d_.a[list[q].first][list[q].second];
        double v = 0.0;
        if (ti.dense) {
          v = Inner(tj, g[p]);
        } else if (tj.dense) {
          v = Inner(ti, g[q]);
        } else {
          for (const auto& ei : ti.full) {
            for (const auto& ej : tj.full) {
              v += ei.value * ej.value * xk(ej.row, ei.row) *
                   sk(ei.col, ej.col);
            }
          }
        }
        const int i = list[p].first;
        const int j = list[q].first;
        schur(i, j) += v;
        if (i != j) schur(j, i) += v;
      }
    }
  }
  return schur;
}

double Engine::MaxStep(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dx) {
  const Eigen::Index n = dx.rows();
  if (n == 1) {
    const double x = chol.matrixL()(0, 0) * chol.matrixL()(0, 0);
    return dx(0, 0) < 0.0 ? -x / dx(0, 0)
                          : std::numeric_limits<double>::infinity();
  }
  MatrixXd w = chol.matrixL().solve(dx);
  w = chol.matrixL().solve(w.transpose()).eval();
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

Engine::Direction Engine::Solve(const Eigen::LDLT<MatrixXd>& schur,
                                const BlockVec& k, const BlockVec& x,
                                const BlockVec& s_inv, const VectorXd& rp,
                                const BlockVec& rd,
                                const BlockVec& x_rd_sinv) const {
  VectorXd rhs = rp;
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : d_.a[i]) {
      rhs(i) += Inner(t, x_rd_sinv[t.block]) - Inner(t, k[t.block]);
    }
  }
  Direction dir;
  dir.dy = schur.solve(rhs);
  const BlockVec aty = ApplyAT(dir.dy);
  for (size_t b = 0; b < x.size(); ++b) {
    dir.ds.push_back(rd[b] - aty[b]);
    MatrixXd dx = k[b] - x[b] * dir.ds[b] * s_inv[b];
    dir.dx.push_back(0.5 * (dx + dx.transpose()));
  }
  return dir;
}

ConicSolution Engine::Run() {
  const int nb = static_cast<int>(d_.dims.size());
  const double norm_b = d_.b.norm();
  const double norm_c = NormBlocks(d_.c);

  // Starting point after SDPT3's infeasible-start heuristic.
  BlockVec x(nb), s(nb);
  for (int k = 0; k < nb; ++k) {
    const int n = d_.dims[k];
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double xi = std::max(10.0, sqrt_n);
    double eta = std::max(10.0, sqrt_n);
    double max_norm_a = 0.0;
    for (const auto& [i, ti] : d_.by_block[k]) {
      const Term& t = d_.a[i][ti];
      double na = 0.0;
      for (const auto& e : t.full) na += e.value * e.value;
      na = std::sqrt(na);
      max_norm_a = std::max(max_norm_a, na);
      xi = std::max(xi, n * (1.0 + std::abs(d_.b(i))) / (1.0 + na));
    }
    eta = std::max(eta, 1.0 + std::max(max_norm_a, d_.c[k].norm()));
    x[k] = xi * MatrixXd::Identity(n, n);
    s[k] = eta * MatrixXd::Identity(n, n);
  }
  VectorXd y = VectorXd::Zero(m_);

  ConicSolution best;
  best.status = SolveStatus::kMaxIterations;
  double best_merit = std::numeric_limits<double>::infinity();
  int stalled = 0;

  auto record = [&](ConicSolution& sol, int iter, double pobj, double dobj,
                    double pres, double dres, double gap) {
    sol.x = x;
    sol.s = s;
    sol.y = y;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.gap = gap;
    sol.iterations = iter;
  };

  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    const VectorXd rp = d_.b - ApplyA(x);
    BlockVec rd = ApplyAT(y);
    for (int k = 0; k < nb; ++k) rd[k] = d_.c[k] - rd[k] - s[k];
    const double pobj = InnerBlocks(d_.c, x);
    const double dobj = d_.b.dot(y);
    const double xs = InnerBlocks(x, s);
    const double pres = rp.norm() / (1.0 + norm_b);
    const double dres = NormBlocks(rd) / (1.0 + norm_c);
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double gap = std::max(xs, std::abs(pobj - dobj)) / denom;

    const double merit = std::max({pres, dres, gap});
    if (merit < best_merit) {
      best_merit = merit;
      record(best, iter, pobj, dobj, pres, dres, gap);
    }
    if (pres <= opt_.tol && dres <= opt_.tol && gap <= opt_.tol) {
      ConicSolution sol;
      record(sol, iter, pobj, dobj, pres, dres, gap);
      sol.status = SolveStatus::kOptimal;
      return sol;
    }

    // Infeasibility certificates: a ray with b'y > 0 and A*(y) <= 0, or a
    // ray with <C,X> < 0 and A(X) = 0.
    if (dobj > 0.0) {
      BlockVec aty_s = ApplyAT(y);
      for (int k = 0; k < nb; ++k) aty_s[k] += s[k];
      if (NormBlocks(aty_s) / dobj < opt_.infeasibility_tol) {
        ConicSolution sol;
        record(sol, iter, pobj, dobj, pres, dres, gap);
        sol.status = SolveStatus::kInfeasible;
        sol.certificate = Certificate::kPrimalInfeasible;
        sol.message = "primal infeasibility certificate";
        return sol;
      }
    }
    if (pobj < 0.0 && ApplyA(x).norm() / -pobj < opt_.infeasibility_tol) {
      ConicSolution sol;
      record(sol, iter, pobj, dobj, pres, dres, gap);
      sol.status = SolveStatus::kInfeasible;
      sol.certificate = Certificate::kDualInfeasible;
      sol.message = "dual infeasibility certificate (primal unbounded)";
      return sol;
    }
    if (iter == opt_.max_iter) break;

    std::vector<Eigen::LLT<MatrixXd>> chol_x, chol_s;
    BlockVec s_inv(nb);
    bool ok = true;
    for (int k = 0; k < nb; ++k) {
      chol_x.emplace_back(x[k]);
      chol_s.emplace_back(s[k]);
      if (chol_x[k].info() != Eigen::Success ||
          chol_s[k].info() != Eigen::Success) {
        ok = false;
        break;
      }
      s_inv[k] = chol_s[k].solve(MatrixXd::Identity(d_.dims[k], d_.dims[k]));
      s_inv[k] = 0.5 * (s_inv[k] + s_inv[k].transpose()).eval();
    }
    if (!ok) {
      best.status = SolveStatus::kNumericalFailure;
      best.message = "iterate lost positive definiteness";
      return best;
    }

    const MatrixXd schur_mat = SchurComplement(x, s_inv);
    Eigen::LDLT<MatrixXd> schur(schur_mat);
    if (schur.info() != Eigen::Success || !schur.isPositive()) {
      const double reg = 1e-14 * std::max(1.0, schur_mat.diagonal().maxCoeff());
      schur.compute(schur_mat +
                    reg * MatrixXd::Identity(m_, m_));
      if (schur.info() != Eigen::Success) {
        best.status = SolveStatus::kNumericalFailure;
        best.message = "Schur complement factorization failed";
        return best;
      }
    }

    BlockVec x_rd_sinv(nb);
    for (int k = 0; k < nb; ++k) x_rd_sinv[k] = x[k] * rd[k] * s_inv[k];

    // Predictor (affine scaling).
    BlockVec k_aff(nb);
    for (int k = 0; k < nb; ++k) k_aff[k] = -x[k];
    const Direction aff = Solve(schur, k_aff, x, s_inv, rp, rd, x_rd_sinv);
    const double ap_aff = StepLength(chol_x, aff.dx);
    const double ad_aff = StepLength(chol_s, aff.ds);
    double xs_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      xs_aff += (x[k] + ap_aff * aff.dx[k])
                    .cwiseProduct(s[k] + ad_aff * aff.ds[k])
                    .sum();
    }
    const double mu = xs / d_.total_dim;
    const double ratio = std::clamp(xs_aff / xs, 0.0, 1.0);
    const double exponent =
        std::max(1.0, 3.0 * std::min(ap_aff, ad_aff) * std::min(ap_aff, ad_aff));
    const double sigma = std::pow(ratio, exponent);

    // Corrector with the second-order term.
    BlockVec k_cor(nb);
    for (int k = 0; k < nb; ++k) {
      k_cor[k] = sigma * mu * s_inv[k] - x[k] -
                 aff.dx[k] * aff.ds[k] * s_inv[k];
    }
    const Direction dir = Solve(schur, k_cor, x, s_inv, rp, rd, x_rd_sinv);
    const double ap = StepLength(chol_x, dir.dx);
    const double ad = StepLength(chol_s, dir.ds);

    for (int k = 0; k < nb; ++k) {
      x[k] += ap * dir.dx[k];
      s[k] += ad * dir.ds[k];
      x[k] = 0.5 * (x[k] + x[k].transpose()).eval();
      s[k] = 0.5 * (s[k] + s[k].transpose()).eval();
    }
    y += ad * dir.dy;

    if (!y.allFinite()) {
      best.status = SolveStatus::kNumericalFailure;
      best.message = "non-finite iterate";
      return best;
    }
    stalled = (ap < 1e-9 && ad < 1e-9) ? stalled + 1 : 0;
    if (stalled >= 3) {
      best.status = SolveStatus::kNumericalFailure;
      best.message = "step length stagnated";
      return best;
    }
  }
  best.status = SolveStatus::kMaxIterations;
  best.message = "iteration limit reached";
  return best;
}

// Indices of a maximal linearly independent subset of the constraints, in
// original order. Sets `consistent` to false when a dependent row has a
// right-hand side that contradicts the rows it depends on.
std::vector<int> IndependentRows(const ConicProblem& p, double tol,
                                 bool& consistent) {
  consistent = true;
  const int m = p.num_constraints();
  std::vector<int> offset(p.num_blocks() + 1, 0);
  for (int k = 0; k < p.num_blocks(); ++k) {
    const int n = p.blocks()[k].dim;
    offset[k + 1] = offset[k] + n * (n + 1) / 2;
  }
  auto svec_index = [&](int block, int row, int col) {
    const int r = std::min(row, col);
    const int c = std::max(row, col);
    return offset[block] + c * (c + 1) / 2 + r;
  };
  MatrixXd mat = MatrixXd::Zero(offset.back(), m);
  for (int i = 0; i < m; ++i) {
    for (const auto& t : p.constraint(i).terms) {
      for (const auto& e : t.entries) {
        const double w = e.row == e.col ? 1.0 : std::sqrt(2.0);
        mat(svec_index(t.block, e.row, e.col), i) += w * e.value;
      }
    }
  }
  if (m == 0) return {};
  Eigen::ColPivHouseholderQR<MatrixXd> qr(mat);
  qr.setThreshold(tol);
  const int rank = static_cast<int>(qr.rank());
  if (rank == m) {
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    return all;
  }
  // Keep the earliest independent constraints; later duplicates are dropped.
  std::vector<int> keep;
  MatrixXd ortho(mat.rows(), rank);
  const double scale = mat.colwise().norm().maxCoeff();
  for (int i = 0; i < m && static_cast<int>(keep.size()) < rank; ++i) {
    const int k = static_cast<int>(keep.size());
    VectorXd col = mat.col(i);
    for (int pass = 0; pass < 2; ++pass) {
      col -= ortho.leftCols(k) * (ortho.leftCols(k).transpose() * col);
    }
    if (col.norm() > tol * scale) {
      ortho.col(k) = col / col.norm();
      keep.push_back(i);
    }
  }
  const int kept = static_cast<int>(keep.size());

  MatrixXd basis(mat.rows(), kept);
  VectorXd b_keep(kept);
  for (int r = 0; r < kept; ++r) {
    basis.col(r) = mat.col(keep[r]);
    b_keep(r) = p.constraint(keep[r]).rhs;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> basis_qr(basis);
  for (int i = 0; i < m; ++i) {
    if (std::binary_search(keep.begin(), keep.end(), i)) continue;
    const VectorXd coef = basis_qr.solve(VectorXd(mat.col(i)));
    const double implied = coef.dot(b_keep);
    const double rhs = p.constraint(i).rhs;
    if (std::abs(implied - rhs) > 1e-8 * (1.0 + std::abs(rhs))) {
      consistent = false;
    }
  }
  return keep;
}

}  // namespace

ConicSolution Solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.Validate();
  bool consistent = true;
  const std::vector<int> rows =
      IndependentRows(problem, options.dependency_tol, consistent);
  const int m = problem.num_constraints();
  const int nb = problem.num_blocks();

  std::vector<int> dropped;
  for (int i = 0, r = 0; i < m; ++i) {
    if (r < static_cast<int>(rows.size()) && rows[r] == i) {
      ++r;
    } else {
      dropped.push_back(i);
    }
  }
  if (!dropped.empty()) {
    std::clog << "risopt::conic: dropping " << dropped.size()
              << " linearly dependent constraint(s)\n";
  }

  if (!consistent) {
    ConicSolution sol;
    sol.status = SolveStatus::kInfeasible;
    sol.certificate = Certificate::kPrimalInfeasible;
    sol.dropped_constraints = dropped;
    sol.message = "inconsistent linearly dependent equality constraints";
    sol.y = VectorXd::Zero(m);
    return sol;
  }

  Compiled data;
  data.by_block.resize(nb);
  for (int k = 0; k < nb; ++k) {
    const int n = problem.blocks()[k].dim;
    data.dims.push_back(n);
    data.total_dim += n;
    data.c.push_back(ToDense(n, Coalesce(problem.objective(k))));
  }
  data.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    const Constraint& c = problem.constraint(rows[r]);
    data.b(static_cast<Eigen::Index>(r)) = c.rhs;
    std::vector<Term> terms;
    for (const auto& t : c.terms) {
      Term term = MakeTerm(t.block, data.dims[t.block], t.entries);
      if (term.full.empty()) continue;
      data.by_block[t.block].push_back(
          {static_cast<int>(r), static_cast<int>(terms.size())});
      terms.push_back(std::move(term));
    }
    data.a.push_back(std::move(terms));
  }

  Engine engine(data, options);
  ConicSolution sol = engine.Run();

  // Scatter multipliers back to the caller's constraint numbering.
  VectorXd y_full = VectorXd::Zero(m);
  if (sol.y.size() == static_cast<Eigen::Index>(rows.size())) {
    for (size_t r = 0; r < rows.size(); ++r) {
      y_full(rows[r]) = sol.y(static_cast<Eigen::Index>(r));
    }
  }
  sol.y = y_full;
  sol.dropped_constraints = std::move(dropped);
  return sol;
}

ConicSolution Solve(const ConicProblem& problem, double tol, int max_iter) {
  SolverOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return Solve(problem, options);
}

// ---------------------------------------------------------------------------
// Text dump

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

void WriteDump(const ConicProblem& problem, std::ostream& out) {
  out << "blocks " << problem.num_blocks() << '\n';
  for (int k = 0; k < problem.num_blocks(); ++k) {
    const auto& spec = problem.blocks()[k];
    out << "block " << k << ' ' << spec.dim << ' '
        << (spec.kind == BlockKind::kPsd ? "psd" : "nonneg") << '\n';
  }
  out << "constraints " << problem.num_constraints() << '\n';
  for (int i = 0; i < problem.num_constraints(); ++i) {
    out << "rhs " << i + 1 << ' ' << FormatDouble(problem.constraint(i).rhs)
        << '\n';
  }
  for (int k = 0; k < problem.num_blocks(); ++k) {
    for (const auto& e : Coalesce(problem.objective(k))) {
      out << k << ' ' << e.row << ' ' << e.col << " 0 " << FormatDouble(e.value)
          << '\n';
    }
  }
  for (int i = 0; i < problem.num_constraints(); ++i) {
    for (const auto& t : problem.constraint(i).terms) {
      for (const auto& e : Coalesce(t.entries)) {
        out << t.block << ' ' << e.row << ' ' << e.col << ' ' << i + 1 << ' '
            << FormatDouble(e.value) << '\n';
      }
    }
  }
}

ConicProblem ReadDump(std::istream& in) {
  ConicProblem p;
  std::string line;
  int line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    throw std::runtime_error("conic dump line " + std::to_string(line_no) +
                             ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "blocks" || head == "constraints") {
      int count = 0;
      if (!(ss >> count)) fail("missing count");
      if (head == "constraints") {
        for (int i = 0; i < count; ++i) p.AddConstraint(0.0);
      }
    } else if (head == "block") {
      int k = 0, dim = 0;
      std::string kind;
      if (!(ss >> k >> dim >> kind)) fail("malformed block record");
      if (k != p.num_blocks()) fail("blocks out of order");
      p.AddBlock(dim, kind == "nonneg" ? BlockKind::kNonneg : BlockKind::kPsd);
    } else if (head == "rhs") {
      int i = 0;
      std::string value;
      if (!(ss >> i >> value)) fail("malformed rhs record");
      p.SetRhs(i - 1, std::stod(value));
    } else {
      int block = 0, row = 0, col = 0, index = 0;
      std::string value;
      std::istringstream rec(line);
      if (!(rec >> block >> row >> col >> index >> value)) {
        fail("malformed entry record");
      }
      if (index == 0) {
        p.AddObjective(block, row, col, std::stod(value));
      } else {
        p.AddCoefficient(index - 1, block, row, col, std::stod(value));
      }
    }
  }
  return p;
}

}  // namespace risopt::conic
