#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risopt::conic {

enum class BlockKind { kPsd, kNonneg };

/// A `kNonneg` block of dimension n is a diagonal block: its data may only
/// touch diagonal entries, so the block behaves as n nonnegative scalars.
struct BlockSpec {
  int dim = 0;
  BlockKind kind = BlockKind::kPsd;
};

/// One entry of a symmetric matrix, stored with row <= col. The value is the
/// matrix element itself, so an off-diagonal entry contributes 2 * value *
/// X(row, col) to the trace inner product.
struct Entry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct BlockTerm {
  int block = 0;
  std::vector<Entry> entries;
};

struct Constraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

/// Standard-form block-diagonal SDP
///
///   minimize    sum_k <C_k, X_k>
///   subject to  sum_k <A_{i,k}, X_k> = b_i,   i = 1..m
///               X_k PSD (or diagonal nonnegative).
///
/// Entries added twice accumulate. Dense inputs are symmetrized.
class ConicProblem {
 public:
  int AddBlock(int dim, BlockKind kind = BlockKind::kPsd);
  int AddConstraint(double rhs);
  void SetRhs(int constraint, double rhs);

  void AddObjective(int block, int row, int col, double value);
  void AddObjectiveDense(int block, const Eigen::MatrixXd& c);
  void AddCoefficient(int constraint, int block, int row, int col,
                      double value);
  void AddCoefficientDense(int constraint, int block, const Eigen::MatrixXd& a);

  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const Constraint& constraint(int i) const { return constraints_.at(i); }
  const std::vector<Entry>& objective(int block) const {
    return objective_.at(block);
  }

  Eigen::MatrixXd ObjectiveMatrix(int block) const;
  Eigen::MatrixXd ConstraintMatrix(int constraint, int block) const;
  Eigen::VectorXd Rhs() const;

  /// Throws std::invalid_argument on out-of-range indices or off-diagonal
  /// data in a nonnegative block.
  void Validate() const;

 private:
  void CheckIndex(int block, int row, int col) const;

  std::vector<BlockSpec> blocks_;
  std::vector<std::vector<Entry>> objective_;
  std::vector<Constraint> constraints_;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations, kNumericalFailure };

const char* ToString(SolveStatus status);

enum class Certificate { kNone, kPrimalInfeasible, kDualInfeasible };

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double step_fraction = 0.99;
  /// Relative threshold of the rank-revealing QR on the constraint Gram.
  double dependency_tol = 1e-10;
  double infeasibility_tol = 1e-8;
};

/// Residuals are relative:
///   primal_residual = ||b - A(X)|| / (1 + ||b||)
///   dual_residual   = ||C - A*(y) - S||_F / (1 + ||C||_F)
///   gap             = max(<X,S>, |pobj - dobj|) / (1 + |pobj| + |dobj|)
struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Certificate certificate = Certificate::kNone;
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::MatrixXd> s;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  /// Equality constraints removed as linearly dependent before solving.
  std::vector<int> dropped_constraints;
  std::string message;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  double max_residual() const;
};

/// Dense infeasible-start primal-dual path-following method with the HKM
/// search direction and Mehrotra predictor-corrector steps. Deterministic.
ConicSolution Solve(const ConicProblem& problem,
                    const SolverOptions& options = {});
ConicSolution Solve(const ConicProblem& problem, double tol, int max_iter);

/// Plain-text dump for offline inspection. Layout:
///
///   blocks <K>
///   block <k> <dim> psd|nonneg          (k = 0..K-1)
///   constraints <m>
///   rhs <i> <value>                     (i = 1..m)
///   <block> <row> <col> <index> <value> (index 0 = objective, 1..m)
///
/// Every value is written with 17 significant digits so a round trip through
/// ReadDump is exact.
void WriteDump(const ConicProblem& problem, std::ostream& out);
ConicProblem ReadDump(std::istream& in);

}  // namespace risopt::conic
