#pragma once

#include <Eigen/Dense>

namespace risopt::conic {

/// T(H) = [[Re H, -Im H], [Im H, Re H]].
///
/// T(H) is PSD exactly when H is, every eigenvalue of H appears twice in
/// T(H), and <T(G), T(H)> = 2 Re Tr(G H). Compiled problems therefore scale
/// embedded data by 1/2 to keep objective values in complex units.
/// Throws std::invalid_argument when H is not Hermitian to 1e-12 (relative).
Eigen::MatrixXd EmbedHermitian(const Eigen::MatrixXcd& h);

/// Inverse of EmbedHermitian that also averages away any part of a real
/// symmetric 2n x 2n matrix that lies outside the image of T.
Eigen::MatrixXcd ExtractHermitian(const Eigen::MatrixXd& y);

/// Arrow-matrix form of the second-order cone ||u||_2 <= a:
///
///   [[a I_d, u], [u^T, a]]  PSD   <=>   ||u||_2 <= a.
///
/// The matrix is linear in (u, a); `dim` is the length d of u and the PSD
/// block has size d + 1 with the scalar a in the last diagonal slot.
struct ArrowTemplate {
  int dim = 0;

  int block_size() const { return dim + 1; }
  Eigen::MatrixXd Matrix(const Eigen::VectorXd& u, double a) const;
};

ArrowTemplate SocAsPsd(int dim);

}  // namespace risopt::conic
