#include "risopt/embed.hpp"

#include <stdexcept>

namespace risopt::conic {

Eigen::MatrixXd EmbedHermitian(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("EmbedHermitian: matrix is not square");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("EmbedHermitian: matrix is not Hermitian");
  }
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd t(2 * n, 2 * n);
  t.topLeftCorner(n, n) = h.real();
  t.topRightCorner(n, n) = -h.imag();
  t.bottomLeftCorner(n, n) = h.imag();
  t.bottomRightCorner(n, n) = h.real();
  return t;
}

Eigen::MatrixXcd ExtractHermitian(const Eigen::MatrixXd& y) {
  if (y.rows() != y.cols() || y.rows() % 2 != 0) {
    throw std::invalid_argument("ExtractHermitian: need a 2n x 2n matrix");
  }
  const Eigen::Index n = y.rows() / 2;
  const Eigen::MatrixXd re =
      0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const Eigen::MatrixXd im =
      0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  Eigen::MatrixXcd h(n, n);
  h.real() = 0.5 * (re + re.transpose());
  h.imag() = 0.5 * (im - im.transpose());
  return h;
}

Eigen::MatrixXd ArrowTemplate::Matrix(const Eigen::VectorXd& u,
                                      double a) const {
  if (u.size() != dim) {
    throw std::invalid_argument("ArrowTemplate: u has the wrong length");
  }
  Eigen::MatrixXd w = a * Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  w.topRightCorner(dim, 1) = u;
  w.bottomLeftCorner(1, dim) = u.transpose();
  return w;
}

ArrowTemplate SocAsPsd(int dim) {
  if (dim < 1) throw std::invalid_argument("SocAsPsd: dim must be >= 1");
  return ArrowTemplate{dim};
}

}  // namespace risopt::conic
