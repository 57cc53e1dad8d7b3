#include "risopt/bti.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "risopt/model.hpp"

namespace risopt {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

double MinEigenvalue(const MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(hermitian, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace

BtiData ComputeBtiData(const MatrixXcd& A, const VectorXcd& e,
                       const VectorXcd& g_hat, const MatrixXcd& Q_hat,
                       double zeta_g, double zeta_q, double beta_r,
                       double noise_power, double mu) {
  if (mu < 0.0) throw std::invalid_argument("ComputeBtiData: mu must be >= 0");
  const double kappa =
      zeta_g * zeta_g + zeta_q * zeta_q * static_cast<double>(e.size());
  const VectorXcd h = EffectiveChannel(g_hat, Q_hat, e);

  BtiData d;
  d.zeta_g = zeta_g;
  d.zeta_q = zeta_q;
  d.trace_term = kappa * A.trace().real();
  d.frob_term = kappa * A.norm();
  d.mvec_norm = std::sqrt(kappa) * (A * h).norm();
  d.m_scalar = RealQuadraticForm(h, A) - (1.0 + beta_r) * noise_power - mu;
  d.min_eig_scale = kappa * MinEigenvalue(A);
  return d;
}

MatrixXcd BuildMExplicit(const MatrixXcd& A, const VectorXcd& e, double zeta_g,
                         double zeta_q) {
  const Eigen::Index n = A.rows();
  const Eigen::Index l = e.size();
  const MatrixXcd E = e * e.adjoint();
  MatrixXcd m = MatrixXcd::Zero(n + n * l, n + n * l);
  m.topLeftCorner(n, n) = zeta_g * zeta_g * A;
  m.topRightCorner(n, n * l) =
      zeta_g * zeta_q * Eigen::kroneckerProduct(A, e.transpose()).eval();
  m.bottomLeftCorner(n * l, n) =
      zeta_g * zeta_q * Eigen::kroneckerProduct(A, e.conjugate()).eval();
  m.bottomRightCorner(n * l, n * l) =
      zeta_q * zeta_q * Eigen::kroneckerProduct(A, E.transpose()).eval();
  return m;
}

VectorXcd BuildMvecExplicit(const MatrixXcd& A, const VectorXcd& e,
                            const VectorXcd& g_hat, const MatrixXcd& Q_hat,
                            double zeta_g, double zeta_q) {
  const Eigen::Index n = A.rows();
  const Eigen::Index l = e.size();
  const VectorXcd h = EffectiveChannel(g_hat, Q_hat, e);
  // Row vector x^H A and the L x N matrix e x^H A.
  const Eigen::RowVectorXcd xa = h.adjoint() * A;
  const MatrixXcd exa = e * xa;
  VectorXcd m(n + n * l);
  m.head(n) = zeta_g * xa.adjoint();
  const VectorXcd vec_exa = exa.reshaped();
  m.tail(n * l) = zeta_q * vec_exa.conjugate();
  return m;
}

BtiCheck CheckBti(const BtiData& data, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("CheckBti: tau must lie in (0, 1]");
  }
  const double log_inv = std::log(1.0 / tau);
  BtiCheck c;
  c.a_min = std::sqrt(data.frob_term * data.frob_term +
                      2.0 * data.mvec_norm * data.mvec_norm);
  c.b_min = std::max(0.0, -data.min_eig_scale);
  c.margin = data.trace_term - std::sqrt(2.0 * log_inv) * c.a_min -
             log_inv * c.b_min + data.m_scalar;
  c.feasible = c.margin >= 0.0;
  return c;
}

BtiData BtiDataFor(const VectorXcd& v, const VectorXcd& e,
                   const ChannelRealization& channel,
                   const SystemParams& params, double mu) {
  const MatrixXcd A = BuildA(v * v.adjoint(), params.target_rate,
                             params.beta_t, params.beta_r);
  return ComputeBtiData(A, e, channel.g_hat, channel.Q_hat, channel.zeta_g,
                        channel.zeta_q, params.beta_r, params.noise_power, mu);
}

BtiCheck CheckDesign(const VectorXcd& v, const VectorXcd& e,
                     const ChannelRealization& channel,
                     const SystemParams& params) {
  return CheckBti(BtiDataFor(v, e, channel, params), params.outage);
}

}  // namespace risopt
