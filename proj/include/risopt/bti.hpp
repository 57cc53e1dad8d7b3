#pragma once

#include <Eigen/Dense>

#include "risopt/channel.hpp"

namespace risopt {

/// Closed-form data of the Gaussian quadratic chance constraint
///
///   Pr{ i^H M i + 2 Re{m^H i} + m >= 0 } >= 1 - tau,   i ~ CN(0, I),
///
/// where M and m are built from A, e and the estimated channels. Only the
/// trace, the Frobenius norm of M, the norm of m and the scalar m enter the
/// Bernstein-type restriction, so the large (N + LN)-dimensional objects are
/// never formed outside tests.
struct BtiData {
  double trace_term = 0.0;     // Tr(M) = kappa Tr(A)
  double frob_term = 0.0;      // ||M||_F = kappa ||A||_F
  double mvec_norm = 0.0;      // ||m|| = sqrt(kappa) ||A (g + Q^H e)||
  double m_scalar = 0.0;       // h^H A h - (1 + beta_r) sigma^2 - mu
  double min_eig_scale = 0.0;  // lambda_min(kappa A)
  double zeta_g = 0.0;
  double zeta_q = 0.0;
};

/// kappa = zeta_g^2 + zeta_q^2 L throughout.
BtiData ComputeBtiData(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& e,
                       const Eigen::VectorXcd& g_hat,
                       const Eigen::MatrixXcd& Q_hat, double zeta_g,
                       double zeta_q, double beta_r, double noise_power,
                       double mu = 0.0);

/// [[zg^2 A, zg zq (A (x) e^T)], [zg zq (A (x) e^*), zq^2 (A (x) E^T)]],
/// E = e e^H. Test oracle only.
Eigen::MatrixXcd BuildMExplicit(const Eigen::MatrixXcd& A,
                                const Eigen::VectorXcd& e, double zeta_g,
                                double zeta_q);

/// [zg (A x); zq conj(vec(e x^H A))] with x = g + Q^H e, the vector whose
/// inner product with i = [i_g; conj(i_q)] gives the linear error term.
/// Test oracle only.
Eigen::VectorXcd BuildMvecExplicit(const Eigen::MatrixXcd& A,
                                   const Eigen::VectorXcd& e,
                                   const Eigen::VectorXcd& g_hat,
                                   const Eigen::MatrixXcd& Q_hat,
                                   double zeta_g, double zeta_q);

struct BtiCheck {
  bool feasible = false;
  double a_min = 0.0;
  double b_min = 0.0;
  /// Tr(M) - sqrt(2 ln(1/tau)) a_min - ln(1/tau) b_min + m.
  double margin = 0.0;
};

/// Exact feasibility test of the three Bernstein-type constraints: the first
/// constraint decreases in both slacks, so the smallest admissible slacks
///   a_min = sqrt(||M||_F^2 + 2 ||m||^2),  b_min = max(0, -lambda_min(kappa A))
/// decide it.
BtiCheck CheckBti(const BtiData& data, double tau);

/// Convenience wrapper evaluating the constraint for a beamformer v and phase
/// vector e on an estimated channel.
BtiData BtiDataFor(const Eigen::VectorXcd& v, const Eigen::VectorXcd& e,
                   const ChannelRealization& channel,
                   const SystemParams& params, double mu = 0.0);
BtiCheck CheckDesign(const Eigen::VectorXcd& v, const Eigen::VectorXcd& e,
                     const ChannelRealization& channel,
                     const SystemParams& params);

}  // namespace risopt
