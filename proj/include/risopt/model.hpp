#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risopt {

/// One alternating-optimization step, as written to the trace CSV.
struct IterationRecord {
  int iteration = 0;
  double power = 0.0;  // watts
  double mu = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::string sdp_status;
};

/// A candidate transmit design: beamformer v and RIS phase vector e.
struct Design {
  Eigen::VectorXcd v;
  Eigen::VectorXcd e;
  double power = 0.0;          // ||v||^2 in watts
  std::vector<double> trace;   // power per AO iteration
  std::vector<IterationRecord> iterations;
  double relaxation_bound = 0.0;  // Tr(V*) of the last transmit SDP, watts
  bool converged = false;

  /// Throws std::logic_error if |e_l| != 1 or power != ||v||^2.
  void CheckInvariants() const;
};

/// Effective channel h = g + Q^H e, i.e. (g^H + e^H Q)^H.
Eigen::VectorXcd EffectiveChannel(const Eigen::VectorXcd& g,
                                  const Eigen::MatrixXcd& Q,
                                  const Eigen::VectorXcd& e);

/// A = (1/(2^R - 1) - beta_r) V - (1 + beta_r) beta_t diag(V).
Eigen::MatrixXcd BuildA(const Eigen::MatrixXcd& V, double rate, double beta_t,
                        double beta_r);

/// Lambda = h^H (beta_r v v^H + (1+beta_r) beta_t diag(v v^H)) h
///          + (1 + beta_r) sigma^2.
double NoisePower(const Eigen::VectorXcd& v, const Eigen::VectorXcd& e,
                  const Eigen::VectorXcd& g, const Eigen::MatrixXcd& Q,
                  double beta_t, double beta_r, double noise_power);

/// gamma = |h^H v|^2 / Lambda.
double Snr(const Eigen::VectorXcd& v, const Eigen::VectorXcd& e,
           const Eigen::VectorXcd& g, const Eigen::MatrixXcd& Q, double beta_t,
           double beta_r, double noise_power);

/// log2(1 + gamma).
double AchievableRate(double snr);

/// Real part of x^H M y after asserting that the imaginary residue is below
/// 1e-10 relative to the magnitude of the terms involved.
double RealQuadraticForm(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& m);

}  // namespace risopt
