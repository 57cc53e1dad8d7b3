#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <utility>

#include <Eigen/Dense>

#include "risopt/rng.hpp"

namespace risopt {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double Distance(const Position& a, const Position& b);

/// Scenario constants. Defaults reproduce the reference simulation setup.
struct SystemParams {
  int num_antennas = 2;     // N
  int num_elements = 24;    // L
  double beta_t = 0.05;     // BS-side impairment coefficient
  double beta_r = 0.05;     // user-side impairment coefficient
  double noise_power = 1e-11;  // sigma^2 in watts (-80 dBm)
  double target_rate = 1.5;    // R, bit/s/Hz
  double outage = 0.01;        // tau
  Position bs{0.0, 0.0};
  Position ris{90.0, 0.0};
  Position user{90.0, 5.0};
  double alpha_cascaded = 3.0;
  double alpha_direct = 4.0;
  double rician_k = 5.0;
  double delta_c = 0.01;     // channel uncertainty level
  double ao_tolerance = 1e-6;  // epsilon
  int ao_max_iterations = 30;

  /// Throws std::invalid_argument when a field is outside its domain.
  void Validate() const;
};

/// Estimated channels plus the CSI error scales derived from delta_c.
struct ChannelRealization {
  Eigen::VectorXcd g_hat;  // N, BS -> user
  Eigen::MatrixXcd H_hat;  // L x N, BS -> RIS
  Eigen::VectorXcd h_hat;  // L, RIS -> user
  Eigen::MatrixXcd Q_hat;  // L x N, diag(h^H) H
  double zeta_g = 0.0;
  double zeta_q = 0.0;
  std::uint64_t seed = 0;

  int num_antennas() const { return static_cast<int>(g_hat.size()); }
  int num_elements() const { return static_cast<int>(h_hat.size()); }
  /// zeta_g^2 + zeta_q^2 L, the common scale of every error-driven term.
  double ErrorScale() const;
};

/// -30 - 10 alpha log10(d) dB. Throws std::invalid_argument for d <= 0.
double PathLossDb(double distance_m, double alpha);

/// Half-wavelength ULA response exp(j pi k cos(theta)), k = 0..n-1.
Eigen::VectorXcd SteeringVector(int n, double theta);

/// sqrt(PL) (sqrt(K/(K+1)) los + sqrt(1/(K+1)) nlos), nlos i.i.d. CN(0, 1).
Eigen::MatrixXcd RicianChannel(const Eigen::MatrixXcd& los, double k_factor,
                               double path_loss_db, Rng& rng);

/// Draws ULA angles uniformly in [0, pi) and returns a rows x cols Rician
/// matrix with LoS part a_r(theta) a_t(psi)^H (a single steering vector when
/// cols == 1).
Eigen::MatrixXcd RicianChannel(int rows, int cols, double k_factor,
                               double path_loss_db, Rng& rng);

/// diag(h^H) H: row l is conj(h_l) H_l.
Eigen::MatrixXcd Cascade(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& H);

/// Draws a reproducible scenario. The full cascaded-link loss
/// PL(d_BS-RIS + d_RIS-user, alpha_cascaded) is applied to H_hat and the
/// RIS -> user link keeps unit large-scale gain.
ChannelRealization GenerateChannel(const SystemParams& params,
                                   std::uint64_t seed);

struct ChannelErrors {
  Eigen::VectorXcd delta_g;
  Eigen::MatrixXcd delta_Q;
};

/// delta_g ~ CN(0, zeta_g^2 I_N), vec(delta_Q) ~ CN(0, zeta_q^2 I_LN).
ChannelErrors SampleErrors(double zeta_g, double zeta_q, int num_antennas,
                           int num_elements, Rng& rng);

/// JSON with complex arrays written as lists of [re, im] pairs (matrices in
/// row-major nested lists).
void WriteChannelJson(const ChannelRealization& channel, std::ostream& out);
ChannelRealization ReadChannelJson(std::istream& in);

}  // namespace risopt
