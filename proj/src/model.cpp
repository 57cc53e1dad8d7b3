#include "risopt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace risopt {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void Design::CheckInvariants() const {
  for (Eigen::Index l = 0; l < e.size(); ++l) {
    if (std::abs(std::abs(e(l)) - 1.0) > 1e-9) {
      throw std::logic_error("Design: phase vector is not unit modulus");
    }
  }
  const double norm2 = v.squaredNorm();
  if (std::abs(power - norm2) > 1e-12 * std::max(norm2, 1e-300)) {
    throw std::logic_error("Design: power does not match ||v||^2");
  }
}

VectorXcd EffectiveChannel(const VectorXcd& g, const MatrixXcd& Q,
                           const VectorXcd& e) {
  if (Q.cols() != g.size() || Q.rows() != e.size()) {
    throw std::invalid_argument("EffectiveChannel: dimension mismatch");
  }
  return g + Q.adjoint() * e;
}

MatrixXcd BuildA(const MatrixXcd& V, double rate, double beta_t,
                 double beta_r) {
  if (!(rate > 0.0)) throw std::invalid_argument("BuildA: rate must be > 0");
  const double coef = 1.0 / (std::exp2(rate) - 1.0) - beta_r;
  MatrixXcd a = coef * V;
  a.diagonal() -= (1.0 + beta_r) * beta_t * V.diagonal();
  return a;
}

double RealQuadraticForm(const VectorXcd& x, const MatrixXcd& m) {
  const std::complex<double> q = x.dot(m * x);
  const double scale = x.squaredNorm() * m.cwiseAbs().maxCoeff();
  if (std::abs(q.imag()) > 1e-10 * std::max(scale, 1e-300)) {
    throw std::logic_error("quadratic form of a Hermitian matrix is not real");
  }
  return q.real();
}

double NoisePower(const VectorXcd& v, const VectorXcd& e, const VectorXcd& g,
                  const MatrixXcd& Q, double beta_t, double beta_r,
                  double noise_power) {
  const VectorXcd h = EffectiveChannel(g, Q, e);
  MatrixXcd dist = beta_r * (v * v.adjoint());
  dist.diagonal() += (1.0 + beta_r) * beta_t * v.cwiseAbs2().cast<std::complex<double>>();
  return RealQuadraticForm(h, dist) + (1.0 + beta_r) * noise_power;
}

double Snr(const VectorXcd& v, const VectorXcd& e, const VectorXcd& g,
           const MatrixXcd& Q, double beta_t, double beta_r,
           double noise_power) {
  const VectorXcd h = EffectiveChannel(g, Q, e);
  const double signal = std::norm(h.dot(v));
  return signal / NoisePower(v, e, g, Q, beta_t, beta_r, noise_power);
}

double AchievableRate(double snr) {
  if (snr < 0.0) throw std::invalid_argument("AchievableRate: negative SNR");
  return std::log2(1.0 + snr);
}

}  // namespace risopt
