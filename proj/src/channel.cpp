#include "risopt/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace risopt {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

double Distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void SystemParams::Validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (num_antennas < 1) fail("N must be >= 1");
  if (num_elements < 1) fail("L must be >= 1");
  if (beta_t < 0.0 || beta_t >= 1.0) fail("beta_t must lie in [0, 1)");
  if (beta_r < 0.0 || beta_r >= 1.0) fail("beta_r must lie in [0, 1)");
  if (!(noise_power > 0.0)) fail("noise power must be positive");
  if (!(target_rate > 0.0)) fail("target rate must be positive");
  if (!(outage > 0.0 && outage <= 1.0)) fail("outage must lie in (0, 1]");
  if (delta_c < 0.0 || delta_c >= 1.0) fail("delta_c must lie in [0, 1)");
  if (rician_k < 0.0) fail("Rician factor must be >= 0");
  if (!(ao_tolerance > 0.0)) fail("AO tolerance must be positive");
  if (ao_max_iterations < 1) fail("AO iteration limit must be >= 1");
}

double ChannelRealization::ErrorScale() const {
  return zeta_g * zeta_g + zeta_q * zeta_q * num_elements();
}

double PathLossDb(double distance_m, double alpha) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("PathLossDb: distance must be positive");
  }
  return -30.0 - 10.0 * alpha * std::log10(distance_m);
}

VectorXcd SteeringVector(int n, double theta) {
  VectorXcd a(n);
  const double phase = std::numbers::pi * std::cos(theta);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, phase * k);
  return a;
}

MatrixXcd RicianChannel(const MatrixXcd& los, double k_factor,
                        double path_loss_db, Rng& rng) {
  if (k_factor < 0.0) {
    throw std::invalid_argument("RicianChannel: K must be >= 0");
  }
  const double gain = std::sqrt(std::pow(10.0, path_loss_db / 10.0));
  const double w_los = std::sqrt(k_factor / (k_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (k_factor + 1.0));
  MatrixXcd out(los.rows(), los.cols());
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index c = 0; c < los.cols(); ++c) {
    for (Eigen::Index r = 0; r < los.rows(); ++r) {
      out(r, c) = gain * (w_los * los(r, c) + w_nlos * rng.ComplexNormal());
    }
  }
  return out;
}

MatrixXcd RicianChannel(int rows, int cols, double k_factor,
                        double path_loss_db, Rng& rng) {
  const double theta_r = std::numbers::pi * rng.Uniform();
  const double theta_t = std::numbers::pi * rng.Uniform();
  MatrixXcd los;
  if (cols == 1) {
    los = SteeringVector(rows, theta_r);
  } else if (rows == 1) {
    los = SteeringVector(cols, theta_t).adjoint();
  } else {
    los = SteeringVector(rows, theta_r) * SteeringVector(cols, theta_t).adjoint();
  }
  return RicianChannel(los, k_factor, path_loss_db, rng);
}

MatrixXcd Cascade(const VectorXcd& h, const MatrixXcd& H) {
  if (h.size() != H.rows()) {
    throw std::invalid_argument("Cascade: dimension mismatch");
  }
  return h.conjugate().asDiagonal() * H;
}

ChannelRealization GenerateChannel(const SystemParams& params,
                                   std::uint64_t seed) {
  params.Validate();
  Rng rng(seed);
  const int n = params.num_antennas;
  const int l = params.num_elements;
  const double d_direct = Distance(params.bs, params.user);
  const double d_cascaded =
      Distance(params.bs, params.ris) + Distance(params.ris, params.user);

  ChannelRealization ch;
  ch.seed = seed;
  ch.g_hat = RicianChannel(n, 1, params.rician_k,
                           PathLossDb(d_direct, params.alpha_direct), rng);
  ch.H_hat = RicianChannel(l, n, params.rician_k,
                           PathLossDb(d_cascaded, params.alpha_cascaded), rng);
  ch.h_hat = RicianChannel(l, 1, params.rician_k, 0.0, rng);
  ch.Q_hat = Cascade(ch.h_hat, ch.H_hat);
  ch.zeta_g = params.delta_c * ch.g_hat.norm();
  ch.zeta_q = params.delta_c * ch.Q_hat.norm();
  return ch;
}

ChannelErrors SampleErrors(double zeta_g, double zeta_q, int num_antennas,
                           int num_elements, Rng& rng) {
  if (zeta_g < 0.0 || zeta_q < 0.0) {
    throw std::invalid_argument("SampleErrors: negative error scale");
  }
  ChannelErrors err;
  err.delta_g = VectorXcd::Zero(num_antennas);
  err.delta_Q = MatrixXcd::Zero(num_elements, num_antennas);
  if (zeta_g > 0.0) {
    for (int i = 0; i < num_antennas; ++i) {
      err.delta_g(i) = rng.ComplexNormal(zeta_g * zeta_g);
    }
  }
  if (zeta_q > 0.0) {
    for (int c = 0; c < num_antennas; ++c) {
      for (int r = 0; r < num_elements; ++r) {
        err.delta_Q(r, c) = rng.ComplexNormal(zeta_q * zeta_q);
      }
    }
  }
  return err;
}

namespace {

using nlohmann::json;

json ToJson(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

json ToJson(const VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back({v(i).real(), v(i).imag()});
  }
  return out;
}

std::complex<double> PairToComplex(const json& p) {
  if (!p.is_array() || p.size() != 2) {
    throw std::runtime_error("channel json: expected [re, im] pair");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

VectorXcd VectorFromJson(const json& j) {
  VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(i) = PairToComplex(j[i]);
  return v;
}

MatrixXcd MatrixFromJson(const json& j) {
  const size_t rows = j.size();
  const size_t cols = rows ? j[0].size() : 0;
  MatrixXcd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::runtime_error("channel json: ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = PairToComplex(j[r][c]);
  }
  return m;
}

}  // namespace

void WriteChannelJson(const ChannelRealization& ch, std::ostream& out) {
  json j;
  j["seed"] = ch.seed;
  j["zeta_g"] = ch.zeta_g;
  j["zeta_q"] = ch.zeta_q;
  j["g_hat"] = ToJson(ch.g_hat);
  j["h_hat"] = ToJson(ch.h_hat);
  j["H_hat"] = ToJson(ch.H_hat);
  j["Q_hat"] = ToJson(ch.Q_hat);
  out << j.dump(2) << '\n';
}

ChannelRealization ReadChannelJson(std::istream& in) {
  const json j = json::parse(in);
  ChannelRealization ch;
  ch.seed = j.at("seed").get<std::uint64_t>();
  ch.zeta_g = j.at("zeta_g").get<double>();
  ch.zeta_q = j.at("zeta_q").get<double>();
  ch.g_hat = VectorFromJson(j.at("g_hat"));
  ch.h_hat = VectorFromJson(j.at("h_hat"));
  ch.H_hat = MatrixFromJson(j.at("H_hat"));
  ch.Q_hat = MatrixFromJson(j.at("Q_hat"));
  return ch;
}

}  // namespace risopt
