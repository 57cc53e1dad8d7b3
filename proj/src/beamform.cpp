#include "risopt/beamform.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <utility>

#include "risopt/bti.hpp"
#include "risopt/embed.hpp"

namespace risopt {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

constexpr cd kI{0.0, 1.0};

// Hermitian G_re, G_im with Tr(V G_re) = Re Tr(V K), Tr(V G_im) = Im Tr(V K)
// for every Hermitian V.
std::pair<MatrixXcd, MatrixXcd> HermitianParts(const MatrixXcd& k) {
  return {0.5 * (k + k.adjoint()), -0.5 * kI * (k - k.adjoint())};
}

MatrixXcd Unit(int n, int row, int col) {
  MatrixXcd e = MatrixXcd::Zero(n, n);
  e(row, col) = 1.0;
  return e;
}

// coef * Tr(V G) on an embedded Hermitian block.
void AddHermitianTerm(conic::ConicProblem& p, int con, int block,
                      const MatrixXcd& g, double coef) {
  p.AddCoefficientDense(con, block, 0.5 * coef * conic::EmbedHermitian(g));
}

double LogInv(double tau) { return std::log(1.0 / tau); }

struct BtiWeights {
  double c1;  // sqrt(2 ln(1/tau))
  double c2;  // ln(1/tau)
};

BtiWeights Weights(double tau) {
  return {std::sqrt(2.0 * LogInv(tau)), LogInv(tau)};
}

double RateCoefficient(const SystemParams& p) {
  return 1.0 / (std::exp2(p.target_rate) - 1.0) - p.beta_r;
}

double DiagCoefficient(const SystemParams& p) {
  return (1.0 + p.beta_r) * p.beta_t;
}

// Complex functional K_pq with A(V)_pq = Tr(V K_pq).
MatrixXcd EntryFunctional(int n, int p, int q, double alpha, double beta_p) {
  MatrixXcd k = alpha * Unit(n, q, p);
  if (p == q) k(p, p) -= beta_p;
  return k;
}

// Hermitian G with T(A(V))_pq = Tr(V G), p <= q < 2n.
MatrixXcd EmbeddedEntryFunctional(int n, int p, int q, double alpha,
                                  double beta_p) {
  if (p < n && q < n) {
    return HermitianParts(EntryFunctional(n, p, q, alpha, beta_p)).first;
  }
  if (p < n) {
    return -HermitianParts(EntryFunctional(n, p, q - n, alpha, beta_p)).second;
  }
  return HermitianParts(EntryFunctional(n, p - n, q - n, alpha, beta_p)).first;
}

struct Eig {
  VectorXd values;  // descending
  MatrixXcd vectors;
  double rank1_ratio = 0.0;
};

Eig Decompose(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  Eig out;
  out.values = es.eigenvalues().reverse().cwiseMax(0.0);
  out.vectors = es.eigenvectors().rowwise().reverse();
  const double total = out.values.sum();
  out.rank1_ratio = total > 0.0 ? out.values(0) / total : 0.0;
  return out;
}

VectorXcd DrawGaussian(const Eig& eig, Rng& rng) {
  VectorXcd w(eig.values.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.ComplexNormal(1.0);
  return eig.vectors * (eig.values.cwiseSqrt().cast<cd>().asDiagonal() * w);
}

VectorXcd ProjectPhases(const VectorXcd& z) {
  const Eigen::Index l = z.size() - 1;
  const double ref = std::arg(z(l));
  VectorXcd e(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    e(i) = std::polar(1.0, std::arg(z(i)) - ref);
  }
  return e;
}

bool Usable(const conic::ConicSolution& sol, const BeamformOptions& options) {
  return sol.optimal() || sol.max_residual() < options.accept_residual;
}

void ThrowOnFailure(const conic::ConicSolution& sol,
                    const BeamformOptions& options, const char* what) {
  if (sol.status == conic::SolveStatus::kInfeasible) {
    throw InfeasibleError(std::string(what) + ": " + sol.message);
  }
  if (!Usable(sol, options)) {
    throw NumericalError(std::string(what) + ": " + conic::ToString(sol.status) +
                         " (" + sol.message + ")");
  }
}

VectorXcd RandomizeCandidates(const Eig& eig, const VectorXcd& e,
                              const ChannelRealization& channel,
                              const SystemParams& params, int num_candidates,
                              Rng& rng, SubproblemSolveInfo* stats) {
  VectorXcd best;
  double best_power = std::numeric_limits<double>::infinity();
  int tried = 0;
  int accepted = 0;
  auto consider = [&](const VectorXcd& cand) {
    ++tried;
    auto scaled = ScaleToFeasible(cand, e, channel, params);
    if (!scaled) return;
    ++accepted;
    const double power = scaled->squaredNorm();
    if (power < best_power) {
      best_power = power;
      best = std::move(*scaled);
    }
  };
  consider(std::sqrt(eig.values(0)) * eig.vectors.col(0));
  for (int i = 0; i < num_candidates; ++i) consider(DrawGaussian(eig, rng));
  if (stats != nullptr) {
    stats->candidates_tried += tried;
    stats->candidates_accepted += accepted;
  }
  if (accepted == 0) {
    throw RandomizationFailed("no candidate beamformer could be made feasible");
  }
  return best;
}

}  // namespace

ChannelRealization Normalization::Apply(const ChannelRealization& channel) const {
  ChannelRealization out = channel;
  out.g_hat /= scale;
  out.Q_hat /= scale;
  out.H_hat /= scale;
  out.zeta_g /= scale;
  out.zeta_q /= scale;
  return out;
}

TransmitProgram BuildTransmitProgram(const VectorXcd& e,
                                     const ChannelRealization& channel,
                                     const SystemParams& params) {
  const int n = channel.num_antennas();
  const VectorXcd h_true = EffectiveChannel(channel.g_hat, channel.Q_hat, e);
  const double h_norm = h_true.norm();
  if (!(h_norm > 0.0)) throw InfeasibleError("effective channel is zero");

  TransmitProgram prog;
  prog.norm = {h_norm, params.noise_power};
  const ChannelRealization ch = prog.norm.Apply(channel);
  const VectorXcd h = h_true / h_norm;
  const double kappa = ch.ErrorScale();
  prog.kappa = kappa;
  const double alpha = RateCoefficient(params);
  const double beta_p = DiagCoefficient(params);
  const BtiWeights w = Weights(params.outage);
  const bool robust = kappa > 0.0;

  auto& p = prog.problem;
  prog.v_block = p.AddBlock(2 * n);
  prog.scalar_block = p.AddBlock(robust ? 3 : 1, conic::BlockKind::kNonneg);
  const int slack = robust ? 2 : 0;
  p.AddObjectiveDense(prog.v_block, 0.5 * MatrixXd::Identity(2 * n, 2 * n));

  // kappa Tr A(V) + h^H A(V) h - c1 a - c2 b - s = 1 + beta_r.
  MatrixXcd g_rate = alpha * h * h.adjoint();
  g_rate.diagonal() -= beta_p * h.cwiseAbs2().cast<cd>();
  g_rate.diagonal().array() += kappa * (alpha - beta_p);
  const int c0 = p.AddConstraint(1.0 + params.beta_r);
  AddHermitianTerm(p, c0, prog.v_block, g_rate, 1.0);
  if (robust) {
    p.AddCoefficient(c0, prog.scalar_block, 0, 0, -w.c1);
    p.AddCoefficient(c0, prog.scalar_block, 1, 1, -w.c2);
  }
  p.AddCoefficient(c0, prog.scalar_block, slack, slack, -1.0);
  if (!robust) return prog;

  // ||u(V)|| <= a through an arrow block pinned entry by entry.
  std::vector<MatrixXcd> u;
  for (int i = 0; i < n; ++i) {
    u.push_back(HermitianParts(kappa * EntryFunctional(n, i, i, alpha, beta_p)).first);
  }
  const double sq2 = std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto [re, im] = HermitianParts(kappa * sq2 * EntryFunctional(n, i, j, alpha, beta_p));
      u.push_back(re);
      u.push_back(im);
    }
  }
  for (int i = 0; i < n; ++i) {
    MatrixXcd k = MatrixXcd::Zero(n, n);
    k.col(i) = alpha * h;
    k(i, i) -= beta_p * h(i);
    auto [re, im] = HermitianParts(std::sqrt(2.0 * kappa) * k);
    u.push_back(re);
    u.push_back(im);
  }
  const int d = static_cast<int>(u.size());
  prog.arrow_block = p.AddBlock(d + 1);
  for (int q = 0; q <= d; ++q) {
    for (int r = 0; r <= q; ++r) {
      const int con = p.AddConstraint(0.0);
      if (r == q) {
        p.AddCoefficient(con, prog.arrow_block, r, r, 1.0);
        p.AddCoefficient(con, prog.scalar_block, 0, 0, -1.0);
      } else {
        p.AddCoefficient(con, prog.arrow_block, r, q, 0.5);
        if (q == d) AddHermitianTerm(p, con, prog.v_block, u[r], -1.0);
      }
    }
  }

  // Z = b I + kappa T(A(V)) PSD.
  prog.lmi_block = p.AddBlock(2 * n);
  for (int q = 0; q < 2 * n; ++q) {
    for (int r = 0; r <= q; ++r) {
      const int con = p.AddConstraint(0.0);
      p.AddCoefficient(con, prog.lmi_block, r, q, r == q ? 1.0 : 0.5);
      if (r == q) p.AddCoefficient(con, prog.scalar_block, 1, 1, -1.0);
      AddHermitianTerm(p, con, prog.v_block,
                       EmbeddedEntryFunctional(n, r, q, alpha, beta_p), -kappa);
    }
  }
  return prog;
}

PhaseProgram BuildPhaseProgram(const VectorXcd& v, double a_prev,
                               const ChannelRealization& channel,
                               const SystemParams& params) {
  const int n = channel.num_antennas();
  const int l = channel.num_elements();
  double scale = channel.g_hat.norm();
  for (int i = 0; i < l; ++i) scale += channel.Q_hat.row(i).norm();
  if (!(scale > 0.0)) throw InfeasibleError("channel is zero");

  PhaseProgram prog;
  prog.norm = {scale, params.noise_power};
  const ChannelRealization ch = prog.norm.Apply(channel);
  const double kappa = ch.ErrorScale();
  prog.kappa = kappa;
  const bool robust = kappa > 0.0;
  const double v_scale = scale / std::sqrt(params.noise_power);
  const MatrixXcd V = (v_scale * v) * (v_scale * v).adjoint();
  const MatrixXcd A = BuildA(V, params.target_rate, params.beta_t, params.beta_r);
  const double a0 = a_prev / params.noise_power;
  if (robust && !(a0 > 0.0)) {
    throw std::invalid_argument("BuildPhaseProgram: a_prev must be > 0");
  }
  const BtiWeights w = Weights(params.outage);
  const VectorXcd& g = ch.g_hat;
  const MatrixXcd& Q = ch.Q_hat;

  auto lifted = [&](const MatrixXcd& m) {
    MatrixXcd b = MatrixXcd::Zero(l + 1, l + 1);
    b.topLeftCorner(l, l) = Q * m * Q.adjoint();
    b.topRightCorner(l, 1) = Q * m * g;
    b.bottomLeftCorner(1, l) = b.topRightCorner(l, 1).adjoint();
    return MatrixXcd(0.5 * (b + b.adjoint()));
  };

  auto& p = prog.problem;
  prog.e_block = p.AddBlock(2 * (l + 1));
  prog.scalar_block = p.AddBlock(robust ? 5 : 2, conic::BlockKind::kNonneg);
  p.AddObjective(prog.scalar_block, 0, 0, -1.0);
  const int s1 = robust ? 3 : 1;

  // Tr(B E) - c1 a - c2 b - mu - s1 = 1 + beta_r - g^H A g - kappa Tr A.
  const int c0 = p.AddConstraint(1.0 + params.beta_r - RealQuadraticForm(g, A) -
                                 kappa * A.trace().real());
  AddHermitianTerm(p, c0, prog.e_block, lifted(A), 1.0);
  p.AddCoefficient(c0, prog.scalar_block, 0, 0, -1.0);
  if (robust) {
    p.AddCoefficient(c0, prog.scalar_block, 1, 1, -w.c1);
    p.AddCoefficient(c0, prog.scalar_block, 2, 2, -w.c2);
  }
  p.AddCoefficient(c0, prog.scalar_block, s1, s1, -1.0);

  for (int i = 0; i <= l; ++i) {
    const int con = p.AddConstraint(1.0);
    p.AddCoefficient(con, prog.e_block, i, i, 0.5);
    p.AddCoefficient(con, prog.e_block, i + l + 1, i + l + 1, 0.5);
  }
  if (!robust) return prog;

  // a^2 >= kappa^2 ||A||_F^2 + 2 kappa h^H A^2 h, linearized at a_prev.
  const MatrixXcd A2 = A * A;
  const int c1 = p.AddConstraint(kappa * kappa * A.squaredNorm() +
                                 2.0 * kappa * RealQuadraticForm(g, A2) +
                                 a0 * a0);
  p.AddCoefficient(c1, prog.scalar_block, 1, 1, 2.0 * a0);
  AddHermitianTerm(p, c1, prog.e_block, lifted(A2), -2.0 * kappa);
  p.AddCoefficient(c1, prog.scalar_block, 4, 4, -1.0);

  // Z = b I + kappa T(A) PSD.
  const MatrixXd TA = conic::EmbedHermitian(0.5 * (A + A.adjoint()));
  prog.lmi_block = p.AddBlock(2 * n);
  for (int q = 0; q < 2 * n; ++q) {
    for (int r = 0; r <= q; ++r) {
      const int con = p.AddConstraint(kappa * TA(r, q));
      p.AddCoefficient(con, prog.lmi_block, r, q, r == q ? 1.0 : 0.5);
      if (r == q) p.AddCoefficient(con, prog.scalar_block, 2, 2, -1.0);
    }
  }
  return prog;
}

std::optional<VectorXcd> ScaleToFeasible(const VectorXcd& v,
                                         const VectorXcd& e,
                                         const ChannelRealization& channel,
                                         const SystemParams& params) {
  SystemParams noiseless = params;
  noiseless.noise_power = 0.0;
  const double f = CheckBti(BtiDataFor(v, e, channel, noiseless), params.outage).margin;
  if (!(f > 0.0) || !std::isfinite(f)) return std::nullopt;
  const double t2 = (1.0 + params.beta_r) * params.noise_power / f * (1.0 + 1e-9);
  return VectorXcd(std::sqrt(t2) * v);
}

VectorXcd GaussianRandomizeV(const MatrixXcd& V, const VectorXcd& e,
                             const ChannelRealization& channel,
                             const SystemParams& params, int num_candidates,
                             Rng& rng, SubproblemSolveInfo* stats) {
  const Eig eig = Decompose(0.5 * (V + V.adjoint()));
  if (stats != nullptr) stats->rank1_ratio = eig.rank1_ratio;
  if (eig.rank1_ratio >= 1.0 - 1e-6) {
    return std::sqrt(eig.values(0)) * eig.vectors.col(0);
  }
  if (num_candidates <= 0) {
    throw RandomizationFailed("relaxed covariance is not rank one");
  }
  return RandomizeCandidates(eig, e, channel, params, num_candidates, rng, stats);
}

TransmitResult SolveTransmit(const VectorXcd& e,
                             const ChannelRealization& channel,
                             const SystemParams& params, Rng& rng,
                             const BeamformOptions& options) {
  const TransmitProgram prog = BuildTransmitProgram(e, channel, params);
  const conic::ConicSolution sol = conic::Solve(prog.problem, options.solver);
  ThrowOnFailure(sol, options, "transmit SDP");

  const double to_watts = prog.norm.PowerToTrue(1.0);
  TransmitResult out;
  out.V = conic::ExtractHermitian(sol.x[prog.v_block]) * to_watts;
  out.info.sdp_status = sol.status;
  out.info.objective = out.V.trace().real();
  out.info.max_residual = sol.max_residual();
  if (prog.kappa > 0.0) {
    const MatrixXd& s = sol.x[prog.scalar_block];
    out.info.a = s(0, 0) * params.noise_power;
    out.info.b = s(1, 1) * params.noise_power;
  }

  VectorXcd v = GaussianRandomizeV(out.V, e, channel, params,
                                   options.num_candidates, rng, &out.info);
  auto scaled = ScaleToFeasible(v, e, channel, params);
  if (!scaled) {
    const Eig eig = Decompose(out.V);
    scaled = RandomizeCandidates(eig, e, channel, params,
                                 std::max(options.num_candidates, 1), rng,
                                 &out.info);
  }
  out.v = std::move(*scaled);
  return out;
}

VectorXcd GaussianRandomizeE(const MatrixXcd& E_tilde, const VectorXcd& v,
                             const ChannelRealization& channel,
                             const SystemParams& params, int num_candidates,
                             Rng& rng) {
  const Eig eig = Decompose(0.5 * (E_tilde + E_tilde.adjoint()));
  VectorXcd best = ProjectPhases(eig.vectors.col(0));
  double best_margin = CheckDesign(v, best, channel, params).margin;
  for (int i = 0; i < num_candidates; ++i) {
    VectorXcd cand = ProjectPhases(DrawGaussian(eig, rng));
    const double margin = CheckDesign(v, cand, channel, params).margin;
    if (margin > best_margin) {
      best_margin = margin;
      best = std::move(cand);
    }
  }
  return best;
}

PhaseResult SolvePhase(const VectorXcd& v, double a_prev,
                       const ChannelRealization& channel,
                       const SystemParams& params, Rng& rng,
                       const VectorXcd* incumbent,
                       const BeamformOptions& options) {
  const PhaseProgram prog = BuildPhaseProgram(v, a_prev, channel, params);
  const conic::ConicSolution sol = conic::Solve(prog.problem, options.solver);
  ThrowOnFailure(sol, options, "phase SDP");

  PhaseResult out;
  out.E_tilde = conic::ExtractHermitian(sol.x[prog.e_block]);
  const MatrixXd& s = sol.x[prog.scalar_block];
  out.mu = s(0, 0) * params.noise_power;
  out.info.sdp_status = sol.status;
  out.info.objective = out.mu;
  out.info.mu = out.mu;
  out.info.max_residual = sol.max_residual();
  out.info.rank1_ratio = Decompose(out.E_tilde).rank1_ratio;
  if (prog.kappa > 0.0) {
    out.info.a = s(1, 1) * params.noise_power;
    out.info.b = s(2, 2) * params.noise_power;
  }
  out.info.candidates_tried = options.num_candidates + 1;
  out.info.candidates_accepted = out.info.candidates_tried;

  out.e = GaussianRandomizeE(out.E_tilde, v, channel, params,
                             options.num_candidates, rng);
  if (incumbent != nullptr) {
    const double cand = CheckDesign(v, out.e, channel, params).margin;
    const double inc = CheckDesign(v, *incumbent, channel, params).margin;
    if (!(cand > inc)) {
      out.e = *incumbent;
      out.kept_incumbent = true;
    }
  }
  return out;
}

VectorXcd AlignedPhases(const ChannelRealization& channel) {
  const MatrixXcd& Q = channel.Q_hat;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Q.adjoint() * Q);
  VectorXcd w = es.eigenvectors().col(Q.cols() - 1);
  VectorXcd e = VectorXcd::Ones(Q.rows());
  for (int it = 0; it < 50; ++it) {
    const VectorXcd qw = Q * w;
    for (Eigen::Index l = 0; l < e.size(); ++l) {
      e(l) = std::abs(qw(l)) > 0.0 ? qw(l) / std::abs(qw(l)) : cd(1.0);
    }
    const VectorXcd h = EffectiveChannel(channel.g_hat, Q, e);
    const VectorXcd w_next = h / h.norm();
    const double change = (w_next - w).norm();
    w = w_next;
    if (change < 1e-12) break;
  }
  return e;
}

Design AlternatingOptimize(const ChannelRealization& channel,
                           const SystemParams& params, std::uint64_t seed,
                           const BeamformOptions& options) {
  params.Validate();
  Rng rng(seed);
  const int l = channel.num_elements();
  VectorXcd e(l);
  for (int i = 0; i < l; ++i) {
    e(i) = std::polar(1.0, 2.0 * std::numbers::pi * rng.Uniform());
  }

  TransmitResult tr;
  try {
    tr = SolveTransmit(e, channel, params, rng, options);
  } catch (const InfeasibleError&) {
    e = AlignedPhases(channel);
    tr = SolveTransmit(e, channel, params, rng, options);
  }
  Design d;
  d.v = tr.v;
  d.e = e;
  d.power = d.v.squaredNorm();
  d.relaxation_bound = tr.info.objective;
  d.trace.push_back(d.power);
  d.iterations.push_back({0, d.power, 0.0, tr.info.a, tr.info.b,
                          conic::ToString(tr.info.sdp_status)});

  for (int it = 1; it <= params.ao_max_iterations; ++it) {
    const double a_prev = CheckDesign(d.v, d.e, channel, params).a_min;
    PhaseResult ph;
    TransmitResult next;
    try {
      ph = SolvePhase(d.v, a_prev, channel, params, rng, &d.e, options);
      next = SolveTransmit(ph.e, channel, params, rng, options);
    } catch (const InfeasibleError&) {
      break;
    } catch (const NumericalError&) {
      break;
    } catch (const RandomizationFailed&) {
      break;
    }
    VectorXcd v_new = next.v;
    if (auto inc = ScaleToFeasible(d.v, ph.e, channel, params);
        inc && inc->squaredNorm() < v_new.squaredNorm()) {
      v_new = std::move(*inc);
    }
    const double p_new = v_new.squaredNorm();
    if (!(p_new <= d.power)) {
      d.converged = true;
      break;
    }
    const double decrease = (d.power - p_new) / d.power;
    d.v = std::move(v_new);
    d.e = ph.e;
    d.power = p_new;
    d.relaxation_bound = next.info.objective;
    d.trace.push_back(d.power);
    d.iterations.push_back({it, d.power, ph.mu, next.info.a, next.info.b,
                            conic::ToString(next.info.sdp_status)});
    if (decrease < params.ao_tolerance) {
      d.converged = true;
      break;
    }
  }
  d.CheckInvariants();
  return d;
}

void WriteTraceCsv(const Design& design, std::ostream& out) {
  out << "iteration,power_watts,mu,a,b,sdp_status\n";
  out.precision(17);
  for (const auto& r : design.iterations) {
    out << r.iteration << ',' << r.power << ',' << r.mu << ',' << r.a << ','
        << r.b << ',' << r.sdp_status << '\n';
  }
}

}  // namespace risopt
