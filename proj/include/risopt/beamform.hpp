#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "risopt/channel.hpp"
#include "risopt/conic.hpp"
#include "risopt/model.hpp"
#include "risopt/rng.hpp"

namespace risopt {

/// The target (R, tau, beta, delta_c) cannot be met on this channel.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The conic solver stopped without a usable solution.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No randomized candidate could be scaled into feasibility.
class RandomizationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubproblemSolveInfo {
  conic::SolveStatus sdp_status = conic::SolveStatus::kNumericalFailure;
  double objective = 0.0;    // Tr(V*) in watts, or mu* for the phase problem
  double rank1_ratio = 0.0;  // lambda_1 / sum(lambda) of the PSD solution
  int candidates_tried = 0;
  int candidates_accepted = 0;
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double max_residual = 0.0;
};

struct BeamformOptions {
  int num_candidates = 200;
  conic::SolverOptions solver;
  /// Non-optimal solver exits are still used when every relative KKT
  /// residual is below this; the extracted vectors are re-verified anyway.
  double accept_residual = 1e-6;
};

/// Channel expressed in units where the noise power is 1 and the channel is
/// divided by `scale`. Every constraint is homogeneous under this change, so
/// the SDPs are solved on O(1) data and mapped back.
struct Normalization {
  double scale = 1.0;
  double noise_power = 1.0;

  double PowerToTrue(double normalized) const {
    return normalized * noise_power / (scale * scale);
  }
  ChannelRealization Apply(const ChannelRealization& channel) const;
};

/// Compiled transmit-covariance SDP (normalized units).
struct TransmitProgram {
  conic::ConicProblem problem;
  Normalization norm;
  int v_block = 0;
  int scalar_block = 1;  // [a, b, s] when kappa > 0, else [s]
  int arrow_block = -1;
  int lmi_block = -1;
  double kappa = 0.0;    // normalized error scale
};

/// Compiled phase-shift SDP (normalized units).
struct PhaseProgram {
  conic::ConicProblem problem;
  Normalization norm;
  int e_block = 0;
  int scalar_block = 1;  // [mu, a, b, s1, s2] when kappa > 0, else [mu, s1]
  int lmi_block = -1;
  double kappa = 0.0;
};

TransmitProgram BuildTransmitProgram(const Eigen::VectorXcd& e,
                                     const ChannelRealization& channel,
                                     const SystemParams& params);
PhaseProgram BuildPhaseProgram(const Eigen::VectorXcd& v, double a_prev,
                               const ChannelRealization& channel,
                               const SystemParams& params);

/// Smallest multiple t v (t > 0) that satisfies the Bernstein-type
/// constraints. Every term except the noise is quadratic in t, so
///   t^2 = (1 + beta_r) sigma^2 / F,  F = margin at unit scale without noise,
/// inflated by 1e-9 relative to stay on the feasible side after rounding.
/// Empty when F <= 0 (the impairment-induced SNR ceiling is below target).
std::optional<Eigen::VectorXcd> ScaleToFeasible(
    const Eigen::VectorXcd& v, const Eigen::VectorXcd& e,
    const ChannelRealization& channel, const SystemParams& params);

struct TransmitResult {
  Eigen::VectorXcd v;
  Eigen::MatrixXcd V;  // relaxed covariance, watts
  SubproblemSolveInfo info;
};

/// Minimizes Tr(V) under the Bernstein-type restriction for a fixed e, then
/// extracts a feasible beamformer scaled onto the constraint boundary.
/// Throws InfeasibleError, NumericalError or RandomizationFailed.
TransmitResult SolveTransmit(const Eigen::VectorXcd& e,
                             const ChannelRealization& channel,
                             const SystemParams& params, Rng& rng,
                             const BeamformOptions& options = {});

/// Draws candidates v ~ CN(0, V) (plus the principal eigenvector), scales
/// each to feasibility and returns the cheapest. A numerically rank-1 V
/// returns sqrt(lambda_1) u_1 unchanged.
Eigen::VectorXcd GaussianRandomizeV(const Eigen::MatrixXcd& V,
                                    const Eigen::VectorXcd& e,
                                    const ChannelRealization& channel,
                                    const SystemParams& params,
                                    int num_candidates, Rng& rng,
                                    SubproblemSolveInfo* stats = nullptr);

struct PhaseResult {
  Eigen::VectorXcd e;
  double mu = 0.0;             // watts-scale slack of the relaxed solution
  Eigen::MatrixXcd E_tilde;    // (L+1) x (L+1)
  SubproblemSolveInfo info;
  bool kept_incumbent = false;
};

/// Maximizes the rate slack mu over the relaxed phase matrix for a fixed v
/// with the linearized norm constraint anchored at a_prev (watts scale).
/// When `incumbent` is given it competes with the randomized candidates.
PhaseResult SolvePhase(const Eigen::VectorXcd& v, double a_prev,
                       const ChannelRealization& channel,
                       const SystemParams& params, Rng& rng,
                       const Eigen::VectorXcd* incumbent = nullptr,
                       const BeamformOptions& options = {});

/// Candidates z ~ CN(0, E_tilde), de-referenced by the phase of the last
/// coordinate and projected to unit modulus; returns the largest BTI margin.
Eigen::VectorXcd GaussianRandomizeE(const Eigen::MatrixXcd& E_tilde,
                                    const Eigen::VectorXcd& v,
                                    const ChannelRealization& channel,
                                    const SystemParams& params,
                                    int num_candidates, Rng& rng);

/// Phases that increase ||g + Q^H e|| by alternating the receive direction
/// w = h / ||h|| and e_l = exp(j arg((Q w)_l)) from the principal direction
/// of Q^H Q.
Eigen::VectorXcd AlignedPhases(const ChannelRealization& channel);

/// Alternating optimization of v and e from uniformly random initial phases.
/// When the first transmit problem is infeasible at the random start it is
/// retried once from AlignedPhases before InfeasibleError propagates.
Design AlternatingOptimize(const ChannelRealization& channel,
                           const SystemParams& params, std::uint64_t seed,
                           const BeamformOptions& options = {});

/// iteration,power_watts,mu,a,b,sdp_status
void WriteTraceCsv(const Design& design, std::ostream& out);

}  // namespace risopt
