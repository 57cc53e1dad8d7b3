#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "risopt/beamform.hpp"
#include "risopt/channel.hpp"
#include "risopt/model.hpp"

namespace risopt {

struct OutageEstimate {
  int n_samples = 0;
  int n_violations = 0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sqrt(p (1 - p) / n)
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of Pr{log2(1 + gamma) < R} over CSI errors drawn
/// around the estimated channel. Sample i uses Rng::Substream(seed, i), so the
/// result does not depend on `threads`.
OutageEstimate EstimateOutage(const Design& design,
                              const ChannelRealization& channel,
                              const SystemParams& params, int n_samples,
                              std::uint64_t seed, int threads = 1);

enum class Scheme {
  kProposed,
  kNonrobustCsi,   // designed with zeta = 0
  kNonrobustHwi,   // designed with beta = 0
  kNonrobustBoth,  // designed with zeta = 0 and beta = 0
  kPerfectRef,     // designed and evaluated with zeta = 0 and beta = 0
};

const char* ToString(Scheme scheme);
std::optional<Scheme> ParseScheme(const std::string& name);

/// Channel and parameters the scheme assumes when designing.
ChannelRealization DesignChannel(Scheme scheme, const ChannelRealization& channel);
SystemParams DesignParams(Scheme scheme, const SystemParams& params);

/// Channel and parameters the scheme is evaluated under: the true ones,
/// except for the perfect-knowledge reference.
ChannelRealization EvaluationChannel(Scheme scheme,
                                     const ChannelRealization& channel);
SystemParams EvaluationParams(Scheme scheme, const SystemParams& params);

/// Runs AlternatingOptimize on the scheme's design assumptions.
/// InfeasibleError propagates.
Design DesignScheme(Scheme scheme, const ChannelRealization& channel,
                    const SystemParams& params, std::uint64_t seed,
                    const BeamformOptions& options = {});

}  // namespace risopt
