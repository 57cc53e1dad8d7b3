#include "risopt/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace risopt {

OutageEstimate EstimateOutage(const Design& design,
                              const ChannelRealization& channel,
                              const SystemParams& params, int n_samples,
                              std::uint64_t seed, int threads) {
  if (n_samples < 1) {
    throw std::invalid_argument("EstimateOutage: n_samples must be >= 1");
  }
  const int n = channel.num_antennas();
  const int l = channel.num_elements();
  auto violated = [&](int i) {
    Rng rng = Rng::Substream(seed, static_cast<std::uint64_t>(i));
    const ChannelErrors err = SampleErrors(channel.zeta_g, channel.zeta_q, n, l, rng);
    const double snr = Snr(design.v, design.e, channel.g_hat + err.delta_g,
                           channel.Q_hat + err.delta_Q, params.beta_t,
                           params.beta_r, params.noise_power);
    return AchievableRate(snr) < params.target_rate;
  };

  const int workers = std::clamp(threads, 1, n_samples);
  std::vector<int> counts(workers, 0);
  if (workers == 1) {
    for (int i = 0; i < n_samples; ++i) counts[0] += violated(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n_samples; i += workers) counts[w] += violated(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  OutageEstimate est;
  est.n_samples = n_samples;
  for (int c : counts) est.n_violations += c;
  est.p_hat = static_cast<double>(est.n_violations) / n_samples;
  est.ci_halfwidth = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / n_samples);
  est.seed = seed;
  return est;
}

const char* ToString(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kNonrobustCsi: return "nonrobust_csi";
    case Scheme::kNonrobustHwi: return "nonrobust_hwi";
    case Scheme::kNonrobustBoth: return "nonrobust_both";
    case Scheme::kPerfectRef: return "perfect_ref";
  }
  return "unknown";
}

std::optional<Scheme> ParseScheme(const std::string& name) {
  for (Scheme s : {Scheme::kProposed, Scheme::kNonrobustCsi, Scheme::kNonrobustHwi,
                   Scheme::kNonrobustBoth, Scheme::kPerfectRef}) {
    if (name == ToString(s)) return s;
  }
  return std::nullopt;
}

namespace {

bool IgnoresCsiError(Scheme s) {
  return s == Scheme::kNonrobustCsi || s == Scheme::kNonrobustBoth ||
         s == Scheme::kPerfectRef;
}

bool IgnoresHwi(Scheme s) {
  return s == Scheme::kNonrobustHwi || s == Scheme::kNonrobustBoth ||
         s == Scheme::kPerfectRef;
}

ChannelRealization WithoutErrors(const ChannelRealization& channel) {
  ChannelRealization out = channel;
  out.zeta_g = 0.0;
  out.zeta_q = 0.0;
  return out;
}

SystemParams WithoutHwi(const SystemParams& params) {
  SystemParams out = params;
  out.beta_t = 0.0;
  out.beta_r = 0.0;
  return out;
}

}  // namespace

ChannelRealization DesignChannel(Scheme scheme, const ChannelRealization& channel) {
  return IgnoresCsiError(scheme) ? WithoutErrors(channel) : channel;
}

SystemParams DesignParams(Scheme scheme, const SystemParams& params) {
  if (!IgnoresCsiError(scheme) && !IgnoresHwi(scheme)) return params;
  SystemParams out = IgnoresHwi(scheme) ? WithoutHwi(params) : params;
  if (IgnoresCsiError(scheme)) out.delta_c = 0.0;
  return out;
}

ChannelRealization EvaluationChannel(Scheme scheme,
                                     const ChannelRealization& channel) {
  return scheme == Scheme::kPerfectRef ? WithoutErrors(channel) : channel;
}

SystemParams EvaluationParams(Scheme scheme, const SystemParams& params) {
  if (scheme != Scheme::kPerfectRef) return params;
  SystemParams out = WithoutHwi(params);
  out.delta_c = 0.0;
  return out;
}

Design DesignScheme(Scheme scheme, const ChannelRealization& channel,
                    const SystemParams& params, std::uint64_t seed,
                    const BeamformOptions& options) {
  return AlternatingOptimize(DesignChannel(scheme, channel),
                             DesignParams(scheme, params), seed, options);
}

}  // namespace risopt
