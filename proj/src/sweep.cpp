#include "risopt/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace risopt {

namespace {

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseDouble(const std::string& s, int row, const char* field) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError(row, std::string("bad ") + field + " '" + s + "'");
  }
  return v;
}

template <typename T>
T ParseInteger(const std::string& s, int row, const char* field) {
  T v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError(row, std::string("bad ") + field + " '" + s + "'");
  }
  return v;
}

double SampleStd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

double WattsToDbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double DbmToWatts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::uint64_t DesignSeed(std::uint64_t seed) {
  return Rng::Substream(seed, 1).NextU64();
}

std::uint64_t OutageSeed(std::uint64_t seed) {
  return Rng::Substream(seed, 2).NextU64();
}

CellResult RunCell(const ExperimentConfig& config, double value, Scheme scheme,
                   std::uint64_t seed) {
  const SystemParams params = config.ParamsAt(value);
  CellResult cell;
  ResultRow& row = cell.row;
  row.sweep = ToString(config.axis);
  row.value = value;
  row.scheme = ToString(scheme);
  row.seed = seed;
  row.power_dbm = row.p_hat = row.ci = std::numeric_limits<double>::quiet_NaN();

  BeamformOptions options;
  options.num_candidates = config.num_candidates;
  try {
    const ChannelRealization channel = GenerateChannel(params, seed);
    cell.design = DesignScheme(scheme, channel, params, DesignSeed(seed), options);
    const OutageEstimate est = EstimateOutage(
        cell.design, EvaluationChannel(scheme, channel),
        EvaluationParams(scheme, params), config.n_samples, OutageSeed(seed));
    row.power_dbm = WattsToDbm(cell.design.power);
    row.p_hat = est.p_hat;
    row.ci = est.ci_halfwidth;
    row.iters = static_cast<int>(cell.design.iterations.size()) - 1;
    row.status = "Optimal";
  } catch (const InfeasibleError&) {
    row.status = "Infeasible";
  } catch (const NumericalError&) {
    row.status = "NumericalFailure";
  } catch (const RandomizationFailed&) {
    row.status = "RandomizationFailed";
  } catch (const std::exception&) {
    row.status = "Error";
  }
  return cell;
}

std::vector<CellResult> RunSweep(const ExperimentConfig& config, int threads) {
  config.Validate();
  struct Job {
    double value;
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double value : config.grid) {
    for (Scheme scheme : config.schemes) {
      for (std::uint64_t seed : config.seeds) jobs.push_back({value, scheme, seed});
    }
  }
  std::vector<CellResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = RunCell(config, jobs[i].value, jobs[i].scheme, jobs[i].seed);
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out,
                     const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep << ',' << FormatDouble(r.value) << ',' << r.scheme << ','
        << r.seed << ',' << FormatDouble(r.power_dbm) << ','
        << FormatDouble(r.p_hat) << ',' << FormatDouble(r.ci) << ',' << r.iters
        << ',' << r.status << '\n';
  }
}

CsvError::CsvError(int row, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

std::vector<ResultRow> ParseResultsCsv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kResultsHeader) throw CsvError(lineno, "unexpected header");
      header = true;
      continue;
    }
    const auto f = SplitFields(line);
    if (f.size() != 9) {
      throw CsvError(lineno, "expected 9 fields, got " + std::to_string(f.size()));
    }
    ResultRow r;
    r.sweep = f[0];
    r.value = ParseDouble(f[1], lineno, "value");
    r.scheme = f[2];
    r.seed = ParseInteger<std::uint64_t>(f[3], lineno, "seed");
    r.power_dbm = ParseDouble(f[4], lineno, "power_dbm");
    r.p_hat = ParseDouble(f[5], lineno, "p_hat");
    r.ci = ParseDouble(f[6], lineno, "ci");
    r.iters = ParseInteger<int>(f[7], lineno, "iters");
    r.status = f[8];
    if (r.status.empty()) throw CsvError(lineno, "empty status");
    if (r.ok() && !(r.p_hat >= 0.0 && r.p_hat <= 1.0)) {
      throw CsvError(lineno, "p_hat outside [0, 1]");
    }
    rows.push_back(std::move(r));
  }
  if (!header) throw CsvError(lineno, "missing header");
  return rows;
}

std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows) {
  struct Group {
    SummaryRow out;
    std::vector<double> watts, dbm, p;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    Group* g = nullptr;
    for (auto& cand : groups) {
      if (cand.out.sweep == r.sweep && cand.out.value == r.value &&
          cand.out.scheme == r.scheme) {
        g = &cand;
        break;
      }
    }
    if (g == nullptr) {
      groups.push_back({});
      g = &groups.back();
      g->out.sweep = r.sweep;
      g->out.value = r.value;
      g->out.scheme = r.scheme;
    }
    if (!r.ok()) {
      ++g->out.failures;
      continue;
    }
    ++g->out.runs;
    g->watts.push_back(DbmToWatts(r.power_dbm));
    g->dbm.push_back(r.power_dbm);
    g->p.push_back(r.p_hat);
  }
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    SummaryRow s = g.out;
    if (s.runs == 0) {
      s.power_dbm = s.power_dbm_std = s.p_hat = s.p_hat_std =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      double w = 0.0, p = 0.0;
      for (double x : g.watts) w += x;
      for (double x : g.p) p += x;
      s.power_dbm = WattsToDbm(w / s.runs);
      s.p_hat = p / s.runs;
      s.power_dbm_std = SampleStd(g.dbm);
      s.p_hat_std = SampleStd(g.p);
    }
    out.push_back(s);
  }
  return out;
}

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << s.sweep << ',' << FormatDouble(s.value) << ',' << s.scheme << ','
        << s.runs << ',' << s.failures << ',' << FormatDouble(s.power_dbm) << ','
        << FormatDouble(s.power_dbm_std) << ',' << FormatDouble(s.p_hat) << ','
        << FormatDouble(s.p_hat_std) << '\n';
  }
}

}  // namespace risopt
