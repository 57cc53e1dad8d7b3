#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "risopt/config.hpp"
#include "risopt/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kIoError = 2;

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int Run(const std::string& config_path, std::string out_path, int threads,
        bool no_timestamp) {
  risopt::ExperimentConfig config;
  try {
    config = risopt::LoadConfig(config_path);
  } catch (const risopt::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << "\n";
    return kIoError;
  }
  if (out_path.empty()) out_path = config.output;
  if (out_path.empty()) {
    std::cerr << "no output path: pass --out or set 'output' in the config\n";
    return kConfigError;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open '" << out_path << "' for writing\n";
    return kIoError;
  }

  const auto cells = risopt::RunSweep(config, threads);
  std::vector<risopt::ResultRow> rows;
  int failed = 0;
  for (const auto& c : cells) {
    rows.push_back(c.row);
    failed += !c.row.ok();
  }
  risopt::WriteResultsCsv(rows, out,
                          no_timestamp ? "" : "generated " + Timestamp());
  out.flush();
  if (!out) {
    std::cerr << "write to '" << out_path << "' failed\n";
    return kIoError;
  }
  std::cerr << rows.size() << " rows written to " << out_path;
  if (failed > 0) std::cerr << " (" << failed << " failed designs)";
  std::cerr << "\n";
  return kOk;
}

int Summarize(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "cannot open '" << in_path << "'\n";
    return kIoError;
  }
  std::vector<risopt::ResultRow> rows;
  try {
    rows = risopt::ParseResultsCsv(in);
  } catch (const risopt::CsvError& e) {
    std::cerr << in_path << ": " << e.what() << "\n";
    return kConfigError;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open '" << out_path << "' for writing\n";
    return kIoError;
  }
  risopt::WriteSummaryCsv(risopt::Summarize(rows), out);
  out.flush();
  return out ? kOk : kIoError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust RIS-aided MISO beamforming experiments"};
  app.require_subcommand(1);

  std::string config_path, out_path, in_path, summary_path;
  int threads = 1;
  bool no_timestamp = false;

  auto* run = app.add_subcommand("run", "Run a sweep and write per-cell results");
  run->add_option("--config", config_path, "Experiment config")->required();
  run->add_option("--out", out_path, "Results CSV (defaults to 'output' in the config)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at comment line");

  auto* summarize = app.add_subcommand("summarize", "Aggregate a results CSV");
  summarize->add_option("--in", in_path, "Results CSV")->required();
  summarize->add_option("--out", summary_path, "Summary CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (*run) return Run(config_path, out_path, threads, no_timestamp);
  return Summarize(in_path, summary_path);
}
