#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "risopt/config.hpp"

namespace risopt {

inline constexpr const char* kResultsHeader =
    "sweep,value,scheme,seed,power_dbm,p_hat,ci,iters,status";

struct ResultRow {
  std::string sweep;
  double value = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  double power_dbm = 0.0;  // NaN when the design failed
  double p_hat = 0.0;
  double ci = 0.0;
  int iters = 0;
  std::string status;  // Optimal, Infeasible, NumericalFailure, ...

  bool ok() const { return status == "Optimal"; }
  bool operator==(const ResultRow&) const = default;
};

struct CellResult {
  ResultRow row;
  Design design;  // empty on failure
};

double WattsToDbm(double watts);
double DbmToWatts(double dbm);

/// Seeds derived from the configured seed for the channel draw, the designer
/// and the Monte Carlo estimate.
std::uint64_t DesignSeed(std::uint64_t seed);
std::uint64_t OutageSeed(std::uint64_t seed);

/// One (value, scheme, seed) cell: channel, design, outage estimate. Design
/// failures are reported through the row status.
CellResult RunCell(const ExperimentConfig& config, double value, Scheme scheme,
                   std::uint64_t seed);

/// All cells in (value, scheme, seed) order, evaluated on `threads` workers.
std::vector<CellResult> RunSweep(const ExperimentConfig& config, int threads = 1);

/// Number formatting is shortest round-trip.
void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out,
                     const std::string& comment = "");

class CsvError : public std::runtime_error {
 public:
  CsvError(int row, const std::string& what);
  int row() const { return row_; }

 private:
  int row_;
};

/// Lines starting with '#' are skipped. Throws CsvError with the 1-based
/// line number of the offending row.
std::vector<ResultRow> ParseResultsCsv(std::istream& in);

inline constexpr const char* kSummaryHeader =
    "sweep,value,scheme,runs,failures,power_dbm,power_dbm_std,p_hat,p_hat_std";

struct SummaryRow {
  std::string sweep;
  double value = 0.0;
  std::string scheme;
  int runs = 0;      // successful rows
  int failures = 0;  // rows with a non-Optimal status
  double power_dbm = 0.0;      // dBm of the mean power in watts
  double power_dbm_std = 0.0;  // sample std of the per-seed dBm values
  double p_hat = 0.0;
  double p_hat_std = 0.0;
};

/// Groups by (sweep, value, scheme) in order of first appearance.
std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace risopt
