#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pipeline/config.hpp"
#include "report/metrics.hpp"

namespace seirdmon {

// Each stage reads its inputs from and writes its outputs under cfg.out_dir.
// Progress and warnings go to `log` when it is non-null.

struct IngestResult {
    std::size_t rows = 0;
    std::size_t repairs = 0;
};
IngestResult run_ingest(const RunConfig& cfg, std::ostream* log = nullptr);

std::size_t run_simulate(const RunConfig& cfg, std::ostream* log = nullptr);

struct FitResult {
    std::int64_t steps = 0;
    double min_ess = 0.0;
};
FitResult run_fit(const RunConfig& cfg, std::ostream* log = nullptr);

struct SignalList {
    double lambda = 0.0;
    std::vector<std::int64_t> days;
};
std::vector<SignalList> run_monitor(const RunConfig& cfg, std::ostream* log = nullptr);

struct ReportResult {
    double pseudo_r2 = 0.0;
    double coverage = 0.0;
    std::vector<std::int64_t> signal_days;
    std::string text;
};
ReportResult run_report(const RunConfig& cfg, std::ostream* log = nullptr);

// Posterior archive: CSV `day,particle,alpha,beta,gamma,eta`, values at %.17g.
void write_posterior_archive(const std::string& path, const std::vector<FilterOutput>& outputs);
std::map<std::int64_t, std::vector<ParamVector>> read_posterior_archive(const std::string& path);

void write_fit_csv(const std::string& path, const ObservationSeries& obs, const std::vector<PredictiveSummary>& fits);
std::vector<PredictiveSummary> read_fit_csv(const std::string& path);

inline constexpr const char* kObservationsFile = "observations.csv";
inline constexpr const char* kPosteriorFile = "posterior.csv";
inline constexpr const char* kParamsFile = "params.csv";
inline constexpr const char* kFitFile = "fit.csv";
inline constexpr const char* kMonitorFile = "monitor.csv";
inline constexpr const char* kSweepFile = "monitor_sweep.csv";
inline constexpr const char* kSignalsFile = "signals.txt";
inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kConfigDumpFile = "run_config.txt";

}  // namespace seirdmon
