#pragma once

#include <optional>
#include <string>

#include "cli_config.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/stationary.hpp"

namespace qwalk::cli {

// serialization used by the subcommands (and by the test suite)
std::string return_series_csv(const ReturnSeries& series);
std::string decay_fit_json(const DecayFit& fit);
std::string polya_csv(const PolyaEstimate& est);
std::string polya_json(const PolyaEstimate& est, const std::optional<DecayFit>& fit,
                       const ReturnSeries& series);
std::string mean_csv(const MeanTrajectory& traj);
std::string scan_csv(const std::vector<ScanRow>& rows);
std::string scan_jsonl(const std::vector<ScanRow>& rows);
std::string spectral_audit_json(const SpectralAuditReport& report);
std::string saddle_audit_json(const SaddleAuditReport& report);
std::string velocity_profile_json(const BiasParams& params);

int run_evolve(const RunConfig& config);
int run_spectrum(const RunConfig& config);
int run_saddles(const RunConfig& config);
int run_velocities(const RunConfig& config);
int run_return(const RunConfig& config);
int run_polya(const RunConfig& config);
int run_mean(const RunConfig& config);
int run_scan(const RunConfig& config);
int run_verify(const RunConfig& config);

}  // namespace qwalk::cli
