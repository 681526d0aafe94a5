#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "basket/calibration.hpp"
#include "basket/designs.hpp"
#include "basket/models.hpp"

namespace basket {

// One analysis method inside a scenario: model spec plus its calibrated final
// cutoff.
struct MethodConfig {
    std::string label;
    ModelSpec spec;
    std::optional<double> final_cutoff;  // Q; required before running
};

struct ScenarioConfig {
    std::vector<double> truth;
    std::vector<double> q0;
    std::vector<double> q1;
    std::vector<int> n1;
    std::vector<int> n;
    double interim_cutoff = 0.05;  // Qf
    std::vector<MethodConfig> methods;
    double liu_het_threshold = 0.2;
    double liu_futility_threshold = 0.5;
    std::optional<SimonDesign> simon;  // heterogeneity-path rule for Liu
    int replicates = 1000;
    McmcConfig mcmc;
    std::uint64_t seed = 1;
    int threads = 1;
    bool collect_replicates = false;

    std::size_t indications() const { return truth.size(); }
    TwoStageDesign design_for(const MethodConfig& m) const;
    LiuDesign liu_design_for(const MethodConfig& m) const;
};

struct OperatingCharacteristics {
    std::string label;
    std::vector<double> reject_pct;
    std::vector<double> stop_pct;
    std::vector<double> abs_bias;
    std::vector<double> rmse;
    double avg_sample_size = 0.0;
    double pct_perfect = 0.0;
    double mean_tp = 0.0;
    double mean_tn = 0.0;
    int replicates_used = 0;
    int failed_replicates = 0;
};

// One row of the optional long-format per-replicate output.
struct ReplicateRecord {
    std::string method;
    int replicate = 0;
    int indication = 0;
    int enrolled = 0;
    int responders = 0;
    bool stopped_early = false;
    bool rejected = false;
    double estimate = 0.0;
    double exceed_prob = 0.0;
};

struct ScenarioReport {
    std::vector<OperatingCharacteristics> methods;
    std::vector<ReplicateRecord> records;  // filled when collect_replicates
};

// R independent replicates of the full trial per method. Methods share
// patient-outcome streams within a replicate; failed replicates (ChainFailure)
// are dropped and counted.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Side-by-side CSV of the operating characteristics, one "% reject" and one
// "% stop" row per method, mirroring the paper's table layout.
std::string operating_characteristics_csv(const std::vector<OperatingCharacteristics>& ocs,
                                          const std::vector<double>& truth);

std::string replicate_records_csv(const std::vector<ReplicateRecord>& records);

// Per-indication bias / RMSE block (long format).
std::string estimation_metrics_csv(const std::vector<OperatingCharacteristics>& ocs);

}  // namespace basket
