#pragma once

#include <utility>
#include <vector>

#include "basket/divergence.hpp"
#include "basket/models.hpp"
#include "basket/rng.hpp"

namespace basket {

// The two-stage design: interim futility at Pr(p_i > (q0+q1)/2 | D1) < Qf,
// final claim at Pr(p_i > q0 | D) > Q.
struct TwoStageDesign {
    std::vector<int> n1;      // stage-one sizes
    std::vector<int> n;       // maximum sizes
    double interim_cutoff = 0.05;  // Qf
    double final_cutoff = 0.5;     // Q
    std::vector<double> q0;
    std::vector<double> q1;

    std::size_t indications() const { return n.size(); }
};

// Uniform-rate convenience constructor.
TwoStageDesign make_two_stage_design(std::size_t n_ind, int n1, int n, double qf, double q,
                                     double q0, double q1);

// Simon two-stage rule: continue past stage one iff responders > r1; declare
// sensitive iff total responders > r. Operating numbers are exact.
struct SimonDesign {
    int r1 = 0;
    int n1 = 0;
    int r = 0;
    int n = 0;
    double type1 = 0.0;
    double power = 0.0;
    double expected_n_null = 0.0;
    double pet_null = 0.0;  // probability of early termination under q0
};

struct LiuDesign {
    double het_threshold = 0.2;       // gamma: heterogeneity path iff p-value below it
    double futility_threshold = 0.5;  // C
    TwoStageDesign base;
    SimonDesign simon;
};

enum class LiuPath { none, homogeneous, heterogeneous };

struct IndicationOutcome {
    int enrolled = 0;
    int responders = 0;
    bool stopped_early = false;
    bool rejected = false;    // H0 rejected: concluded sensitive
    double estimate = 0.0;    // posterior mean (sample rate on the Simon path)
    double exceed_prob = 0.0; // Pr(p_i > q0,i | final data), 0 if never fit
};

struct TrialResult {
    std::vector<IndicationOutcome> indication;
    LiuPath path = LiuPath::none;

    int total_enrolled() const {
        int s = 0;
        for (const auto& o : indication) s += o.enrolled;
        return s;
    }
};

// One simulated trial under the paper's two-stage process. Stage-one data is
// drawn from `streams.data`, posterior computation from `streams.analysis`.
// Early-stopped indications are excluded from the final fit.
TrialResult run_two_stage_trial(const std::vector<double>& truth, const ModelSpec& method,
                                const TwoStageDesign& design, const McmcConfig& mcmc,
                                ReplicateStreams& streams);

// Chi-square homogeneity statistic for I binomial proportions and its
// upper-tail p-value on I - 1 degrees of freedom. Degenerate all-0 / all-n
// data gives (0, 1).
std::pair<double, double> cochran_q(const std::vector<IndicationData>& data);

// Exact-enumeration minimax Simon design: minimal n subject to exact type I
// error <= alpha and power >= 1 - beta, ties broken by expected sample size
// under q0. Throws InfeasibleDesign if nothing fits under n_cap.
SimonDesign simon_minimax(double q0, double q1, double alpha, double beta, int n_cap = 100);

// Exact operating numbers of an arbitrary Simon rule at response rate p.
double simon_reject_prob(const SimonDesign& d, double p);
double simon_early_stop_prob(const SimonDesign& d, double p);

// Bayesian predictive power that the final response-rate estimate clears q0,
// given r1 responders among n1 with n2 still to enroll. draws = 0 evaluates
// the exact beta-binomial sum; draws > 0 runs Monte Carlo (needs rng).
double predictive_power(int n1, int r1, int n2, int n, double q0, int draws,
                        RngStream* rng = nullptr);

// Liu's two-path trial: Cochran's Q gate, Simon rules on the heterogeneity
// path, futility-by-predictive-power plus the two-component mixture fit on
// the homogeneous path.
TrialResult run_liu_trial(const std::vector<double>& truth, const LiuDesign& design,
                          const LiuBhmmParams& params, const McmcConfig& mcmc,
                          ReplicateStreams& streams);

}  // namespace basket
