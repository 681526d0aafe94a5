#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "basket/calibration.hpp"
#include "basket/errors.hpp"

using namespace basket;

namespace {

PhiPriorCalib base_calib() {
    PhiPriorCalib c;
    c.sims_per_pair = 2000;
    c.n.assign(6, 24);
    c.q0.assign(6, 0.2);
    c.q1.assign(6, 0.4);
    return c;
}

}  // namespace

TEST_CASE("phi prior calibration: interval algebra") {
    PhiPriorCalib calib = base_calib();
    RngStream rng(5, 5);
    const PhiPriorResult res = calibrate_phi_prior(calib, rng);
    CHECK(res.d_t > 0.0);
    CHECK(res.a_lb == doctest::Approx(-std::log(0.5) / res.d_t).epsilon(1e-12));
    CHECK(res.a_ub == doctest::Approx(-std::log(0.3) / res.d_t).epsilon(1e-12));
    CHECK(res.a_lb < res.a_ub);
    CHECK(res.a >= res.a_lb);
    CHECK(res.a <= res.a_ub);
    CHECK(res.min_nonzero > 0.0);
}

TEST_CASE("phi prior calibration: collapsed correlation window") {
    PhiPriorCalib calib = base_calib();
    calib.corr_lb = calib.corr_ub = 0.4;
    RngStream rng(6, 6);
    const PhiPriorResult res = calibrate_phi_prior(calib, rng);
    CHECK(res.a_lb == res.a_ub);
    CHECK(res.a == res.a_lb);
}

TEST_CASE("phi prior calibration: shape override and squared-exponential mapping") {
    PhiPriorCalib calib = base_calib();
    calib.shape_override = 1.0;
    RngStream rng(7, 7);
    const PhiPriorResult res = calibrate_phi_prior(calib, rng);
    CHECK(res.a == 1.0);
    // squared-exponential map divides by d_t^2
    CHECK(phi_for_correlation(CorrelationKind::squared_exponential, 0.5, 2.0) ==
          doctest::Approx(-std::log(0.5) / 4.0).epsilon(1e-12));
    CHECK(phi_for_correlation(CorrelationKind::exponential, 0.5, 2.0) ==
          doctest::Approx(-std::log(0.5) / 2.0).epsilon(1e-12));
}

TEST_CASE("phi prior calibration: insensitive to indication order") {
    PhiPriorCalib calib = base_calib();
    calib.sims_per_pair = 4000;
    calib.n = {24, 20, 24, 18, 24, 22};
    calib.q0 = {0.2, 0.25, 0.2, 0.15, 0.2, 0.25};
    calib.q1 = {0.4, 0.45, 0.4, 0.35, 0.4, 0.45};
    RngStream r1(9, 9);
    const PhiPriorResult a = calibrate_phi_prior(calib, r1);
    // reversed order: pooled population identical, estimate within MC noise
    PhiPriorCalib rev = calib;
    std::reverse(rev.n.begin(), rev.n.end());
    std::reverse(rev.q0.begin(), rev.q0.end());
    std::reverse(rev.q1.begin(), rev.q1.end());
    RngStream r2(10, 10);
    const PhiPriorResult b = calibrate_phi_prior(rev, r2);
    CHECK(std::fabs(a.d_t - b.d_t) < 0.06);
}

TEST_CASE("cutoff search on hand-built replicate caches") {
    // 10 replicates, one indication, exceedances 0.05, 0.15, ..., 0.95
    std::vector<NullReplicate> reps(10);
    for (int i = 0; i < 10; ++i) {
        reps[i].stopped = {false};
        reps[i].exceed = {0.05 + 0.1 * i};
    }
    // alpha 0.2 allows 2 rejections: smallest Q is the 3rd largest value 0.75
    const CutoffResult r = cutoff_from_replicates(reps, 0.20, true);
    CHECK(r.q == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.reject_rate[0] == doctest::Approx(0.2).epsilon(1e-12));
    // slightly smaller Q violates the constraint
    int over = 0;
    for (const auto& rep : reps) {
        if (rep.exceed[0] > r.q - 1e-9) ++over;
    }
    CHECK(over > 2);
    // alpha 1.0 accepts the zero boundary
    CHECK(cutoff_from_replicates(reps, 1.0, true).q == 0.0);
}

TEST_CASE("cutoff is monotone in the target alpha") {
    std::vector<NullReplicate> reps(40);
    RngStream rng(3, 14);
    for (auto& rep : reps) {
        rep.stopped = {false, false};
        rep.exceed = {rng.uniform(), rng.uniform()};
    }
    double prev_q = 1.0;
    for (double alpha : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double q = cutoff_from_replicates(reps, alpha, true).q;
        CHECK(q <= prev_q + 1e-12);
        prev_q = q;
    }
}

TEST_CASE("stopped indications only contribute to the denominator") {
    std::vector<NullReplicate> reps(4);
    for (int i = 0; i < 4; ++i) {
        reps[i].stopped = {i < 2};  // two stopped replicates
        reps[i].exceed = {i < 2 ? 0.0 : 0.9};
    }
    // alpha 0.5 allows 2 of 4: both exceedances 0.9 are allowed at Q = 0
    const CutoffResult r = cutoff_from_replicates(reps, 0.5, true);
    CHECK(r.q == 0.0);
    CHECK(r.reject_rate[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("failed replicates are excluded and counted") {
    std::vector<NullReplicate> reps(6);
    for (int i = 0; i < 6; ++i) {
        reps[i].stopped = {false};
        reps[i].exceed = {0.1 * (i + 1)};
        reps[i].failed = i >= 4;
    }
    // four usable replicates with exceedances .1 .2 .3 .4; alpha .25 allows 1
    const CutoffResult r = cutoff_from_replicates(reps, 0.25, true);
    CHECK(r.failed_replicates == 2);
    CHECK(r.q == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.reject_rate[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("average-metric pooling") {
    // two indications with different exceedance profiles
    std::vector<NullReplicate> reps(10);
    RngStream rng(8, 21);
    for (auto& rep : reps) {
        rep.stopped = {false, false};
        rep.exceed = {rng.uniform(0.0, 0.5), rng.uniform(0.5, 1.0)};
    }
    const CutoffResult max_r = cutoff_from_replicates(reps, 0.3, true);
    const CutoffResult avg_r = cutoff_from_replicates(reps, 0.3, false);
    // max control is at least as strict
    CHECK(max_r.q >= avg_r.q - 1e-12);
    double avg = 0.0;
    for (double v : avg_r.reject_rate) avg += v;
    avg /= avg_r.reject_rate.size();
    CHECK(avg <= 0.3 + 1e-12);
}

TEST_CASE("end-to-end null calibration with the analytic independent model") {
    ModelSpec spec;
    spec.method = Method::independent;
    TwoStageDesign design = make_two_stage_design(3, 14, 24, 0.05, 0.5, 0.2, 0.4);
    CutoffCalib calib;
    calib.replicates = 800;
    calib.target_alpha = 0.10;
    McmcConfig cfg;

    // max metric: every indication at or below the target
    calib.max_over_indications = true;
    const CutoffResult strict =
        calibrate_final_cutoff(spec, design, calib, cfg, 424242, 0, 2);
    CHECK(strict.q > 0.5);
    CHECK(strict.q < 1.0);
    for (double rate : strict.reject_rate) {
        CHECK(rate <= 0.10 + 1e-12);
        CHECK(rate > 0.02);
    }
    // average metric: the mean at or below the target, never above the strict Q
    calib.max_over_indications = false;
    const CutoffResult avg = calibrate_final_cutoff(spec, design, calib, cfg, 424242, 0, 2);
    double mean_rate = 0.0;
    for (double rate : avg.reject_rate) mean_rate += rate;
    mean_rate /= static_cast<double>(avg.reject_rate.size());
    CHECK(mean_rate <= 0.10 + 1e-12);
    CHECK(avg.q <= strict.q + 1e-12);
    // deterministic given the seed
    const CutoffResult again = calibrate_final_cutoff(spec, design, calib, cfg, 424242, 0, 2);
    CHECK(again.q == avg.q);
}
