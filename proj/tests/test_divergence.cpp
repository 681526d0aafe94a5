#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "basket/divergence.hpp"

using namespace basket;

TEST_CASE("identical posteriors are at distance zero") {
    const IndicationData a{24, 10};
    CHECK(b_distance(a, a) == 0.0);
    CHECK(h_distance(a, a) == 0.0);
    CHECK(kl_distance(a, a) == 0.0);
}

TEST_CASE("closed forms agree with the quadrature oracle on spot pairs") {
    const IndicationData a{24, 10};
    const IndicationData b{24, 0};
    const IndicationData c{24, 20};
    const IndicationData d{24, 12};
    CHECK(std::fabs(b_distance(a, b) -
                    numeric_distance_oracle(DistanceMeasure::bhattacharyya, a, b, 100000)) <=
          1e-8);
    CHECK(std::fabs(h_distance(a, b) -
                    numeric_distance_oracle(DistanceMeasure::hellinger, a, b, 100000)) <= 1e-8);
    CHECK(std::fabs(kl_distance(a, c) -
                    numeric_distance_oracle(DistanceMeasure::symmetrized_kl, a, c, 100000)) <=
          1e-6);
    CHECK(std::fabs(kl_distance(a, d) -
                    numeric_distance_oracle(DistanceMeasure::symmetrized_kl, a, d, 100000)) <=
          1e-6);
    // Hellinger is sqrt(1 - BC) with BC from the Bhattacharyya integral
    const double bc = std::exp(-numeric_distance_oracle(DistanceMeasure::bhattacharyya, a, b,
                                                        100000));
    CHECK(h_distance(a, b) == doctest::Approx(std::sqrt(1.0 - bc)).epsilon(1e-9));
}

TEST_CASE("symmetry and identity of indiscernibles over the n=24 grid") {
    // coarse grid here; the acceptance suite runs the exhaustive one
    for (int ri = 0; ri <= 24; ri += 4) {
        for (int rj = 0; rj <= 24; rj += 4) {
            const IndicationData a{24, static_cast<double>(ri)};
            const IndicationData b{24, static_cast<double>(rj)};
            for (auto m : {DistanceMeasure::bhattacharyya, DistanceMeasure::hellinger,
                           DistanceMeasure::symmetrized_kl}) {
                const double dij = distance(m, a, b);
                CHECK(dij == distance(m, b, a));  // exact symmetry
                if (ri == rj) {
                    CHECK(dij == 0.0);
                } else {
                    CHECK(dij > 0.0);
                }
            }
        }
    }
}

TEST_CASE("ranges: H in [0,1), B and KL nonnegative") {
    for (int ri = 0; ri <= 24; ++ri) {
        const IndicationData a{24, static_cast<double>(ri)};
        const IndicationData b{24, 24.0 - ri};
        CHECK(h_distance(a, b) >= 0.0);
        CHECK(h_distance(a, b) < 1.0);
        CHECK(b_distance(a, b) >= 0.0);
        CHECK(kl_distance(a, b) >= 0.0);
    }
}

TEST_CASE("distances fall then rise as r2 sweeps through r1 = 10") {
    // the qualitative shape of the paper's two-indication sweep
    for (auto m : {DistanceMeasure::bhattacharyya, DistanceMeasure::hellinger,
                   DistanceMeasure::symmetrized_kl}) {
        const IndicationData ref{24, 10};
        double prev = distance(m, ref, {24, 0});
        for (int r2 = 1; r2 <= 10; ++r2) {
            const double cur = distance(m, ref, {24, static_cast<double>(r2)});
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
        for (int r2 = 11; r2 <= 24; ++r2) {
            const double cur = distance(m, ref, {24, static_cast<double>(r2)});
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("real-valued responder counts are accepted") {
    const IndicationData a{24, 10.1};
    const IndicationData b{24, 10.2};
    const double d = b_distance(a, b);
    CHECK(d > 0.0);
    CHECK(std::fabs(d - numeric_distance_oracle(DistanceMeasure::bhattacharyya, a, b, 100000)) <=
          1e-8);
}

TEST_CASE("invalid data rejected") {
    CHECK_THROWS_AS(b_distance({24, 25}, {24, 0}), std::invalid_argument);
    CHECK_THROWS_AS(b_distance({24, -1}, {24, 0}), std::invalid_argument);
}
