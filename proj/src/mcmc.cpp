#include "basket/mcmc.hpp"

#include <cmath>

#include "basket/errors.hpp"

namespace basket {

Chain run_mcmc(const LogDensity& logpost, std::vector<double> init, const McmcConfig& cfg,
               RngStream& rng) {
    const std::size_t dim = init.size();
    double current_lp = logpost(init);
    if (!std::isfinite(current_lp)) {
        throw InitError("run_mcmc: log posterior not finite at the initial state");
    }

    std::vector<AdaptiveScale> scales(dim, AdaptiveScale(1.0, cfg.target_accept));
    Chain chain;
    chain.dim = dim;
    chain.samples.reserve(static_cast<std::size_t>(cfg.keep) * dim);

    std::vector<double> state = std::move(init);
    std::vector<double> proposal = state;
    const int total = cfg.burn_in + cfg.keep;
    for (int sweep = 0; sweep < total; ++sweep) {
        const bool adapting = sweep < cfg.burn_in;
        for (std::size_t d = 0; d < dim; ++d) {
            proposal = state;
            proposal[d] += scales[d].scale() * rng.normal();
            const double lp = logpost(proposal);
            bool accept = false;
            if (std::isfinite(lp)) {
                accept = std::log(rng.uniform()) < lp - current_lp;
            } else if (std::isnan(lp)) {
                throw ChainFailure("run_mcmc: log posterior returned NaN");
            }
            if (accept) {
                state[d] = proposal[d];
                current_lp = lp;
            }
            scales[d].record(accept);
        }
        if (adapting && (sweep + 1) % cfg.adapt_window == 0) {
            for (auto& s : scales) s.adapt();
        }
        if (sweep + 1 == cfg.burn_in) {
            for (auto& s : scales) s.reset_counts();
        }
        if (!adapting) {
            chain.samples.insert(chain.samples.end(), state.begin(), state.end());
        }
    }
    chain.acceptance.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) chain.acceptance[d] = scales[d].acceptance_rate();
    return chain;
}

double split_rhat(const std::vector<double>& draws) {
    const std::size_t n = draws.size() / 2;
    if (n < 2) return 1.0;
    const double* half[2] = {draws.data(), draws.data() + (draws.size() - n)};
    double mean[2] = {0.0, 0.0}, var[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < n; ++i) mean[c] += half[c][i];
        mean[c] /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = half[c][i] - mean[c];
            var[c] += d * d;
        }
        var[c] /= static_cast<double>(n - 1);
    }
    const double w = 0.5 * (var[0] + var[1]);
    const double grand = 0.5 * (mean[0] + mean[1]);
    double b = 0.0;
    for (int c = 0; c < 2; ++c) b += (mean[c] - grand) * (mean[c] - grand);
    b *= static_cast<double>(n);  // m - 1 = 1
    if (w <= 0.0) return 1.0;
    const double nn = static_cast<double>(n);
    const double var_plus = (nn - 1.0) / nn * w + b / nn;
    return std::sqrt(var_plus / w);
}

}  // namespace basket
