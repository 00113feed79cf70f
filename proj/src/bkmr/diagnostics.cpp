#include "seedsweep/bkmr/diagnostics.hpp"

#include <cmath>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/stats.hpp"

namespace seedsweep::bkmr {

double gelman_rubin(std::span<const std::vector<double>> chains) {
    if (chains.size() < 2) throw_usage("E_USAGE_CHAINS", "Gelman-Rubin needs at least two chains");
    const std::size_t len = chains.front().size();
    if (len < 2) throw_usage("E_USAGE_CHAINS", "Gelman-Rubin needs chains of length at least two");
    for (const auto& c : chains) {
        if (c.size() != len) throw_usage("E_USAGE_CHAINS", "Gelman-Rubin needs chains of equal length");
    }
    const double n = static_cast<double>(len);

    std::vector<double> means;
    double w = 0.0;
    for (const auto& c : chains) {
        means.push_back(mean(c));
        w += sample_variance(c);
    }
    w /= static_cast<double>(chains.size());
    const double b = n * sample_variance(means);

    if (w == 0.0) {
        if (b == 0.0) return 1.0;
        throw_model("E_MODEL_DEGENERATE_CHAINS", "degenerate chains");
    }
    return std::sqrt(((n - 1.0) / n * w + b / n) / w);
}

double batch_means_se(std::span<const double> draws) {
    const std::size_t n = draws.size();
    if (n < 4) throw_usage("E_USAGE_MCSE", "batch means need at least four draws");
    const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const std::size_t size = n / batches;
    std::vector<double> batch_means;
    for (std::size_t k = 0; k < batches; ++k) batch_means.push_back(mean(draws.subspan(k * size, size)));
    // variance of a batch mean, scaled to the full run
    const double var = sample_variance(batch_means) * static_cast<double>(size);
    return std::sqrt(var / static_cast<double>(batches * size));
}

}  // namespace seedsweep::bkmr
