#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace stats {

// Upper-tail p-value of Pearson's goodness-of-fit statistic against equal cells.
inline double uniformity_p_value(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi2 = 0;
    for (auto c : counts) chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

// Two-sample homogeneity test on histograms keyed by value; sparse cells are pooled.
inline double homogeneity_p_value(const std::map<std::size_t, std::uint64_t>& a,
                                  const std::map<std::size_t, std::uint64_t>& b) {
    std::map<std::size_t, std::pair<double, double>> cells;
    double na = 0, nb = 0;
    for (auto [k, c] : a) cells[k].first += static_cast<double>(c), na += static_cast<double>(c);
    for (auto [k, c] : b) cells[k].second += static_cast<double>(c), nb += static_cast<double>(c);
    std::vector<std::pair<double, double>> pooled;
    std::pair<double, double> pending{0, 0};
    for (auto& [k, v] : cells) {
        pending.first += v.first;
        pending.second += v.second;
        if (pending.first + pending.second >= 20) {
            pooled.push_back(pending);
            pending = {0, 0};
        }
    }
    if (!pooled.empty()) {
        pooled.back().first += pending.first;
        pooled.back().second += pending.second;
    }
    if (pooled.size() < 2) return 1.0;
    double chi2 = 0;
    for (auto [ca, cb] : pooled) {
        const double row = ca + cb;
        const double ea = row * na / (na + nb), eb = row * nb / (na + nb);
        chi2 += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    const boost::math::chi_squared dist(static_cast<double>(pooled.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace stats
