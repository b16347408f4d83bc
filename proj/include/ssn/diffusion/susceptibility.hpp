#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/social_graph.hpp"

namespace ssn {

// Susceptibilities attached to one graph: x_ij per directed neighbor pair,
// stored parallel to graph.neighbors(i), and x_is per member.
class SusceptibilityConfig {
public:
    SusceptibilityConfig() = default;

    static SusceptibilityConfig uniform(const SocialGraph& graph, double x, double x_s);
    // x_ij = x[i] for every neighbor j.
    static SusceptibilityConfig per_member(const SocialGraph& graph, std::span<const double> x,
                                           std::span<const double> x_s);
    // neighbor[i][k] is x_ij for j = graph.neighbors(i)[k].
    static SusceptibilityConfig from_rows(const SocialGraph& graph, std::vector<std::vector<double>> neighbor,
                                          std::vector<double> x_s);

    std::size_t member_count() const { return trend_.size(); }
    std::span<const double> neighbor_row(MemberId i) const { return neighbor_.at(i.value); }
    double trend(MemberId i) const { return trend_.at(i.value); }
    // x_i: mean of x_ij over the neighbors; 0 for an isolated member.
    double neighbor_mean(MemberId i) const { return mean_.at(i.value); }

    // Same values times `factor` (continuous rates to per-step susceptibilities).
    SusceptibilityConfig scaled(double factor) const;

    // First violation of x >= 0 and x_i + x_is <= 1, as a message.
    std::optional<std::string> infeasibility() const;
    // Throws InputError carrying infeasibility().
    void require_feasible() const;
    bool has_trend() const;

private:
    std::vector<std::vector<double>> neighbor_;
    std::vector<double> trend_;
    std::vector<double> mean_;

    void derive_means();
};

// Slack allowed on x_i + x_is <= 1 for accumulated rounding.
inline constexpr double kFeasibilitySlack = 1e-12;

}  // namespace ssn
