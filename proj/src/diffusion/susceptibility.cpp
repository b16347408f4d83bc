#include "ssn/diffusion/susceptibility.hpp"

#include <cmath>
#include <sstream>

#include "ssn/util/errors.hpp"

namespace ssn {

namespace {

void check_trend_size(const SocialGraph& graph, std::size_t n) {
    if (n != graph.member_count()) throw DimensionMismatch(graph.member_count(), n);
}

}  // namespace

SusceptibilityConfig SusceptibilityConfig::uniform(const SocialGraph& graph, double x, double x_s) {
    SusceptibilityConfig c;
    const std::size_t n = graph.member_count();
    c.neighbor_.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.neighbor_[i].assign(graph.degree(MemberId{static_cast<std::uint32_t>(i)}), x);
    c.trend_.assign(n, x_s);
    c.derive_means();
    return c;
}

SusceptibilityConfig SusceptibilityConfig::per_member(const SocialGraph& graph, std::span<const double> x,
                                                      std::span<const double> x_s) {
    check_trend_size(graph, x.size());
    check_trend_size(graph, x_s.size());
    SusceptibilityConfig c;
    const std::size_t n = graph.member_count();
    c.neighbor_.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.neighbor_[i].assign(graph.degree(MemberId{static_cast<std::uint32_t>(i)}), x[i]);
    c.trend_.assign(x_s.begin(), x_s.end());
    c.derive_means();
    return c;
}

SusceptibilityConfig SusceptibilityConfig::from_rows(const SocialGraph& graph,
                                                     std::vector<std::vector<double>> neighbor,
                                                     std::vector<double> x_s) {
    check_trend_size(graph, neighbor.size());
    check_trend_size(graph, x_s.size());
    for (std::size_t i = 0; i < neighbor.size(); ++i) {
        const std::size_t deg = graph.degree(MemberId{static_cast<std::uint32_t>(i)});
        if (neighbor[i].size() != deg) throw DimensionMismatch(deg, neighbor[i].size());
    }
    SusceptibilityConfig c;
    c.neighbor_ = std::move(neighbor);
    c.trend_ = std::move(x_s);
    c.derive_means();
    return c;
}

void SusceptibilityConfig::derive_means() {
    mean_.assign(neighbor_.size(), 0.0);
    for (std::size_t i = 0; i < neighbor_.size(); ++i) {
        const auto& row = neighbor_[i];
        if (row.empty()) continue;
        double s = 0.0;
        for (double v : row) s += v;
        mean_[i] = s / static_cast<double>(row.size());
    }
}

SusceptibilityConfig SusceptibilityConfig::scaled(double factor) const {
    SusceptibilityConfig c = *this;
    for (auto& row : c.neighbor_) {
        for (double& v : row) v *= factor;
    }
    for (double& v : c.trend_) v *= factor;
    c.derive_means();
    return c;
}

std::optional<std::string> SusceptibilityConfig::infeasibility() const {
    for (std::size_t i = 0; i < trend_.size(); ++i) {
        std::ostringstream msg;
        msg.precision(17);
        for (double v : neighbor_[i]) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                msg << "member " << i << ": neighbor susceptibility " << v << " is negative or not finite";
                return msg.str();
            }
        }
        if (!(trend_[i] >= 0.0) || !std::isfinite(trend_[i])) {
            msg << "member " << i << ": trend susceptibility " << trend_[i] << " is negative or not finite";
            return msg.str();
        }
        if (mean_[i] + trend_[i] > 1.0 + kFeasibilitySlack) {
            msg << "member " << i << ": x_i + x_is = " << mean_[i] + trend_[i] << " exceeds 1";
            return msg.str();
        }
    }
    return std::nullopt;
}

void SusceptibilityConfig::require_feasible() const {
    if (auto why = infeasibility()) throw InputError("infeasible susceptibilities: " + *why);
}

bool SusceptibilityConfig::has_trend() const {
    for (double v : trend_) {
        if (v != 0.0) return true;
    }
    return false;
}

}  // namespace ssn
