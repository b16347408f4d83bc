#include "ssn/diffusion/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssn/util/errors.hpp"
#include "ssn/util/parallel.hpp"

namespace ssn {

namespace {

MemberId mid(std::size_t i) { return MemberId{static_cast<std::uint32_t>(i)}; }

void check_shapes(const SimulationState& state, const SusceptibilityConfig& config, const SocialGraph& graph) {
    const std::size_t n = state.profiles.members();
    if (graph.member_count() != n) throw DimensionMismatch(n, graph.member_count());
    if (config.member_count() != n) throw DimensionMismatch(n, config.member_count());
    if (state.source.size() != state.profiles.topics())
        throw DimensionMismatch(state.profiles.topics(), state.source.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (config.neighbor_row(mid(i)).size() != graph.degree(mid(i)))
            throw DimensionMismatch(graph.degree(mid(i)), config.neighbor_row(mid(i)).size());
    }
}

void require_trend_free(const SusceptibilityConfig& config) {
    if (config.has_trend()) throw InputError("trend susceptibility x_is must be 0 for a conserved average");
}

// Incoming weights x_ji / N_j aligned with graph.neighbors(i).
std::vector<std::vector<double>> incoming_weights(const SusceptibilityConfig& config, const SocialGraph& graph) {
    const std::size_t n = graph.member_count();
    std::vector<std::vector<double>> in(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = graph.neighbors(mid(i));
        in[i].resize(nb.size());
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const MemberId j = nb[k];
            const std::size_t back = graph.neighbor_index(j, mid(i));
            in[i][k] = config.neighbor_row(j)[back] / static_cast<double>(graph.degree(j));
        }
    }
    return in;
}

double max_deviation(const SimulationState& s, const std::vector<std::vector<double>>& target,
                     const std::vector<std::uint32_t>& component) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.profiles.members(); ++i) {
        const auto row = s.profiles.row(i);
        const auto& t = target[component[i]];
        for (std::size_t k = 0; k < row.size(); ++k) worst = std::max(worst, std::abs(row[k] - t[k]));
    }
    return worst;
}

}  // namespace

WeightedInterestGraph SimulationState::to_wig(int year) const {
    WeightedInterestGraph w;
    w.year = year;
    for (std::size_t i = 0; i < profiles.members(); ++i) w.rows.emplace(mid(i), InterestProfile::from_dense(profiles.row(i)));
    return w;
}

SimulationState make_state(std::span<const InterestProfile> profiles, const InterestProfile& source) {
    SimulationState s;
    const std::size_t k = source.dimension();
    s.profiles = LikelihoodMatrix(profiles.size(), k);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (profiles[i].dimension() != k) throw DimensionMismatch(k, profiles[i].dimension());
        profiles[i].accumulate_into(s.profiles.row(i));
    }
    s.source = source.dense();
    return s;
}

SimulationState step(const SimulationState& state, const SusceptibilityConfig& config, const SocialGraph& graph,
                     unsigned jobs) {
    check_shapes(state, config, graph);
    config.require_feasible();
    SimulationState next;
    next.profiles = LikelihoodMatrix(state.profiles.members(), state.profiles.topics());
    next.source = state.source;
    next.step = state.step + 1;
    const std::size_t kdim = state.profiles.topics();
    parallel_for(state.profiles.members(), jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const MemberId m = mid(i);
            const double xs = config.trend(m);
            const double self = 1.0 - config.neighbor_mean(m) - xs;
            const auto cur = state.profiles.row(i);
            auto out = next.profiles.row(i);
            for (std::size_t k = 0; k < kdim; ++k) out[k] = self * cur[k];
            const auto nb = graph.neighbors(m);
            const auto x = config.neighbor_row(m);
            const double inv = nb.empty() ? 0.0 : 1.0 / static_cast<double>(nb.size());
            for (std::size_t q = 0; q < nb.size(); ++q) {
                const double w = x[q] * inv;
                if (w == 0.0) continue;
                const auto other = state.profiles.row(nb[q].value);
                for (std::size_t k = 0; k < kdim; ++k) out[k] += w * other[k];
            }
            if (xs != 0.0) {
                for (std::size_t k = 0; k < kdim; ++k) out[k] += xs * state.source[k];
            }
        }
    });
    return next;
}

SimulationState integrate_continuous(const SimulationState& state, const SusceptibilityConfig& rates,
                                     const SocialGraph& graph, double duration, double dt, unsigned jobs) {
    if (!(dt > 0.0) || !(duration >= 0.0)) throw InputError("integration needs dt > 0 and duration >= 0");
    const double steps_real = duration / dt;
    const long steps = std::lround(steps_real);
    if (std::abs(static_cast<double>(steps) - steps_real) > 1e-9 * std::max(1.0, steps_real))
        throw InputError("duration is not a whole number of dt steps");
    const SusceptibilityConfig x = rates.scaled(dt);
    if (auto why = x.infeasibility()) throw InputError("dt too large for the given rates: " + *why);
    SimulationState s = state;
    for (long n = 0; n < steps; ++n) s = step(s, x, graph, jobs);
    return s;
}

EquilibriumWeights solve_equilibrium(const SusceptibilityConfig& config, const SocialGraph& graph,
                                     const EquilibriumOptions& options) {
    const std::size_t n = graph.member_count();
    if (config.member_count() != n) throw DimensionMismatch(n, config.member_count());
    EquilibriumWeights w;
    w.component = graph.connected_components(&w.component_count);
    const auto in = incoming_weights(config, graph);

    auto normalize = [&](std::vector<double>& b) {
        std::vector<double> sum(w.component_count, 0.0);
        for (std::size_t i = 0; i < n; ++i) sum[w.component[i]] += b[i];
        for (std::size_t i = 0; i < n; ++i) b[i] /= sum[w.component[i]];
    };

    // Exact for uniform susceptibilities.
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<double>(std::max<std::size_t>(graph.degree(mid(i)), 1));
    normalize(b);

    std::vector<double> bm(n);
    for (long it = 0;; ++it) {
        double scale = 0.0;
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = b[i] * (1.0 - config.neighbor_mean(mid(i)));
            const auto nb = graph.neighbors(mid(i));
            for (std::size_t k = 0; k < nb.size(); ++k) v += b[nb[k].value] * in[i][k];
            bm[i] = v;
            scale = std::max(scale, b[i]);
            residual = std::max(residual, std::abs(v - b[i]));
        }
        residual = scale > 0.0 ? residual / scale : 0.0;
        w.iterations = it;
        w.residual = residual;
        if (residual < options.tolerance) break;
        if (it >= options.max_iterations) {
            std::ostringstream msg;
            msg << "equilibrium weights did not converge after " << it << " iterations (residual " << residual << ")";
            throw NumericalError(msg.str());
        }
        for (std::size_t i = 0; i < n; ++i) b[i] = 0.5 * (b[i] + bm[i]);
        normalize(b);
    }
    w.b = std::move(b);
    return w;
}

std::vector<std::vector<double>> conserved_average(const SimulationState& state, const SusceptibilityConfig& config,
                                                   const EquilibriumWeights& weights) {
    require_trend_free(config);
    const std::size_t n = state.profiles.members();
    if (weights.b.size() != n) throw DimensionMismatch(n, weights.b.size());
    std::vector<std::vector<double>> avg(weights.component_count, std::vector<double>(state.profiles.topics(), 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = avg[weights.component[i]];
        const auto row = state.profiles.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) a[k] += weights.b[i] * row[k];
    }
    return avg;
}

double authority(MemberId member, const SusceptibilityConfig& config, const SocialGraph& graph) {
    double a = 0.0;
    for (MemberId j : graph.neighbors(member)) a += config.neighbor_row(j)[graph.neighbor_index(j, member)];
    return a;
}

std::vector<double> authorities(const SusceptibilityConfig& config, const SocialGraph& graph) {
    std::vector<double> a(graph.member_count());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = authority(mid(i), config, graph);
    return a;
}

ConsensusResult relax_to_consensus(const SimulationState& state, const SusceptibilityConfig& config,
                                   const SocialGraph& graph, double tol, long max_steps, unsigned jobs) {
    require_trend_free(config);
    check_shapes(state, config, graph);
    EquilibriumOptions opt;
    opt.tolerance = std::min(1e-10, tol * 1e-3);
    const auto weights = solve_equilibrium(config, graph, opt);
    ConsensusResult r;
    r.consensus = conserved_average(state, config, weights);
    r.state = state;
    double dev = max_deviation(r.state, r.consensus, weights.component);
    while (dev >= tol) {
        if (r.steps >= max_steps) {
            std::ostringstream msg;
            msg << "no consensus after " << r.steps << " steps (max deviation " << dev << ")";
            throw NumericalError(msg.str());
        }
        r.state = step(r.state, config, graph, jobs);
        ++r.steps;
        dev = max_deviation(r.state, r.consensus, weights.component);
    }
    return r;
}

}  // namespace ssn
