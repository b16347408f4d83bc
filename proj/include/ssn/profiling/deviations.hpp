#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/profile.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/profiling/profile_series.hpp"

namespace ssn {

// Scalar products of one member-year block (or a sum of blocks) over topics:
// d = profile change, N = neighbor deviation, S = trend deviation.
struct GramStats {
    double nn = 0.0;  // <N, N>
    double ns = 0.0;  // <N, S>
    double ss = 0.0;  // <S, S>
    double dn = 0.0;  // <d, N>
    double ds = 0.0;  // <d, S>
    double dd = 0.0;  // <d, d>
    std::uint64_t terms = 0;  // residual terms (topics) contributing

    GramStats& operator+=(const GramStats& o);
    friend GramStats operator+(GramStats a, const GramStats& b) { return a += b; }
    GramStats scaled(double factor) const;  // every product times factor^2
    bool operator==(const GramStats&) const = default;
};

struct DeviationEntry {
    TopicId topic;
    double profile_change = 0.0;   // xi(t+1) - xi(t)
    double from_neighbors = 0.0;   // L^N(t) - xi(t); 0 when the member is isolated
    double from_source = 0.0;      // xi_s(t) - xi(t)
};

// All deviations of one member across one consecutive-year pair t -> t+1.
struct DeviationBlock {
    MemberId member;
    int year = 0;  // t
    bool has_neighbors = false;
    std::uint32_t neighbor_count = 0;
    GramStats gram;
    std::vector<DeviationEntry> entries;  // sorted by topic; empty unless materialized
};

struct DeviationOptions {
    // Keep per-topic entries. Without it only the Gram statistics are stored,
    // computed in time proportional to the member's and neighbors' support.
    bool materialize = true;
    // Restrict the trend part of the support to the K heaviest trend topics
    // (ties broken by topic id). Default: every topic with xi_s > 0.
    std::optional<std::size_t> trend_top_k;
    unsigned jobs = 1;
};

struct Deviations {
    std::size_t topic_count = 0;
    std::vector<DeviationBlock> blocks;  // ordered by (member, year)
};

// A semantically treatable member yields one block per year t in
// [first snapshot, last snapshot - 1] for which the trend source is defined.
// The topic support is the union of the member's profiles at t and t+1, the
// neighbor mean at t and the trend source at t.
Deviations compute_deviations(const ProfileSeries& profiles, const std::map<int, InterestProfile>& source,
                              const GraphSeries& graph, const DeviationOptions& options = {});

// Gram statistics recomputed from materialized entries.
GramStats gram_from_entries(std::span<const DeviationEntry> entries);

}  // namespace ssn
