#pragma once

#include <climits>
#include <optional>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/social_graph.hpp"
#include "ssn/corpus/indexed_corpus.hpp"

namespace ssn {

// Cumulative co-authorship graph over time, stored once: every link and every
// member carries the first year it exists. Links are never removed, so the
// snapshot at year t is a subgraph of the snapshot at t + 1.
class GraphSeries {
public:
    struct Link {
        MemberId other;
        int since = 0;
    };

    GraphSeries() = default;
    explicit GraphSeries(std::size_t member_count);

    // Same topology at every year from `since` on.
    static GraphSeries from_static(const SocialGraph& graph, int since);

    void add_member(MemberId m, int year);
    // Adds both members too. Self links are ignored.
    void add_link(MemberId a, MemberId b, int year);
    // Sorts link lists and keeps the earliest year per pair. Must be called
    // before any query.
    void finalize();

    std::size_t member_count() const { return first_year_.size(); }
    std::optional<int> member_since(MemberId m) const;
    int first_year() const { return first_; }
    int last_year() const { return last_; }

    // All links of m, sorted by neighbor id, regardless of year.
    const std::vector<Link>& links(MemberId m) const { return links_.at(m.value); }

    template <typename F>
    void for_each_neighbor(MemberId m, int year, F&& visit) const {
        for (const auto& l : links_[m.value]) {
            if (l.since <= year) visit(l.other);
        }
    }
    std::size_t degree_at(MemberId m, int year) const;

    SocialGraph snapshot(int year) const;

private:
    std::vector<std::vector<Link>> links_;
    std::vector<int> first_year_;
    int first_ = INT_MAX;
    int last_ = INT_MIN;
    bool finalized_ = false;
};

// A link {a, b} exists from the first year a and b co-author an event.
// Single-author events only add the member.
GraphSeries build_graph_series(const IndexedCorpus& corpus);

// Discrete maximum-likelihood estimate of a power-law tail exponent over the
// degrees >= k_min: 1 + n / sum(ln(k / (k_min - 1/2))). nullopt with fewer
// than two qualifying nodes.
std::optional<double> degree_tail_exponent(const SocialGraph& graph, std::size_t k_min);

}  // namespace ssn
