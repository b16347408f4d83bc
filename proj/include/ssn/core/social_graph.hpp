#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ssn/core/ids.hpp"

namespace ssn {

using Edge = std::pair<MemberId, MemberId>;

// Undirected co-authorship graph at one calendar year.
//
// Member ids are dense over the whole directory; a member that has not yet
// appeared by `year` is simply absent (contains() is false, no neighbors).
// Adjacency lists are sorted and free of self-loops and duplicates.
class SocialGraph {
public:
    SocialGraph() = default;
    SocialGraph(int year, std::size_t member_count);

    // Throws std::invalid_argument on self-loops or out-of-range ids. Duplicate
    // edges (in either orientation) collapse into one.
    static SocialGraph from_edges(int year, std::size_t member_count, std::span<const Edge> edges);

    int year() const { return year_; }
    std::size_t member_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool contains(MemberId m) const { return m.value < present_.size() && present_[m.value]; }
    std::span<const MemberId> neighbors(MemberId m) const { return adjacency_.at(m.value); }
    std::size_t degree(MemberId m) const { return adjacency_.at(m.value).size(); }
    bool has_edge(MemberId a, MemberId b) const;

    // Position of `b` in neighbors(a), or npos.
    std::size_t neighbor_index(MemberId a, MemberId b) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Every edge once, with first < second, in lexicographic order.
    std::vector<Edge> edges() const;

    // Component label per member (absent members get their own label).
    std::vector<std::uint32_t> connected_components(std::uint32_t* component_count = nullptr) const;

    // Used by builders; keeps lists sorted.
    void mark_present(MemberId m);

private:
    int year_ = 0;
    std::vector<std::vector<MemberId>> adjacency_;
    std::vector<bool> present_;
    std::size_t edge_count_ = 0;

    friend class GraphSeries;
};

}  // namespace ssn
