#include "ssn/corpus/graph_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssn {

GraphSeries::GraphSeries(std::size_t member_count) : links_(member_count), first_year_(member_count, INT_MAX) {}

GraphSeries GraphSeries::from_static(const SocialGraph& graph, int since) {
    GraphSeries s(graph.member_count());
    for (std::uint32_t m = 0; m < graph.member_count(); ++m) {
        if (graph.contains(MemberId{m})) s.add_member(MemberId{m}, since);
    }
    for (const auto& [a, b] : graph.edges()) s.add_link(a, b, since);
    s.finalize();
    return s;
}

void GraphSeries::add_member(MemberId m, int year) {
    auto& fy = first_year_.at(m.value);
    fy = std::min(fy, year);
    first_ = std::min(first_, year);
    last_ = std::max(last_, year);
    finalized_ = false;
}

void GraphSeries::add_link(MemberId a, MemberId b, int year) {
    if (a == b) return;
    add_member(a, year);
    add_member(b, year);
    links_[a.value].push_back({b, year});
    links_[b.value].push_back({a, year});
}

void GraphSeries::finalize() {
    for (auto& list : links_) {
        std::sort(list.begin(), list.end(), [](const Link& x, const Link& y) {
            return x.other != y.other ? x.other < y.other : x.since < y.since;
        });
        list.erase(std::unique(list.begin(), list.end(),
                               [](const Link& x, const Link& y) { return x.other == y.other; }),
                   list.end());
    }
    finalized_ = true;
}

std::optional<int> GraphSeries::member_since(MemberId m) const {
    const int y = first_year_.at(m.value);
    if (y == INT_MAX) return std::nullopt;
    return y;
}

std::size_t GraphSeries::degree_at(MemberId m, int year) const {
    std::size_t d = 0;
    for_each_neighbor(m, year, [&](MemberId) { ++d; });
    return d;
}

SocialGraph GraphSeries::snapshot(int year) const {
    if (!finalized_) throw std::logic_error("GraphSeries queried before finalize()");
    SocialGraph g(year, links_.size());
    std::size_t endpoints = 0;
    for (std::uint32_t m = 0; m < links_.size(); ++m) {
        if (first_year_[m] > year) continue;
        g.present_[m] = true;
        auto& adj = g.adjacency_[m];
        for (const auto& l : links_[m]) {
            if (l.since <= year) adj.push_back(l.other);
        }
        endpoints += adj.size();
    }
    g.edge_count_ = endpoints / 2;
    return g;
}

GraphSeries build_graph_series(const IndexedCorpus& corpus) {
    GraphSeries s(corpus.members.size());
    for (const auto& ev : corpus.events) {
        for (std::size_t i = 0; i < ev.authors.size(); ++i) {
            s.add_member(ev.authors[i], ev.year);
            for (std::size_t j = i + 1; j < ev.authors.size(); ++j) s.add_link(ev.authors[i], ev.authors[j], ev.year);
        }
    }
    s.finalize();
    return s;
}

std::optional<double> degree_tail_exponent(const SocialGraph& graph, std::size_t k_min) {
    if (k_min < 1) throw std::invalid_argument("k_min must be >= 1");
    std::size_t n = 0;
    double log_sum = 0.0;
    const double shift = static_cast<double>(k_min) - 0.5;
    for (std::uint32_t m = 0; m < graph.member_count(); ++m) {
        const auto k = graph.degree(MemberId{m});
        if (k >= k_min) {
            ++n;
            log_sum += std::log(static_cast<double>(k) / shift);
        }
    }
    if (n < 2 || log_sum <= 0.0) return std::nullopt;
    return 1.0 + static_cast<double>(n) / log_sum;
}

}  // namespace ssn
