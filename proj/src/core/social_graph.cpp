#include "ssn/core/social_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ssn {

SocialGraph::SocialGraph(int year, std::size_t member_count)
    : year_(year), adjacency_(member_count), present_(member_count, false) {}

SocialGraph SocialGraph::from_edges(int year, std::size_t member_count, std::span<const Edge> edges) {
    SocialGraph g(year, member_count);
    std::fill(g.present_.begin(), g.present_.end(), true);
    for (const auto& [a, b] : edges) {
        if (a.value >= member_count || b.value >= member_count) {
            throw std::invalid_argument("edge endpoint outside member range");
        }
        if (a == b) throw std::invalid_argument("self-loop on member " + std::to_string(a.value));
        g.adjacency_[a.value].push_back(b);
        g.adjacency_[b.value].push_back(a);
    }
    std::size_t endpoints = 0;
    for (auto& list : g.adjacency_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        endpoints += list.size();
    }
    g.edge_count_ = endpoints / 2;
    return g;
}

bool SocialGraph::has_edge(MemberId a, MemberId b) const { return neighbor_index(a, b) != npos; }

std::size_t SocialGraph::neighbor_index(MemberId a, MemberId b) const {
    const auto& list = adjacency_.at(a.value);
    auto it = std::lower_bound(list.begin(), list.end(), b);
    if (it == list.end() || *it != b) return npos;
    return static_cast<std::size_t>(it - list.begin());
}

std::vector<Edge> SocialGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::uint32_t a = 0; a < adjacency_.size(); ++a) {
        for (MemberId b : adjacency_[a]) {
            if (a < b.value) out.emplace_back(MemberId{a}, b);
        }
    }
    return out;
}

std::vector<std::uint32_t> SocialGraph::connected_components(std::uint32_t* component_count) const {
    constexpr auto unset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> label(adjacency_.size(), unset);
    std::vector<std::uint32_t> stack;
    std::uint32_t next = 0;
    for (std::uint32_t root = 0; root < adjacency_.size(); ++root) {
        if (label[root] != unset) continue;
        label[root] = next;
        stack.push_back(root);
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (MemberId w : adjacency_[v]) {
                if (label[w.value] == unset) {
                    label[w.value] = next;
                    stack.push_back(w.value);
                }
            }
        }
        ++next;
    }
    if (component_count) *component_count = next;
    return label;
}

void SocialGraph::mark_present(MemberId m) { present_.at(m.value) = true; }

}  // namespace ssn
