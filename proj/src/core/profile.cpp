#include "ssn/core/profile.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ssn/util/errors.hpp"

namespace ssn {

InterestProfile InterestProfile::from_entries(std::size_t dimension, std::vector<ProfileEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const ProfileEntry& a, const ProfileEntry& b) { return a.topic < b.topic; });
    InterestProfile p(dimension);
    p.entries_.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.topic.value >= dimension) {
            throw std::out_of_range("topic " + std::to_string(e.topic.value) + " outside dimension " +
                                    std::to_string(dimension));
        }
        if (!p.entries_.empty() && p.entries_.back().topic == e.topic) {
            p.entries_.back().weight += e.weight;
        } else {
            p.entries_.push_back(e);
        }
    }
    std::erase_if(p.entries_, [](const ProfileEntry& e) { return e.weight == 0.0; });
    return p;
}

InterestProfile InterestProfile::from_dense(std::span<const double> weights) {
    InterestProfile p(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] != 0.0) {
            p.entries_.push_back({TopicId{static_cast<std::uint32_t>(k)}, weights[k]});
        }
    }
    return p;
}

double InterestProfile::weight(TopicId topic) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), topic,
                               [](const ProfileEntry& e, TopicId t) { return e.topic < t; });
    return (it != entries_.end() && it->topic == topic) ? it->weight : 0.0;
}

double InterestProfile::total() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += e.weight;
    return sum;
}

std::vector<double> InterestProfile::dense() const {
    std::vector<double> out(dimension_, 0.0);
    accumulate_into(out);
    return out;
}

void InterestProfile::accumulate_into(std::span<double> dense, double scale) const {
    if (dense.size() != dimension_) throw DimensionMismatch(dimension_, dense.size());
    for (const auto& e : entries_) dense[e.topic.value] += scale * e.weight;
}

InterestProfile InterestProfile::normalized() const {
    InterestProfile p(dimension_);
    const double sum = total();
    if (sum == 0.0) return p;
    p.entries_ = entries_;
    for (auto& e : p.entries_) e.weight /= sum;
    return p;
}

namespace {

// Walks the union of both supports in topic order.
template <typename F>
void merge_walk(const InterestProfile& a, const InterestProfile& b, F&& visit) {
    if (a.dimension() != b.dimension()) throw DimensionMismatch(a.dimension(), b.dimension());
    auto ea = a.entries();
    auto eb = b.entries();
    std::size_t i = 0, j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].topic < eb[j].topic)) {
            visit(ea[i].weight, 0.0);
            ++i;
        } else if (i == ea.size() || eb[j].topic < ea[i].topic) {
            visit(0.0, eb[j].weight);
            ++j;
        } else {
            visit(ea[i].weight, eb[j].weight);
            ++i;
            ++j;
        }
    }
}

}  // namespace

double profile_dot(const InterestProfile& a, const InterestProfile& b) {
    double sum = 0.0;
    merge_walk(a, b, [&](double x, double y) { sum += x * y; });
    return sum;
}

double profile_distance_sq(const InterestProfile& a, const InterestProfile& b) {
    double sum = 0.0;
    merge_walk(a, b, [&](double x, double y) { sum += (x - y) * (x - y); });
    return sum;
}

}  // namespace ssn
