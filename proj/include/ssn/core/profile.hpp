#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssn/core/ids.hpp"

namespace ssn {

struct ProfileEntry {
    TopicId topic;
    double weight = 0.0;

    bool operator==(const ProfileEntry&) const = default;
};

// A member's likelihood vector over the topic set, stored sparse.
//
// Entries are kept sorted by topic with exact zeros dropped, so two profiles
// compare equal iff they hold the same values. The all-zero profile is legal
// and means "nothing indexed yet" (see is_trivial()).
class InterestProfile {
public:
    InterestProfile() = default;
    explicit InterestProfile(std::size_t dimension) : dimension_(dimension) {}

    // Duplicate topics are summed. Throws std::out_of_range on a topic >= dimension.
    static InterestProfile from_entries(std::size_t dimension, std::vector<ProfileEntry> entries);
    static InterestProfile from_dense(std::span<const double> weights);

    std::size_t dimension() const { return dimension_; }
    std::span<const ProfileEntry> entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }

    double weight(TopicId topic) const;
    double total() const;
    bool is_trivial() const { return entries_.empty(); }

    std::vector<double> dense() const;
    // dense[k] += scale * weight(k)
    void accumulate_into(std::span<double> dense, double scale = 1.0) const;

    // Shares of interest: each weight divided by the total. The trivial profile maps to itself.
    InterestProfile normalized() const;

    bool operator==(const InterestProfile&) const = default;

private:
    std::size_t dimension_ = 0;
    std::vector<ProfileEntry> entries_;
};

// Sum_k a_k * b_k. Throws DimensionMismatch when the topic sets differ.
double profile_dot(const InterestProfile& a, const InterestProfile& b);

// Sum_k (a_k - b_k)^2. Throws DimensionMismatch when the topic sets differ.
double profile_distance_sq(const InterestProfile& a, const InterestProfile& b);

}  // namespace ssn
