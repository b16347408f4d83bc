#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/profile.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/indexed_corpus.hpp"

namespace ssn {

using TopicCounts = std::vector<std::pair<TopicId, std::uint64_t>>;

// A member's profile from `year` until the next snapshot.
struct ProfileSnapshot {
    int year = 0;
    InterestProfile shares;  // xi_{h_i}(., year), sums to 1
    TopicCounts counts;      // nu_{h_i}(., year); empty for synthetic exact trajectories
};

// Per-member semantic profiles over time, stored as change points: a snapshot
// is recorded only in years where the member's counts changed. Between
// snapshots the profile is constant; before the first one it is trivial.
class ProfileSeries {
public:
    ProfileSeries() = default;
    ProfileSeries(std::size_t member_count, std::size_t topic_count);

    std::size_t member_count() const { return timelines_.size(); }
    std::size_t topic_count() const { return topic_count_; }

    // Years must increase strictly per member. Throws std::invalid_argument
    // otherwise, or when `shares` has the wrong dimension.
    void append(MemberId m, int year, InterestProfile shares, TopicCounts counts = {});

    std::span<const ProfileSnapshot> snapshots(MemberId m) const { return timelines_.at(m.value); }
    // Latest snapshot with snapshot.year <= year, or nullptr.
    const ProfileSnapshot* snapshot_at(MemberId m, int year) const;
    // Trivial (all-zero) profile when nothing is recorded by `year`.
    const InterestProfile& shares_at(MemberId m, int year) const;

    bool semantically_treatable(MemberId m) const { return treatable_.at(m.value); }
    void set_semantically_treatable(MemberId m, bool value) { treatable_.at(m.value) = value; }

private:
    std::size_t topic_count_ = 0;
    std::vector<std::vector<ProfileSnapshot>> timelines_;
    std::vector<bool> treatable_;
    InterestProfile trivial_;
};

struct TreatabilityRecord {
    MemberId member;
    bool treatable = false;              // publications in >= 2 distinct years
    bool semantically_treatable = false;  // indexed publications in >= 2 distinct years
    std::vector<int> active_years;       // sorted, distinct
    std::vector<int> indexed_years;      // sorted, distinct
    std::uint64_t publications = 0;
};

std::vector<TreatabilityRecord> treatability(const IndexedCorpus& corpus);

// xi_{h_i}(c_k, t) = nu_{h_i}(c_k, t) / sum_k nu_{h_i}(c_k, t), counting every
// indexed event with year <= t. Marks semantic treatability per member.
ProfileSeries build_profiles(const IndexedCorpus& corpus);

// Mean of the neighbors' shares at `year`, trivial neighbors included (they
// pull the mean toward zero). nullopt when the member has no neighbor.
std::optional<InterestProfile> neighbor_average(MemberId member, int year, const GraphSeries& graph,
                                                const ProfileSeries& profiles);

// Element-wise mean of `rows` computed incrementally over the union support,
// so identical rows average to themselves exactly. `scratch` must be zeroed
// and of size `dimension`; it is left zeroed.
InterestProfile running_mean(std::span<const InterestProfile* const> rows, std::span<double> scratch,
                             std::vector<std::uint32_t>& support, std::size_t dimension);

}  // namespace ssn
