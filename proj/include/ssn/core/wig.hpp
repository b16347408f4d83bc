#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/profile.hpp"

namespace ssn {

// Weighted interest graph: member -> topic weights at one year.
struct WeightedInterestGraph {
    int year = 0;
    std::map<MemberId, InterestProfile> rows;
};

struct WigViolation {
    enum class Kind { WeightOutOfRange, RowSumNotOne };

    Kind kind;
    MemberId member;
    std::optional<TopicId> topic;  // set for WeightOutOfRange
    double value = 0.0;            // offending weight or row sum
};

inline constexpr double kRowSumTolerance = 1e-9;

// Empty iff every weight is in [0, 1] and every non-trivial row sums to 1.
std::vector<WigViolation> validate_wig(const WeightedInterestGraph& wig);

}  // namespace ssn
