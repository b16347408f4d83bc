#include "ssn/core/wig.hpp"

#include <cmath>

namespace ssn {

std::vector<WigViolation> validate_wig(const WeightedInterestGraph& wig) {
    std::vector<WigViolation> out;
    for (const auto& [member, profile] : wig.rows) {
        for (const auto& e : profile.entries()) {
            if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
                out.push_back({WigViolation::Kind::WeightOutOfRange, member, e.topic, e.weight});
            }
        }
        if (profile.is_trivial()) continue;
        const double sum = profile.total();
        if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
            out.push_back({WigViolation::Kind::RowSumNotOne, member, std::nullopt, sum});
        }
    }
    return out;
}

}  // namespace ssn
