#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "json.hpp"

#include "ssn/estimation/fit.hpp"

namespace ssn {

std::optional<Case> parse_case(std::string_view name);
std::optional<Hypothesis> parse_hypothesis(std::string_view name);

// Non-finite numbers are written as null and read back as NaN.
nlohmann::json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& j);

nlohmann::json gram_to_json(const GramStats& g);
GramStats gram_from_json(const nlohmann::json& j);

// One member per line. Angle diagnostics are not stored; they follow from the
// Gram statistics.
void write_member_fits(std::ostream& out, const Hp3Result& hp3);
// Fills members and skipped; the aggregate is left default.
Hp3Result read_member_fits(std::istream& in);

struct FitBundle {
    FitResult hp1, hp2, hp3, hp3_alpha;
    ProjectionMode mode = ProjectionMode::Refit;
    std::array<const FitResult*, 4> table() const { return {&hp1, &hp2, &hp3, &hp3_alpha}; }
};

nlohmann::json bundle_to_json(const FitBundle& b);
FitBundle bundle_from_json(const nlohmann::json& j);

}  // namespace ssn
