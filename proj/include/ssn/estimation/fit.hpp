#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/profiling/deviations.hpp"

namespace ssn {

enum class Hypothesis { HP1, HP2, HP3, HP3Alpha };
std::string_view to_string(Hypothesis h);

// chi^2(x, x_s) = sum (x N + x_s S - d)^2 written in Gram statistics.
double chi_sq(const GramStats& g, double x, double x_s);
// (d chi^2 / dx, d chi^2 / dx_s)
std::pair<double, double> chi_sq_gradient(const GramStats& g, double x, double x_s);

// Values closer to zero than this count as zero when labelling cases.
inline constexpr double kZeroTolerance = 1e-12;
// |det A| below this times ||A||_F^2 makes the system singular.
inline constexpr double kSingularTolerance = 1e-12;

struct FitResult {
    Hypothesis hypothesis = Hypothesis::HP1;
    bool determined = true;
    std::string note;  // why the fit is undetermined, or empty

    // HP1: x_s only (x = 0). HP2: global pair. HP3 / HP3alpha: member means.
    double x = 0.0;
    double x_s = 0.0;
    double raw_x = 0.0;  // before projection
    double raw_x_s = 0.0;
    bool projected = false;  // a feasibility projection changed the raw values

    double chi_sq = 0.0;                // at the reported parameters
    double unconstrained_chi_sq = 0.0;  // at the raw parameters
    std::uint64_t terms = 0;
    int parameters = 0;
    std::int64_t dof = 0;
    double chi_sq_per_dof = 0.0;
    std::size_t members = 0;  // HP3 family: members entering the means
};

enum class RowScope {
    All,            // every block; isolated members contribute through the trend only
    WithNeighbors,  // blocks with at least one neighbor
};

GramStats total_gram(const Deviations& deviations, RowScope scope);

// Trend-only fit. Undetermined when sum (Delta^s)^2 = 0.
FitResult fit_hp1(const Deviations& deviations, RowScope scope = RowScope::All);
FitResult fit_hp1(const GramStats& total);

// Global (x, x_s) over blocks with neighbors, projected onto the feasible
// triangle when needed. Undetermined when the 2x2 system is singular.
FitResult fit_hp2(const Deviations& deviations);
FitResult fit_hp2(const GramStats& total);

// Closest point of {x >= 0, x_s >= 0, x + x_s <= 1} in the chi^2 metric.
std::pair<double, double> project_to_triangle(const GramStats& g, double x, double x_s);

enum class Case { Ia, Ib, Ic, II, III, IVa, IVb, V, VIa, VIb, VIc };
inline constexpr std::size_t kCaseCount = 11;
std::string_view to_string(Case c);

enum class ProjectionMode {
    Refit,           // clamp the negative coordinate, refit the other one
    PaperEmulation,  // clamp and keep the other raw value (clipped to [0, 1])
};

struct CaseLabel {
    Case label = Case::Ia;
    std::optional<double> raw_x;  // absent when det A = 0
    std::optional<double> raw_x_s;  // absent when det A = 0 and sum (Delta^s)^2 = 0
    std::optional<double> x;      // absent when det A = 0
    double x_s = 0.0;
    double det = 0.0;
};

// Classifies one member's 2x2 system and projects it.
CaseLabel classify(const GramStats& g, ProjectionMode mode = ProjectionMode::Refit);

// True iff the label's defining sign and feasibility conditions hold for
// the stored raw and projected values.
bool label_consistent(const CaseLabel& label);

struct AngleDiagnostics {
    // Cosines between d and N (alpha), d and S (beta), N and S (gamma);
    // absent when either vector has zero norm.
    std::optional<double> cos_alpha, cos_beta, cos_gamma;
    // cos alpha < cos beta * cos gamma, when all three are defined.
    std::optional<bool> against_neighbors;
};

AngleDiagnostics angle_diagnostics(const GramStats& g);

struct MemberFit {
    MemberId member;
    GramStats gram;
    CaseLabel label;
    double chi_sq = 0.0;                // at the projected parameters (undetermined x_i counts as 0)
    double unconstrained_chi_sq = 0.0;  // minimum over the plane
    int parameters = 2;
    AngleDiagnostics angles;
};

struct SkippedMember {
    MemberId member;
    std::string reason;
};

struct Hp3Result {
    FitResult aggregate;
    std::vector<MemberFit> members;  // ordered by member id
    std::vector<SkippedMember> skipped;
};

// Per-member fits over each member's blocks with neighbors.
Hp3Result fit_hp3(const Deviations& deviations, ProjectionMode mode = ProjectionMode::Refit, unsigned jobs = 1);

// Negative raw values nulled. Case VI members and members whose nulled
// parameters still violate x_i + x_is <= 1 are left out of means and chi^2.
FitResult fit_hp3_alpha(const Hp3Result& hp3);
FitResult fit_hp3_alpha(const Deviations& deviations, unsigned jobs = 1);

using CaseCensus = std::array<std::uint64_t, kCaseCount>;
CaseCensus case_census(const std::vector<MemberFit>& fits);

}  // namespace ssn
