#include "ssn/estimation/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssn/diffusion/susceptibility.hpp"
#include "ssn/util/parallel.hpp"

namespace ssn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double snap(double v) { return std::abs(v) <= kZeroTolerance ? 0.0 : v; }

struct Solve2 {
    double det = 0.0;
    bool singular = true;
    double x = 0.0, x_s = 0.0;
};

Solve2 solve2(const GramStats& g) {
    Solve2 s;
    s.det = g.nn * g.ss - g.ns * g.ns;
    const double fro2 = g.nn * g.nn + 2.0 * g.ns * g.ns + g.ss * g.ss;
    s.singular = !(fro2 > 0.0) || std::abs(s.det) < kSingularTolerance * fro2;
    if (!s.singular) {
        s.x = (g.dn * g.ss - g.ds * g.ns) / s.det;
        s.x_s = (g.nn * g.ds - g.ns * g.dn) / s.det;
    }
    return s;
}

std::optional<double> trend_only(const GramStats& g) {
    if (!(g.ss > 0.0)) return std::nullopt;
    return g.ds / g.ss;
}

std::optional<double> neighbor_only(const GramStats& g) {
    if (!(g.nn > 0.0)) return std::nullopt;
    return g.dn / g.nn;
}

// Minimum of chi^2 over the whole plane, also when A is (nearly) singular.
double plane_minimum(const GramStats& g) {
    double best = g.dd;
    const double det = g.nn * g.ss - g.ns * g.ns;
    if (det != 0.0) {
        const double x = (g.dn * g.ss - g.ds * g.ns) / det;
        const double xs = (g.nn * g.ds - g.ns * g.dn) / det;
        if (std::isfinite(x) && std::isfinite(xs)) best = std::min(best, chi_sq(g, x, xs));
    }
    if (auto xs = trend_only(g)) best = std::min(best, chi_sq(g, 0.0, *xs));
    if (auto x = neighbor_only(g)) best = std::min(best, chi_sq(g, *x, 0.0));
    return std::max(best, 0.0);
}

void finish(FitResult& r) {
    r.dof = static_cast<std::int64_t>(r.terms) - r.parameters;
    r.chi_sq_per_dof = r.dof > 0 ? r.chi_sq / static_cast<double>(r.dof) : kNaN;
}

bool feasible(double x, double xs) {
    return x >= 0.0 && xs >= 0.0 && x <= 1.0 && xs <= 1.0 && x + xs <= 1.0 + kFeasibilitySlack;
}

}  // namespace

std::string_view to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::HP1: return "HP1";
        case Hypothesis::HP2: return "HP2";
        case Hypothesis::HP3: return "HP3";
        case Hypothesis::HP3Alpha: return "HP3alpha";
    }
    return "?";
}

std::string_view to_string(Case c) {
    static constexpr std::array<std::string_view, kCaseCount> names{"Ia",  "Ib", "Ic", "II",  "III", "IVa",
                                                                      "IVb", "V",  "VIa", "VIb", "VIc"};
    return names[static_cast<std::size_t>(c)];
}

double chi_sq(const GramStats& g, double x, double x_s) {
    const double v = x * x * g.nn + 2.0 * x * x_s * g.ns + x_s * x_s * g.ss - 2.0 * x * g.dn - 2.0 * x_s * g.ds + g.dd;
    return std::max(v, 0.0);
}

std::pair<double, double> chi_sq_gradient(const GramStats& g, double x, double x_s) {
    return {2.0 * (x * g.nn + x_s * g.ns - g.dn), 2.0 * (x * g.ns + x_s * g.ss - g.ds)};
}

GramStats total_gram(const Deviations& deviations, RowScope scope) {
    std::vector<const GramStats*> rows;
    rows.reserve(deviations.blocks.size());
    for (const auto& b : deviations.blocks) {
        if (scope == RowScope::All || b.has_neighbors) rows.push_back(&b.gram);
    }
    return pairwise_reduce<GramStats>(0, rows.size(), [&](std::size_t i) { return *rows[i]; });
}

FitResult fit_hp1(const Deviations& deviations, RowScope scope) { return fit_hp1(total_gram(deviations, scope)); }

FitResult fit_hp1(const GramStats& g) {
    FitResult r;
    r.hypothesis = Hypothesis::HP1;
    r.terms = g.terms;
    r.parameters = 1;
    const auto xs = trend_only(g);
    if (!xs) {
        r.determined = false;
        r.note = "sum of squared trend deviations is zero";
        r.x_s = r.raw_x_s = kNaN;
        r.chi_sq = r.unconstrained_chi_sq = std::max(g.dd, 0.0);
    } else {
        r.raw_x_s = *xs;
        r.x_s = clamp01(*xs);
        r.projected = r.x_s != r.raw_x_s;
        r.chi_sq = chi_sq(g, 0.0, r.x_s);
        r.unconstrained_chi_sq = chi_sq(g, 0.0, r.raw_x_s);
    }
    finish(r);
    return r;
}

std::pair<double, double> project_to_triangle(const GramStats& g, double x, double x_s) {
    if (feasible(x, x_s)) return {x, x_s};
    std::pair<double, double> best{0.0, 0.0};
    double best_chi = chi_sq(g, 0.0, 0.0);
    auto consider = [&](double a, double b) {
        const double c = chi_sq(g, a, b);
        if (c < best_chi) {
            best_chi = c;
            best = {a, b};
        }
    };
    consider(0.0, clamp01(trend_only(g).value_or(0.0)));
    consider(clamp01(neighbor_only(g).value_or(0.0)), 0.0);
    // Edge x + x_s = 1 parameterized by t = x.
    const double curvature = g.nn - 2.0 * g.ns + g.ss;
    if (curvature > 0.0) {
        const double t = clamp01((g.ss - g.ns + g.dn - g.ds) / curvature);
        consider(t, 1.0 - t);
    } else {
        consider(1.0, 0.0);
        consider(0.0, 1.0);
    }
    return best;
}

FitResult fit_hp2(const Deviations& deviations) { return fit_hp2(total_gram(deviations, RowScope::WithNeighbors)); }

FitResult fit_hp2(const GramStats& g) {
    FitResult r;
    r.hypothesis = Hypothesis::HP2;
    r.terms = g.terms;
    r.parameters = 2;
    const Solve2 s = solve2(g);
    if (s.singular) {
        r.determined = false;
        r.note = "normal equations are singular";
        r.x = r.x_s = r.raw_x = r.raw_x_s = kNaN;
        r.chi_sq = r.unconstrained_chi_sq = plane_minimum(g);
    } else {
        r.raw_x = s.x;
        r.raw_x_s = s.x_s;
        std::tie(r.x, r.x_s) = project_to_triangle(g, s.x, s.x_s);
        r.projected = r.x != r.raw_x || r.x_s != r.raw_x_s;
        r.chi_sq = chi_sq(g, r.x, r.x_s);
        r.unconstrained_chi_sq = chi_sq(g, s.x, s.x_s);
    }
    finish(r);
    return r;
}

CaseLabel classify(const GramStats& g, ProjectionMode mode) {
    CaseLabel c;
    const Solve2 s = solve2(g);
    c.det = s.det;
    if (s.singular) {
        c.raw_x_s = trend_only(g);
        const double v = c.raw_x_s ? snap(*c.raw_x_s) : 0.0;
        if (v > 0.0) {
            c.label = Case::VIa;
            c.x_s = std::min(v, 1.0);
        } else if (v < 0.0) {
            c.label = Case::VIc;
        } else {
            c.label = Case::VIb;
        }
        return c;
    }
    c.raw_x = s.x;
    c.raw_x_s = s.x_s;
    const double a = snap(s.x);
    const double b = snap(s.x_s);
    const bool refit = mode == ProjectionMode::Refit;
    if (a < 0.0 && b < 0.0) {
        c.label = Case::V;
        c.x = 0.0;
    } else if (a < 0.0) {
        c.label = Case::III;
        c.x = 0.0;
        c.x_s = clamp01(refit ? *trend_only(g) : b);
    } else if (b < 0.0) {
        c.label = a > 1.0 ? Case::IVb : Case::IVa;
        c.x = clamp01(refit ? *neighbor_only(g) : a);
    } else if (a + b > 1.0) {
        c.label = Case::II;
        c.x = a / (a + b);
        c.x_s = b / (a + b);
    } else {
        c.label = a == 0.0 && b == 0.0 ? Case::Ib : (a == 0.0 || b == 0.0 ? Case::Ic : Case::Ia);
        c.x = a;
        c.x_s = b;
    }
    return c;
}

bool label_consistent(const CaseLabel& l) {
    const double eps = kZeroTolerance;
    auto neg = [&](double v) { return v < -eps; };
    auto zero = [&](double v) { return std::abs(v) <= eps; };
    auto pos = [&](double v) { return v > eps; };
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    const bool singular_case = l.label == Case::VIa || l.label == Case::VIb || l.label == Case::VIc;
    if (singular_case) {
        if (l.x || l.raw_x) return false;
        const bool have = l.raw_x_s.has_value();
        switch (l.label) {
            case Case::VIa: return have && pos(*l.raw_x_s) && l.x_s > 0.0 && l.x_s <= 1.0;
            case Case::VIb: return (!have || zero(*l.raw_x_s)) && l.x_s == 0.0;
            default: return have && neg(*l.raw_x_s) && l.x_s == 0.0;
        }
    }
    if (!l.x || !l.raw_x || !l.raw_x_s) return false;
    const double rx = *l.raw_x, rs = *l.raw_x_s, x = *l.x, xs = l.x_s;
    const bool sum_ok = x + xs <= 1.0 + kFeasibilitySlack;
    switch (l.label) {
        case Case::Ia: return pos(rx) && pos(rs) && x == rx && xs == rs && sum_ok;
        case Case::Ib: return zero(rx) && zero(rs) && x == 0.0 && xs == 0.0;
        case Case::Ic:
            return ((zero(rx) && pos(rs)) || (pos(rx) && zero(rs))) && x == snap(rx) && xs == snap(rs) && sum_ok;
        case Case::II:
            return !neg(rx) && !neg(rs) && snap(rx) + snap(rs) > 1.0 && std::abs(x + xs - 1.0) <= 1e-12 && x >= 0.0 &&
                   xs >= 0.0;
        case Case::III: return neg(rx) && !neg(rs) && x == 0.0 && in01(xs) && sum_ok;
        case Case::IVa: return !neg(rx) && snap(rx) <= 1.0 && neg(rs) && xs == 0.0 && in01(x);
        case Case::IVb: return rx > 1.0 && neg(rs) && xs == 0.0 && in01(x);
        case Case::V: return neg(rx) && neg(rs) && x == 0.0 && xs == 0.0;
        default: return false;
    }
}

AngleDiagnostics angle_diagnostics(const GramStats& g) {
    AngleDiagnostics a;
    auto cosine = [](double dot, double n1, double n2) -> std::optional<double> {
        if (!(n1 > 0.0) || !(n2 > 0.0)) return std::nullopt;
        return std::clamp(dot / std::sqrt(n1 * n2), -1.0, 1.0);
    };
    a.cos_alpha = cosine(g.dn, g.dd, g.nn);
    a.cos_beta = cosine(g.ds, g.dd, g.ss);
    a.cos_gamma = cosine(g.ns, g.nn, g.ss);
    if (a.cos_alpha && a.cos_beta && a.cos_gamma) a.against_neighbors = *a.cos_alpha < *a.cos_beta * *a.cos_gamma;
    return a;
}

Hp3Result fit_hp3(const Deviations& deviations, ProjectionMode mode, unsigned jobs) {
    Hp3Result out;
    struct Group {
        MemberId member;
        GramStats gram;
        bool any = false;
    };
    std::vector<Group> groups;
    for (const auto& b : deviations.blocks) {
        if (groups.empty() || groups.back().member != b.member) groups.push_back({b.member, {}, false});
        if (b.has_neighbors) {
            groups.back().gram += b.gram;
            groups.back().any = true;
        }
    }
    std::vector<std::optional<MemberFit>> fits(groups.size());
    parallel_for(groups.size(), jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (!groups[i].any) continue;
            MemberFit f;
            f.member = groups[i].member;
            f.gram = groups[i].gram;
            f.label = classify(f.gram, mode);
            f.parameters = f.label.x ? 2 : 1;
            f.chi_sq = chi_sq(f.gram, f.label.x.value_or(0.0), f.label.x_s);
            f.unconstrained_chi_sq = plane_minimum(f.gram);
            f.angles = angle_diagnostics(f.gram);
            fits[i] = std::move(f);
        }
    });
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (fits[i]) {
            out.members.push_back(std::move(*fits[i]));
        } else {
            out.skipped.push_back({groups[i].member, "no year with neighbors"});
        }
    }

    FitResult& r = out.aggregate;
    r.hypothesis = Hypothesis::HP3;
    const auto& m = out.members;
    r.members = m.size();
    r.chi_sq = pairwise_reduce<double>(0, m.size(), [&](std::size_t i) { return m[i].chi_sq; });
    r.unconstrained_chi_sq = pairwise_reduce<double>(0, m.size(), [&](std::size_t i) { return m[i].unconstrained_chi_sq; });
    double sx = 0, sxs = 0, srx = 0, srxs = 0;
    std::size_t nx = 0, nrxs = 0;
    for (const auto& f : m) {
        r.terms += f.gram.terms;
        r.parameters += f.parameters;
        if (f.label.x) {
            sx += *f.label.x;
            srx += *f.label.raw_x;
            ++nx;
        }
        sxs += f.label.x_s;
        if (f.label.raw_x_s) {
            srxs += *f.label.raw_x_s;
            ++nrxs;
        }
        if (f.label.label != Case::Ia && f.label.label != Case::Ib && f.label.label != Case::Ic) r.projected = true;
    }
    r.x = nx ? sx / nx : kNaN;
    r.raw_x = nx ? srx / nx : kNaN;
    r.x_s = m.empty() ? kNaN : sxs / m.size();
    r.raw_x_s = nrxs ? srxs / nrxs : kNaN;
    if (m.empty()) {
        r.determined = false;
        r.note = "no member has a year with neighbors";
    }
    finish(r);
    return out;
}

FitResult fit_hp3_alpha(const Hp3Result& hp3) {
    FitResult r;
    r.hypothesis = Hypothesis::HP3Alpha;
    std::vector<double> chis, uchis;
    double sx = 0, sxs = 0;
    for (const auto& f : hp3.members) {
        if (!f.label.raw_x) continue;
        const double x = std::max(*f.label.raw_x, 0.0);
        const double xs = std::max(*f.label.raw_x_s, 0.0);
        if (x + xs > 1.0 + kFeasibilitySlack) continue;
        sx += x;
        sxs += xs;
        chis.push_back(chi_sq(f.gram, x, xs));
        uchis.push_back(f.unconstrained_chi_sq);
        r.terms += f.gram.terms;
        r.parameters += 2;
        if (x != *f.label.raw_x || xs != *f.label.raw_x_s) r.projected = true;
    }
    r.members = chis.size();
    r.chi_sq = pairwise_reduce<double>(0, chis.size(), [&](std::size_t i) { return chis[i]; });
    r.unconstrained_chi_sq = pairwise_reduce<double>(0, uchis.size(), [&](std::size_t i) { return uchis[i]; });
    if (r.members == 0) {
        r.determined = false;
        r.note = "no member with feasible nulled parameters";
        r.x = r.x_s = r.raw_x = r.raw_x_s = kNaN;
    } else {
        r.x = r.raw_x = sx / r.members;
        r.x_s = r.raw_x_s = sxs / r.members;
    }
    finish(r);
    return r;
}

FitResult fit_hp3_alpha(const Deviations& deviations, unsigned jobs) {
    return fit_hp3_alpha(fit_hp3(deviations, ProjectionMode::Refit, jobs));
}

CaseCensus case_census(const std::vector<MemberFit>& fits) {
    CaseCensus c{};
    for (const auto& f : fits) ++c[static_cast<std::size_t>(f.label.label)];
    return c;
}

}  // namespace ssn
