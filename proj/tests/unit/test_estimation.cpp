#include <cmath>
#include <random>

#include "doctest.h"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/indexed_corpus.hpp"
#include "ssn/corpus/trends.hpp"
#include "ssn/estimation/fit.hpp"
#include "ssn/profiling/deviations.hpp"
#include "ssn/reports/synthetic.hpp"

using namespace ssn;

namespace {

// One block whose change is exactly a * N + b * S, with N and S fixed and
// linearly independent.
DeviationBlock planted_block(std::uint32_t member, double a, double b, bool collinear = false) {
    const std::vector<double> n{0.3, -0.5, 0.1, 0.1};
    const std::vector<double> s = collinear ? n : std::vector<double>{-0.2, 0.1, 0.4, -0.3};
    DeviationBlock blk;
    blk.member = MemberId{member};
    blk.year = 2000;
    blk.has_neighbors = true;
    blk.neighbor_count = 1;
    for (std::uint32_t k = 0; k < n.size(); ++k) blk.entries.push_back({TopicId{k}, a * n[k] + b * s[k], n[k], s[k]});
    blk.gram = gram_from_entries(blk.entries);
    return blk;
}

Deviations single(DeviationBlock b) {
    Deviations d;
    d.topic_count = 4;
    d.blocks.push_back(std::move(b));
    return d;
}

Deviations exact_deviations(const SyntheticSpec& spec) {
    const auto out = generate_synthetic(spec);
    return compute_deviations(out.exact->profiles, out.exact->source, out.exact->graph);
}

Deviations sampled_deviations(const SyntheticSpec& spec) {
    const auto out = generate_synthetic(spec);
    const TopicLexicon lx(out.sampled->lexicon);
    const auto c = resolve_corpus(out.sampled->events, lx);
    DeviationOptions o;
    o.materialize = false;
    return compute_deviations(build_profiles(c), compute_trends(c).source_schedule(), build_graph_series(c), o);
}

bool nested(const Deviations& d) {
    const auto g = total_gram(d, RowScope::WithNeighbors);
    const double slack = 1e-12 * std::max(1.0, g.dd);
    const double hp1 = fit_hp1(g).unconstrained_chi_sq;
    const double hp2 = fit_hp2(g).unconstrained_chi_sq;
    const double hp3 = fit_hp3(d).aggregate.unconstrained_chi_sq;
    return hp3 <= hp2 + slack && hp2 <= hp1 + slack;
}

}  // namespace

TEST_CASE("chi_sq agrees with explicit residuals") {
    const auto b = planted_block(0, 0.1, 0.2);
    double direct = 0.0;
    for (const auto& e : b.entries) {
        const double r = 0.3 * e.from_neighbors + 0.05 * e.from_source - e.profile_change;
        direct += r * r;
    }
    CHECK(chi_sq(b.gram, 0.3, 0.05) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(chi_sq(b.gram, 0.1, 0.2) < 1e-15);
}

TEST_CASE("fit_hp1 examples") {
    SUBCASE("single row") {
        DeviationBlock b;
        b.entries.push_back({TopicId{0}, 0.1, 0.0, 0.5});
        b.gram = gram_from_entries(b.entries);
        const auto r = fit_hp1(single(b));
        CHECK(r.x_s == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(r.dof == 0);
    }
    SUBCASE("no change") {
        auto b = planted_block(0, 0.0, 0.0);
        const auto r = fit_hp1(single(b));
        CHECK(r.x_s == 0.0);
        CHECK(r.chi_sq == 0.0);
        CHECK(r.dof == 3);
    }
    SUBCASE("clamped at the boundary") {
        const auto r = fit_hp1(single(planted_block(0, 0.0, 1.7)));
        CHECK(r.raw_x_s == doctest::Approx(1.7));
        CHECK(r.x_s == 1.0);
        CHECK(r.projected);
    }
    SUBCASE("undetermined without trend deviation") {
        DeviationBlock b;
        b.entries.push_back({TopicId{0}, 0.1, 0.2, 0.0});
        b.gram = gram_from_entries(b.entries);
        const auto r = fit_hp1(single(b));
        CHECK_FALSE(r.determined);
        CHECK(std::isnan(r.x_s));
    }
}

TEST_CASE("fit_hp2 examples") {
    SUBCASE("collinear regressors are singular") {
        const auto r = fit_hp2(single(planted_block(0, 0.1, 0.1, true)));
        CHECK_FALSE(r.determined);
        CHECK(r.note.find("singular") != std::string::npos);
    }
    SUBCASE("interior solution is exact") {
        const auto r = fit_hp2(single(planted_block(0, 0.05, 0.05)));
        CHECK(r.x == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(r.x_s == doctest::Approx(0.05).epsilon(1e-12));
        CHECK_FALSE(r.projected);
    }
    SUBCASE("infeasible solution lands on the best triangle point") {
        const auto blk = planted_block(0, 0.9, 0.7);
        const auto r = fit_hp2(single(blk));
        CHECK(r.projected);
        CHECK(r.x + r.x_s <= 1.0 + 1e-12);
        // Brute-force search over a fine grid of the triangle.
        double best = 1e300;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; i + j <= 400; ++j) best = std::min(best, chi_sq(blk.gram, i / 400.0, j / 400.0));
        CHECK(r.chi_sq <= best + 1e-12);
    }
}

TEST_CASE("triangle projection is idempotent and optimal") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto blk = planted_block(0, u(rng), u(rng));
        const auto [x, xs] = project_to_triangle(blk.gram, *classify(blk.gram).raw_x, *classify(blk.gram).raw_x_s);
        CHECK(x >= 0.0);
        CHECK(xs >= 0.0);
        CHECK(x + xs <= 1.0 + 1e-12);
        const auto again = project_to_triangle(blk.gram, x, xs);
        CHECK(again.first == x);
        CHECK(again.second == xs);
        double best = 1e300;
        for (int i = 0; i <= 100; ++i)
            for (int j = 0; i + j <= 100; ++j) best = std::min(best, chi_sq(blk.gram, i / 100.0, j / 100.0));
        CHECK(chi_sq(blk.gram, x, xs) <= best + 1e-12);
    }
}

TEST_CASE("planted case labels") {
    struct Plant {
        double a, b;
        bool collinear;
        Case expected;
    };
    const std::vector<Plant> plants{
        {0.10, 0.05, false, Case::Ia}, {0.0, 0.0, false, Case::Ib},   {0.3, 0.0, false, Case::Ic},
        {0.8, 0.6, false, Case::II},   {-0.2, 0.3, false, Case::III}, {0.3, -0.2, false, Case::IVa},
        {1.3, -0.2, false, Case::IVb}, {-0.1, -0.2, false, Case::V},  {0.1, 0.1, true, Case::VIa},
        {0.0, 0.0, true, Case::VIb},   {-0.1, -0.1, true, Case::VIc},
    };
    Deviations d;
    d.topic_count = 4;
    for (std::uint32_t i = 0; i < plants.size(); ++i) d.blocks.push_back(planted_block(i, plants[i].a, plants[i].b, plants[i].collinear));
    for (auto mode : {ProjectionMode::Refit, ProjectionMode::PaperEmulation}) {
        const auto r = fit_hp3(d, mode);
        REQUIRE(r.members.size() == plants.size());
        for (std::size_t i = 0; i < plants.size(); ++i) {
            INFO("member " << i);
            CHECK(r.members[i].label.label == plants[i].expected);
            CHECK(label_consistent(r.members[i].label));
        }
        const auto census = case_census(r.members);
        for (std::size_t c = 0; c < kCaseCount; ++c) CHECK(census[c] == 1);
    }
    const auto r = fit_hp3(d);
    const auto& ii = r.members[3].label;
    CHECK(*ii.x + ii.x_s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*ii.x == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(ii.x_s == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
    CHECK(std::abs(*ii.x / ii.x_s - *ii.raw_x / *ii.raw_x_s) < 1e-12);
    CHECK(*r.members[0].label.x == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(*r.members[4].label.x == 0.0);
    CHECK_FALSE(r.members[8].label.x.has_value());
    CHECK(r.members[8].label.x_s == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("refit and paper emulation differ only in the kept coordinate") {
    const auto blk = planted_block(0, -0.2, 0.3);
    const auto refit = classify(blk.gram, ProjectionMode::Refit);
    const auto emu = classify(blk.gram, ProjectionMode::PaperEmulation);
    CHECK(emu.x_s == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(refit.x_s == doctest::Approx(blk.gram.ds / blk.gram.ss).epsilon(1e-12));
    CHECK(chi_sq(blk.gram, 0.0, refit.x_s) <= chi_sq(blk.gram, 0.0, emu.x_s));
    const auto ivb = classify(planted_block(0, 1.3, -0.2).gram, ProjectionMode::PaperEmulation);
    CHECK(*ivb.x == 1.0);
}

TEST_CASE("angle diagnostics") {
    SUBCASE("change along the neighbors") {
        DeviationBlock b;
        b.entries = {{TopicId{0}, 0.2, 0.4, 0.0}, {TopicId{1}, -0.2, -0.4, 0.0}, {TopicId{2}, 0.0, 0.0, 0.3}};
        const auto a = angle_diagnostics(gram_from_entries(b.entries));
        CHECK(*a.cos_alpha == doctest::Approx(1.0));
        CHECK(*a.cos_gamma == doctest::Approx(0.0));
        CHECK(classify(gram_from_entries(b.entries)).raw_x_s.value() == doctest::Approx(0.0));
    }
    SUBCASE("change against the neighbors") {
        DeviationBlock b;
        b.entries = {{TopicId{0}, -0.2, 0.4, 0.1}, {TopicId{1}, 0.2, -0.4, 0.3}};
        const auto g = gram_from_entries(b.entries);
        CHECK(*angle_diagnostics(g).cos_alpha == doctest::Approx(-1.0));
        CHECK(*classify(g).raw_x < 0.0);
    }
    SUBCASE("case III fixture satisfies the inequality") {
        const auto blk = planted_block(0, -0.2, 0.3);
        const auto a = angle_diagnostics(blk.gram);
        REQUIRE(a.against_neighbors.has_value());
        CHECK(*a.against_neighbors);
        CHECK(*a.cos_alpha < *a.cos_beta * *a.cos_gamma);
    }
    SUBCASE("zero vectors leave cosines absent") {
        const auto a = angle_diagnostics(planted_block(0, 0.0, 0.0).gram);
        CHECK_FALSE(a.cos_alpha.has_value());
        CHECK_FALSE(a.against_neighbors.has_value());
        CHECK(a.cos_gamma.has_value());
    }
    SUBCASE("sign of the neighbor coefficient follows the inequality") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> n(0.0, 1.0);
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<DeviationEntry> e;
            for (std::uint32_t k = 0; k < 6; ++k) e.push_back({TopicId{k}, n(rng), n(rng), n(rng)});
            const auto g = gram_from_entries(e);
            const auto c = classify(g);
            if (!c.raw_x || std::abs(*c.raw_x) < 1e-9) continue;
            CHECK((*c.raw_x < 0.0) == *angle_diagnostics(g).against_neighbors);
        }
    }
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n(0.0, 0.1);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<DeviationEntry> e;
        for (std::uint32_t k = 0; k < 10; ++k) e.push_back({TopicId{k}, n(rng), n(rng), n(rng)});
        const auto g = gram_from_entries(e);
        const double x = u(rng), xs = u(rng), h = 1e-5;
        const auto [gx, gs] = chi_sq_gradient(g, x, xs);
        const double fx = (chi_sq(g, x + h, xs) - chi_sq(g, x - h, xs)) / (2 * h);
        const double fs = (chi_sq(g, x, xs + h) - chi_sq(g, x, xs - h)) / (2 * h);
        CHECK(std::abs(gx - fx) <= 1e-6 * std::max(std::abs(gx), std::abs(fx)));
        CHECK(std::abs(gs - fs) <= 1e-6 * std::max(std::abs(gs), std::abs(fs)));
        const auto c = classify(g);
        const auto [ox, os] = chi_sq_gradient(g, *c.raw_x, *c.raw_x_s);
        CHECK(std::abs(ox) < 1e-12 * (1 + g.nn + g.ss + g.dd));
        CHECK(std::abs(os) < 1e-12 * (1 + g.nn + g.ss + g.dd));
    }
}

TEST_CASE("scale consistency") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.1);
    for (double c : {0.001, 0.37, 3.0, 1024.0}) {
        std::vector<DeviationEntry> e, scaled;
        for (std::uint32_t k = 0; k < 12; ++k) {
            e.push_back({TopicId{k}, n(rng), n(rng), n(rng)});
            scaled.push_back({TopicId{k}, c * e.back().profile_change, c * e.back().from_neighbors, c * e.back().from_source});
        }
        const auto a = classify(gram_from_entries(e));
        const auto b = classify(gram_from_entries(scaled));
        CHECK(std::abs(*a.raw_x - *b.raw_x) < 1e-12);
        CHECK(std::abs(*a.raw_x_s - *b.raw_x_s) < 1e-12);
        CHECK(a.label == b.label);
        const auto h1 = fit_hp1(gram_from_entries(e)), h1s = fit_hp1(gram_from_entries(scaled));
        CHECK(std::abs(h1.raw_x_s - h1s.raw_x_s) < 1e-12);
    }
}

TEST_CASE("exact recovery from noise-free trajectories") {
    SyntheticSpec spec;
    spec.n_members = 100;
    spec.n_topics = 20;
    spec.years = 30;
    spec.seed = 5;
    SUBCASE("HP2") {
        const auto d = exact_deviations(spec);
        const auto r = fit_hp2(d);
        CHECK(std::abs(r.raw_x - 0.05) < 1e-6);
        CHECK(std::abs(r.raw_x_s - 0.05) < 1e-6);
        CHECK(r.dof > 0);
    }
    SUBCASE("HP1") {
        spec.x = 0.0;
        spec.x_s = 0.08;
        const auto r = fit_hp1(exact_deviations(spec));
        CHECK(std::abs(r.raw_x_s - 0.08) < 1e-6);
    }
    SUBCASE("HP3 per member") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.02, 0.2);
        for (std::size_t i = 0; i < spec.n_members; ++i) {
            spec.member_x.push_back(u(rng));
            spec.member_x_s.push_back(u(rng));
        }
        const auto r = fit_hp3(exact_deviations(spec), ProjectionMode::Refit, 4);
        REQUIRE(r.members.size() == spec.n_members);
        for (const auto& f : r.members) {
            CHECK(f.label.label == Case::Ia);
            CHECK(std::abs(*f.label.raw_x - spec.member_x[f.member.value]) < 1e-6);
            CHECK(std::abs(*f.label.raw_x_s - spec.member_x_s[f.member.value]) < 1e-6);
        }
        const auto alpha = fit_hp3_alpha(r);
        CHECK(alpha.x == doctest::Approx(r.aggregate.x).epsilon(1e-12));
        CHECK(alpha.chi_sq == doctest::Approx(r.aggregate.chi_sq).epsilon(1e-9));
        CHECK(case_census(r.members)[static_cast<std::size_t>(Case::Ia)] == spec.n_members);
    }
}

TEST_CASE("zero susceptibility leaves every profile constant") {
    SyntheticSpec spec;
    spec.n_members = 20;
    spec.years = 6;
    spec.x = spec.x_s = 0.0;
    const auto out = generate_synthetic(spec);
    for (std::uint32_t m = 0; m < 20; ++m) {
        const auto snaps = out.exact->profiles.snapshots(MemberId{m});
        for (const auto& s : snaps) CHECK(s.shares == snaps.front().shares);
    }
}

TEST_CASE("nested chi-square ordering on random datasets") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SyntheticSpec spec;
        spec.mode = SynthMode::Sampled;
        spec.n_members = 50;
        spec.years = 8;
        spec.seed = seed;
        spec.topology = {seed % 2 ? Topology::ErdosRenyi : Topology::PreferentialAttachment, 2, 0.05, 0};
        CHECK(nested(sampled_deviations(spec)));
    }
}

TEST_CASE("HP3 skips members without neighbors and is worker-count independent") {
    SyntheticSpec spec;
    spec.mode = SynthMode::Sampled;
    spec.n_members = 70;
    spec.years = 8;
    spec.topology = {Topology::ErdosRenyi, 0, 0.02, 0};
    const auto d = sampled_deviations(spec);
    const auto a = fit_hp3(d, ProjectionMode::Refit, 1);
    const auto b = fit_hp3(d, ProjectionMode::Refit, 5);
    CHECK_FALSE(a.skipped.empty());
    CHECK(a.skipped[0].reason == "no year with neighbors");
    REQUIRE(a.members.size() == b.members.size());
    CHECK(a.aggregate.chi_sq == b.aggregate.chi_sq);
    CHECK(a.aggregate.x == b.aggregate.x);
    for (const auto& f : a.members) CHECK(label_consistent(f.label));
    const auto alpha = fit_hp3_alpha(a);
    CHECK(alpha.x >= 0.0);
    CHECK(alpha.x_s >= 0.0);
    CHECK(alpha.members <= a.members.size());
}
