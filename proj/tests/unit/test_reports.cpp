#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ssn/diffusion/simulation.hpp"
#include "ssn/estimation/fit.hpp"
#include "ssn/estimation/fit_io.hpp"
#include "ssn/profiling/deviations.hpp"
#include "ssn/profiling/dumps.hpp"
#include "ssn/reports/reports.hpp"
#include "ssn/reports/synthetic.hpp"

using namespace ssn;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

MemberFit fit_with_x(std::uint32_t member, std::optional<double> x, double x_s = 0.1) {
    MemberFit f;
    f.member = MemberId{member};
    f.label.x = x;
    f.label.x_s = x_s;
    return f;
}

}  // namespace

TEST_CASE("format_number round-trips doubles") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("csv writer emits provenance, header and quoted cells") {
    Provenance p{"1.2.3", 42, {{"corpus", "abc"}, {"lexicon", "def"}}};
    CHECK(p.comment_line() == "# ssn 1.2.3 seed=42 inputs=corpus:abc,lexicon:def");
    std::ostringstream out;
    CsvWriter w(out, p, {"name", "value", "flag"});
    w << "Smith, J. \"Jr\"" << 0.5 << true;
    w.end_row();
    const auto l = lines_of(out.str());
    REQUIRE(l.size() == 3);
    CHECK(l[1] == "name,value,flag");
    CHECK(l[2] == "\"Smith, J. \"\"Jr\"\"\",0.5,1");
    w << "short";
    CHECK_THROWS_AS(w.end_row(), std::logic_error);
}

TEST_CASE("histogram bin counts sum to the population") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.3, 0.6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(rng() % 500);
        for (auto& x : v) x = g(rng);
        const std::size_t bins = 1 + rng() % 40;
        const auto h = make_histogram(v, -0.5, 1.0, bins);
        CHECK(h.total() == v.size());
        CHECK(h.counts.size() == bins);
    }
}

TEST_CASE("histogram edges") {
    const std::vector<double> v{0.0, 0.25, 0.5, 1.0, -0.1, 1.1};
    const auto h = make_histogram(v, 0.0, 1.0, 4);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 1, 1, 1});
    CHECK(h.underflow == 1);
    CHECK(h.overflow == 1);
    const std::vector<double> bad{std::nan("")};
    CHECK_THROWS_AS(make_histogram(bad, 0.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_histogram(v, 1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("2d histogram counts every pair once") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.2, 0.5);
    std::vector<double> a(700), b(700);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = g(rng), b[i] = g(rng);
    const auto h = make_histogram_2d(a, b, -1.0, 2.0, -1.0, 2.0, 30);
    CHECK(h.total() == a.size());
}

TEST_CASE("correlations") {
    const std::vector<double> a{1, 2, 2, 3}, b{1, 2, 3, 4};
    // Average ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4): 4.5 / sqrt(4.5 * 5).
    CHECK(spearman(a, b) == doctest::Approx(4.5 / std::sqrt(22.5)).epsilon(1e-15));
    const std::vector<double> c{1, 4, 9, 16}, d{-1, -2, -3, -4};
    CHECK(spearman(b, c) == doctest::Approx(1.0));
    CHECK(pearson(b, d) == doctest::Approx(-1.0));
    const std::vector<double> flat{2, 2, 2, 2};
    CHECK(std::isnan(pearson(b, flat)));
}

TEST_CASE("frequent names: empty list flags nobody") {
    const std::vector<std::string> names{"Wei Wang", "Anna Keller"};
    const auto flags = flag_frequent_names(names, FrequentNames{});
    CHECK(flags == std::vector<bool>{false, false});
}

TEST_CASE("frequent names: full names, combinations, homonym suffixes") {
    std::istringstream in("# list\nWei Wang\n[given]\nLi\nJun  # trailing comment\n[family]\nZhang\nChen\n");
    const auto fn = load_frequent_names(in);
    CHECK(fn.size() == 5);
    const std::vector<std::string> names{"Wei Wang", "Li  Chen", "Jun Zhang 0003", "Zhang Li", "Wei Wangg",
                                         "Jun Zhang 12"};
    CHECK(flag_frequent_names(names, fn) == std::vector<bool>{true, true, true, false, false, false});
}

TEST_CASE("frequent names: three planted among one hundred") {
    std::mt19937_64 rng(8);
    const std::vector<std::string> given{"Anna", "Bruno", "Carla", "Elena", "Hugo", "Ines", "Lars", "Olga"};
    const std::vector<std::string> family{"Keller", "Novak", "Duval", "Castro", "Moreau", "Gallo"};
    std::vector<std::string> names;
    for (int i = 0; i < 97; ++i) names.push_back(given[rng() % given.size()] + " " + family[rng() % family.size()]);
    names.insert(names.begin() + 10, "Wei Wang");
    names.insert(names.begin() + 50, "Li Zhang");
    names.push_back("Jun Chen");
    std::istringstream in("[given]\nWei\nLi\nJun\nMing\n[family]\nWang\nZhang\nChen\nLiu\n");
    const auto flags = flag_frequent_names(names, load_frequent_names(in));
    CHECK(std::count(flags.begin(), flags.end(), true) == 3);
    CHECK(flags[10]);
    CHECK(flags[50]);
    CHECK(flags.back());
}

TEST_CASE("fitted authorities: star center collects leaf susceptibilities") {
    const std::vector<Edge> edges{{MemberId{0}, MemberId{1}}, {MemberId{0}, MemberId{2}},
                                  {MemberId{0}, MemberId{3}}, {MemberId{0}, MemberId{4}}};
    auto g = SocialGraph::from_edges(2000, 6, edges);
    g.mark_present(MemberId{5});
    Hp3Result hp3;
    hp3.members = {fit_with_x(0, 0.5), fit_with_x(1, 0.25), fit_with_x(2, 0.25), fit_with_x(3, 0.25),
                   fit_with_x(4, 0.25), fit_with_x(5, 0.9)};
    const auto a = fitted_authorities(hp3, g);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(0.5));
    CHECK(a[5] == 0.0);

    // An undetermined x contributes nothing.
    hp3.members[1].label.x.reset();
    CHECK(fitted_authorities(hp3, g)[0] == doctest::Approx(0.75));
}

TEST_CASE("success reports keep semantically treatable members with papers") {
    std::vector<MemberInfo> info(3);
    info[0] = {"a", 5, 5, true, true};
    info[1] = {"b", 0, 0, false, true};
    info[2] = {"c", 7, 7, true, false};
    Hp3Result hp3;
    hp3.members = {fit_with_x(0, 0.1, 0.2), fit_with_x(1, 0.1), fit_with_x(2, 0.1)};
    const std::vector<double> auth{1.5, 2.0, 3.0};
    const auto s = success_reports(info, hp3, auth);
    REQUIRE(s.size() == 1);
    CHECK(s[0].member == MemberId{0});
    CHECK(s[0].papers == 5);
    CHECK(s[0].authority == 1.5);
    CHECK(s[0].x_s == 0.2);
}

TEST_CASE("authority from fits ranks with the planted degree") {
    SyntheticSpec spec;
    spec.n_members = 100;
    spec.years = 20;
    spec.seed = 17;
    const auto out = generate_synthetic(spec);
    const auto d = compute_deviations(out.exact->profiles, out.exact->source, out.exact->graph);
    const auto hp3 = fit_hp3(d);
    const auto a = fitted_authorities(hp3, out.graph);
    std::vector<double> deg, auth;
    for (const auto& m : hp3.members) {
        deg.push_back(static_cast<double>(out.graph.degree(m.member)));
        auth.push_back(a[m.member.value]);
    }
    CHECK(spearman(deg, auth) > 0.9);
}

TEST_CASE("fit serialization round-trips") {
    SyntheticSpec spec;
    spec.n_members = 40;
    spec.years = 10;
    spec.member_x.resize(40);
    spec.member_x_s.resize(40);
    std::mt19937_64 rng(2);
    for (std::size_t i = 0; i < 40; ++i) {
        spec.member_x[i] = 0.3 * static_cast<double>(rng() % 1000) / 1000.0;
        spec.member_x_s[i] = 0.3 * static_cast<double>(rng() % 1000) / 1000.0;
    }
    const auto out = generate_synthetic(spec);
    const auto d = compute_deviations(out.exact->profiles, out.exact->source, out.exact->graph);
    const auto hp3 = fit_hp3(d);
    std::stringstream io;
    write_member_fits(io, hp3);
    const auto back = read_member_fits(io);
    REQUIRE(back.members.size() == hp3.members.size());
    for (std::size_t i = 0; i < back.members.size(); ++i) {
        const auto& a = hp3.members[i];
        const auto& b = back.members[i];
        CHECK(a.member == b.member);
        CHECK(a.gram == b.gram);
        CHECK(a.label.label == b.label.label);
        CHECK(a.label.x == b.label.x);
        CHECK(a.label.x_s == b.label.x_s);
        CHECK(a.label.raw_x == b.label.raw_x);
        CHECK(a.chi_sq == b.chi_sq);
        CHECK(a.unconstrained_chi_sq == b.unconstrained_chi_sq);
        CHECK(a.angles.cos_alpha == b.angles.cos_alpha);
    }
    FitBundle fb{fit_hp1(d), fit_hp2(d), hp3.aggregate, fit_hp3_alpha(hp3), ProjectionMode::PaperEmulation};
    const auto fb2 = bundle_from_json(nlohmann::json::parse(bundle_to_json(fb).dump()));
    CHECK(bundle_to_json(fb2) == bundle_to_json(fb));
    CHECK(fb2.mode == ProjectionMode::PaperEmulation);
    CHECK(fb2.hp3.x == fb.hp3.x);
}

TEST_CASE("graph and trend dumps round-trip") {
    SyntheticSpec spec;
    spec.n_members = 30;
    spec.years = 6;
    const auto out = generate_synthetic(spec);
    std::stringstream g;
    write_graph_dump(g, out.exact->graph);
    const auto graph = read_graph_dump(g, 30);
    for (int y = spec.first_year; y < spec.first_year + spec.years; ++y) {
        CHECK(graph.snapshot(y).edges() == out.exact->graph.snapshot(y).edges());
    }
    const auto trends = trends_from_schedule(out.exact->source);
    std::stringstream t;
    write_trend_dump(t, trends);
    const auto back = read_trend_dump(t, spec.n_topics);
    CHECK(back.source_schedule() == out.exact->source);
    for (const auto& y : back.years()) CHECK(y.entropy.has_value());
}
