#include "ssn/estimation/fit_io.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ssn/util/errors.hpp"

namespace ssn {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> opt(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::optional<Case> parse_case(std::string_view name) {
    for (std::size_t c = 0; c < kCaseCount; ++c) {
        if (to_string(static_cast<Case>(c)) == name) return static_cast<Case>(c);
    }
    return std::nullopt;
}

std::optional<Hypothesis> parse_hypothesis(std::string_view name) {
    for (auto h : {Hypothesis::HP1, Hypothesis::HP2, Hypothesis::HP3, Hypothesis::HP3Alpha}) {
        if (to_string(h) == name) return h;
    }
    return std::nullopt;
}

json fit_to_json(const FitResult& f) {
    return json{{"hypothesis", to_string(f.hypothesis)},
                {"determined", f.determined},
                {"note", f.note},
                {"x", num(f.x)},
                {"x_s", num(f.x_s)},
                {"raw_x", num(f.raw_x)},
                {"raw_x_s", num(f.raw_x_s)},
                {"projected", f.projected},
                {"chi_sq", num(f.chi_sq)},
                {"unconstrained_chi_sq", num(f.unconstrained_chi_sq)},
                {"terms", f.terms},
                {"parameters", f.parameters},
                {"dof", f.dof},
                {"chi_sq_per_dof", num(f.chi_sq_per_dof)},
                {"members", f.members}};
}

FitResult fit_from_json(const json& j) {
    FitResult f;
    const auto h = parse_hypothesis(j.at("hypothesis").get<std::string>());
    if (!h) throw InputError("unknown hypothesis " + j.at("hypothesis").dump());
    f.hypothesis = *h;
    f.determined = j.at("determined").get<bool>();
    f.note = j.at("note").get<std::string>();
    f.x = num(j.at("x"));
    f.x_s = num(j.at("x_s"));
    f.raw_x = num(j.at("raw_x"));
    f.raw_x_s = num(j.at("raw_x_s"));
    f.projected = j.at("projected").get<bool>();
    f.chi_sq = num(j.at("chi_sq"));
    f.unconstrained_chi_sq = num(j.at("unconstrained_chi_sq"));
    f.terms = j.at("terms").get<std::uint64_t>();
    f.parameters = j.at("parameters").get<int>();
    f.dof = j.at("dof").get<std::int64_t>();
    f.chi_sq_per_dof = num(j.at("chi_sq_per_dof"));
    f.members = j.at("members").get<std::size_t>();
    return f;
}

json gram_to_json(const GramStats& g) {
    return json{{"nn", g.nn}, {"ns", g.ns}, {"ss", g.ss}, {"dn", g.dn}, {"ds", g.ds}, {"dd", g.dd}, {"terms", g.terms}};
}

GramStats gram_from_json(const json& j) {
    GramStats g;
    g.nn = j.at("nn").get<double>();
    g.ns = j.at("ns").get<double>();
    g.ss = j.at("ss").get<double>();
    g.dn = j.at("dn").get<double>();
    g.ds = j.at("ds").get<double>();
    g.dd = j.at("dd").get<double>();
    g.terms = j.at("terms").get<std::uint64_t>();
    return g;
}

void write_member_fits(std::ostream& out, const Hp3Result& hp3) {
    for (const auto& m : hp3.members) {
        const auto& l = m.label;
        out << json{{"member", m.member.value},
                    {"case", to_string(l.label)},
                    {"gram", gram_to_json(m.gram)},
                    {"raw_x", opt(l.raw_x)},
                    {"raw_x_s", opt(l.raw_x_s)},
                    {"x", opt(l.x)},
                    {"x_s", num(l.x_s)},
                    {"det", num(l.det)},
                    {"chi_sq", num(m.chi_sq)},
                    {"unconstrained_chi_sq", num(m.unconstrained_chi_sq)},
                    {"parameters", m.parameters}}
                   .dump()
            << '\n';
    }
    for (const auto& s : hp3.skipped) out << json{{"member", s.member.value}, {"skipped", s.reason}}.dump() << '\n';
}

Hp3Result read_member_fits(std::istream& in) {
    Hp3Result r;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const MemberId member{j.at("member").get<std::uint32_t>()};
            if (j.contains("skipped")) {
                r.skipped.push_back({member, j.at("skipped").get<std::string>()});
                continue;
            }
            MemberFit m;
            m.member = member;
            const auto c = parse_case(j.at("case").get<std::string>());
            if (!c) throw InputError("unknown case " + j.at("case").dump());
            m.label.label = *c;
            m.gram = gram_from_json(j.at("gram"));
            m.label.raw_x = opt(j.at("raw_x"));
            m.label.raw_x_s = opt(j.at("raw_x_s"));
            m.label.x = opt(j.at("x"));
            m.label.x_s = num(j.at("x_s"));
            m.label.det = num(j.at("det"));
            m.chi_sq = num(j.at("chi_sq"));
            m.unconstrained_chi_sq = num(j.at("unconstrained_chi_sq"));
            m.parameters = j.at("parameters").get<int>();
            m.angles = angle_diagnostics(m.gram);
            r.members.push_back(std::move(m));
        } catch (const json::exception& e) {
            throw InputError("member fits line " + std::to_string(no) + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError("member fits line " + std::to_string(no) + ": " + e.what());
        }
    }
    return r;
}

json bundle_to_json(const FitBundle& b) {
    return json{{"projection", b.mode == ProjectionMode::Refit ? "refit" : "paper-emulation"},
                {"hypotheses", json::array({fit_to_json(b.hp1), fit_to_json(b.hp2), fit_to_json(b.hp3),
                                            fit_to_json(b.hp3_alpha)})}};
}

FitBundle bundle_from_json(const json& j) {
    FitBundle b;
    b.mode = j.at("projection").get<std::string>() == "refit" ? ProjectionMode::Refit : ProjectionMode::PaperEmulation;
    const auto& h = j.at("hypotheses");
    if (h.size() != 4) throw InputError("fit summary must list four hypotheses");
    b.hp1 = fit_from_json(h[0]);
    b.hp2 = fit_from_json(h[1]);
    b.hp3 = fit_from_json(h[2]);
    b.hp3_alpha = fit_from_json(h[3]);
    return b;
}

}  // namespace ssn
