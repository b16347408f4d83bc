#include "ssn/reports/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ssn/diffusion/simulation.hpp"
#include "ssn/diffusion/susceptibility.hpp"
#include "ssn/util/errors.hpp"

namespace ssn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string Provenance::comment_line() const {
    std::string s = "# ssn " + version + " seed=" + std::to_string(seed) + " inputs=";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) s += ',';
        s += inputs[i].first + ':' + inputs[i].second;
    }
    return s;
}

CsvWriter::CsvWriter(std::ostream& out, const Provenance& provenance, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    out_ << provenance.comment_line() << '\n';
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::separator() {
    if (cell_ == columns_) throw std::logic_error("csv row has too many cells");
    if (cell_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(std::string_view text) {
    separator();
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        out_ << text;
        return *this;
    }
    out_ << '"';
    for (char c : text) {
        if (c == '"') out_ << '"';
        out_ << c;
    }
    out_ << '"';
    return *this;
}

CsvWriter& CsvWriter::operator<<(double v) {
    separator();
    out_ << format_number(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::uint64_t v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (cell_ != columns_) throw std::logic_error("csv row has too few cells");
    out_ << '\n';
    cell_ = 0;
}

std::uint64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), underflow + overflow);
}

namespace {

// Bin of v, or -1 below / bins above the range.
std::ptrdiff_t bin_of(double v, double lo, double hi, std::size_t bins) {
    if (std::isnan(v)) throw std::invalid_argument("histogram value is NaN");
    if (v < lo) return -1;
    if (v > hi) return static_cast<std::ptrdiff_t>(bins);
    const auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    return std::min(b, static_cast<std::ptrdiff_t>(bins) - 1);
}

Histogram layout(double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw std::invalid_argument("histogram needs lo < hi and at least one bin");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    return h;
}

}  // namespace

Histogram make_histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
    Histogram h = layout(lo, hi, bins);
    for (double v : values) {
        const auto b = bin_of(v, lo, hi, bins);
        if (b < 0) {
            ++h.underflow;
        } else if (b == static_cast<std::ptrdiff_t>(bins)) {
            ++h.overflow;
        } else {
            ++h.counts[static_cast<std::size_t>(b)];
        }
    }
    return h;
}

std::uint64_t Histogram2D::total() const { return std::accumulate(counts.begin(), counts.end(), outside); }

Histogram2D make_histogram_2d(std::span<const double> xs, std::span<const double> ys, double lo_x, double hi_x,
                              double lo_y, double hi_y, std::size_t bins) {
    if (xs.size() != ys.size()) throw std::invalid_argument("2d histogram needs paired values");
    Histogram2D h;
    h.x_axis = layout(lo_x, hi_x, bins);
    h.y_axis = layout(lo_y, hi_y, bins);
    h.counts.assign(bins * bins, 0);
    const auto n = static_cast<std::ptrdiff_t>(bins);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto bx = bin_of(xs[i], lo_x, hi_x, bins);
        const auto by = bin_of(ys[i], lo_y, hi_y, bins);
        if (bx < 0 || by < 0 || bx == n || by == n) {
            ++h.outside;
        } else {
            ++h.counts[static_cast<std::size_t>(bx) * bins + static_cast<std::size_t>(by)];
        }
    }
    return h;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("correlation needs paired values");
    const std::size_t n = a.size();
    if (n < 2) return std::nan("");
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::nan("");
    return sab / std::sqrt(saa * sbb);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("correlation needs paired values");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

namespace {

std::string canonical_name(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            if (!out.empty()) out += ' ';
            out.append(s.substr(i, j - i));
        }
        i = j;
    }
    // DBLP homonym suffix
    const auto space = out.rfind(' ');
    if (space != std::string::npos && out.size() - space == 5 &&
        std::all_of(out.begin() + static_cast<std::ptrdiff_t>(space) + 1, out.end(),
                    [](char c) { return c >= '0' && c <= '9'; })) {
        out.resize(space);
    }
    return out;
}

}  // namespace

void FrequentNames::add(std::string_view full_name) {
    auto n = canonical_name(full_name);
    if (!n.empty()) names_.insert(std::move(n));
}

bool FrequentNames::contains(std::string_view display_name) const {
    return !names_.empty() && names_.count(canonical_name(display_name)) > 0;
}

FrequentNames load_frequent_names(std::istream& in) {
    FrequentNames names;
    std::vector<std::string> given, family;
    std::vector<std::string>* section = nullptr;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string t = canonical_name(line);
        if (t.empty()) continue;
        if (t == "[given]") {
            section = &given;
        } else if (t == "[family]") {
            section = &family;
        } else if (t == "[names]") {
            section = nullptr;
        } else if (section) {
            section->push_back(t);
        } else {
            names.add(t);
        }
    }
    for (const auto& g : given) {
        for (const auto& f : family) names.add(g + ' ' + f);
    }
    return names;
}

FrequentNames load_frequent_names_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open frequent-name list " + path.string());
    return load_frequent_names(in);
}

std::vector<bool> flag_frequent_names(std::span<const std::string> display_names, const FrequentNames& names) {
    std::vector<bool> flags(display_names.size(), false);
    if (names.empty()) return flags;
    for (std::size_t i = 0; i < display_names.size(); ++i) flags[i] = names.contains(display_names[i]);
    return flags;
}

std::vector<double> fitted_authorities(const Hp3Result& hp3, const SocialGraph& graph) {
    std::vector<double> x(graph.member_count(), 0.0);
    for (const auto& m : hp3.members) {
        if (m.member.value < x.size() && m.label.x) x[m.member.value] = *m.label.x;
    }
    const std::vector<double> xs(graph.member_count(), 0.0);
    return authorities(SusceptibilityConfig::per_member(graph, x, xs), graph);
}

std::vector<SuccessPoint> success_reports(std::span<const MemberInfo> members, const Hp3Result& hp3,
                                          std::span<const double> authority) {
    std::vector<SuccessPoint> out;
    for (const auto& m : hp3.members) {
        const auto& info = members[m.member.value];
        if (!info.semantically_treatable || info.papers == 0) continue;
        out.push_back({m.member, info.papers, authority[m.member.value], m.label.x_s});
    }
    return out;
}

namespace {

class ReportDir {
public:
    ReportDir(std::filesystem::path dir, const Provenance& p) : dir_(std::move(dir)), provenance_(p) {}

    template <typename Fill>
    void csv(const std::string& name, const std::vector<std::string>& header, Fill&& fill) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw InputError("cannot write " + (dir_ / name).string());
        CsvWriter w(out, provenance_, header);
        fill(w);
        out.flush();
        if (!out) throw InputError("write failed for " + (dir_ / name).string());
        written_.push_back(name);
    }

    void histogram(const std::string& name, const Histogram& h) {
        csv(name, {"bin", "lo", "hi", "count"}, [&](CsvWriter& w) {
            const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
            w << "underflow" << -kInf << h.lo << h.underflow;
            w.end_row();
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                const double hi = b + 1 == h.counts.size() ? h.hi : h.lo + width * static_cast<double>(b + 1);
                w << std::to_string(b) << h.lo + width * static_cast<double>(b) << hi << h.counts[b];
                w.end_row();
            }
            w << "overflow" << h.hi << kInf << h.overflow;
            w.end_row();
        });
    }

    std::vector<std::string> written_;

private:
    std::filesystem::path dir_;
    const Provenance& provenance_;
};

double mean_of(std::span<const double> v) {
    return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
    if (v.empty()) return std::nan("");
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

bool feasible_case(Case c) { return c == Case::Ia || c == Case::Ib || c == Case::Ic; }

}  // namespace

std::vector<std::string> write_report_bundle(const std::filesystem::path& dir, const ReportInputs& in) {
    std::filesystem::create_directories(dir);
    ReportDir out(dir, in.provenance);
    const auto& opt = in.options;
    const std::size_t n = in.members.size();

    const int last = in.graph.last_year();
    const SocialGraph final_graph = in.graph.member_count() ? in.graph.snapshot(last) : SocialGraph(0, n);
    std::vector<std::uint64_t> coauthors(n, 0);
    for (std::size_t i = 0; i < std::min(n, final_graph.member_count()); ++i) {
        coauthors[i] = final_graph.degree(MemberId{static_cast<std::uint32_t>(i)});
    }
    std::vector<double> authority(n, 0.0);
    if (final_graph.member_count() == n) authority = fitted_authorities(in.hp3, final_graph);

    std::vector<std::string> names;
    names.reserve(n);
    for (const auto& m : in.members) names.push_back(m.name);
    const auto frequent = flag_frequent_names(names, in.frequent_names);

    out.csv("topic_evolution.csv", {"year", "events", "topics_seen", "occurrences", "average_frequency", "entropy"},
            [&](CsvWriter& w) {
                for (const auto& y : in.trends.years()) {
                    w << y.year << y.events << static_cast<std::uint64_t>(y.topics_seen) << y.occurrences
                      << y.average_frequency.value_or(kNaN) << y.entropy.value_or(kNaN);
                    w.end_row();
                }
            });

    std::vector<double> feas_x, feas_xs, raw_x, raw_xs, pair_x, pair_xs, ia_x, ia_xs, proj_x, proj_xs, fitted_auth;
    for (const auto& m : in.hp3.members) {
        const auto& l = m.label;
        if (feasible_case(l.label) && l.x) {
            feas_x.push_back(*l.x);
            feas_xs.push_back(l.x_s);
        }
        if (l.raw_x) raw_x.push_back(*l.raw_x);
        if (l.raw_x_s) raw_xs.push_back(*l.raw_x_s);
        if (l.raw_x && l.raw_x_s) {
            pair_x.push_back(*l.raw_x);
            pair_xs.push_back(*l.raw_x_s);
        }
        if (l.label == Case::Ia) {
            ia_x.push_back(*l.x);
            ia_xs.push_back(l.x_s);
        }
        if (l.x) proj_x.push_back(*l.x);
        proj_xs.push_back(l.x_s);
        fitted_auth.push_back(authority[m.member.value]);
    }

    out.histogram("hist_x_feasible.csv", make_histogram(feas_x, 0.0, 1.0, opt.bins));
    out.histogram("hist_x_s_feasible.csv", make_histogram(feas_xs, 0.0, 1.0, opt.bins));
    out.histogram("hist_x_raw.csv", make_histogram(raw_x, opt.raw_lo, opt.raw_hi, opt.bins));
    out.histogram("hist_x_s_raw.csv", make_histogram(raw_xs, opt.raw_lo, opt.raw_hi, opt.bins));
    {
        const auto h = make_histogram_2d(pair_x, pair_xs, opt.raw_lo, opt.raw_hi, opt.raw_lo, opt.raw_hi, opt.bins);
        out.csv("hist2d_x_x_s_raw.csv", {"region", "x_lo", "x_hi", "x_s_lo", "x_s_hi", "count"}, [&](CsvWriter& w) {
            const double width = (opt.raw_hi - opt.raw_lo) / static_cast<double>(opt.bins);
            for (std::size_t i = 0; i < opt.bins; ++i) {
                for (std::size_t j = 0; j < opt.bins; ++j) {
                    w << "bin" << opt.raw_lo + width * static_cast<double>(i)
                      << opt.raw_lo + width * static_cast<double>(i + 1) << opt.raw_lo + width * static_cast<double>(j)
                      << opt.raw_lo + width * static_cast<double>(j + 1) << h.counts[i * opt.bins + j];
                    w.end_row();
                }
            }
            w << "outside" << kNaN << kNaN << kNaN << kNaN << h.outside;
            w.end_row();
        });
    }
    {
        double top = 0.0;
        for (double a : fitted_auth) top = std::max(top, a);
        out.histogram("hist_authority.csv", make_histogram(fitted_auth, 0.0, top > 0.0 ? std::ceil(top) : 1.0, opt.bins));
    }

    out.csv("scatter_authority_coauthors.csv", {"member", "name", "coauthors", "authority", "frequent_name"},
            [&](CsvWriter& w) {
                for (const auto& m : in.hp3.members) {
                    const auto i = m.member.value;
                    w << i << names[i] << coauthors[i] << authority[i] << static_cast<bool>(frequent[i]);
                    w.end_row();
                }
            });

    const auto success = success_reports(in.members, in.hp3, authority);
    out.csv("scatter_authority_success.csv", {"member", "name", "papers", "authority"}, [&](CsvWriter& w) {
        for (const auto& s : success) {
            w << s.member.value << names[s.member.value] << s.papers << s.authority;
            w.end_row();
        }
    });
    out.csv("scatter_trend_success.csv", {"member", "name", "papers", "x_s"}, [&](CsvWriter& w) {
        for (const auto& s : success) {
            w << s.member.value << names[s.member.value] << s.papers << s.x_s;
            w.end_row();
        }
    });

    out.csv("table1_hypotheses.csv",
            {"hypothesis", "determined", "x", "x_s", "raw_x", "raw_x_s", "chi_sq", "unconstrained_chi_sq", "terms",
             "parameters", "dof", "chi_sq_per_dof", "members", "note"},
            [&](CsvWriter& w) {
                for (const FitResult* f : in.fits.table()) {
                    w << to_string(f->hypothesis) << f->determined << f->x << f->x_s << f->raw_x << f->raw_x_s
                      << f->chi_sq << f->unconstrained_chi_sq << f->terms << f->parameters << f->dof
                      << f->chi_sq_per_dof << static_cast<std::uint64_t>(f->members) << f->note;
                    w.end_row();
                }
            });

    const auto census = case_census(in.hp3.members);
    out.csv("table2_cases.csv", {"case", "count", "fraction"}, [&](CsvWriter& w) {
        const double total = static_cast<double>(in.hp3.members.size());
        for (std::size_t c = 0; c < kCaseCount; ++c) {
            w << to_string(static_cast<Case>(c)) << census[c]
              << (total > 0 ? static_cast<double>(census[c]) / total : kNaN);
            w.end_row();
        }
    });

    out.csv("susceptibility_stats.csv",
            {"parameter", "members", "negative", "zero", "unit_interval", "above_one", "mean", "std", "min", "max"},
            [&](CsvWriter& w) {
                auto row = [&](const char* name, const std::vector<double>& raw, const std::vector<double>& proj) {
                    std::uint64_t neg = 0, zero = 0, unit = 0, above = 0;
                    for (double v : raw) {
                        if (std::abs(v) <= kZeroTolerance) {
                            ++zero;
                        } else if (v < 0) {
                            ++neg;
                        } else if (v <= 1.0) {
                            ++unit;
                        } else {
                            ++above;
                        }
                    }
                    const double t = raw.empty() ? kNaN : static_cast<double>(raw.size());
                    const auto [lo, hi] = proj.empty() ? std::pair{kNaN, kNaN}
                                                       : std::pair{*std::min_element(proj.begin(), proj.end()),
                                                                   *std::max_element(proj.begin(), proj.end())};
                    w << name << static_cast<std::uint64_t>(raw.size()) << static_cast<double>(neg) / t
                      << static_cast<double>(zero) / t << static_cast<double>(unit) / t
                      << static_cast<double>(above) / t << mean_of(proj) << std_of(proj) << lo << hi;
                    w.end_row();
                };
                row("x", raw_x, proj_x);
                row("x_s", raw_xs, proj_xs);
            });

    out.csv("correlations.csv", {"statistic", "value", "n"}, [&](CsvWriter& w) {
        std::vector<double> co, pap, auth, xs;
        for (const auto& m : in.hp3.members) co.push_back(static_cast<double>(coauthors[m.member.value]));
        for (const auto& s : success) {
            pap.push_back(static_cast<double>(s.papers));
            auth.push_back(s.authority);
            xs.push_back(s.x_s);
        }
        auto row = [&](const char* name, double v, std::size_t count) {
            w << name << v << static_cast<std::uint64_t>(count);
            w.end_row();
        };
        row("pearson_x_x_s_case_Ia", pearson(ia_x, ia_xs), ia_x.size());
        row("spearman_authority_coauthors", spearman(fitted_auth, co), co.size());
        row("spearman_authority_papers", spearman(auth, pap), pap.size());
        row("spearman_x_s_papers", spearman(xs, pap), pap.size());
        row("authority_mean", mean_of(fitted_auth), fitted_auth.size());
        row("authority_std", std_of(fitted_auth), fitted_auth.size());
        row("authority_max", fitted_auth.empty() ? kNaN : *std::max_element(fitted_auth.begin(), fitted_auth.end()),
            fitted_auth.size());
    });

    out.csv("top_authorities.csv",
            {"rank", "member", "name", "x", "x_s", "authority", "coauthors", "papers", "frequent_name"},
            [&](CsvWriter& w) {
                std::vector<const MemberFit*> order;
                for (const auto& m : in.hp3.members) order.push_back(&m);
                std::stable_sort(order.begin(), order.end(), [&](const MemberFit* a, const MemberFit* b) {
                    return authority[a->member.value] > authority[b->member.value];
                });
                for (std::size_t r = 0; r < std::min(order.size(), opt.top_authorities); ++r) {
                    const auto& m = *order[r];
                    const auto i = m.member.value;
                    w << static_cast<std::uint64_t>(r + 1) << i << names[i] << m.label.x.value_or(kNaN) << m.label.x_s
                      << authority[i] << coauthors[i] << in.members[i].papers << static_cast<bool>(frequent[i]);
                    w.end_row();
                }
            });

    out.csv("members.csv",
            {"member", "name", "papers", "indexed_papers", "coauthors", "treatable", "semantically_treatable", "case",
             "raw_x", "raw_x_s", "x", "x_s", "chi_sq", "unconstrained_chi_sq", "authority", "frequent_name",
             "skipped"},
            [&](CsvWriter& w) {
                std::vector<const MemberFit*> fit(n, nullptr);
                std::vector<const std::string*> skipped(n, nullptr);
                for (const auto& m : in.hp3.members) fit[m.member.value] = &m;
                for (const auto& s : in.hp3.skipped) skipped[s.member.value] = &s.reason;
                for (std::uint32_t i = 0; i < n; ++i) {
                    const auto& info = in.members[i];
                    w << i << info.name << info.papers << info.indexed_papers << coauthors[i] << info.treatable
                      << info.semantically_treatable;
                    if (const MemberFit* f = fit[i]) {
                        const auto& l = f->label;
                        w << to_string(l.label) << l.raw_x.value_or(kNaN) << l.raw_x_s.value_or(kNaN)
                          << l.x.value_or(kNaN) << l.x_s << f->chi_sq << f->unconstrained_chi_sq;
                    } else {
                        w << "" << kNaN << kNaN << kNaN << kNaN << kNaN << kNaN;
                    }
                    w << authority[i] << static_cast<bool>(frequent[i]) << (skipped[i] ? *skipped[i] : std::string());
                    w.end_row();
                }
            });

    return out.written_;
}

}  // namespace ssn
