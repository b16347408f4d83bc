#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/trends.hpp"
#include "ssn/estimation/fit_io.hpp"

namespace ssn {

// Shortest decimal form that reads back to the same double; "nan", "inf", "-inf".
std::string format_number(double v);

struct Provenance {
    std::string version;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // name -> sha256
    // "# ssn <version> seed=<seed> inputs=name:digest,..."
    std::string comment_line() const;
};

// Writes the provenance comment and the header row on construction.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const Provenance& provenance, const std::vector<std::string>& header);
    CsvWriter& operator<<(std::string_view text);
    CsvWriter& operator<<(const char* text) { return *this << std::string_view(text); }
    CsvWriter& operator<<(const std::string& text) { return *this << std::string_view(text); }
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(std::uint64_t v);
    CsvWriter& operator<<(std::int64_t v);
    CsvWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
    CsvWriter& operator<<(std::uint32_t v) { return *this << static_cast<std::uint64_t>(v); }
    CsvWriter& operator<<(bool v) { return *this << std::string_view(v ? "1" : "0"); }
    void end_row();

private:
    void separator();
    std::ostream& out_;
    std::size_t columns_;
    std::size_t cell_ = 0;
};

// Equal-width bins over [lo, hi]; hi itself falls in the last bin. Values
// below lo or above hi are counted in underflow / overflow, so total() always
// equals the number of values. Throws std::invalid_argument on NaN input or
// an empty range.
struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0, overflow = 0;
    std::uint64_t total() const;
};
Histogram make_histogram(std::span<const double> values, double lo, double hi, std::size_t bins);

struct Histogram2D {
    Histogram x_axis, y_axis;          // bin layout only, counts unused
    std::vector<std::uint64_t> counts;  // row-major, x major
    std::uint64_t outside = 0;          // either coordinate out of range
    std::uint64_t total() const;
};
Histogram2D make_histogram_2d(std::span<const double> xs, std::span<const double> ys, double lo_x, double hi_x,
                              double lo_y, double hi_y, std::size_t bins);

double pearson(std::span<const double> a, std::span<const double> b);
// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

// Plain full names, one per line, plus optional "[given]" and "[family]"
// sections whose cross product adds "given family" names. '#' starts a comment.
class FrequentNames {
public:
    FrequentNames() = default;
    void add(std::string_view full_name);
    bool contains(std::string_view display_name) const;
    bool empty() const { return names_.empty(); }
    std::size_t size() const { return names_.size(); }

private:
    std::unordered_set<std::string> names_;
};
FrequentNames load_frequent_names(std::istream& in);
FrequentNames load_frequent_names_file(const std::filesystem::path& path);

// Whitespace runs collapse and a trailing homonym number ("Wei Wang 0003")
// is dropped before matching.
std::vector<bool> flag_frequent_names(std::span<const std::string> display_names, const FrequentNames& names);

// a_i = sum over the neighbors j of i of the fitted x_j. Members without a
// determined x contribute 0.
std::vector<double> fitted_authorities(const Hp3Result& hp3, const SocialGraph& graph);

struct MemberInfo {
    std::string name;
    std::uint64_t papers = 0;
    std::uint64_t indexed_papers = 0;
    bool treatable = false;
    bool semantically_treatable = false;
};

struct SuccessPoint {
    MemberId member;
    std::uint64_t papers = 0;  // success index
    double authority = 0.0;
    double x_s = 0.0;
};

// Semantically treatable members with a fit and at least one paper.
std::vector<SuccessPoint> success_reports(std::span<const MemberInfo> members, const Hp3Result& hp3,
                                          std::span<const double> authority);

struct ReportOptions {
    std::size_t bins = 50;
    double raw_lo = -1.0, raw_hi = 2.0;  // range for unconstrained estimates
    std::size_t top_authorities = 20;
};

struct ReportInputs {
    Provenance provenance;
    std::vector<MemberInfo> members;
    TrendSeries trends;
    GraphSeries graph;
    FitBundle fits;
    Hp3Result hp3;
    FrequentNames frequent_names;
    ReportOptions options;
};

// Writes every report file into `dir` and returns their names in write order.
std::vector<std::string> write_report_bundle(const std::filesystem::path& dir, const ReportInputs& in);

}  // namespace ssn
