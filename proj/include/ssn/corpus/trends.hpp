#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ssn/core/profile.hpp"
#include "ssn/corpus/event.hpp"
#include "ssn/corpus/indexed_corpus.hpp"
#include "ssn/corpus/lexicon.hpp"

namespace ssn {

// Topic statistics for one year, cumulative over every event up to and
// including that year. One occurrence per (event, topic) pair.
struct TrendYear {
    int year = 0;
    std::vector<std::uint64_t> counts;  // nu(c_k, t)
    std::size_t topics_seen = 0;        // n_c(t)
    std::uint64_t occurrences = 0;      // sum_k nu(c_k, t)
    std::uint64_t events = 0;           // events up to t, indexed or not
    // Absent until the first indexed occurrence.
    std::optional<InterestProfile> share;       // xi_s(., t)
    std::optional<double> average_frequency;    // sum nu / n_c
    std::optional<double> entropy;              // -sum xi ln xi
};

class TrendSeries {
public:
    TrendSeries() = default;
    explicit TrendSeries(std::vector<TrendYear> years) : years_(std::move(years)) {}

    const std::vector<TrendYear>& years() const { return years_; }
    const TrendYear* at(int year) const;

    // year -> xi_s for every year where it is defined; the trend source L_s.
    std::map<int, InterestProfile> source_schedule() const;

private:
    std::vector<TrendYear> years_;
};

double shannon_entropy(const InterestProfile& shares);

// One row per year from the first to the last event year.
TrendSeries compute_trends(const IndexedCorpus& corpus);
TrendSeries compute_trends(std::span<const CorpusEvent> events, const TopicLexicon& lexicon);

}  // namespace ssn
