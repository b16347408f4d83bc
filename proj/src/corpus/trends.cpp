#include "ssn/corpus/trends.hpp"

#include <algorithm>
#include <cmath>

namespace ssn {

const TrendYear* TrendSeries::at(int year) const {
    auto it = std::lower_bound(years_.begin(), years_.end(), year,
                               [](const TrendYear& y, int v) { return y.year < v; });
    return (it != years_.end() && it->year == year) ? &*it : nullptr;
}

std::map<int, InterestProfile> TrendSeries::source_schedule() const {
    std::map<int, InterestProfile> out;
    for (const auto& y : years_) {
        if (y.share) out.emplace(y.year, *y.share);
    }
    return out;
}

double shannon_entropy(const InterestProfile& shares) {
    double h = 0.0;
    for (const auto& e : shares.entries()) {
        if (e.weight > 0.0) h -= e.weight * std::log(e.weight);
    }
    return h;
}

TrendSeries compute_trends(const IndexedCorpus& corpus) {
    std::vector<TrendYear> years;
    if (corpus.empty()) return TrendSeries{};
    std::vector<std::uint64_t> counts(corpus.topic_count, 0);
    std::size_t seen = 0;
    std::uint64_t occurrences = 0;
    std::uint64_t events = 0;
    std::size_t next = 0;
    for (int year = corpus.first_year; year <= corpus.last_year; ++year) {
        for (; next < corpus.events.size() && corpus.events[next].year == year; ++next) {
            ++events;
            for (TopicId t : corpus.events[next].topics) {
                if (counts[t.value]++ == 0) ++seen;
                ++occurrences;
            }
        }
        TrendYear ty;
        ty.year = year;
        ty.counts = counts;
        ty.topics_seen = seen;
        ty.occurrences = occurrences;
        ty.events = events;
        if (occurrences > 0) {
            std::vector<ProfileEntry> entries;
            entries.reserve(seen);
            const double total = static_cast<double>(occurrences);
            for (std::uint32_t k = 0; k < counts.size(); ++k) {
                if (counts[k] > 0) entries.push_back({TopicId{k}, static_cast<double>(counts[k]) / total});
            }
            ty.share = InterestProfile::from_entries(corpus.topic_count, std::move(entries));
            ty.average_frequency = total / static_cast<double>(seen);
            ty.entropy = shannon_entropy(*ty.share);
        }
        years.push_back(std::move(ty));
    }
    return TrendSeries(std::move(years));
}

TrendSeries compute_trends(std::span<const CorpusEvent> events, const TopicLexicon& lexicon) {
    return compute_trends(resolve_corpus(events, lexicon, true));
}

}  // namespace ssn
