#include "ssn/profiling/profile_series.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ssn/util/errors.hpp"

namespace ssn {

ProfileSeries::ProfileSeries(std::size_t member_count, std::size_t topic_count)
    : topic_count_(topic_count), timelines_(member_count), treatable_(member_count, false), trivial_(topic_count) {}

void ProfileSeries::append(MemberId m, int year, InterestProfile shares, TopicCounts counts) {
    auto& tl = timelines_.at(m.value);
    if (!tl.empty() && tl.back().year >= year) {
        throw std::invalid_argument("profile snapshots must advance in time (member " + std::to_string(m.value) + ")");
    }
    if (shares.dimension() != topic_count_) throw DimensionMismatch(topic_count_, shares.dimension());
    tl.push_back({year, std::move(shares), std::move(counts)});
}

const ProfileSnapshot* ProfileSeries::snapshot_at(MemberId m, int year) const {
    const auto& tl = timelines_.at(m.value);
    auto it = std::upper_bound(tl.begin(), tl.end(), year, [](int y, const ProfileSnapshot& s) { return y < s.year; });
    if (it == tl.begin()) return nullptr;
    return &*std::prev(it);
}

const InterestProfile& ProfileSeries::shares_at(MemberId m, int year) const {
    const auto* s = snapshot_at(m, year);
    return s ? s->shares : trivial_;
}

std::vector<TreatabilityRecord> treatability(const IndexedCorpus& corpus) {
    std::vector<TreatabilityRecord> out(corpus.members.size());
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i].member = MemberId{i};
    for (const auto& ev : corpus.events) {
        for (MemberId a : ev.authors) {
            auto& r = out[a.value];
            ++r.publications;
            if (r.active_years.empty() || r.active_years.back() != ev.year) r.active_years.push_back(ev.year);
            if (!ev.topics.empty() && (r.indexed_years.empty() || r.indexed_years.back() != ev.year)) {
                r.indexed_years.push_back(ev.year);
            }
        }
    }
    for (auto& r : out) {
        r.treatable = r.active_years.size() >= 2;
        r.semantically_treatable = r.treatable && r.indexed_years.size() >= 2;
    }
    return out;
}

ProfileSeries build_profiles(const IndexedCorpus& corpus) {
    ProfileSeries series(corpus.members.size(), corpus.topic_count);
    // Running counts per member, applied year by year (events are year-sorted).
    std::vector<TopicCounts> running(corpus.members.size());
    std::size_t i = 0;
    while (i < corpus.events.size()) {
        const int year = corpus.events[i].year;
        std::vector<MemberId> touched;
        for (; i < corpus.events.size() && corpus.events[i].year == year; ++i) {
            const auto& ev = corpus.events[i];
            if (ev.topics.empty()) continue;
            for (MemberId a : ev.authors) {
                auto& rc = running[a.value];
                for (TopicId t : ev.topics) rc.emplace_back(t, 1);
                touched.push_back(a);
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (MemberId a : touched) {
            auto& rc = running[a.value];
            std::sort(rc.begin(), rc.end());
            TopicCounts merged;
            merged.reserve(rc.size());
            for (const auto& [t, c] : rc) {
                if (!merged.empty() && merged.back().first == t) merged.back().second += c;
                else merged.emplace_back(t, c);
            }
            rc = merged;
            std::uint64_t total = 0;
            for (const auto& tc : merged) total += tc.second;
            std::vector<ProfileEntry> entries;
            entries.reserve(merged.size());
            for (const auto& [t, c] : merged) {
                entries.push_back({t, static_cast<double>(c) / static_cast<double>(total)});
            }
            series.append(a, year, InterestProfile::from_entries(corpus.topic_count, std::move(entries)),
                          std::move(merged));
        }
    }
    for (const auto& r : treatability(corpus)) series.set_semantically_treatable(r.member, r.semantically_treatable);
    return series;
}

std::optional<InterestProfile> neighbor_average(MemberId member, int year, const GraphSeries& graph,
                                                const ProfileSeries& profiles) {
    std::vector<const InterestProfile*> rows;
    graph.for_each_neighbor(member, year, [&](MemberId j) { rows.push_back(&profiles.shares_at(j, year)); });
    if (rows.empty()) return std::nullopt;
    std::vector<double> scratch(profiles.topic_count(), 0.0);
    std::vector<std::uint32_t> support;
    return running_mean(rows, scratch, support, profiles.topic_count());
}

InterestProfile running_mean(std::span<const InterestProfile* const> rows, std::span<double> scratch,
                             std::vector<std::uint32_t>& support, std::size_t dimension) {
    support.clear();
    for (const auto* r : rows) {
        for (const auto& e : r->entries()) support.push_back(e.topic.value);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    // Incremental mean over the union support: exact when every row is equal.
    std::vector<double> mean(support.size(), 0.0);
    std::size_t k = 0;
    for (const auto* r : rows) {
        ++k;
        for (const auto& e : r->entries()) scratch[e.topic.value] = e.weight;
        const double inv = static_cast<double>(k);
        for (std::size_t s = 0; s < support.size(); ++s) {
            mean[s] += (scratch[support[s]] - mean[s]) / inv;
        }
        for (const auto& e : r->entries()) scratch[e.topic.value] = 0.0;
    }
    std::vector<ProfileEntry> entries;
    entries.reserve(support.size());
    for (std::size_t s = 0; s < support.size(); ++s) {
        if (mean[s] != 0.0) entries.push_back({TopicId{support[s]}, mean[s]});
    }
    return InterestProfile::from_entries(dimension, std::move(entries));
}

}  // namespace ssn
