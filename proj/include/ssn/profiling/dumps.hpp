#pragma once

#include <filesystem>
#include <iosfwd>

#include "ssn/core/members.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/trends.hpp"
#include "ssn/profiling/deviations.hpp"
#include "ssn/profiling/profile_series.hpp"

namespace ssn {

// Newline-delimited JSON, one snapshot per line, ordered by (member, year):
// {"member": id, "name": "...", "year": t, "shares": {"topic": weight},
//  "counts": {"topic": n}, "treatable": bool}
// `names` may be null; "name" is then omitted.
void write_profile_dump(std::ostream& out, const ProfileSeries& profiles, const MemberDirectory* names = nullptr);
// Throws InputError with the line number on malformed input.
ProfileSeries read_profile_dump(std::istream& in, std::size_t member_count, std::size_t topic_count);

// One block per line: {"member", "year", "neighbors", "gram": {...}, "entries": [[topic, d, N, S], ...]}
void write_deviation_dump(std::ostream& out, const Deviations& deviations);
Deviations read_deviation_dump(std::istream& in, std::size_t topic_count);

// One member per line: {"member", "since", "links": [[other, since], ...]};
// members that never appear are omitted.
void write_graph_dump(std::ostream& out, const GraphSeries& graph);
GraphSeries read_graph_dump(std::istream& in, std::size_t member_count);

// One year per line: {"year", "counts": {"topic": n}, "events", "share": {...} | null}.
// Derived fields (topics seen, entropy, average frequency) are recomputed on read.
void write_trend_dump(std::ostream& out, const TrendSeries& trends);
TrendSeries read_trend_dump(std::istream& in, std::size_t topic_count);
// Trend rows holding only a share per year (counts unknown).
TrendSeries trends_from_schedule(const std::map<int, InterestProfile>& schedule);

}  // namespace ssn
