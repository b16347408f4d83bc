#pragma once

#include <span>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/members.hpp"
#include "ssn/corpus/event.hpp"
#include "ssn/corpus/lexicon.hpp"

namespace ssn {

struct IndexedEvent {
    int year = 0;
    PublicationKind kind = PublicationKind::Other;
    std::vector<MemberId> authors;  // sorted, unique
    std::vector<TopicId> topics;    // sorted, unique
};

// Events resolved against a member directory and a lexicon.
struct IndexedCorpus {
    MemberDirectory members;
    std::size_t topic_count = 0;
    std::vector<IndexedEvent> events;  // sorted by year, stable
    int first_year = 0;
    int last_year = -1;

    bool empty() const { return events.empty(); }
};

// Topics come from each event's `topics` field (canonical lexemes, looked up
// in the lexicon; unknown lexemes throw InputError). Events whose topics were
// never filled are matched from the title instead when `index_missing` is set.
IndexedCorpus resolve_corpus(std::span<const CorpusEvent> events, const TopicLexicon& lexicon,
                             bool index_missing = false);

}  // namespace ssn
