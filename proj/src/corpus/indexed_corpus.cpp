#include "ssn/corpus/indexed_corpus.hpp"

#include <algorithm>

#include "ssn/util/errors.hpp"

namespace ssn {

IndexedCorpus resolve_corpus(std::span<const CorpusEvent> events, const TopicLexicon& lexicon, bool index_missing) {
    IndexedCorpus corpus;
    corpus.topic_count = lexicon.size();
    corpus.events.reserve(events.size());
    for (const auto& ev : events) {
        IndexedEvent ie;
        ie.year = ev.year;
        ie.kind = ev.kind;
        for (const auto& name : ev.authors) ie.authors.push_back(corpus.members.intern(name));
        std::sort(ie.authors.begin(), ie.authors.end());
        ie.authors.erase(std::unique(ie.authors.begin(), ie.authors.end()), ie.authors.end());
        if (ev.topics.empty() && index_missing) {
            ie.topics = index_title(ev.title, lexicon);
        } else {
            for (const auto& lex : ev.topics) {
                auto id = lexicon.find(lex);
                if (!id) throw InputError("event topic '" + lex + "' is not in the lexicon");
                ie.topics.push_back(*id);
            }
            std::sort(ie.topics.begin(), ie.topics.end());
            ie.topics.erase(std::unique(ie.topics.begin(), ie.topics.end()), ie.topics.end());
        }
        corpus.events.push_back(std::move(ie));
    }
    std::stable_sort(corpus.events.begin(), corpus.events.end(),
                     [](const IndexedEvent& a, const IndexedEvent& b) { return a.year < b.year; });
    if (!corpus.events.empty()) {
        corpus.first_year = corpus.events.front().year;
        corpus.last_year = corpus.events.back().year;
    }
    return corpus;
}

}  // namespace ssn
