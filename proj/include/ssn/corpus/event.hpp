#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ssn {

enum class PublicationKind { JournalArticle, ConferencePaper, BookChapter, Other };

// "article", "inproceedings", "incollection", "other"
std::string_view to_string(PublicationKind kind);
// Maps record element names; anything unrecognized becomes Other.
PublicationKind kind_from_tag(std::string_view tag);
// Strict inverse of to_string, also accepting the long names
// ("journal", "conference", "chapter"). nullopt when unknown.
std::optional<PublicationKind> parse_kind(std::string_view name);

// One dated publication: a raw expression of interest by each author.
// `topics` holds canonical lexemes once the title has been indexed.
struct CorpusEvent {
    int year = 0;
    PublicationKind kind = PublicationKind::Other;
    std::vector<std::string> authors;
    std::string title;
    std::vector<std::string> topics;

    bool operator==(const CorpusEvent&) const = default;
};

struct CorpusFilter {
    int from_year = 1950;
    int to_year = 2012;
    std::vector<PublicationKind> kinds;  // empty: every kind

    bool accepts_year(int year) const { return year >= from_year && year <= to_year; }
    bool accepts_kind(PublicationKind kind) const;
};

}  // namespace ssn
