#include "ssn/corpus/event.hpp"

#include <algorithm>

namespace ssn {

std::string_view to_string(PublicationKind kind) {
    switch (kind) {
        case PublicationKind::JournalArticle: return "article";
        case PublicationKind::ConferencePaper: return "inproceedings";
        case PublicationKind::BookChapter: return "incollection";
        case PublicationKind::Other: return "other";
    }
    return "other";
}

PublicationKind kind_from_tag(std::string_view tag) {
    return parse_kind(tag).value_or(PublicationKind::Other);
}

std::optional<PublicationKind> parse_kind(std::string_view name) {
    if (name == "article" || name == "journal") return PublicationKind::JournalArticle;
    if (name == "inproceedings" || name == "conference") return PublicationKind::ConferencePaper;
    if (name == "incollection" || name == "chapter") return PublicationKind::BookChapter;
    if (name == "other") return PublicationKind::Other;
    return std::nullopt;
}

bool CorpusFilter::accepts_kind(PublicationKind kind) const {
    return kinds.empty() || std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

}  // namespace ssn
