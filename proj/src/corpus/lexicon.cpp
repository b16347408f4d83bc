#include "ssn/corpus/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ssn/util/errors.hpp"
#include "ssn/util/parallel.hpp"

namespace ssn {

std::vector<std::string> normalize_title(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
            current.push_back(ch);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string normalize_lexeme(std::string_view text) {
    std::string out;
    for (const auto& t : normalize_title(text)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

TopicLexicon::TopicLexicon(std::vector<TopicEntry> entries) {
    entries_.reserve(entries.size());
    trie_.emplace_back();
    for (auto& raw : entries) {
        TopicEntry e;
        e.canonical = normalize_lexeme(raw.canonical);
        if (e.canonical.empty()) {
            throw InputError("lexicon entry " + std::to_string(entries_.size()) + " has an empty lexeme");
        }
        for (const auto& a : raw.aliases) {
            auto n = normalize_lexeme(a);
            if (n.empty()) {
                throw InputError("lexicon entry '" + e.canonical + "' has an empty alias");
            }
            if (n != e.canonical && std::find(e.aliases.begin(), e.aliases.end(), n) == e.aliases.end()) {
                e.aliases.push_back(std::move(n));
            }
        }
        const TopicId id{static_cast<std::uint32_t>(entries_.size())};
        entries_.push_back(std::move(e));
        const auto& stored = entries_.back();
        for (const auto* lex : {&stored.canonical}) {
            by_lexeme_.emplace(*lex, id);
            insert(normalize_title(*lex), id);
        }
        for (const auto& a : stored.aliases) {
            by_lexeme_.emplace(a, id);
            insert(normalize_title(a), id);
        }
    }
}

void TopicLexicon::insert(const std::vector<std::string>& tokens, TopicId topic) {
    std::uint32_t node = 0;
    for (const auto& tok : tokens) {
        auto [tit, fresh] = token_ids_.emplace(tok, static_cast<std::uint32_t>(token_ids_.size()));
        auto& children = trie_[node].children;
        auto cit = children.find(tit->second);
        if (cit == children.end()) {
            const auto next = static_cast<std::uint32_t>(trie_.size());
            trie_[node].children.emplace(tit->second, next);
            trie_.emplace_back();
            node = next;
        } else {
            node = cit->second;
        }
    }
    if (trie_[node].topic < 0) trie_[node].topic = topic.value;
}

std::optional<TopicId> TopicLexicon::find(std::string_view lexeme) const {
    if (auto it = by_lexeme_.find(normalize_lexeme(lexeme)); it != by_lexeme_.end()) return it->second;
    return std::nullopt;
}

std::vector<TopicId> TopicLexicon::match(std::span<const std::string> tokens) const {
    std::vector<TopicId> found;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::uint32_t node = 0;
        std::size_t best_end = 0;
        std::int64_t best_topic = -1;
        for (std::size_t j = i; j < tokens.size(); ++j) {
            auto tit = token_ids_.find(tokens[j]);
            if (tit == token_ids_.end()) break;
            auto cit = trie_[node].children.find(tit->second);
            if (cit == trie_[node].children.end()) break;
            node = cit->second;
            if (trie_[node].topic >= 0) {
                best_topic = trie_[node].topic;
                best_end = j + 1;
            }
        }
        if (best_topic >= 0) {
            found.push_back(TopicId{static_cast<std::uint32_t>(best_topic)});
            i = best_end;
        } else {
            ++i;
        }
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

TopicLexicon load_lexicon(std::istream& in) {
    std::vector<TopicEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        TopicEntry e;
        std::size_t start = 0;
        bool canonical = true;
        while (true) {
            const auto bar = line.find('|', start);
            auto field = line.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
            if (normalize_lexeme(field).empty()) {
                throw InputError("lexicon line " + std::to_string(line_no) + ": empty lexeme");
            }
            if (canonical) {
                e.canonical = std::move(field);
                canonical = false;
            } else {
                e.aliases.push_back(std::move(field));
            }
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        entries.push_back(std::move(e));
    }
    return TopicLexicon(std::move(entries));
}

TopicLexicon load_lexicon_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon " + path.string());
    return load_lexicon(in);
}

std::vector<TopicId> index_title(std::string_view title, const TopicLexicon& lexicon) {
    const auto tokens = normalize_title(title);
    return lexicon.match(tokens);
}

namespace {

// General-purpose words that carry no domain interest.
const std::unordered_set<std::string>& stopword_like() {
    static const std::unordered_set<std::string> words = {
        "a",        "an",     "the",      "of",       "on",       "in",      "for",     "and",    "or",
        "to",       "with",   "by",       "from",     "at",       "as",      "is",      "are",    "its",
        "new",      "using",  "based",    "via",      "towards",  "toward",  "report",  "reports", "survey",
        "surveys",  "study",  "studies",  "analysis", "approach", "approaches", "method", "methods", "system",
        "systems",  "note",   "notes",    "paper",    "review",   "introduction", "overview", "case", "some",
        "editorial", "preface", "foreword"};
    return words;
}

}  // namespace

std::vector<LexiconWarning> validate_lexicon(const TopicLexicon& lexicon) {
    std::vector<LexiconWarning> out;
    std::unordered_map<std::string, TopicId> owner;
    std::vector<std::pair<std::string, TopicId>> all;
    for (std::uint32_t i = 0; i < lexicon.size(); ++i) {
        const TopicId id{i};
        const auto& e = lexicon.entry(id);
        std::vector<std::string> lexemes{e.canonical};
        lexemes.insert(lexemes.end(), e.aliases.begin(), e.aliases.end());
        for (const auto& lex : lexemes) {
            auto [it, fresh] = owner.emplace(lex, id);
            if (!fresh && it->second != id) {
                out.push_back({LexiconWarning::Kind::DuplicateLexeme, id, it->second, lex});
            } else if (fresh) {
                all.emplace_back(lex, id);
            }
        }
        if (e.canonical.find(' ') == std::string::npos && stopword_like().contains(e.canonical)) {
            out.push_back({LexiconWarning::Kind::StopwordLike, id, std::nullopt, e.canonical});
        }
    }
    // A lexeme that appears as a contiguous span inside a longer lexeme of
    // another entry.
    std::set<std::pair<std::uint32_t, std::uint32_t>> reported;
    for (const auto& [lex, id] : all) {
        const auto tokens = normalize_title(lex);
        for (std::size_t b = 0; b < tokens.size(); ++b) {
            std::string span;
            for (std::size_t e = b; e < tokens.size(); ++e) {
                if (e > b) span.push_back(' ');
                span += tokens[e];
                if (b == 0 && e + 1 == tokens.size()) continue;
                auto it = owner.find(span);
                if (it == owner.end() || it->second == id) continue;
                if (reported.emplace(it->second.value, id.value).second) {
                    out.push_back({LexiconWarning::Kind::SubsequenceOfOther, it->second, id, span});
                }
            }
        }
    }
    return out;
}

double lexicon_coverage(std::span<const CorpusEvent> events, const TopicLexicon& lexicon) {
    if (events.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& ev : events) {
        if (!index_title(ev.title, lexicon).empty()) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(events.size());
}

void index_events(std::span<CorpusEvent> events, const TopicLexicon& lexicon, unsigned jobs) {
    parallel_for(events.size(), jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& ev = events[i];
            ev.topics.clear();
            for (TopicId t : index_title(ev.title, lexicon)) ev.topics.push_back(lexicon.canonical(t));
        }
    });
}

}  // namespace ssn
