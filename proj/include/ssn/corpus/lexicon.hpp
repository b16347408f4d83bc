#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/corpus/event.hpp"

namespace ssn {

// Lowercase (ASCII), every non-alphanumeric ASCII byte becomes a separator,
// split on runs of separators. Bytes >= 0x80 are kept verbatim so UTF-8
// letters stay inside tokens. No stemming.
std::vector<std::string> normalize_title(std::string_view text);

// Tokens joined by single spaces.
std::string normalize_lexeme(std::string_view text);

struct TopicEntry {
    std::string canonical;             // normalized
    std::vector<std::string> aliases;  // normalized, excluding the canonical form
};

// The basic topic set C. Topic ids follow entry order.
class TopicLexicon {
public:
    TopicLexicon() = default;
    // Lexemes are normalized on the way in. Throws InputError on a lexeme with
    // no tokens. When two entries share a lexeme the lower id keeps it for
    // matching (validate_lexicon reports the clash).
    explicit TopicLexicon(std::vector<TopicEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const TopicEntry& entry(TopicId id) const { return entries_.at(id.value); }
    const std::string& canonical(TopicId id) const { return entries_.at(id.value).canonical; }
    const std::vector<TopicEntry>& entries() const { return entries_; }

    // Lookup by any lexeme (canonical or alias), after normalization.
    std::optional<TopicId> find(std::string_view lexeme) const;

    // Leftmost-longest matching over normalized title tokens. Each token span is
    // consumed by at most one topic; the result is sorted and duplicate-free.
    std::vector<TopicId> match(std::span<const std::string> tokens) const;

private:
    struct Node {
        std::unordered_map<std::uint32_t, std::uint32_t> children;  // token id -> node
        std::int64_t topic = -1;
    };

    std::vector<TopicEntry> entries_;
    std::unordered_map<std::string, TopicId> by_lexeme_;
    std::unordered_map<std::string, std::uint32_t> token_ids_;
    std::vector<Node> trie_;

    void insert(const std::vector<std::string>& tokens, TopicId topic);
};

// One topic per line: canonical lexeme, then optional aliases separated by
// '|'. Blank lines and lines starting with '#' are ignored.
TopicLexicon load_lexicon(std::istream& in);
TopicLexicon load_lexicon_file(const std::filesystem::path& path);

std::vector<TopicId> index_title(std::string_view title, const TopicLexicon& lexicon);

struct LexiconWarning {
    enum class Kind { DuplicateLexeme, SubsequenceOfOther, StopwordLike };

    Kind kind;
    TopicId topic;
    std::optional<TopicId> other;
    std::string lexeme;
};

// Flags lexemes shared by two entries, lexemes that are strict contiguous
// token subsequences of another entry's lexeme, and single-token entries that
// look like general-purpose words.
std::vector<LexiconWarning> validate_lexicon(const TopicLexicon& lexicon);

// Fraction of events whose title matches at least one topic.
double lexicon_coverage(std::span<const CorpusEvent> events, const TopicLexicon& lexicon);

// Fills `topics` (canonical lexemes) for every event from its title.
void index_events(std::span<CorpusEvent> events, const TopicLexicon& lexicon, unsigned jobs = 1);

}  // namespace ssn
