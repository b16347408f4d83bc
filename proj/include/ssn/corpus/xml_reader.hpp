#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <vector>

#include "ssn/corpus/event.hpp"
#include "ssn/util/errors.hpp"

namespace ssn {

// Malformed XML; carries the byte offset at which the parser gave up.
class CorpusParseError : public InputError {
public:
    CorpusParseError(const std::string& what, std::uint64_t byte_offset)
        : InputError(what + " at byte " + std::to_string(byte_offset)), byte_offset_(byte_offset) {}
    std::uint64_t byte_offset() const { return byte_offset_; }

private:
    std::uint64_t byte_offset_;
};

struct ParseStats {
    std::uint64_t records = 0;
    std::uint64_t kept = 0;
    std::uint64_t dropped_year = 0;    // missing, unparsable or outside the window
    std::uint64_t dropped_kind = 0;
    std::uint64_t dropped_authors = 0;  // no <author> children
};

// Streams a DBLP-style document: every child element of the root is a record
// (<article>, <inproceedings>, <incollection>, anything else -> Other) with
// <author>, <title> and <year> children. Title markup is flattened to text.
// Named character entities from the DBLP DTD (Latin-1 set) are resolved
// without reading the DTD.
//
// Single pass over fixed-size chunks; the document is never held in memory.
// Events reach `sink` in document order.
ParseStats parse_corpus(std::istream& in, const CorpusFilter& filter,
                        const std::function<void(CorpusEvent&&)>& sink);

std::vector<CorpusEvent> parse_corpus(std::istream& in, const CorpusFilter& filter, ParseStats* stats = nullptr);

}  // namespace ssn
