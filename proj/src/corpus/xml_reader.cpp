#include "ssn/corpus/xml_reader.hpp"

#include <expat.h>

#include <array>
#include <charconv>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

namespace ssn {

namespace {

// HTML 4 Latin-1 entity names for code points 160..255, in order.
constexpr std::array<const char*, 96> kLatin1Entities = {
    "nbsp",   "iexcl",  "cent",   "pound",  "curren", "yen",    "brvbar", "sect",   "uml",    "copy",   "ordf",
    "laquo",  "not",    "shy",    "reg",    "macr",   "deg",    "plusmn", "sup2",   "sup3",   "acute",  "micro",
    "para",   "middot", "cedil",  "sup1",   "ordm",   "raquo",  "frac14", "frac12", "frac34", "iquest", "Agrave",
    "Aacute", "Acirc",  "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil", "Egrave", "Eacute", "Ecirc",  "Euml",
    "Igrave", "Iacute", "Icirc",  "Iuml",   "ETH",    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde", "Ouml",
    "times",  "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",  "szlig",  "agrave", "aacute",
    "acirc",  "atilde", "auml",   "aring",  "aelig",  "ccedil", "egrave", "eacute", "ecirc",  "euml",   "igrave",
    "iacute", "icirc",  "iuml",   "eth",    "ntilde", "ograve", "oacute", "ocirc",  "otilde", "ouml",   "divide",
    "oslash", "ugrave", "uacute", "ucirc",  "uuml",   "yacute", "thorn",  "yuml"};

const std::unordered_map<std::string, std::string>& entity_table() {
    static const auto table = [] {
        std::unordered_map<std::string, std::string> t;
        for (std::size_t i = 0; i < kLatin1Entities.size(); ++i) {
            const unsigned cp = 160 + static_cast<unsigned>(i);
            std::string utf8;
            utf8.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            utf8.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            t.emplace(kLatin1Entities[i], std::move(utf8));
        }
        return t;
    }();
    return table;
}

enum class Field { None, Author, Title, Year };

struct ParserState {
    const CorpusFilter* filter = nullptr;
    ParseStats stats;
    int depth = 0;
    bool in_record = false;
    Field field = Field::None;
    int field_depth = 0;
    std::string text;
    std::string record_tag;
    std::string year_text;
    CorpusEvent current;
    std::vector<CorpusEvent> ready;

    void append(std::string_view s) {
        if (field != Field::None) text.append(s);
    }
};

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Title text keeps inner markup's characters; whitespace runs collapse.
std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : trim(s)) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            pending_space = true;
        } else {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char**) {
    auto& st = *static_cast<ParserState*>(data);
    ++st.depth;
    if (st.depth == 2) {
        st.in_record = true;
        st.record_tag = name;
        st.current = CorpusEvent{};
        st.year_text.clear();
        return;
    }
    if (st.in_record && st.depth == 3 && st.field == Field::None) {
        const std::string_view tag(name);
        if (tag == "author") st.field = Field::Author;
        else if (tag == "title") st.field = Field::Title;
        else if (tag == "year") st.field = Field::Year;
        if (st.field != Field::None) {
            st.field_depth = st.depth;
            st.text.clear();
        }
    }
}

void finish_record(ParserState& st) {
    ++st.stats.records;
    st.current.kind = kind_from_tag(st.record_tag);
    int year = 0;
    const auto yt = trim(st.year_text);
    const auto* end = yt.data() + yt.size();
    const auto [ptr, ec] = std::from_chars(yt.data(), end, year);
    if (yt.empty() || ec != std::errc{} || ptr != end || !st.filter->accepts_year(year)) {
        ++st.stats.dropped_year;
        return;
    }
    if (!st.filter->accepts_kind(st.current.kind)) {
        ++st.stats.dropped_kind;
        return;
    }
    if (st.current.authors.empty()) {
        ++st.stats.dropped_authors;
        return;
    }
    st.current.year = year;
    ++st.stats.kept;
    st.ready.push_back(std::move(st.current));
}

void XMLCALL on_end(void* data, const XML_Char*) {
    auto& st = *static_cast<ParserState*>(data);
    if (st.field != Field::None && st.depth == st.field_depth) {
        switch (st.field) {
            case Field::Author: {
                auto name = collapse_whitespace(st.text);
                if (!name.empty()) st.current.authors.push_back(std::move(name));
                break;
            }
            case Field::Title: st.current.title = collapse_whitespace(st.text); break;
            case Field::Year: st.year_text = st.text; break;
            case Field::None: break;
        }
        st.field = Field::None;
    }
    if (st.depth == 2 && st.in_record) {
        finish_record(st);
        st.in_record = false;
    }
    --st.depth;
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
    static_cast<ParserState*>(data)->append(std::string_view(s, static_cast<std::size_t>(len)));
}

void XMLCALL on_skipped_entity(void* data, const XML_Char* name, int is_parameter_entity) {
    if (is_parameter_entity) return;
    auto& st = *static_cast<ParserState*>(data);
    const auto& table = entity_table();
    if (auto it = table.find(name); it != table.end()) {
        st.append(it->second);
    } else {
        st.append("&");
        st.append(name);
        st.append(";");
    }
}

struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

ParseStats parse_corpus(std::istream& in, const CorpusFilter& filter,
                        const std::function<void(CorpusEvent&&)>& sink) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(XML_ParserCreate(nullptr));
    if (!parser) throw std::runtime_error("cannot create XML parser");
    ParserState st;
    st.filter = &filter;
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    XML_SetSkippedEntityHandler(parser.get(), on_skipped_entity);

    std::array<char, 1 << 16> buf{};
    bool done = false;
    while (!done) {
        in.read(buf.data(), buf.size());
        const auto got = in.gcount();
        done = got == 0 || in.eof();
        if (in.bad()) throw InputError("read error while parsing corpus");
        if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got), done) == XML_STATUS_ERROR) {
            const auto offset = XML_GetCurrentByteIndex(parser.get());
            throw CorpusParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                                   offset < 0 ? 0 : static_cast<std::uint64_t>(offset));
        }
        for (auto& ev : st.ready) sink(std::move(ev));
        st.ready.clear();
    }
    return st.stats;
}

std::vector<CorpusEvent> parse_corpus(std::istream& in, const CorpusFilter& filter, ParseStats* stats) {
    std::vector<CorpusEvent> out;
    auto s = parse_corpus(in, filter, [&](CorpusEvent&& ev) { out.push_back(std::move(ev)); });
    if (stats) *stats = s;
    return out;
}

}  // namespace ssn
