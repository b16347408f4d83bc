#include "ssn/corpus/event_log.hpp"

#include <fstream>

#include "json.hpp"
#include "ssn/util/errors.hpp"

namespace ssn {

using nlohmann::json;

std::string event_to_json_line(const CorpusEvent& event) {
    json j;
    j["year"] = event.year;
    j["kind"] = std::string(to_string(event.kind));
    j["authors"] = event.authors;
    j["title"] = event.title;
    j["topics"] = event.topics;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

CorpusEvent event_from_json_line(std::string_view line) {
    CorpusEvent ev;
    try {
        const auto j = json::parse(line);
        ev.year = j.at("year").get<int>();
        const auto kind = j.at("kind").get<std::string>();
        ev.kind = kind_from_tag(kind);
        ev.authors = j.at("authors").get<std::vector<std::string>>();
        if (j.contains("title")) ev.title = j.at("title").get<std::string>();
        if (j.contains("topics")) ev.topics = j.at("topics").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad event record: ") + e.what());
    }
    if (ev.authors.empty()) throw InputError("bad event record: no authors");
    return ev;
}

void write_event_log(std::ostream& out, std::span<const CorpusEvent> events) {
    for (const auto& ev : events) out << event_to_json_line(ev) << '\n';
}

std::vector<CorpusEvent> read_event_log(std::istream& in) {
    std::vector<CorpusEvent> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(event_from_json_line(line));
        } catch (const InputError& e) {
            throw InputError("event log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_event_log_file(const std::filesystem::path& path, std::span<const CorpusEvent> events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_event_log(out, events);
}

std::vector<CorpusEvent> read_event_log_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open event log " + path.string());
    return read_event_log(in);
}

}  // namespace ssn
