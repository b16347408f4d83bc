#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ssn/corpus/event.hpp"

namespace ssn {

// Newline-delimited JSON, one event per line:
//   {"authors":[...],"kind":"article","title":"...","topics":[...],"year":2001}
// Keys are sorted and numbers printed minimally, so writing a log that was
// just read reproduces it byte for byte.
std::string event_to_json_line(const CorpusEvent& event);
CorpusEvent event_from_json_line(std::string_view line);  // throws InputError

void write_event_log(std::ostream& out, std::span<const CorpusEvent> events);
std::vector<CorpusEvent> read_event_log(std::istream& in);
void write_event_log_file(const std::filesystem::path& path, std::span<const CorpusEvent> events);
std::vector<CorpusEvent> read_event_log_file(const std::filesystem::path& path);

}  // namespace ssn
