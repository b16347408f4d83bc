#include "ssn/profiling/dumps.hpp"

#include <istream>
#include <ostream>
#include <algorithm>
#include <string>

#include "json.hpp"

#include "ssn/util/errors.hpp"

namespace ssn {

using nlohmann::json;

namespace {

template <typename F>
void for_each_line(std::istream& in, const char* what, F&& f) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(json::parse(line));
        } catch (const json::exception& e) {
            throw InputError(std::string(what) + " line " + std::to_string(no) + ": " + e.what());
        } catch (const std::out_of_range& e) {
            throw InputError(std::string(what) + " line " + std::to_string(no) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string(what) + " line " + std::to_string(no) + ": " + e.what());
        }
    }
}

TopicId parse_topic(const std::string& key) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(key, &used);
    if (used != key.size()) throw std::invalid_argument("bad topic key '" + key + "'");
    return TopicId{static_cast<std::uint32_t>(v)};
}

}  // namespace

void write_profile_dump(std::ostream& out, const ProfileSeries& profiles, const MemberDirectory* names) {
    for (std::uint32_t i = 0; i < profiles.member_count(); ++i) {
        const MemberId m{i};
        for (const auto& s : profiles.snapshots(m)) {
            json j;
            j["member"] = i;
            if (names) j["name"] = names->display_name(m);
            j["year"] = s.year;
            json shares = json::object();
            for (const auto& e : s.shares.entries()) shares[std::to_string(e.topic.value)] = e.weight;
            j["shares"] = std::move(shares);
            json counts = json::object();
            for (const auto& [t, c] : s.counts) counts[std::to_string(t.value)] = c;
            j["counts"] = std::move(counts);
            j["treatable"] = profiles.semantically_treatable(m);
            out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
        }
    }
}

ProfileSeries read_profile_dump(std::istream& in, std::size_t member_count, std::size_t topic_count) {
    ProfileSeries series(member_count, topic_count);
    for_each_line(in, "profile dump", [&](const json& j) {
        const MemberId m{j.at("member").get<std::uint32_t>()};
        if (m.value >= member_count) throw std::out_of_range("member id " + std::to_string(m.value) + " out of range");
        std::vector<ProfileEntry> entries;
        for (const auto& [k, v] : j.at("shares").items()) entries.push_back({parse_topic(k), v.get<double>()});
        TopicCounts counts;
        if (j.contains("counts")) {
            for (const auto& [k, v] : j.at("counts").items()) counts.emplace_back(parse_topic(k), v.get<std::uint64_t>());
            std::sort(counts.begin(), counts.end());
        }
        series.append(m, j.at("year").get<int>(), InterestProfile::from_entries(topic_count, std::move(entries)),
                      std::move(counts));
        if (j.value("treatable", false)) series.set_semantically_treatable(m, true);
    });
    return series;
}

void write_deviation_dump(std::ostream& out, const Deviations& deviations) {
    for (const auto& b : deviations.blocks) {
        json j;
        j["member"] = b.member.value;
        j["year"] = b.year;
        j["neighbors"] = b.neighbor_count;
        j["gram"] = {{"nn", b.gram.nn}, {"ns", b.gram.ns}, {"ss", b.gram.ss}, {"dn", b.gram.dn},
                     {"ds", b.gram.ds}, {"dd", b.gram.dd}, {"terms", b.gram.terms}};
        json entries = json::array();
        for (const auto& e : b.entries)
            entries.push_back({e.topic.value, e.profile_change, e.from_neighbors, e.from_source});
        j["entries"] = std::move(entries);
        out << j.dump() << '\n';
    }
}

Deviations read_deviation_dump(std::istream& in, std::size_t topic_count) {
    Deviations d;
    d.topic_count = topic_count;
    for_each_line(in, "deviation dump", [&](const json& j) {
        DeviationBlock b;
        b.member = MemberId{j.at("member").get<std::uint32_t>()};
        b.year = j.at("year").get<int>();
        b.neighbor_count = j.at("neighbors").get<std::uint32_t>();
        b.has_neighbors = b.neighbor_count > 0;
        const auto& g = j.at("gram");
        b.gram = {g.at("nn").get<double>(), g.at("ns").get<double>(), g.at("ss").get<double>(),
                  g.at("dn").get<double>(), g.at("ds").get<double>(), g.at("dd").get<double>(),
                  g.at("terms").get<std::uint64_t>()};
        for (const auto& e : j.at("entries")) {
            const auto topic = e.at(0).get<std::uint32_t>();
            if (topic >= topic_count) throw std::out_of_range("topic " + std::to_string(topic) + " out of range");
            b.entries.push_back({TopicId{topic}, e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<double>()});
        }
        d.blocks.push_back(std::move(b));
    });
    return d;
}

void write_graph_dump(std::ostream& out, const GraphSeries& graph) {
    for (std::uint32_t i = 0; i < graph.member_count(); ++i) {
        const auto since = graph.member_since(MemberId{i});
        if (!since) continue;
        json links = json::array();
        for (const auto& l : graph.links(MemberId{i})) links.push_back({l.other.value, l.since});
        out << json{{"member", i}, {"since", *since}, {"links", std::move(links)}}.dump() << '\n';
    }
}

GraphSeries read_graph_dump(std::istream& in, std::size_t member_count) {
    GraphSeries g(member_count);
    auto check = [&](std::uint32_t m) {
        if (m >= member_count) throw std::out_of_range("member id " + std::to_string(m) + " out of range");
        return MemberId{m};
    };
    for_each_line(in, "graph dump", [&](const json& j) {
        const MemberId m = check(j.at("member").get<std::uint32_t>());
        g.add_member(m, j.at("since").get<int>());
        for (const auto& l : j.at("links")) g.add_link(m, check(l.at(0).get<std::uint32_t>()), l.at(1).get<int>());
    });
    g.finalize();
    return g;
}

namespace {

void derive(TrendYear& y) {
    y.topics_seen = 0;
    y.occurrences = 0;
    for (auto c : y.counts) {
        if (c > 0) ++y.topics_seen;
        y.occurrences += c;
    }
    if (y.share) {
        y.entropy = shannon_entropy(*y.share);
        if (y.topics_seen == 0) y.topics_seen = y.share->support_size();
        if (y.occurrences > 0) y.average_frequency = static_cast<double>(y.occurrences) / static_cast<double>(y.topics_seen);
    }
}

}  // namespace

void write_trend_dump(std::ostream& out, const TrendSeries& trends) {
    for (const auto& y : trends.years()) {
        json counts = json::object();
        for (std::size_t k = 0; k < y.counts.size(); ++k) {
            if (y.counts[k] > 0) counts[std::to_string(k)] = y.counts[k];
        }
        json share = nullptr;
        if (y.share) {
            share = json::object();
            for (const auto& e : y.share->entries()) share[std::to_string(e.topic.value)] = e.weight;
        }
        out << json{{"year", y.year}, {"counts", std::move(counts)}, {"events", y.events}, {"share", std::move(share)}}.dump()
            << '\n';
    }
}

TrendSeries read_trend_dump(std::istream& in, std::size_t topic_count) {
    std::vector<TrendYear> years;
    for_each_line(in, "trend dump", [&](const json& j) {
        TrendYear y;
        y.year = j.at("year").get<int>();
        y.events = j.value("events", std::uint64_t{0});
        y.counts.assign(topic_count, 0);
        for (const auto& [k, v] : j.at("counts").items()) y.counts.at(parse_topic(k).value) = v.get<std::uint64_t>();
        if (!j.at("share").is_null()) {
            std::vector<ProfileEntry> entries;
            for (const auto& [k, v] : j.at("share").items()) entries.push_back({parse_topic(k), v.get<double>()});
            y.share = InterestProfile::from_entries(topic_count, std::move(entries));
        }
        if (!years.empty() && years.back().year >= y.year) throw std::invalid_argument("trend years must increase");
        derive(y);
        years.push_back(std::move(y));
    });
    return TrendSeries(std::move(years));
}

TrendSeries trends_from_schedule(const std::map<int, InterestProfile>& schedule) {
    std::vector<TrendYear> years;
    for (const auto& [year, share] : schedule) {
        TrendYear y;
        y.year = year;
        y.counts.assign(share.dimension(), 0);
        y.share = share;
        derive(y);
        years.push_back(std::move(y));
    }
    return TrendSeries(std::move(years));
}

}  // namespace ssn
