#include "ssn/reports/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ssn/corpus/event_log.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/indexed_corpus.hpp"
#include "ssn/corpus/lexicon.hpp"
#include "ssn/corpus/trends.hpp"
#include "ssn/corpus/xml_reader.hpp"
#include "ssn/profiling/deviations.hpp"
#include "ssn/profiling/dumps.hpp"
#include "ssn/profiling/profile_series.hpp"
#include "ssn/util/digest.hpp"
#include "ssn/util/errors.hpp"

namespace ssn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStageNames[] = {"ingest", "index", "profile", "fit", "report"};

using Sources = std::vector<std::pair<std::string, std::string>>;

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot open " + p.string());
    return in;
}

// Writes through a temporary file so an interrupted stage never leaves a
// complete-looking output behind.
template <typename Fill>
void write_file(const fs::path& p, Fill&& fill) {
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        fill(out);
        out.flush();
        if (!out) throw InputError("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

json read_json(const fs::path& p) {
    auto in = open_in(p);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(p.string() + ": " + e.what());
    }
}

json sources_json(const Sources& s) {
    json j = json::array();
    for (const auto& [name, digest] : s) j.push_back({name, digest});
    return j;
}

Sources sources_from(const json& j) {
    Sources s;
    for (const auto& e : j) s.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return s;
}

struct Manifest {
    json config = json::object();
    json inputs = json::object();   // name -> digest
    json outputs = json::object();  // name -> digest
    Sources sources;
};

json manifest_json(Stage s, const Manifest& m) {
    return json{{"stage", to_string(s)},
                {"version", SSN_VERSION},
                {"config", m.config},
                {"inputs", m.inputs},
                {"outputs", m.outputs},
                {"sources", sources_json(m.sources)}};
}

Sources previous_sources(const CacheLayout& cache, Stage s) {
    const fs::path p = cache.manifest(s);
    if (!fs::exists(p)) return {};
    return sources_from(read_json(p).value("sources", json::array()));
}

json digest_outputs(const std::vector<fs::path>& files, const fs::path& root) {
    json j = json::object();
    for (const auto& f : files) j[fs::relative(f, root).generic_string()] = sha256_file_hex(f);
    return j;
}

bool up_to_date(const CacheLayout& cache, Stage s, const Manifest& expected) {
    const fs::path p = cache.manifest(s);
    if (!fs::exists(p)) return false;
    json m;
    try {
        m = read_json(p);
    } catch (const InputError&) {
        return false;
    }
    if (m.value("version", "") != SSN_VERSION || m.value("config", json()) != expected.config ||
        m.value("inputs", json()) != expected.inputs) {
        return false;
    }
    const json outputs = m.value("outputs", json::object());
    for (const auto& [name, digest] : outputs.items()) {
        const fs::path f = cache.root / name;
        if (!fs::exists(f) || sha256_file_hex(f) != digest.get<std::string>()) return false;
    }
    return true;
}

bool is_event_log(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".ndjson" || ext == ".jsonl";
}

fs::path lexicon_path(const PipelineConfig& c, const CacheLayout& cache) {
    if (!c.lexicon.empty()) return c.lexicon;
    if (fs::exists(cache.synth_lexicon())) return cache.synth_lexicon();
    throw InputError("a lexicon is required (--lexicon)");
}

json filter_json(const CorpusFilter& f) {
    json kinds = json::array();
    for (auto k : f.kinds) kinds.push_back(to_string(k));
    return json{{"from_year", f.from_year}, {"to_year", f.to_year}, {"kinds", kinds}};
}

void write_meta(const CacheLayout& cache, int first, int last, std::size_t members, std::vector<std::string> topics,
                const Sources& sources) {
    write_file(cache.meta(), [&](std::ostream& out) {
        out << json{{"version", SSN_VERSION},   {"first_year", first},        {"last_year", last},
                    {"member_count", members}, {"topics", std::move(topics)}, {"sources", sources_json(sources)}}
                   .dump(1)
            << '\n';
    });
}

void write_members(const CacheLayout& cache, std::span<const MemberInfo> members) {
    write_file(cache.members(), [&](std::ostream& out) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& m = members[i];
            out << json{{"member", i},
                        {"name", m.name},
                        {"papers", m.papers},
                        {"indexed_papers", m.indexed_papers},
                        {"treatable", m.treatable},
                        {"semantically_treatable", m.semantically_treatable}}
                       .dump()
                << '\n';
        }
    });
}

void write_profile_outputs(const CacheLayout& cache, const ProfileSeries& profiles, const GraphSeries& graph,
                           const TrendSeries& trends, const Deviations& deviations, const MemberDirectory* names) {
    write_file(cache.profiles(), [&](std::ostream& out) { write_profile_dump(out, profiles, names); });
    write_file(cache.graph(), [&](std::ostream& out) { write_graph_dump(out, graph); });
    write_file(cache.trends(), [&](std::ostream& out) { write_trend_dump(out, trends); });
    write_file(cache.deviations(), [&](std::ostream& out) { write_deviation_dump(out, deviations); });
}

std::vector<fs::path> profile_outputs(const CacheLayout& c) {
    return {c.meta(), c.members(), c.profiles(), c.graph(), c.trends(), c.deviations()};
}

void keep_year_range(Deviations& d, const std::optional<std::pair<int, int>>& range) {
    if (!range) return;
    std::erase_if(d.blocks, [&](const DeviationBlock& b) { return b.year < range->first || b.year + 1 > range->second; });
}

// --- stages ---

StageOutcome ingest(const PipelineConfig& c, const CacheLayout& cache, Manifest& m) {
    if (c.corpus.empty()) throw InputError("no corpus given (--corpus)");
    std::vector<CorpusEvent> events;
    std::ostringstream summary;
    if (is_event_log(c.corpus)) {
        for (auto& e : read_event_log_file(c.corpus)) {
            if (c.filter.accepts_year(e.year) && c.filter.accepts_kind(e.kind) && !e.authors.empty()) {
                events.push_back(std::move(e));
            }
        }
        summary << events.size() << " events kept from event log";
    } else {
        auto in = open_in(c.corpus);
        ParseStats stats;
        events = parse_corpus(in, c.filter, &stats);
        summary << stats.records << " records, " << stats.kept << " kept, " << stats.dropped_year
                << " outside the year window, " << stats.dropped_kind << " other kinds, " << stats.dropped_authors
                << " without authors";
    }
    if (events.empty()) throw InputError("no events after filtering");
    write_file(cache.events(), [&](std::ostream& out) { write_event_log(out, events); });
    m.outputs = digest_outputs({cache.events()}, cache.root);
    return {Stage::Ingest, false, summary.str()};
}

StageOutcome index(const PipelineConfig& c, const CacheLayout& cache, Manifest& m) {
    const fs::path lex = lexicon_path(c, cache);
    const TopicLexicon lexicon = load_lexicon_file(lex);
    auto events = read_event_log_file(cache.events());
    index_events(events, lexicon, c.jobs);
    std::size_t indexed = 0;
    for (const auto& e : events) indexed += !e.topics.empty();
    write_file(cache.indexed(), [&](std::ostream& out) { write_event_log(out, events); });
    if (fs::absolute(lex) != fs::absolute(cache.lexicon())) {
        write_file(cache.lexicon(), [&](std::ostream& out) { out << open_in(lex).rdbuf(); });
    }
    m.outputs = digest_outputs({cache.indexed(), cache.lexicon()}, cache.root);
    std::ostringstream s;
    s << indexed << " of " << events.size() << " events indexed against " << lexicon.size() << " topics, "
      << validate_lexicon(lexicon).size() << " lexicon warnings";
    return {Stage::Index, false, s.str()};
}

StageOutcome profile(const PipelineConfig& c, const CacheLayout& cache, Manifest& m) {
    const TopicLexicon lexicon = load_lexicon_file(cache.lexicon());
    const auto events = read_event_log_file(cache.indexed());
    const IndexedCorpus corpus = resolve_corpus(events, lexicon);
    if (corpus.empty()) throw InputError("no events after filtering");

    const ProfileSeries profiles = build_profiles(corpus);
    const GraphSeries graph = build_graph_series(corpus);
    const TrendSeries trends = compute_trends(corpus);
    DeviationOptions opt;
    opt.materialize = c.trend_top_k.has_value();
    opt.trend_top_k = c.trend_top_k;
    opt.jobs = c.jobs;
    Deviations deviations = compute_deviations(profiles, trends.source_schedule(), graph, opt);
    keep_year_range(deviations, c.year_range);

    std::vector<MemberInfo> members(corpus.members.size());
    for (const auto& r : treatability(corpus)) {
        auto& info = members[r.member.value];
        info.papers = r.publications;
        info.treatable = r.treatable;
        info.semantically_treatable = r.semantically_treatable;
    }
    for (const auto& e : corpus.events) {
        if (e.topics.empty()) continue;
        for (auto a : e.authors) ++members[a.value].indexed_papers;
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        members[i].name = corpus.members.display_name(MemberId{static_cast<std::uint32_t>(i)});
    }

    std::vector<std::string> topics;
    for (const auto& e : lexicon.entries()) topics.push_back(e.canonical);
    write_meta(cache, corpus.first_year, corpus.last_year, members.size(), std::move(topics), m.sources);
    write_members(cache, members);
    write_profile_outputs(cache, profiles, graph, trends, deviations, &corpus.members);
    m.outputs = digest_outputs(profile_outputs(cache), cache.root);

    std::size_t treatable = 0;
    for (const auto& i : members) treatable += i.semantically_treatable;
    std::ostringstream s;
    s << members.size() << " members (" << treatable << " semantically treatable), years " << corpus.first_year << "-"
      << corpus.last_year << ", " << deviations.blocks.size() << " deviation blocks";
    return {Stage::Profile, false, s.str()};
}

StageOutcome fit(const PipelineConfig& c, const CacheLayout& cache, Manifest& m) {
    const ProfileCache pc = load_profile_cache(cache);
    auto in = open_in(cache.deviations());
    const Deviations d = read_deviation_dump(in, pc.topics.size());
    FitBundle b;
    b.mode = c.projection;
    b.hp1 = fit_hp1(d);
    b.hp2 = fit_hp2(d);
    const Hp3Result hp3 = fit_hp3(d, c.projection, c.jobs);
    b.hp3 = hp3.aggregate;
    b.hp3_alpha = fit_hp3_alpha(hp3);
    write_file(cache.member_fits(), [&](std::ostream& out) { write_member_fits(out, hp3); });
    write_file(cache.fit(), [&](std::ostream& out) { out << bundle_to_json(b).dump(1) << '\n'; });
    m.outputs = digest_outputs({cache.fit(), cache.member_fits()}, cache.root);
    std::ostringstream s;
    s << "HP1 x_s=" << format_number(b.hp1.x_s) << "; HP2 x=" << format_number(b.hp2.x)
      << " x_s=" << format_number(b.hp2.x_s) << "; HP3 over " << hp3.members.size() << " members, "
      << hp3.skipped.size() << " skipped";
    return {Stage::Fit, false, s.str()};
}

StageOutcome report(const PipelineConfig& c, const CacheLayout& cache, Manifest& m) {
    const ReportInputs in = load_report_inputs(c);
    const auto files = write_report_bundle(cache.reports(), in);
    std::vector<fs::path> paths;
    for (const auto& f : files) paths.push_back(cache.reports() / f);
    m.outputs = digest_outputs(paths, cache.root);
    return {Stage::Report, false, std::to_string(files.size()) + " report files in " + cache.reports().string()};
}

Manifest expected_manifest(Stage s, const PipelineConfig& c, const CacheLayout& cache) {
    Manifest m;
    auto need = [](const fs::path& p) {
        if (!fs::exists(p)) throw InputError("missing " + p.string() + " (run the previous stage first)");
        return sha256_file_hex(p);
    };
    switch (s) {
        case Stage::Ingest: {
            if (c.corpus.empty()) throw InputError("no corpus given (--corpus)");
            const auto digest = need(c.corpus);
            m.config = filter_json(c.filter);
            m.inputs["corpus"] = digest;
            m.sources = {{"corpus", digest}};
            break;
        }
        case Stage::Index: {
            const auto lex = need(lexicon_path(c, cache));
            m.inputs["events"] = need(cache.events());
            m.inputs["lexicon"] = lex;
            m.sources = previous_sources(cache, Stage::Ingest);
            m.sources.emplace_back("lexicon", lex);
            break;
        }
        case Stage::Profile:
            m.inputs["indexed"] = need(cache.indexed());
            m.inputs["lexicon"] = need(cache.lexicon());
            m.config["year_range"] = c.year_range ? json{c.year_range->first, c.year_range->second} : json(nullptr);
            m.config["trend_top_k"] = c.trend_top_k ? json(*c.trend_top_k) : json(nullptr);
            m.sources = previous_sources(cache, Stage::Index);
            break;
        case Stage::Fit:
            m.inputs["meta"] = need(cache.meta());
            m.inputs["deviations"] = need(cache.deviations());
            m.config["projection"] = c.projection == ProjectionMode::Refit ? "refit" : "paper-emulation";
            m.sources = load_profile_cache(cache).sources;
            break;
        case Stage::Report:
            for (const auto& p : {cache.meta(), cache.members(), cache.graph(), cache.trends(), cache.fit(),
                                  cache.member_fits()}) {
                m.inputs[p.filename().string()] = need(p);
            }
            if (!c.frequent_names.empty()) m.inputs["frequent_names"] = need(c.frequent_names);
            m.config = json{{"seed", c.seed},
                            {"bins", c.report.bins},
                            {"raw_range", {c.report.raw_lo, c.report.raw_hi}},
                            {"top_authorities", c.report.top_authorities}};
            m.sources = load_profile_cache(cache).sources;
            break;
    }
    return m;
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kStageNames); ++i) {
        if (kStageNames[i] == name) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

fs::path CacheLayout::manifest(Stage s) const {
    return root / "manifests" / (std::string(to_string(s)) + ".json");
}

ProfileCache load_profile_cache(const CacheLayout& cache) {
    ProfileCache pc;
    const json meta = read_json(cache.meta());
    try {
        pc.first_year = meta.at("first_year").get<int>();
        pc.last_year = meta.at("last_year").get<int>();
        pc.topics = meta.at("topics").get<std::vector<std::string>>();
        pc.sources = sources_from(meta.at("sources"));
        pc.members.resize(meta.at("member_count").get<std::size_t>());
    } catch (const json::exception& e) {
        throw InputError(cache.meta().string() + ": " + e.what());
    }
    auto in = open_in(cache.members());
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            auto& m = pc.members.at(j.at("member").get<std::size_t>());
            m.name = j.at("name").get<std::string>();
            m.papers = j.at("papers").get<std::uint64_t>();
            m.indexed_papers = j.at("indexed_papers").get<std::uint64_t>();
            m.treatable = j.at("treatable").get<bool>();
            m.semantically_treatable = j.at("semantically_treatable").get<bool>();
        } catch (const std::exception& e) {
            throw InputError(cache.members().string() + " line " + std::to_string(no) + ": " + e.what());
        }
    }
    return pc;
}

ReportInputs load_report_inputs(const PipelineConfig& c) {
    const CacheLayout cache{c.cache_dir};
    ProfileCache pc = load_profile_cache(cache);
    ReportInputs in;
    in.provenance.version = SSN_VERSION;
    in.provenance.seed = c.seed;
    in.provenance.inputs = pc.sources;
    if (!c.frequent_names.empty()) {
        in.provenance.inputs.emplace_back("frequent_names", sha256_file_hex(c.frequent_names));
        in.frequent_names = load_frequent_names_file(c.frequent_names);
    }
    in.members = std::move(pc.members);
    {
        auto f = open_in(cache.graph());
        in.graph = read_graph_dump(f, in.members.size());
    }
    {
        auto f = open_in(cache.trends());
        in.trends = read_trend_dump(f, pc.topics.size());
    }
    in.fits = bundle_from_json(read_json(cache.fit()));
    {
        auto f = open_in(cache.member_fits());
        in.hp3 = read_member_fits(f);
    }
    in.hp3.aggregate = in.fits.hp3;
    for (const auto& m : in.hp3.members) {
        if (m.member.value >= in.members.size()) throw InputError("member fit for unknown member");
    }
    in.options = c.report;
    return in;
}

StageOutcome run_stage(Stage stage, const PipelineConfig& config) {
    const CacheLayout cache{config.cache_dir};
    const std::string name(to_string(stage));
    try {
        fs::create_directories(cache.root);
        Manifest m = expected_manifest(stage, config, cache);
        if (!config.force && up_to_date(cache, stage, m)) return {stage, true, "up to date"};
        StageOutcome out;
        switch (stage) {
            case Stage::Ingest: out = ingest(config, cache, m); break;
            case Stage::Index: out = index(config, cache, m); break;
            case Stage::Profile: out = profile(config, cache, m); break;
            case Stage::Fit: out = fit(config, cache, m); break;
            case Stage::Report: out = report(config, cache, m); break;
        }
        write_file(cache.manifest(stage), [&](std::ostream& o) { o << manifest_json(stage, m).dump(1) << '\n'; });
        return out;
    } catch (const NumericalError& e) {
        throw NumericalError(name + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(name + ": " + e.what());
    } catch (const fs::filesystem_error& e) {
        throw InputError(name + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
}

std::vector<StageOutcome> run_pipeline(const PipelineConfig& config, Stage from, Stage to) {
    std::vector<StageOutcome> out;
    for (auto s = static_cast<int>(from); s <= static_cast<int>(to); ++s) {
        out.push_back(run_stage(static_cast<Stage>(s), config));
    }
    return out;
}

void write_synthetic_cache(const SyntheticOutput& out, const PipelineConfig& config) {
    const CacheLayout cache{config.cache_dir};
    fs::create_directories(cache.root);
    const std::string spec_text = spec_to_json(out.spec).dump();
    const Sources sources{{"synth", sha256_hex(spec_text)}};
    write_file(cache.truth(), [&](std::ostream& o) { o << truth_to_json(out).dump(1) << '\n'; });

    if (out.exact) {
        const auto& ex = *out.exact;
        const TrendSeries trends = trends_from_schedule(ex.source);
        DeviationOptions opt;
        opt.materialize = false;
        opt.jobs = config.jobs;
        Deviations d = compute_deviations(ex.profiles, ex.source, ex.graph, opt);
        keep_year_range(d, config.year_range);
        std::vector<MemberInfo> members(ex.members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            members[i].name = ex.members.display_name(MemberId{static_cast<std::uint32_t>(i)});
            members[i].treatable = members[i].semantically_treatable = true;
        }
        std::vector<std::string> topics;
        for (std::size_t k = 0; k < out.spec.n_topics; ++k) topics.push_back(topic_name(k));
        write_meta(cache, out.spec.first_year, out.spec.first_year + out.spec.years - 1, members.size(),
                   std::move(topics), sources);
        write_members(cache, members);
        write_profile_outputs(cache, ex.profiles, ex.graph, trends, d, &ex.members);
        Manifest m;
        m.inputs["synth"] = sources.front().second;
        m.outputs = digest_outputs(profile_outputs(cache), cache.root);
        m.sources = sources;
        write_file(cache.manifest(Stage::Profile), [&](std::ostream& o) { o << manifest_json(Stage::Profile, m).dump(1) << '\n'; });
    }
    if (out.sampled) {
        write_file(cache.events(), [&](std::ostream& o) { write_event_log(o, out.sampled->events); });
        write_file(cache.synth_lexicon(), [&](std::ostream& o) {
            for (const auto& e : out.sampled->lexicon) o << e.canonical << '\n';
        });
        Manifest m;
        m.inputs["synth"] = sources.front().second;
        m.outputs = digest_outputs({cache.events()}, cache.root);
        m.sources = sources;
        write_file(cache.manifest(Stage::Ingest), [&](std::ostream& o) { o << manifest_json(Stage::Ingest, m).dump(1) << '\n'; });
    }
}

}  // namespace ssn
