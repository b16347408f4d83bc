#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "ssn/corpus/event_log.hpp"
#include "ssn/corpus/indexed_corpus.hpp"
#include "ssn/corpus/lexicon.hpp"
#include "ssn/corpus/xml_reader.hpp"
#include "ssn/estimation/fit.hpp"
#include "ssn/profiling/deviations.hpp"
#include "ssn/profiling/dumps.hpp"
#include "ssn/profiling/profile_series.hpp"
#include "ssn/reports/pipeline.hpp"
#include "ssn/util/errors.hpp"

using namespace ssn;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SSN_TEST_DATA;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ssn_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

PipelineConfig mini_config(const fs::path& cache, unsigned jobs = 1) {
    PipelineConfig c;
    c.cache_dir = cache;
    c.corpus = kData / "minicorpus.xml";
    c.lexicon = kData / "minicorpus_lexicon.txt";
    c.frequent_names = kData / "frequent_names.txt";
    c.seed = 7;
    c.jobs = jobs;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> report_files(const fs::path& cache) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(cache / "reports")) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

// Rows of a report CSV without the comment line, split on commas (fixture
// names contain no commas).
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // provenance
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST_CASE("mini-corpus pipeline completes with every report") {
    TempDir tmp("mini");
    const auto t0 = std::chrono::steady_clock::now();
    const auto outcomes = run_pipeline(mini_config(tmp.path));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(seconds < 10.0);
    REQUIRE(outcomes.size() == 5);
    for (const auto& o : outcomes) CHECK_FALSE(o.reused);

    const auto files = report_files(tmp.path);
    for (const char* name :
         {"topic_evolution.csv", "hist_x_feasible.csv", "hist_x_s_feasible.csv", "hist_x_raw.csv", "hist_x_s_raw.csv",
          "hist2d_x_x_s_raw.csv", "hist_authority.csv", "scatter_authority_coauthors.csv",
          "scatter_authority_success.csv", "scatter_trend_success.csv", "table1_hypotheses.csv", "table2_cases.csv",
          "susceptibility_stats.csv", "correlations.csv", "top_authorities.csv", "members.csv"}) {
        INFO(name);
        REQUIRE(files.count(name));
        const auto& text = files.at(name);
        CHECK(text.rfind("# ssn " SSN_VERSION " seed=7 inputs=corpus:", 0) == 0);
        CHECK(text.find(",lexicon:") != std::string::npos);
        CHECK(csv_rows(text).size() >= 2);
    }
}

TEST_CASE("mini-corpus reports satisfy their invariants") {
    TempDir tmp("mini_inv");
    run_pipeline(mini_config(tmp.path));
    const auto files = report_files(tmp.path);
    const auto members = csv_rows(files.at("members.csv"));
    const auto& h = members[0];
    const std::size_t c_case = column(h, "case"), c_raw_x = column(h, "raw_x"), c_raw_xs = column(h, "raw_x_s"),
                      c_flag = column(h, "frequent_name"), c_name = column(h, "name"), c_auth = column(h, "authority");

    std::size_t fitted = 0, raw_x = 0, raw_xs = 0, feasible = 0, flagged = 0;
    for (std::size_t r = 1; r < members.size(); ++r) {
        const auto& row = members[r];
        if (row[c_case].empty()) continue;
        ++fitted;
        raw_x += row[c_raw_x] != "nan";
        raw_xs += row[c_raw_xs] != "nan";
        feasible += row[c_case] == "Ia" || row[c_case] == "Ib" || row[c_case] == "Ic";
    }
    for (std::size_t r = 1; r < members.size(); ++r) flagged += members[r][c_flag] == "1";
    CHECK(members.size() - 1 == 120);
    CHECK(flagged == 3);

    auto hist_total = [&](const std::string& name) {
        std::uint64_t total = 0;
        for (const auto& row : csv_rows(files.at(name))) {
            if (row[0] != "bin" && row[0] != "region") total += std::stoull(row.back());
        }
        return total;
    };
    CHECK(hist_total("hist_x_raw.csv") == raw_x);
    CHECK(hist_total("hist_x_s_raw.csv") == raw_xs);
    CHECK(hist_total("hist_x_feasible.csv") == feasible);
    CHECK(hist_total("hist_x_s_feasible.csv") == feasible);
    CHECK(hist_total("hist_authority.csv") == fitted);

    const auto cases = csv_rows(files.at("table2_cases.csv"));
    std::uint64_t census = 0;
    for (std::size_t r = 1; r < cases.size(); ++r) census += std::stoull(cases[r][1]);
    CHECK(census == fitted);

    // The planted hub ranks in the top decile of authority.
    std::vector<std::pair<double, std::string>> auth;
    for (std::size_t r = 1; r < members.size(); ++r) {
        if (!members[r][c_case].empty()) auth.emplace_back(std::stod(members[r][c_auth]), members[r][c_name]);
    }
    std::sort(auth.rbegin(), auth.rend());
    const auto hub = std::find_if(auth.begin(), auth.end(), [](const auto& p) { return p.second == "Mara Castellan"; });
    REQUIRE(hub != auth.end());
    CHECK(static_cast<std::size_t>(hub - auth.begin()) < auth.size() / 10);

    // Members with no papers never reach the success scatter.
    for (const auto& row : csv_rows(files.at("scatter_authority_success.csv"))) {
        if (row[0] != "member") CHECK(std::stoull(row[2]) > 0);
    }
}

TEST_CASE("nested chi-square ordering on the mini-corpus") {
    TempDir tmp("mini_chi");
    run_pipeline(mini_config(tmp.path), Stage::Ingest, Stage::Fit);
    std::ifstream in(tmp.path / "fit.json");
    const auto b = bundle_from_json(nlohmann::json::parse(in));
    CHECK(b.hp2.chi_sq <= b.hp1.chi_sq);
    CHECK(b.hp3.unconstrained_chi_sq <= b.hp2.chi_sq);
}

TEST_CASE("stages resume from the cache and rerun on changed inputs") {
    TempDir tmp("resume");
    auto c = mini_config(tmp.path);
    run_pipeline(c);
    const auto first = report_files(tmp.path);
    for (const auto& o : run_pipeline(c)) CHECK(o.reused);

    // A tampered output invalidates its stage only.
    { std::ofstream(tmp.path / "fit.json", std::ios::app) << " "; }
    auto again = run_pipeline(c);
    CHECK(again[2].reused);
    CHECK_FALSE(again[3].reused);
    CHECK(report_files(tmp.path) == first);

    // A different projection mode reruns fit and report.
    c.projection = ProjectionMode::PaperEmulation;
    again = run_pipeline(c);
    CHECK(again[2].reused);
    CHECK_FALSE(again[3].reused);
    CHECK_FALSE(again[4].reused);
}

TEST_CASE("identical inputs give byte-identical reports; worker count leaves fits unchanged") {
    TempDir a("det_a"), b("det_b"), c("det_c");
    run_pipeline(mini_config(a.path, 1));
    run_pipeline(mini_config(b.path, 1));
    run_pipeline(mini_config(c.path, 4));
    CHECK(report_files(a.path) == report_files(b.path));
    CHECK(slurp(a.path / "fit.json") == slurp(c.path / "fit.json"));
    CHECK(slurp(a.path / "member_fits.ndjson") == slurp(c.path / "member_fits.ndjson"));
}

TEST_CASE("cached stage outputs reload to the fresh results") {
    TempDir tmp("reload");
    const auto c = mini_config(tmp.path);
    run_pipeline(c);

    std::ifstream xml(c.corpus);
    const auto lexicon = load_lexicon_file(c.lexicon);
    auto events = parse_corpus(xml, c.filter);
    index_events(events, lexicon);
    const auto corpus = resolve_corpus(events, lexicon);
    const auto profiles = build_profiles(corpus);
    const auto graph = build_graph_series(corpus);
    const auto trends = compute_trends(corpus);
    DeviationOptions opt;
    opt.materialize = false;  // the pipeline's route
    const auto d = compute_deviations(profiles, trends.source_schedule(), graph, opt);

    CHECK(read_event_log_file(tmp.path / "indexed.ndjson") == events);
    {
        std::ifstream in(tmp.path / "profiles.ndjson");
        const auto back = read_profile_dump(in, profiles.member_count(), profiles.topic_count());
        for (std::uint32_t i = 0; i < profiles.member_count(); ++i) {
            const auto s1 = profiles.snapshots(MemberId{i});
            const auto s2 = back.snapshots(MemberId{i});
            REQUIRE(s1.size() == s2.size());
            for (std::size_t k = 0; k < s1.size(); ++k) {
                CHECK(s1[k].year == s2[k].year);
                CHECK(s1[k].shares == s2[k].shares);
                CHECK(s1[k].counts == s2[k].counts);
            }
            CHECK(profiles.semantically_treatable(MemberId{i}) == back.semantically_treatable(MemberId{i}));
        }
    }
    {
        std::ifstream in(tmp.path / "graph.ndjson");
        const auto back = read_graph_dump(in, graph.member_count());
        for (int y = graph.first_year(); y <= graph.last_year(); ++y) {
            CHECK(back.snapshot(y).edges() == graph.snapshot(y).edges());
        }
    }
    {
        std::ifstream in(tmp.path / "trends.ndjson");
        const auto back = read_trend_dump(in, lexicon.size());
        REQUIRE(back.years().size() == trends.years().size());
        for (std::size_t i = 0; i < back.years().size(); ++i) {
            const auto& x = back.years()[i];
            const auto& y = trends.years()[i];
            CHECK(x.counts == y.counts);
            CHECK(x.share == y.share);
            CHECK(x.entropy == y.entropy);
            CHECK(x.average_frequency == y.average_frequency);
        }
    }
    std::ifstream dev(tmp.path / "deviations.ndjson");
    const auto back = read_deviation_dump(dev, lexicon.size());
    REQUIRE(back.blocks.size() == d.blocks.size());
    for (std::size_t i = 0; i < d.blocks.size(); ++i) CHECK(back.blocks[i].gram == d.blocks[i].gram);

    const auto fresh = fit_hp3(d);
    const auto loaded = load_report_inputs(c);
    CHECK(loaded.fits.hp2.x == fit_hp2(d).x);
    CHECK(loaded.fits.hp3.x == fresh.aggregate.x);
    REQUIRE(loaded.hp3.members.size() == fresh.members.size());
    for (std::size_t i = 0; i < fresh.members.size(); ++i) {
        CHECK(loaded.hp3.members[i].label.x == fresh.members[i].label.x);
        CHECK(loaded.hp3.members[i].label.x_s == fresh.members[i].label.x_s);
    }

    // Reports regenerated from the reloaded caches match the pipeline's.
    TempDir other("reload_reports");
    write_report_bundle(other.path / "reports", loaded);
    CHECK(report_files(other.path) == report_files(tmp.path));
}

TEST_CASE("empty corpus is rejected at ingest") {
    TempDir tmp("empty");
    auto c = mini_config(tmp.path);
    c.filter.from_year = 2013;
    c.filter.to_year = 2014;
    try {
        run_stage(Stage::Ingest, c);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()) == "ingest: no events after filtering");
    }
}

TEST_CASE("stage failures carry the stage name") {
    TempDir tmp("fail");
    auto c = mini_config(tmp.path);
    run_stage(Stage::Ingest, c);
    c.lexicon = tmp.path / "missing.txt";
    CHECK_THROWS_WITH_AS(run_stage(Stage::Index, c), doctest::Contains("index: missing"), InputError);
    CHECK_THROWS_WITH_AS(run_stage(Stage::Fit, c), doctest::Contains("fit: missing"), InputError);

    std::ofstream(tmp.path / "bad.xml") << "<dblp><article><year>2001</year>";
    c.corpus = tmp.path / "bad.xml";
    CHECK_THROWS_WITH_AS(run_stage(Stage::Ingest, c), doctest::Contains("ingest: "), InputError);
}

TEST_CASE("event-log input and year filters") {
    TempDir tmp("log");
    std::vector<CorpusEvent> events{
        {2000, PublicationKind::JournalArticle, {"A", "B"}, "Data mining at scale", {}},
        {2001, PublicationKind::ConferencePaper, {"A"}, "Machine learning for data mining", {}},
        {2001, PublicationKind::BookChapter, {"B"}, "Machine learning", {}},
        {1980, PublicationKind::JournalArticle, {"C"}, "Data mining", {}},
    };
    write_event_log_file(tmp.path / "log.ndjson", events);
    std::ofstream(tmp.path / "lex.txt") << "data mining\nmachine learning\n";
    PipelineConfig c;
    c.cache_dir = tmp.path / "cache";
    c.corpus = tmp.path / "log.ndjson";
    c.lexicon = tmp.path / "lex.txt";
    c.filter.from_year = 1990;
    c.filter.kinds = {PublicationKind::JournalArticle, PublicationKind::ConferencePaper};
    run_pipeline(c);
    const auto kept = read_event_log_file(c.cache_dir / "events.ndjson");
    CHECK(kept.size() == 2);
    const auto pc = load_profile_cache(CacheLayout{c.cache_dir});
    REQUIRE(pc.members.size() == 2);
    CHECK(pc.members[0].papers == 2);
    CHECK(pc.members[0].semantically_treatable);
    CHECK_FALSE(pc.members[1].semantically_treatable);
}

TEST_CASE("synthetic exact trajectories fit from the cache") {
    TempDir tmp("synth_exact");
    SyntheticSpec spec;
    spec.n_members = 60;
    spec.years = 15;
    spec.x = 0.07;
    spec.x_s = 0.04;
    spec.seed = 5;
    PipelineConfig c;
    c.cache_dir = tmp.path;
    write_synthetic_cache(generate_synthetic(spec), c);
    run_pipeline(c, Stage::Fit, Stage::Report);
    const auto in = load_report_inputs(c);
    CHECK(in.fits.hp2.x == doctest::Approx(0.07).epsilon(1e-6));
    CHECK(in.fits.hp2.x_s == doctest::Approx(0.04).epsilon(1e-6));
    CHECK(fs::exists(tmp.path / "truth.json"));
    CHECK(fs::exists(tmp.path / "reports" / "table1_hypotheses.csv"));
}

TEST_CASE("synthetic sampled corpus runs through every stage") {
    TempDir tmp("synth_sampled");
    SyntheticSpec spec;
    spec.n_members = 50;
    spec.years = 12;
    spec.mode = SynthMode::Sampled;
    PipelineConfig c;
    c.cache_dir = tmp.path;
    write_synthetic_cache(generate_synthetic(spec), c);
    const auto outcomes = run_pipeline(c, Stage::Index, Stage::Report);
    CHECK(outcomes.size() == 4);
    const auto in = load_report_inputs(c);
    CHECK(in.fits.hp2.determined);
    CHECK(in.hp3.members.size() > 0);
}

TEST_CASE("bundled fixture matches its generator") {
    TempDir tmp("fixture");
    const std::string cmd = std::string(SSN_MAKE_MINICORPUS) + " " + tmp.path.string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    for (const char* f : {"minicorpus.xml", "minicorpus_lexicon.txt", "frequent_names.txt"}) {
        INFO(f);
        CHECK(slurp(tmp.path / f) == slurp(kData / f));
    }
}
