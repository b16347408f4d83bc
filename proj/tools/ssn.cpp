#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssn/diffusion/simulation.hpp"
#include "ssn/profiling/dumps.hpp"
#include "ssn/profiling/profile_series.hpp"
#include "ssn/reports/pipeline.hpp"
#include "ssn/reports/synthetic.hpp"
#include "ssn/util/errors.hpp"

namespace {

using nlohmann::json;
using namespace ssn;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Flags {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string cache_dir = "ssn-cache";
    std::string format = "csv";
    std::string config;
    std::string corpus;
    std::string lexicon;
    int from_year = 1950;
    int to_year = 2012;
    std::vector<std::string> kinds;
    std::string year_range;
    std::size_t trend_top_k = 0;
    bool paper_emulation = false;
    std::string frequent_names;
    std::size_t bins = 50;
    std::size_t top = 20;
    bool force = false;
    // simulate
    std::string scenario;
    std::string output;
    // synth
    std::string spec;
    std::string mode;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::pair<int, int> parse_year_range(const std::string& s) {
    const auto sep = s.find_first_of(":-", 1);
    int a = 0, b = 0;
    auto ok = [](std::string_view v, int& out) {
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        return r.ec == std::errc() && r.ptr == v.data() + v.size();
    };
    if (sep == std::string::npos || !ok(std::string_view(s).substr(0, sep), a) ||
        !ok(std::string_view(s).substr(sep + 1), b) || a > b) {
        throw InputError("--year-range expects FROM:TO, got '" + s + "'");
    }
    return {a, b};
}

// Keys of the --config object are flag names without dashes; command-line
// values win over the file.
void apply_config(CLI::App& app, Flags& f) {
    if (f.config.empty()) return;
    const json j = read_json_file(f.config);
    if (!j.is_object()) throw InputError(f.config + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = app.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw InputError(f.config + ": unknown setting '" + key + "'");
        }
        if (opt->count() > 0) continue;
        std::vector<std::string> args;
        if (value.is_array()) {
            for (const auto& v : value) args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else if (value.is_boolean()) {
            if (!value.get<bool>()) continue;
            args.push_back("true");
        } else {
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
        opt->clear();
        opt->add_result(args);
        opt->run_callback();
    }
}

PipelineConfig pipeline_config(const Flags& f) {
    PipelineConfig c;
    c.cache_dir = f.cache_dir;
    c.corpus = f.corpus;
    c.lexicon = f.lexicon;
    c.filter.from_year = f.from_year;
    c.filter.to_year = f.to_year;
    for (const auto& k : f.kinds) {
        const auto kind = parse_kind(k);
        if (!kind) throw InputError("unknown publication kind '" + k + "'");
        c.filter.kinds.push_back(*kind);
    }
    if (!f.year_range.empty()) c.year_range = parse_year_range(f.year_range);
    if (f.trend_top_k > 0) c.trend_top_k = f.trend_top_k;
    c.projection = f.paper_emulation ? ProjectionMode::PaperEmulation : ProjectionMode::Refit;
    c.frequent_names = f.frequent_names;
    c.report.bins = f.bins;
    c.report.top_authorities = f.top;
    c.seed = f.seed;
    c.jobs = f.jobs;
    c.force = f.force;
    return c;
}

void print_outcomes(const std::vector<StageOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        std::cerr << to_string(o.stage) << ": " << (o.reused ? "reused, " : "") << o.summary << '\n';
    }
}

void print_fit_table(const PipelineConfig& c, const std::string& format) {
    const CacheLayout cache{c.cache_dir};
    std::ifstream in(cache.fit());
    if (!in) throw InputError("cannot open " + cache.fit().string());
    const FitBundle b = bundle_from_json(json::parse(in));
    if (format == "json") {
        std::cout << bundle_to_json(b).dump(1) << '\n';
        return;
    }
    std::cout << "hypothesis,x,x_s,chi_sq,dof,chi_sq_per_dof,members\n";
    for (const FitResult* f : b.table()) {
        std::cout << to_string(f->hypothesis) << ',' << format_number(f->x) << ',' << format_number(f->x_s) << ','
                  << format_number(f->chi_sq) << ',' << f->dof << ',' << format_number(f->chi_sq_per_dof) << ','
                  << f->members << '\n';
    }
}

std::vector<double> dense_row(const json& j, std::size_t topics, const char* what) {
    auto row = j.get<std::vector<double>>();
    if (row.size() != topics) {
        throw InputError(std::string(what) + " has " + std::to_string(row.size()) + " entries, expected " +
                         std::to_string(topics));
    }
    return row;
}

// Scenario: {"topics", "members"?, "edges": [[i, j]...], "initial": [[...]...],
// "x" | "x_ij": [[i, j, v]...], "x_s": v | [...], "source": [...] |
// {"step": [...]}, "steps", "first_year"?, "every"?}
// With "equilibrium": {"tolerance"?, "max_iterations"?} the equilibrium
// weights (and, without trend terms, the conserved averages) are printed as
// JSON instead of a trajectory.
int simulate(const Flags& f) {
    const json s = read_json_file(f.scenario);
    try {
        const auto topics = s.at("topics").get<std::size_t>();
        const auto& initial = s.at("initial");
        const std::size_t n = s.value("members", initial.size());
        if (initial.size() != n) throw InputError("initial profiles must list every member");
        std::vector<Edge> edges;
        for (const auto& e : s.value("edges", json::array())) {
            edges.emplace_back(MemberId{e.at(0).get<std::uint32_t>()}, MemberId{e.at(1).get<std::uint32_t>()});
        }
        const SocialGraph graph = [&] {
            SocialGraph g = SocialGraph::from_edges(0, n, edges);
            for (std::uint32_t i = 0; i < n; ++i) g.mark_present(MemberId{i});
            return g;
        }();

        std::vector<double> xs(n, 0.0);
        if (s.contains("x_s")) {
            if (s["x_s"].is_array()) {
                xs = s["x_s"].get<std::vector<double>>();
                if (xs.size() != n) throw InputError("x_s must list every member");
            } else {
                xs.assign(n, s["x_s"].get<double>());
            }
        }
        const double x_default = s.value("x", 0.0);
        std::vector<std::vector<double>> rows(n);
        for (std::uint32_t i = 0; i < n; ++i) rows[i].assign(graph.degree(MemberId{i}), x_default);
        for (const auto& t : s.value("x_ij", json::array())) {
            const MemberId i{t.at(0).get<std::uint32_t>()}, j{t.at(1).get<std::uint32_t>()};
            if (i.value >= n) throw InputError("x_ij member out of range");
            const auto k = graph.neighbor_index(i, j);
            if (k == SocialGraph::npos) throw InputError("x_ij given for a pair that is not linked");
            rows[i.value][k] = t.at(2).get<double>();
        }
        const auto config = SusceptibilityConfig::from_rows(graph, std::move(rows), xs);
        config.require_feasible();

        std::map<long, std::vector<double>> schedule;
        if (s.contains("source")) {
            if (s["source"].is_array()) {
                schedule[0] = dense_row(s["source"], topics, "source");
            } else {
                for (const auto& [k, v] : s["source"].items()) schedule[std::stol(k)] = dense_row(v, topics, "source");
            }
        } else {
            schedule[0].assign(topics, 0.0);
        }
        if (schedule.begin()->first > 0) throw InputError("source schedule must start at step 0");

        std::vector<InterestProfile> init;
        for (const auto& row : initial) {
            const auto r = dense_row(row, topics, "initial profile");
            init.push_back(InterestProfile::from_dense(r));
        }
        const int first_year = s.value("first_year", 0);
        const long every = std::max(1L, s.value("every", 1L));

        SimulationState state = make_state(init, InterestProfile::from_dense(schedule.begin()->second));
        if (s.contains("equilibrium")) {
            EquilibriumOptions opt;
            opt.tolerance = s["equilibrium"].value("tolerance", opt.tolerance);
            opt.max_iterations = s["equilibrium"].value("max_iterations", opt.max_iterations);
            const auto w = solve_equilibrium(config, graph, opt);
            json j{{"b", w.b}, {"component", w.component}, {"residual", w.residual}, {"iterations", w.iterations}};
            if (!config.has_trend()) j["conserved"] = conserved_average(state, config, w);
            std::cout << j.dump() << '\n';
            return 0;
        }
        const long steps = s.at("steps").get<long>();
        ProfileSeries out(n, topics);
        auto record = [&](long t) {
            for (std::uint32_t i = 0; i < n; ++i) {
                out.append(MemberId{i}, first_year + static_cast<int>(t),
                           InterestProfile::from_dense(state.profiles.row(i)));
            }
        };
        record(0);
        for (long t = 1; t <= steps; ++t) {
            if (auto it = schedule.upper_bound(t - 1); it != schedule.begin()) state.source = std::prev(it)->second;
            state = step(state, config, graph, f.jobs);
            if (t % every == 0 || t == steps) record(t);
        }
        if (f.output.empty() || f.output == "-") {
            write_profile_dump(std::cout, out);
        } else {
            std::ofstream o(f.output, std::ios::binary);
            if (!o) throw InputError("cannot write " + f.output);
            write_profile_dump(o, out);
        }
    } catch (const json::exception& e) {
        throw InputError(f.scenario + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(f.scenario + ": " + e.what());
    } catch (const std::out_of_range& e) {
        throw InputError(f.scenario + ": " + e.what());
    }
    return 0;
}

int synth(const Flags& f, const CLI::App& cmd) {
    SyntheticSpec spec;
    if (!f.spec.empty()) {
        try {
            spec = spec_from_json(read_json_file(f.spec));
        } catch (const json::exception& e) {
            throw InputError(f.spec + ": " + e.what());
        }
    }
    if (!f.mode.empty()) spec.mode = f.mode == "sampled" ? SynthMode::Sampled : SynthMode::Exact;
    if (cmd.get_parent()->get_option("--seed")->count() > 0) spec.seed = f.seed;
    const PipelineConfig c = pipeline_config(f);
    const SyntheticOutput out = generate_synthetic(spec);
    write_synthetic_cache(out, c);
    const json summary{{"cache_dir", c.cache_dir.string()},
                       {"mode", spec.mode == SynthMode::Exact ? "exact" : "sampled"},
                       {"members", spec.n_members},
                       {"seed", spec.seed},
                       {"clipped", out.sampled ? out.sampled->clipped : 0}};
    if (f.format == "json") {
        std::cout << summary.dump(1) << '\n';
    } else {
        std::cout << "cache_dir,mode,members,seed\n"
                  << summary["cache_dir"].get<std::string>() << ',' << summary["mode"].get<std::string>() << ','
                  << spec.n_members << ',' << spec.seed << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic social network analysis: ingest a bibliographic corpus, build interest profiles, fit "
                 "susceptibilities and authorities, emit report data."};
    app.set_version_flag("--version", std::string(SSN_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;

    app.add_option("--seed", f.seed, "Seed recorded in reports and used by synth");
    app.add_option("--jobs", f.jobs, "Worker threads, 0 for all cores");
    app.add_option("--cache-dir", f.cache_dir, "Stage cache directory");
    app.add_option("--format", f.format, "Summary format on stdout")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", f.config, "JSON file with flag values (keys are flag names)");
    app.add_option("--corpus", f.corpus, "DBLP-style XML or .ndjson event log");
    app.add_option("--lexicon", f.lexicon, "Topic lexicon: canonical|alias|... per line");
    app.add_option("--from-year", f.from_year, "First publication year kept");
    app.add_option("--to-year", f.to_year, "Last publication year kept");
    app.add_option("--kinds", f.kinds, "Publication kinds kept (article, inproceedings, incollection, other)")
        ->delimiter(',');
    app.add_option("--year-range", f.year_range, "FROM:TO years used for fitting");
    app.add_option("--trend-top-k", f.trend_top_k, "Restrict trend support to the K most frequent topics");
    app.add_flag("--paper-emulation", f.paper_emulation, "Cases III/IV keep the raw value instead of refitting");
    app.add_option("--frequent-names", f.frequent_names, "Name list for flagging in scatter reports");
    app.add_option("--bins", f.bins, "Histogram bins");
    app.add_option("--top", f.top, "Rows in top_authorities.csv");
    app.add_flag("--force", f.force, "Rerun stages even when cached outputs match");

    std::map<std::string, Stage> stage_cmds;
    std::vector<std::pair<CLI::App*, Stage>> stages;
    for (auto [name, stage, help] :
         {std::tuple{"ingest", Stage::Ingest, "Parse the corpus into an event log"},
          std::tuple{"index", Stage::Index, "Match titles against the lexicon"},
          std::tuple{"profile", Stage::Profile, "Build profiles, graph, trends and deviations"},
          std::tuple{"fit", Stage::Fit, "Fit HP1, HP2, HP3 and HP3alpha"},
          std::tuple{"report", Stage::Report, "Write report files"}}) {
        stages.emplace_back(app.add_subcommand(name, help), stage);
    }
    CLI::App* run = app.add_subcommand("run", "Run every stage, reusing up-to-date cached ones");
    CLI::App* sim = app.add_subcommand("simulate", "Forward-simulate a scenario file");
    sim->add_option("scenario", f.scenario, "Scenario JSON")->required();
    sim->add_option("-o,--output", f.output, "Profile dump path (default stdout)");
    CLI::App* syn = app.add_subcommand("synth", "Generate a synthetic network into the cache");
    syn->add_option("--spec", f.spec, "Synthetic spec JSON");
    syn->add_option("--mode", f.mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        apply_config(app, f);
        const PipelineConfig c = pipeline_config(f);
        for (const auto& [cmd, stage] : stages) {
            if (!cmd->parsed()) continue;
            print_outcomes({run_stage(stage, c)});
            if (stage == Stage::Fit) print_fit_table(c, f.format);
            return 0;
        }
        if (run->parsed()) {
            print_outcomes(run_pipeline(c));
            print_fit_table(c, f.format);
            return 0;
        }
        if (sim->parsed()) return simulate(f);
        if (syn->parsed()) return synth(f, *syn);
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
