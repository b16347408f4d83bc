#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssn/corpus/event.hpp"
#include "ssn/reports/reports.hpp"
#include "ssn/reports/synthetic.hpp"

namespace ssn {

enum class Stage { Ingest, Index, Profile, Fit, Report };
std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

// File names inside the cache directory.
struct CacheLayout {
    std::filesystem::path root;
    std::filesystem::path events() const { return root / "events.ndjson"; }
    std::filesystem::path indexed() const { return root / "indexed.ndjson"; }
    std::filesystem::path lexicon() const { return root / "lexicon.txt"; }
    std::filesystem::path synth_lexicon() const { return root / "synth_lexicon.txt"; }
    std::filesystem::path meta() const { return root / "meta.json"; }
    std::filesystem::path members() const { return root / "members.ndjson"; }
    std::filesystem::path profiles() const { return root / "profiles.ndjson"; }
    std::filesystem::path graph() const { return root / "graph.ndjson"; }
    std::filesystem::path trends() const { return root / "trends.ndjson"; }
    std::filesystem::path deviations() const { return root / "deviations.ndjson"; }
    std::filesystem::path fit() const { return root / "fit.json"; }
    std::filesystem::path member_fits() const { return root / "member_fits.ndjson"; }
    std::filesystem::path truth() const { return root / "truth.json"; }
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path manifest(Stage s) const;
};

struct PipelineConfig {
    std::filesystem::path cache_dir = "ssn-cache";
    std::filesystem::path corpus;   // DBLP-style XML, or an event log (.ndjson / .jsonl)
    std::filesystem::path lexicon;  // empty: the synthetic lexicon in the cache, if any
    CorpusFilter filter;
    // Deviation blocks t -> t + 1 are kept when both years fall in the range.
    std::optional<std::pair<int, int>> year_range;
    std::optional<std::size_t> trend_top_k;
    ProjectionMode projection = ProjectionMode::Refit;
    std::filesystem::path frequent_names;  // empty: no flagging
    ReportOptions report;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool force = false;  // rerun stages even when their manifest matches
};

struct StageOutcome {
    Stage stage = Stage::Ingest;
    bool reused = false;
    std::string summary;
};

// Runs one stage, or reuses its outputs when the stage manifest records the
// same inputs, configuration and outputs. Errors are rethrown with the stage
// name prefixed, keeping their type (InputError, NumericalError).
StageOutcome run_stage(Stage stage, const PipelineConfig& config);
std::vector<StageOutcome> run_pipeline(const PipelineConfig& config, Stage from = Stage::Ingest,
                                       Stage to = Stage::Report);

// Cached profile-stage data, as the fit and report stages read it back.
struct ProfileCache {
    int first_year = 0;
    int last_year = -1;
    std::vector<std::string> topics;
    std::vector<std::pair<std::string, std::string>> sources;  // external input digests
    std::vector<MemberInfo> members;
};
ProfileCache load_profile_cache(const CacheLayout& cache);
ReportInputs load_report_inputs(const PipelineConfig& config);

// Writes a synthetic run into the cache: profile-stage outputs for exact
// trajectories, or an event log plus synth_lexicon.txt for sampled corpora.
// truth.json holds the generating parameters either way.
void write_synthetic_cache(const SyntheticOutput& out, const PipelineConfig& config);

}  // namespace ssn
