#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssn/core/members.hpp"
#include "ssn/core/profile.hpp"
#include "ssn/core/social_graph.hpp"
#include "ssn/corpus/event.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/lexicon.hpp"
#include "ssn/profiling/profile_series.hpp"

namespace ssn {

enum class Topology { PreferentialAttachment, ErdosRenyi, Star, Path, Regular };

struct TopologySpec {
    Topology kind = Topology::PreferentialAttachment;
    unsigned m = 2;    // preferential attachment: links per new member
    double p = 0.05;   // Erdos-Renyi edge probability
    unsigned k = 4;    // regular degree
};

using Rng = std::mt19937_64;

// Star: member 0 is the center. Path: 0 - 1 - ... Regular: circulant graph.
// Preferential attachment starts from a clique on m + 1 members.
SocialGraph make_topology(std::size_t n, const TopologySpec& spec, Rng& rng);

enum class SynthMode {
    Exact,    // likelihood trajectories as yearly profile snapshots
    Sampled,  // publications drawn from the likelihoods
};

struct SyntheticSpec {
    std::size_t n_members = 100;
    std::size_t n_topics = 20;
    int years = 30;
    int first_year = 1990;
    TopologySpec topology;
    double x = 0.05;    // uniform truth
    double x_s = 0.05;
    std::vector<double> member_x;    // per-member truth, overrides x when non-empty
    std::vector<double> member_x_s;  // per-member truth, overrides x_s when non-empty
    // Exact mode: L_s per year (years entries). Generated when empty.
    std::vector<InterestProfile> source_schedule;
    SynthMode mode = SynthMode::Exact;
    unsigned papers_per_year = 5;
    double dirichlet_alpha = 0.5;
    std::uint64_t seed = 1;
};

struct SyntheticTruth {
    std::vector<double> x;    // per member
    std::vector<double> x_s;  // per member
    bool uniform = true;
};

struct ExactTrajectories {
    MemberDirectory members;
    GraphSeries graph;
    ProfileSeries profiles;
    std::map<int, InterestProfile> source;
};

struct SampledCorpus {
    std::vector<CorpusEvent> events;  // topics filled in
    std::vector<TopicEntry> lexicon;
    std::uint64_t clipped = 0;  // negative sampling weights set to zero
};

struct SyntheticOutput {
    SyntheticSpec spec;
    SocialGraph graph;
    SyntheticTruth truth;
    std::optional<ExactTrajectories> exact;
    std::optional<SampledCorpus> sampled;
};

// Throws InputError for an infeasible or malformed spec. The seed fully
// determines the output.
SyntheticOutput generate_synthetic(const SyntheticSpec& spec);

std::string member_name(std::size_t i);
std::string topic_name(std::size_t k);

nlohmann::json truth_to_json(const SyntheticOutput& out);
// Reads the keys written by spec_to_json; absent keys keep their defaults.
SyntheticSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SyntheticSpec& spec);

InterestProfile dirichlet_profile(std::size_t dimension, double alpha, Rng& rng);

}  // namespace ssn
