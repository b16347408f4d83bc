#include "ssn/reports/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "ssn/diffusion/simulation.hpp"
#include "ssn/util/errors.hpp"

namespace ssn {

namespace {

MemberId mid(std::size_t i) { return MemberId{static_cast<std::uint32_t>(i)}; }

void add_edge(std::vector<Edge>& edges, std::size_t a, std::size_t b) {
    if (a != b) edges.emplace_back(mid(std::min(a, b)), mid(std::max(a, b)));
}

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::PreferentialAttachment: return "preferential-attachment";
        case Topology::ErdosRenyi: return "erdos-renyi";
        case Topology::Star: return "star";
        case Topology::Path: return "path";
        case Topology::Regular: return "regular";
    }
    return "?";
}

Topology parse_topology(const std::string& s) {
    if (s == "preferential-attachment" || s == "pa") return Topology::PreferentialAttachment;
    if (s == "erdos-renyi" || s == "er") return Topology::ErdosRenyi;
    if (s == "star") return Topology::Star;
    if (s == "path") return Topology::Path;
    if (s == "regular") return Topology::Regular;
    throw InputError("unknown topology '" + s + "'");
}

void validate(const SyntheticSpec& s) {
    if (s.n_members == 0 || s.n_topics == 0) throw InputError("synthetic spec needs members and topics");
    if (s.years < 2) throw InputError("synthetic spec needs at least two years");
    if (!s.member_x.empty() && s.member_x.size() != s.n_members)
        throw InputError("member_x must list one value per member");
    if (!s.member_x_s.empty() && s.member_x_s.size() != s.n_members)
        throw InputError("member_x_s must list one value per member");
    if (!s.source_schedule.empty()) {
        if (s.source_schedule.size() != static_cast<std::size_t>(s.years))
            throw InputError("source schedule must list one profile per year");
        for (const auto& p : s.source_schedule) {
            if (p.dimension() != s.n_topics) throw DimensionMismatch(s.n_topics, p.dimension());
        }
    }
    if (s.mode == SynthMode::Sampled && s.papers_per_year == 0) throw InputError("papers_per_year must be positive");
    if (!(s.dirichlet_alpha > 0.0)) throw InputError("dirichlet_alpha must be positive");
    const auto& t = s.topology;
    if (t.kind == Topology::PreferentialAttachment && (t.m == 0 || t.m >= s.n_members))
        throw InputError("preferential attachment needs 0 < m < members");
    if (t.kind == Topology::ErdosRenyi && !(t.p >= 0.0 && t.p <= 1.0)) throw InputError("edge probability outside [0, 1]");
    if (t.kind == Topology::Regular && (t.k >= s.n_members || (t.k % 2 == 1 && s.n_members % 2 == 1)))
        throw InputError("no circulant graph with that degree and member count");
}

SyntheticTruth make_truth(const SyntheticSpec& s) {
    SyntheticTruth t;
    t.uniform = s.member_x.empty() && s.member_x_s.empty();
    t.x = s.member_x.empty() ? std::vector<double>(s.n_members, s.x) : s.member_x;
    t.x_s = s.member_x_s.empty() ? std::vector<double>(s.n_members, s.x_s) : s.member_x_s;
    for (std::size_t i = 0; i < s.n_members; ++i) {
        if (!(t.x[i] >= 0.0) || !(t.x_s[i] >= 0.0) || t.x[i] + t.x_s[i] > 1.0)
            throw InputError("infeasible true parameters for member " + std::to_string(i));
    }
    return t;
}

std::size_t draw(const std::vector<double>& weights, Rng& rng) {
    std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
    return d(rng);
}

ExactTrajectories evolve_exact(const SyntheticSpec& s, const SocialGraph& graph, const SyntheticTruth& truth, Rng& rng) {
    ExactTrajectories out;
    for (std::size_t i = 0; i < s.n_members; ++i) out.members.intern(member_name(i));
    out.graph = GraphSeries::from_static(graph, s.first_year);
    out.profiles = ProfileSeries(s.n_members, s.n_topics);

    std::vector<InterestProfile> schedule = s.source_schedule;
    if (schedule.empty()) {
        InterestProfile cur = dirichlet_profile(s.n_topics, 1.0, rng);
        for (int y = 0; y < s.years; ++y) {
            if (y > 0) {
                std::vector<double> mix = cur.dense();
                dirichlet_profile(s.n_topics, 1.0, rng).accumulate_into(mix, 0.3);
                for (double& v : mix) v /= 1.3;
                cur = InterestProfile::from_dense(mix);
            }
            schedule.push_back(cur);
        }
    }
    std::vector<InterestProfile> initial;
    for (std::size_t i = 0; i < s.n_members; ++i) initial.push_back(dirichlet_profile(s.n_topics, s.dirichlet_alpha, rng));
    const auto config = SusceptibilityConfig::per_member(graph, truth.x, truth.x_s);

    SimulationState state = make_state(initial, schedule.front());
    for (int y = 0; y < s.years; ++y) {
        const int year = s.first_year + y;
        state.source = schedule[y].dense();
        out.source.emplace(year, schedule[y]);
        for (std::size_t i = 0; i < s.n_members; ++i)
            out.profiles.append(mid(i), year, InterestProfile::from_dense(state.profiles.row(i)));
        if (y + 1 < s.years) state = step(state, config, graph);
    }
    for (std::size_t i = 0; i < s.n_members; ++i) out.profiles.set_semantically_treatable(mid(i), true);
    return out;
}

SampledCorpus sample_corpus(const SyntheticSpec& s, const SocialGraph& graph, const SyntheticTruth& truth, Rng& rng) {
    SampledCorpus out;
    for (std::size_t k = 0; k < s.n_topics; ++k) out.lexicon.push_back({topic_name(k), {}});
    const double papers = s.papers_per_year;

    // Untitled joint papers encode the graph; they carry no topic.
    for (const auto& [a, b] : graph.edges()) {
        CorpusEvent e;
        e.year = s.first_year;
        e.kind = PublicationKind::ConferencePaper;
        e.authors = {member_name(a.value), member_name(b.value)};
        out.events.push_back(std::move(e));
    }

    std::vector<std::vector<double>> counts(s.n_members, std::vector<double>(s.n_topics, 0.0));
    auto publish = [&](std::size_t i, int year, const std::vector<double>& weights) {
        for (unsigned p = 0; p < s.papers_per_year; ++p) {
            const std::size_t k = draw(weights, rng);
            counts[i][k] += 1.0;
            CorpusEvent e;
            e.year = year;
            e.kind = PublicationKind::JournalArticle;
            e.authors = {member_name(i)};
            e.title = topic_name(k);
            e.topics = {topic_name(k)};
            out.events.push_back(std::move(e));
        }
    };
    for (std::size_t i = 0; i < s.n_members; ++i)
        publish(i, s.first_year, dirichlet_profile(s.n_topics, s.dirichlet_alpha, rng).dense());

    std::vector<std::vector<double>> xi(s.n_members);
    std::vector<double> trend(s.n_topics);
    for (int y = 0; y + 1 < s.years; ++y) {
        std::fill(trend.begin(), trend.end(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < s.n_members; ++i) {
            double n = 0.0;
            for (double c : counts[i]) n += c;
            xi[i].resize(s.n_topics);
            for (std::size_t k = 0; k < s.n_topics; ++k) {
                xi[i][k] = counts[i][k] / n;
                trend[k] += counts[i][k];
            }
            total += n;
        }
        for (double& v : trend) v /= total;
        for (std::size_t i = 0; i < s.n_members; ++i) {
            double n = 0.0;
            for (double c : counts[i]) n += c;
            const auto nb = graph.neighbors(mid(i));
            std::vector<double> mean(s.n_topics, 0.0);
            for (MemberId j : nb) {
                for (std::size_t k = 0; k < s.n_topics; ++k) mean[k] += xi[j.value][k];
            }
            const double xn = nb.empty() ? 0.0 : truth.x[i];
            const double gain = (n + papers) / papers;
            std::vector<double> q(s.n_topics);
            double sum = 0.0;
            for (std::size_t k = 0; k < s.n_topics; ++k) {
                const double neighbor = nb.empty() ? 0.0 : mean[k] / static_cast<double>(nb.size()) - xi[i][k];
                const double delta = xn * neighbor + truth.x_s[i] * (trend[k] - xi[i][k]);
                q[k] = xi[i][k] + gain * delta;
                if (q[k] < 0.0) {
                    q[k] = 0.0;
                    ++out.clipped;
                }
                sum += q[k];
            }
            if (!(sum > 0.0)) q = xi[i];
            publish(i, s.first_year + y + 1, q);
        }
    }
    return out;
}

}  // namespace

std::string member_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "m%05zu", i);
    return buf;
}

std::string topic_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "topic%04zu", k);
    return buf;
}

InterestProfile dirichlet_profile(std::size_t dimension, double alpha, Rng& rng) {
    std::gamma_distribution<double> g(alpha, 1.0);
    std::vector<double> v(dimension);
    double sum = 0.0;
    while (!(sum > 0.0)) {
        sum = 0.0;
        for (double& x : v) sum += (x = g(rng));
    }
    for (double& x : v) x /= sum;
    return InterestProfile::from_dense(v);
}

SocialGraph make_topology(std::size_t n, const TopologySpec& spec, Rng& rng) {
    std::vector<Edge> edges;
    switch (spec.kind) {
        case Topology::Star:
            for (std::size_t i = 1; i < n; ++i) add_edge(edges, 0, i);
            break;
        case Topology::Path:
            for (std::size_t i = 1; i < n; ++i) add_edge(edges, i - 1, i);
            break;
        case Topology::Regular:
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d = 1; d <= spec.k / 2; ++d) add_edge(edges, i, (i + d) % n);
                if (spec.k % 2 == 1) add_edge(edges, i, (i + n / 2) % n);
            }
            break;
        case Topology::ErdosRenyi: {
            std::bernoulli_distribution coin(spec.p);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (coin(rng)) add_edge(edges, i, j);
                }
            }
            break;
        }
        case Topology::PreferentialAttachment: {
            const std::size_t m = spec.m;
            // Every edge endpoint once: sampling from it is degree-proportional.
            std::vector<std::size_t> ends;
            for (std::size_t i = 0; i <= m && i < n; ++i) {
                for (std::size_t j = i + 1; j <= m && j < n; ++j) {
                    add_edge(edges, i, j);
                    ends.push_back(i);
                    ends.push_back(j);
                }
            }
            for (std::size_t v = m + 1; v < n; ++v) {
                std::set<std::size_t> targets;
                while (targets.size() < m) {
                    std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
                    targets.insert(ends[pick(rng)]);
                }
                for (std::size_t t : targets) {
                    add_edge(edges, v, t);
                    ends.push_back(v);
                    ends.push_back(t);
                }
            }
            break;
        }
    }
    return SocialGraph::from_edges(0, n, edges);
}

SyntheticOutput generate_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    SyntheticOutput out;
    out.spec = spec;
    out.truth = make_truth(spec);
    Rng rng(spec.seed);
    out.graph = make_topology(spec.n_members, spec.topology, rng);
    if (spec.mode == SynthMode::Exact) {
        out.exact = evolve_exact(spec, out.graph, out.truth, rng);
    } else {
        out.sampled = sample_corpus(spec, out.graph, out.truth, rng);
    }
    return out;
}

nlohmann::json spec_to_json(const SyntheticSpec& s) {
    nlohmann::json j;
    j["members"] = s.n_members;
    j["topics"] = s.n_topics;
    j["years"] = s.years;
    j["first_year"] = s.first_year;
    j["topology"] = {{"kind", topology_name(s.topology.kind)}, {"m", s.topology.m}, {"p", s.topology.p}, {"k", s.topology.k}};
    j["x"] = s.x;
    j["x_s"] = s.x_s;
    if (!s.member_x.empty()) j["member_x"] = s.member_x;
    if (!s.member_x_s.empty()) j["member_x_s"] = s.member_x_s;
    j["mode"] = s.mode == SynthMode::Exact ? "exact" : "sampled";
    j["papers_per_year"] = s.papers_per_year;
    j["alpha"] = s.dirichlet_alpha;
    j["seed"] = s.seed;
    return j;
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
    SyntheticSpec s;
    try {
        s.n_members = j.value("members", s.n_members);
        s.n_topics = j.value("topics", s.n_topics);
        s.years = j.value("years", s.years);
        s.first_year = j.value("first_year", s.first_year);
        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            s.topology.kind = parse_topology(t.value("kind", std::string("preferential-attachment")));
            s.topology.m = t.value("m", s.topology.m);
            s.topology.p = t.value("p", s.topology.p);
            s.topology.k = t.value("k", s.topology.k);
        }
        s.x = j.value("x", s.x);
        s.x_s = j.value("x_s", s.x_s);
        if (j.contains("member_x")) s.member_x = j.at("member_x").get<std::vector<double>>();
        if (j.contains("member_x_s")) s.member_x_s = j.at("member_x_s").get<std::vector<double>>();
        const std::string mode = j.value("mode", std::string("exact"));
        if (mode == "exact") {
            s.mode = SynthMode::Exact;
        } else if (mode == "sampled") {
            s.mode = SynthMode::Sampled;
        } else {
            throw InputError("unknown synthetic mode '" + mode + "'");
        }
        s.papers_per_year = j.value("papers_per_year", s.papers_per_year);
        s.dirichlet_alpha = j.value("alpha", s.dirichlet_alpha);
        s.seed = j.value("seed", s.seed);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("synthetic spec: ") + e.what());
    }
    return s;
}

nlohmann::json truth_to_json(const SyntheticOutput& out) {
    nlohmann::json j;
    j["spec"] = spec_to_json(out.spec);
    j["uniform"] = out.truth.uniform;
    if (out.truth.uniform) {
        j["x"] = out.spec.x;
        j["x_s"] = out.spec.x_s;
    }
    auto members = nlohmann::json::array();
    for (std::size_t i = 0; i < out.truth.x.size(); ++i) {
        members.push_back({{"member", member_name(i)},
                           {"x", out.truth.x[i]},
                           {"x_s", out.truth.x_s[i]},
                           {"degree", out.graph.degree(mid(i))}});
    }
    j["members"] = std::move(members);
    auto edges = nlohmann::json::array();
    for (const auto& [a, b] : out.graph.edges()) edges.push_back({a.value, b.value});
    j["edges"] = std::move(edges);
    if (out.sampled) j["clipped_weights"] = out.sampled->clipped;
    return j;
}

}  // namespace ssn
