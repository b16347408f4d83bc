#include "ssn/profiling/deviations.hpp"

#include <algorithm>
#include <numeric>

#include "ssn/util/errors.hpp"
#include "ssn/util/parallel.hpp"

namespace ssn {

GramStats& GramStats::operator+=(const GramStats& o) {
    nn += o.nn;
    ns += o.ns;
    ss += o.ss;
    dn += o.dn;
    ds += o.ds;
    dd += o.dd;
    terms += o.terms;
    return *this;
}

GramStats GramStats::scaled(double factor) const {
    const double f2 = factor * factor;
    GramStats g = *this;
    g.nn *= f2;
    g.ns *= f2;
    g.ss *= f2;
    g.dn *= f2;
    g.ds *= f2;
    g.dd *= f2;
    return g;
}

GramStats gram_from_entries(std::span<const DeviationEntry> entries) {
    GramStats g;
    for (const auto& e : entries) {
        g.nn += e.from_neighbors * e.from_neighbors;
        g.ns += e.from_neighbors * e.from_source;
        g.ss += e.from_source * e.from_source;
        g.dn += e.profile_change * e.from_neighbors;
        g.ds += e.profile_change * e.from_source;
        g.dd += e.profile_change * e.profile_change;
    }
    g.terms = entries.size();
    return g;
}

namespace {

// Dense view of one year's trend source.
struct SourceYear {
    std::vector<double> dense;
    InterestProfile restricted;  // support actually used (all of it, or top-K)
    double norm_sq = 0.0;        // over the restricted support
    std::size_t support = 0;
};

SourceYear make_source_year(const InterestProfile& share, const std::optional<std::size_t>& top_k) {
    SourceYear sy;
    sy.dense.assign(share.dimension(), 0.0);
    if (top_k && *top_k < share.support_size()) {
        std::vector<ProfileEntry> e(share.entries().begin(), share.entries().end());
        std::stable_sort(e.begin(), e.end(), [](const ProfileEntry& a, const ProfileEntry& b) {
            return a.weight > b.weight;
        });
        e.resize(*top_k);
        sy.restricted = InterestProfile::from_entries(share.dimension(), std::move(e));
    } else {
        sy.restricted = share;
    }
    sy.restricted.accumulate_into(sy.dense);
    for (const auto& e : sy.restricted.entries()) sy.norm_sq += e.weight * e.weight;
    sy.support = sy.restricted.support_size();
    return sy;
}

struct Scratch {
    std::vector<double> now, next, neigh, mean_scratch;
    std::vector<std::uint32_t> support, mean_support;
    std::vector<const InterestProfile*> rows;

    explicit Scratch(std::size_t k) : now(k, 0.0), next(k, 0.0), neigh(k, 0.0), mean_scratch(k, 0.0) {}
};

void load(const InterestProfile& p, std::vector<double>& dense, std::vector<std::uint32_t>& support) {
    for (const auto& e : p.entries()) {
        dense[e.topic.value] = e.weight;
        support.push_back(e.topic.value);
    }
}

void clear(const InterestProfile& p, std::vector<double>& dense) {
    for (const auto& e : p.entries()) dense[e.topic.value] = 0.0;
}

DeviationBlock make_block(MemberId m, int year, const InterestProfile& now, const InterestProfile& next,
                          const std::optional<InterestProfile>& neigh, std::uint32_t neighbor_count,
                          const SourceYear& src, bool materialize, Scratch& sc) {
    DeviationBlock b;
    b.member = m;
    b.year = year;
    b.has_neighbors = neigh.has_value();
    b.neighbor_count = neighbor_count;

    sc.support.clear();
    load(now, sc.now, sc.support);
    load(next, sc.next, sc.support);
    if (neigh) load(*neigh, sc.neigh, sc.support);
    if (materialize) {
        for (const auto& e : src.restricted.entries()) sc.support.push_back(e.topic.value);
    }
    std::sort(sc.support.begin(), sc.support.end());
    sc.support.erase(std::unique(sc.support.begin(), sc.support.end()), sc.support.end());

    if (materialize) {
        b.entries.reserve(sc.support.size());
        for (std::uint32_t k : sc.support) {
            DeviationEntry e;
            e.topic = TopicId{k};
            e.profile_change = sc.next[k] - sc.now[k];
            e.from_neighbors = neigh ? sc.neigh[k] - sc.now[k] : 0.0;
            e.from_source = src.dense[k] - sc.now[k];
            b.entries.push_back(e);
        }
        b.gram = gram_from_entries(b.entries);
    } else {
        // Outside the member/neighbor support only S = xi_s is nonzero, so its
        // contribution to <S,S> is |xi_s|^2 minus the part already visited.
        GramStats g;
        double visited_source_sq = 0.0;
        std::uint64_t outside_source = 0;
        for (std::uint32_t k : sc.support) {
            const double d = sc.next[k] - sc.now[k];
            const double n = neigh ? sc.neigh[k] - sc.now[k] : 0.0;
            const double s = src.dense[k] - sc.now[k];
            g.nn += n * n;
            g.ns += n * s;
            g.ss += s * s;
            g.dn += d * n;
            g.ds += d * s;
            g.dd += d * d;
            visited_source_sq += src.dense[k] * src.dense[k];
            if (src.dense[k] == 0.0) ++outside_source;
        }
        g.ss += src.norm_sq - visited_source_sq;
        g.terms = src.support + outside_source;
        b.gram = g;
    }

    clear(now, sc.now);
    clear(next, sc.next);
    if (neigh) clear(*neigh, sc.neigh);
    return b;
}

}  // namespace

Deviations compute_deviations(const ProfileSeries& profiles, const std::map<int, InterestProfile>& source,
                              const GraphSeries& graph, const DeviationOptions& options) {
    const std::size_t k = profiles.topic_count();
    std::map<int, SourceYear> src;
    for (const auto& [year, share] : source) {
        if (share.dimension() != k) throw DimensionMismatch(k, share.dimension());
        src.emplace(year, make_source_year(share, options.trend_top_k));
    }
    // The top-K restriction is only expressible through explicit entries.
    const bool entries_route = options.materialize || options.trend_top_k.has_value();

    const std::size_t n = profiles.member_count();
    const unsigned jobs = resolve_jobs(options.jobs);
    const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(n, 1), jobs);
    std::vector<std::vector<DeviationBlock>> parts(chunks);
    parallel_for(chunks, jobs, [&](std::size_t cb, std::size_t ce) {
        Scratch sc(k);
        for (std::size_t c = cb; c < ce; ++c) {
            auto& out = parts[c];
            for (std::size_t mi = n * c / chunks; mi < n * (c + 1) / chunks; ++mi) {
                const MemberId m{static_cast<std::uint32_t>(mi)};
                if (!profiles.semantically_treatable(m)) continue;
                const auto snaps = profiles.snapshots(m);
                if (snaps.size() < 2) continue;
                for (int t = snaps.front().year; t < snaps.back().year; ++t) {
                    auto sit = src.find(t);
                    if (sit == src.end()) continue;
                    const auto& now = profiles.shares_at(m, t);
                    const auto& next = profiles.shares_at(m, t + 1);
                    sc.rows.clear();
                    graph.for_each_neighbor(m, t, [&](MemberId j) { sc.rows.push_back(&profiles.shares_at(j, t)); });
                    std::optional<InterestProfile> neigh;
                    if (!sc.rows.empty()) neigh = running_mean(sc.rows, sc.mean_scratch, sc.mean_support, k);
                    auto block = make_block(m, t, now, next, neigh, static_cast<std::uint32_t>(sc.rows.size()),
                                            sit->second, entries_route, sc);
                    if (!options.materialize) block.entries.clear();
                    out.push_back(std::move(block));
                }
            }
        }
    });

    Deviations d;
    d.topic_count = k;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    d.blocks.reserve(total);
    for (auto& p : parts) {
        std::move(p.begin(), p.end(), std::back_inserter(d.blocks));
    }
    return d;
}

}  // namespace ssn
