#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ssn/corpus/event_log.hpp"
#include "ssn/corpus/graph_series.hpp"
#include "ssn/corpus/indexed_corpus.hpp"
#include "ssn/corpus/lexicon.hpp"
#include "ssn/corpus/trends.hpp"
#include "ssn/corpus/xml_reader.hpp"
#include "ssn/reports/synthetic.hpp"
#include "ssn/util/errors.hpp"

using namespace ssn;

namespace {

const char* kThreeRecords = R"(<?xml version="1.0" encoding="ISO-8859-1"?>
<!DOCTYPE dblp SYSTEM "dblp.dtd">
<dblp>
<article key="a/1"><author>Jos&eacute; Garc&iacute;a</author><author>B. Smith</author><author>C. Lee</author><author>D. Kim</author>
<title>A Survey of <i>Neural</i> Networks.</title><year>2001</year></article>
<inproceedings key="c/2"><author>B. Smith</author><title>Semantic Web Services</title><year>1949</year></inproceedings>
<phdthesis key="t/3"><author>C. Lee</author><title>On Things</title><year>2005</year></phdthesis>
</dblp>
)";

std::vector<CorpusEvent> parse(const std::string& xml, CorpusFilter f = {}, ParseStats* stats = nullptr) {
    std::istringstream in(xml);
    return parse_corpus(in, f, stats);
}

TopicLexicon lexicon(std::initializer_list<const char*> lexemes) {
    std::vector<TopicEntry> e;
    for (const char* l : lexemes) e.push_back({l, {}});
    return TopicLexicon(e);
}

CorpusEvent event(int year, std::vector<std::string> authors, std::vector<std::string> topics = {}) {
    CorpusEvent e;
    e.year = year;
    e.kind = PublicationKind::JournalArticle;
    e.authors = std::move(authors);
    e.topics = std::move(topics);
    return e;
}

// Every way to cover the tokens with non-overlapping lexicon spans; returns the
// covers with the largest number of consumed tokens and, among those, the
// fewest spans.
std::set<std::set<std::string>> brute_force_covers(const std::vector<std::string>& tokens,
                                                   const std::vector<std::string>& lexemes) {
    struct Best {
        std::size_t consumed = 0;
        std::size_t spans = 0;
        std::set<std::set<std::string>> covers;
    } best;
    std::vector<std::string> chosen;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t consumed) {
        if (pos == tokens.size()) {
            const std::set<std::string> cover(chosen.begin(), chosen.end());
            if (consumed > best.consumed || (consumed == best.consumed && chosen.size() < best.spans)) {
                best = {consumed, chosen.size(), {cover}};
            } else if (consumed == best.consumed && chosen.size() == best.spans) {
                best.covers.insert(cover);
            }
            return;
        }
        rec(pos + 1, consumed);
        for (const auto& lx : lexemes) {
            const auto parts = normalize_title(lx);
            if (pos + parts.size() <= tokens.size() && std::equal(parts.begin(), parts.end(), tokens.begin() + pos)) {
                chosen.push_back(lx);
                rec(pos + parts.size(), consumed + parts.size());
                chosen.pop_back();
            }
        }
    };
    rec(0, 0);
    return best.covers;
}

}  // namespace

TEST_CASE("parse_corpus filters by year and keeps all authors") {
    ParseStats stats;
    const auto ev = parse(kThreeRecords, {}, &stats);
    REQUIRE(ev.size() == 2);
    CHECK(stats.records == 3);
    CHECK(stats.dropped_year == 1);
    CHECK(ev[0].authors.size() == 4);
    CHECK(ev[0].authors[0] == "Jos\xC3\xA9" " Garc\xC3\xAD" "a");
    CHECK(ev[0].title == "A Survey of Neural Networks.");
    CHECK(ev[0].kind == PublicationKind::JournalArticle);
    CHECK(ev[1].kind == PublicationKind::Other);
    CHECK(ev[1].year == 2005);
}

TEST_CASE("parse_corpus kind filter") {
    CorpusFilter f;
    f.kinds = {PublicationKind::ConferencePaper};
    f.from_year = 1900;
    ParseStats stats;
    const auto ev = parse(kThreeRecords, f, &stats);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == PublicationKind::ConferencePaper);
    CHECK(stats.dropped_kind == 2);
}

TEST_CASE("parse_corpus reports the byte offset of malformed input") {
    const std::string bad = "<dblp><article><author>A</author><year>2001</year></artcle></dblp>";
    try {
        parse(bad);
        FAIL("expected a parse error");
    } catch (const CorpusParseError& e) {
        CHECK(e.byte_offset() > 0);
        CHECK(e.byte_offset() < bad.size());
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("parse_corpus streams a document larger than one chunk") {
    std::string xml = "<dblp>\n";
    for (int i = 0; i < 3000; ++i)
        xml += "<article><author>Author " + std::to_string(i % 97) + "</author><title>Title number " +
               std::to_string(i) + "</title><year>" + std::to_string(1960 + i % 50) + "</year></article>\n";
    xml += "</dblp>\n";
    REQUIRE(xml.size() > 3 * 65536);
    std::size_t n = 0;
    std::istringstream in(xml);
    const auto stats = parse_corpus(in, {}, [&](CorpusEvent&& e) {
        CHECK(e.title == "Title number " + std::to_string(n));
        ++n;
    });
    CHECK(n == 3000);
    CHECK(stats.kept == 3000);
}

TEST_CASE("records without authors are dropped") {
    ParseStats stats;
    const auto ev = parse("<dblp><article><title>x</title><year>2000</year></article></dblp>", {}, &stats);
    CHECK(ev.empty());
    CHECK(stats.dropped_authors == 1);
}

TEST_CASE("event log round trip is byte stable") {
    const auto ev = parse(kThreeRecords);
    std::ostringstream first;
    write_event_log(first, ev);
    std::istringstream in(first.str());
    const auto back = read_event_log(in);
    CHECK(back == ev);
    std::ostringstream second;
    write_event_log(second, back);
    CHECK(first.str() == second.str());
    CHECK_THROWS_AS(event_from_json_line("{\"year\": 2000}"), InputError);
    CHECK_THROWS_AS(event_from_json_line("not json"), InputError);
}

TEST_CASE("index_title examples") {
    const auto lx = lexicon({"neural networks"});
    CHECK(index_title("A Survey of Neural Networks", lx) == std::vector<TopicId>{TopicId{0}});
    CHECK(index_title("Cooking with Butter", lx).empty());

    const auto sw = lexicon({"semantic web", "web services", "semantic web services"});
    CHECK(index_title("semantic web services", sw) == std::vector<TopicId>{TopicId{2}});
}

TEST_CASE("index_title longest match agrees with a brute-force cover search") {
    const std::vector<std::string> lexemes{"semantic web", "web services", "semantic web services", "services", "web"};
    std::vector<TopicEntry> entries;
    for (const auto& l : lexemes) entries.push_back({l, {}});
    const TopicLexicon lx(entries);
    const auto tokens = normalize_title("semantic web services");
    const auto covers = brute_force_covers(tokens, lexemes);
    REQUIRE(covers.size() == 1);
    CHECK(*covers.begin() == std::set<std::string>{"semantic web services"});
    const auto got = lx.match(tokens);
    REQUIRE(got.size() == 1);
    CHECK(lx.canonical(got[0]) == "semantic web services");
}

TEST_CASE("index_title ignores case and punctuation") {
    const auto lx = lexicon({"neural networks", "web services"});
    const auto a = index_title("Neural Networks for Web Services", lx);
    CHECK(index_title("NEURAL  networks, for web-services!", lx) == a);
    CHECK(a.size() == 2);
    CHECK(index_title("neural networks neural networks", lx).size() == 1);
}

TEST_CASE("lexicon aliases and file format") {
    std::istringstream in("# topics\nneural networks|neural nets|ANN\n\nsemantic web\n");
    const auto lx = load_lexicon(in);
    REQUIRE(lx.size() == 2);
    CHECK(lx.find("Neural Nets") == TopicId{0});
    CHECK(lx.find("ann") == TopicId{0});
    CHECK(index_title("Training ANN models", lx) == std::vector<TopicId>{TopicId{0}});
    std::istringstream bad("neural networks||x\n");
    CHECK_THROWS_AS(load_lexicon(bad), InputError);
    CHECK_THROWS_AS(lexicon({"  ,, "}), InputError);
}

TEST_CASE("validate_lexicon examples") {
    const auto dup = validate_lexicon(lexicon({"neural networks", "neural networks"}));
    REQUIRE_FALSE(dup.empty());
    CHECK(dup[0].kind == LexiconWarning::Kind::DuplicateLexeme);

    const auto sub = validate_lexicon(lexicon({"web", "semantic web"}));
    CHECK(std::any_of(sub.begin(), sub.end(), [](const LexiconWarning& w) {
        return w.kind == LexiconWarning::Kind::SubsequenceOfOther && w.topic == TopicId{0};
    }));

    const auto stop = validate_lexicon(lexicon({"the", "ontology matching"}));
    CHECK(std::any_of(stop.begin(), stop.end(),
                      [](const LexiconWarning& w) { return w.kind == LexiconWarning::Kind::StopwordLike; }));
    CHECK(validate_lexicon(lexicon({"ontology matching", "graph mining"})).empty());
}

TEST_CASE("graph series is cumulative") {
    const auto lx = lexicon({"a"});
    const std::vector<CorpusEvent> ev{event(2000, {"A", "B"}), event(2001, {"B", "C"}), event(2001, {"A", "B"}),
                                      event(2002, {"D"})};
    const auto corpus = resolve_corpus(ev, lx);
    const auto gs = build_graph_series(corpus);
    const auto A = *corpus.members.find("A"), B = *corpus.members.find("B"), C = *corpus.members.find("C"),
               D = *corpus.members.find("D");
    const auto g2000 = gs.snapshot(2000);
    const auto g2001 = gs.snapshot(2001);
    const auto g2002 = gs.snapshot(2002);
    CHECK(g2000.edges() == std::vector<Edge>{{A, B}});
    CHECK(g2001.edge_count() == 2);
    CHECK(g2001.has_edge(B, C));
    CHECK(g2002.contains(D));
    CHECK(g2002.degree(D) == 0);
    CHECK_FALSE(g2001.contains(D));
    for (int y = 2000; y < 2002; ++y) {
        const auto now = gs.snapshot(y), next = gs.snapshot(y + 1);
        for (const auto& [a, b] : now.edges()) CHECK(next.has_edge(a, b));
        for (std::uint32_t m = 0; m < now.member_count(); ++m)
            if (now.contains(MemberId{m})) CHECK(next.contains(MemberId{m}));
    }
}

TEST_CASE("preferential attachment degree tail exponent") {
    for (unsigned m : {2u, 3u}) {
        Rng rng(11 + m);
        const auto g = make_topology(20000, {Topology::PreferentialAttachment, m, 0.0, 0}, rng);
        const auto alpha = degree_tail_exponent(g, 3 * m);
        REQUIRE(alpha.has_value());
        CHECK(*alpha >= 2.5);
        CHECK(*alpha <= 3.0);
    }
}

TEST_CASE("trend examples") {
    const auto lx = lexicon({"alpha", "beta"});
    SUBCASE("one paper") {
        const auto tr = compute_trends(resolve_corpus(std::vector{event(2000, {"A"}, {"alpha"})}, lx));
        const auto* y = tr.at(2000);
        REQUIRE(y);
        CHECK(y->share->weight(TopicId{0}) == 1.0);
        CHECK(*y->entropy == 0.0);
    }
    SUBCASE("counts 3 and 1") {
        std::vector<CorpusEvent> ev(3, event(2000, {"A"}, {"alpha"}));
        ev.push_back(event(2000, {"B"}, {"beta"}));
        const auto tr = compute_trends(resolve_corpus(ev, lx));
        const auto* y = tr.at(2000);
        CHECK(y->share->weight(TopicId{0}) == 0.75);
        CHECK(y->share->weight(TopicId{1}) == 0.25);
        CHECK(*y->entropy == doctest::Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)).epsilon(1e-14));
        CHECK(*y->entropy == doctest::Approx(0.5623).epsilon(1e-4));
        CHECK(*y->average_frequency == 2.0);
    }
    SUBCASE("years without indexed occurrences have no share") {
        const std::vector<CorpusEvent> ev{event(1999, {"A"}), event(2001, {"A"}, {"beta"})};
        const auto tr = compute_trends(resolve_corpus(ev, lx));
        REQUIRE(tr.years().size() == 3);
        CHECK_FALSE(tr.at(1999)->share.has_value());
        CHECK_FALSE(tr.at(2000)->entropy.has_value());
        CHECK(tr.at(2001)->share.has_value());
        CHECK(tr.source_schedule().size() == 1);
    }
}

TEST_CASE("uniform counts give entropy ln N") {
    for (std::size_t n : {1u, 2u, 7u, 40u, 1000u}) {
        std::vector<double> v(n, 1.0 / static_cast<double>(n));
        CHECK(std::abs(shannon_entropy(InterestProfile::from_dense(v)) - std::log(static_cast<double>(n))) < 1e-12);
    }
}

TEST_CASE("trend invariants on a sampled corpus") {
    SyntheticSpec spec;
    spec.mode = SynthMode::Sampled;
    spec.n_members = 60;
    spec.years = 12;
    const auto out = generate_synthetic(spec);
    const TopicLexicon lx(out.sampled->lexicon);
    const auto tr = compute_trends(resolve_corpus(out.sampled->events, lx));
    const TrendYear* prev = nullptr;
    for (const auto& y : tr.years()) {
        REQUIRE(y.share.has_value());
        CHECK(std::abs(y.share->total() - 1.0) < 1e-12);
        CHECK(*y.entropy >= 0.0);
        CHECK(*y.entropy <= std::log(static_cast<double>(y.topics_seen)) + 1e-12);
        if (prev) {
            CHECK(y.topics_seen >= prev->topics_seen);
            for (std::size_t k = 0; k < y.counts.size(); ++k) CHECK(y.counts[k] >= prev->counts[k]);
        }
        prev = &y;
    }
}
