// Regenerates the bundled mini-corpus fixture:
//   minicorpus.xml          DBLP-style records, 500 papers by 120 authors, 1993-2012
//   minicorpus_lexicon.txt  40 multi-word topics, some with aliases
//   frequent_names.txt      given x family name list
// Output is a pure function of the built-in seed. Only raw generator output is
// used (no std distributions) so the bytes do not depend on the standard library.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace {

std::mt19937_64 rng(20121993);

std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

const std::vector<std::string> kTopics = {
    "neural network|neural networks",
    "query optimization|query optimisation",
    "data mining",
    "machine learning",
    "information retrieval",
    "computer vision",
    "natural language processing",
    "software testing",
    "distributed systems|distributed system",
    "operating systems|operating system",
    "computer graphics",
    "model checking",
    "wireless sensor networks|wireless sensor network",
    "peer to peer|p2p",
    "cloud computing",
    "semantic web",
    "social networks|social network",
    "image segmentation",
    "speech recognition",
    "genetic algorithms|genetic algorithm",
    "logic programming",
    "type systems|type system",
    "compiler optimization",
    "parallel algorithms",
    "database systems|database system",
    "access control",
    "public key cryptography",
    "network security",
    "mobile robots|mobile robot",
    "reinforcement learning",
    "support vector machines|support vector machine",
    "knowledge representation",
    "human computer interaction",
    "software architecture",
    "real time systems",
    "graph algorithms",
    "fault tolerance",
    "web services|web service",
    "constraint satisfaction",
    "embedded systems",
};

// Display form used in titles, sometimes an alias or a hyphenated variant.
std::string surface(std::size_t topic) {
    std::vector<std::string> forms;
    std::string s = kTopics[topic];
    for (std::size_t p; (p = s.find('|')) != std::string::npos; s = s.substr(p + 1)) forms.push_back(s.substr(0, p));
    forms.push_back(s);
    std::string f = forms[below(forms.size())];
    const double r = unit();
    if (r < 0.15) {
        std::replace(f.begin(), f.end(), ' ', '-');
    } else if (r < 0.5) {
        bool start = true;
        for (char& c : f) {
            if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
            start = c == ' ' || c == '-';
        }
    }
    return f;
}

const std::vector<std::string> kGiven = {"Anna",  "Bruno", "Carla", "Dmitri", "Elena", "Felix",  "Greta", "Hugo",
                                         "Ines",  "Jonas", "Karin", "Lars",   "Marta", "Nils",   "Olga",  "Pavel",
                                         "Rosa",  "Sven",  "Tilde", "Ugo",    "Vera",  "Walter", "Yara",  "Zeno"};
const std::vector<std::string> kFamily = {"Albrecht", "Bianchi", "Castro",  "Duval",  "Eriksen",
                                          "Ferreira", "Gallo",   "Hartmann", "Ivanov", "Jansen",
                                          "Keller",   "Lindqvist", "Moreau", "Novak",  "Ortega"};
// Entity-encoded names exercise the reader's entity handling.
const std::vector<std::pair<std::string, std::string>> kAccented = {
    {"Jos&eacute; Garc&iacute;a", "Jos\xC3\xA9 Garc\xC3\xAD" "a"},
    {"Zo&euml; M&uuml;ller", "Zo\xC3\xAB M\xC3\xBCller"},
    {"Bj&ouml;rn &Aring;strand", "Bj\xC3\xB6rn \xC3\x85strand"},
};
const std::vector<std::string> kFrequent = {"Wei Wang", "Li Zhang", "Jun Chen"};
const std::string kHub = "Mara Castellan";

const std::vector<std::string> kTemplates = {"{A} for {B}",
                                             "Towards scalable {A}",
                                             "On {A} and {B} in practice",
                                             "A study of {A}",
                                             "Efficient {A} with {B}",
                                             "Revisiting {A}: lessons learned",
                                             "{A}, {B} and beyond",
                                             "Fast {A}"};

std::string fill(const std::string& tpl, const std::string& a, const std::string& b) {
    std::string out;
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl.compare(i, 3, "{A}") == 0) {
            out += a;
            i += 2;
        } else if (tpl.compare(i, 3, "{B}") == 0) {
            out += b;
            i += 2;
        } else {
            out += tpl[i];
        }
    }
    return out;
}

struct Author {
    std::string xml;  // as written in the document
    int first_year = 0;
    std::vector<std::size_t> favorites;
    std::set<std::size_t> coauthors;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_minicorpus OUTPUT_DIR\n";
        return 2;
    }
    const std::string dir = argv[1];
    constexpr int kFirst = 1993, kLast = 2012, kPapers = 500;
    constexpr std::size_t kAuthors = 120;

    std::vector<Author> authors;
    std::set<std::string> used;
    auto add = [&](std::string xml) {
        used.insert(xml);
        authors.push_back({std::move(xml), 0, {}, {}});
    };
    add(kHub);
    for (const auto& n : kFrequent) add(n);
    for (const auto& [xml, utf8] : kAccented) add(xml);
    while (authors.size() < kAuthors) {
        std::string n = kGiven[below(kGiven.size())] + " " + kFamily[below(kFamily.size())];
        if (!used.count(n)) add(n);
    }
    // Arrival years spread over the first 15 years; the hub and the first
    // dozen authors are there from the start.
    for (std::size_t i = 0; i < authors.size(); ++i) {
        authors[i].first_year = i < 12 ? kFirst : kFirst + static_cast<int>(below(15));
        for (int k = 0; k < 3; ++k) authors[i].favorites.push_back(below(kTopics.size()));
    }

    std::ofstream xml(dir + "/minicorpus.xml", std::ios::binary);
    xml << "<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?>\n<!DOCTYPE dblp SYSTEM \"dblp.dtd\">\n<dblp>\n";
    // Records the default filter drops: no year, and a year past the window.
    xml << "<www key=\"homepages/c/MaraCastellan\">\n<author>" << kHub << "</author>\n<title>Home Page</title>\n</www>\n";
    xml << "<article key=\"journals/future/Castellan15\">\n<author>" << kHub
        << "</author>\n<title>Neural networks in 2015</title>\n<year>2015</year>\n</article>\n";

    std::vector<bool> published(authors.size(), false);
    for (int p = 0; p < kPapers; ++p) {
        const int year = kFirst + p * (kLast - kFirst + 1) / kPapers;
        std::vector<std::size_t> active, silent;
        for (std::size_t i = 0; i < authors.size(); ++i) {
            if (authors[i].first_year > year) continue;
            active.push_back(i);
            if (!published[i]) silent.push_back(i);
        }
        // Newcomers get a first paper soon, so every author appears.
        std::vector<std::size_t> team{!silent.empty() && unit() < 0.5 ? silent[below(silent.size())]
                                                                      : active[below(active.size())]};
        auto join = [&](std::size_t a) {
            if (std::find(team.begin(), team.end(), a) == team.end()) team.push_back(a);
        };
        const std::size_t extra = below(4);
        if (unit() < 0.35) join(0);
        for (std::size_t k = 0; k < extra; ++k) {
            const auto& known = authors[team[0]].coauthors;
            if (!known.empty() && unit() < 0.5) {
                auto it = known.begin();
                std::advance(it, static_cast<std::ptrdiff_t>(below(known.size())));
                if (authors[*it].first_year <= year) join(*it);
            } else {
                join(active[below(active.size())]);
            }
        }

        auto pick = [&]() -> std::size_t {
            const double r = unit();
            const auto& lead = authors[team[0]];
            if (r < 0.6) return lead.favorites[below(lead.favorites.size())];
            if (r < 0.85) {
                const auto& other = authors[team[below(team.size())]];
                return other.favorites[below(other.favorites.size())];
            }
            // A slowly drifting fashionable topic.
            return (static_cast<std::size_t>(year - kFirst) * 2 + below(3)) % kTopics.size();
        };
        const std::size_t a = pick();
        std::size_t b = pick();
        if (b == a) b = (a + 1 + below(kTopics.size() - 1)) % kTopics.size();
        for (auto m : team) {
            published[m] = true;
            for (auto o : team) {
                if (m != o) authors[m].coauthors.insert(o);
            }
            if (unit() < 0.2) authors[m].favorites[below(3)] = a;
        }

        std::string title;
        if (unit() < 0.04) {
            title = unit() < 0.5 ? "Editorial" : "Preface to the special issue";
        } else {
            title = fill(kTemplates[below(kTemplates.size())], surface(a), surface(b));
        }
        if (p % 97 == 5) title += " with <i>provable</i> guarantees";
        if (p % 131 == 7) title += " f&uuml;r Anwender";

        const double r = unit();
        const char* tag = r < 0.5 ? "article" : r < 0.9 ? "inproceedings" : r < 0.97 ? "incollection" : "phdthesis";
        xml << "<" << tag << " key=\"mini/" << p << "\" mdate=\"2013-01-01\">\n";
        for (auto m : team) xml << "<author>" << authors[m].xml << "</author>\n";
        xml << "<title>" << title << ".</title>\n<year>" << year << "</year>\n</" << tag << ">\n";
    }
    xml << "</dblp>\n";

    std::ofstream lex(dir + "/minicorpus_lexicon.txt", std::ios::binary);
    lex << "# canonical|alias|...\n";
    for (const auto& t : kTopics) lex << t << "\n";

    std::ofstream names(dir + "/frequent_names.txt", std::ios::binary);
    names << "# full names, then given x family combinations\n[given]\nWei\nLi\nJun\nMing\nHui\n[family]\nWang\n"
             "Zhang\nChen\nLiu\nYang\n";
    return 0;
}
