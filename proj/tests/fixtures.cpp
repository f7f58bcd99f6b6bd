#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace segtag::testing {

TagSet toy_tagset() { return TagSet({"n", "v", "u"}); }

TagSet random_tagset(Rng& rng, int max_pos) {
    const auto count = static_cast<int>(rng.uniform_int(1, max_pos));
    std::vector<std::string> names;
    for (int i = 0; i < count; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    return TagSet(names);
}

std::vector<std::pair<std::u32string, std::string>> random_words(Rng& rng, const TagSet& tags,
                                                                 int max_words, int max_word_len) {
    const auto count = rng.uniform_int(1, max_words);
    std::vector<std::pair<std::u32string, std::string>> words;
    for (long w = 0; w < count; ++w) {
        const auto len = rng.uniform_int(1, max_word_len);
        std::u32string surface;
        for (long c = 0; c < len; ++c) {
            surface += static_cast<char32_t>(0x4e00 + rng.uniform_int(0, 29));
        }
        words.emplace_back(surface, tags.pos_name(static_cast<int>(rng.uniform_int(0, tags.num_pos() - 1))));
    }
    return words;
}

Matrix random_emissions(Rng& rng, int n, int num_joint) {
    Matrix p(n, num_joint);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < num_joint; ++j) p(i, j) = rng.uniform() + 1e-3;
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

namespace {

// Scores one complete sequence exactly like the decoder defines it.
double sequence_score(const TagSet& tags, const Matrix& emissions, const std::vector<int>& seq) {
    double score = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        score += std::log(std::max(emissions(static_cast<Eigen::Index>(i), seq[i]), 1e-12));
    }
    return score;
}

void enumerate_rec(const TagSet& tags, int n, std::vector<int>& prefix,
                   std::vector<std::vector<int>>& out) {
    if (static_cast<int>(prefix.size()) == n) {
        if (is_legal(tags.joint_tag(prefix.back()), std::nullopt)) out.push_back(prefix);
        return;
    }
    for (int t = 0; t < tags.num_joint(); ++t) {
        const std::optional<JointTag> prev =
            prefix.empty() ? std::nullopt : std::optional<JointTag>(tags.joint_tag(prefix.back()));
        if (!is_legal(prev, tags.joint_tag(t))) continue;
        prefix.push_back(t);
        enumerate_rec(tags, n, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<std::vector<int>> enumerate_k_best(const TagSet& tags, const Matrix& emissions, int k) {
    const auto n = static_cast<int>(emissions.rows());
    std::vector<std::vector<int>> all;
    if (n > 0) {
        std::vector<int> prefix;
        enumerate_rec(tags, n, prefix, all);
    }
    std::stable_sort(all.begin(), all.end(), [&](const std::vector<int>& a, const std::vector<int>& b) {
        const double sa = sequence_score(tags, emissions, a);
        const double sb = sequence_score(tags, emissions, b);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
    return all;
}

double central_difference(const std::function<double(double)>& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

double gradient_rel_error(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    return std::abs(analytic - numeric) / scale;
}

double oracle_similarity(const std::u32string& p, const std::u32string& q) {
    std::u32string a(p), b(q);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::u32string shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    return static_cast<double>(shared.size()) / static_cast<double>(p.size() + q.size());
}

std::vector<OracleCandidate> oracle_retrieve(const std::vector<std::u32string>& sentences,
                                             const std::u32string& x, int start, int end,
                                             int top_m) {
    const auto contains = [](const std::u32string& s, const std::u32string& t) {
        return s.find(t) != std::u32string::npos;
    };
    std::vector<OracleCandidate> out;
    for (int id = 0; id < static_cast<int>(sentences.size()); ++id) {
        const std::u32string& s = sentences[static_cast<std::size_t>(id)];
        if (s == x) continue;
        bool hit;
        if (end - start > 1) {
            hit = contains(s, x.substr(static_cast<std::size_t>(start),
                                       static_cast<std::size_t>(end - start)));
        } else if (x.size() == 1) {
            hit = contains(s, x);
        } else {
            hit = start > 0 && contains(s, x.substr(static_cast<std::size_t>(start - 1), 2));
            if (!hit && end < static_cast<int>(x.size())) {
                hit = contains(s, x.substr(static_cast<std::size_t>(start), 2));
            }
        }
        if (hit) out.push_back({id, oracle_similarity(s, x)});
    }
    std::sort(out.begin(), out.end(), [](const OracleCandidate& l, const OracleCandidate& r) {
        if (l.score != r.score) return l.score > r.score;
        return l.id < r.id;
    });
    if (static_cast<int>(out.size()) > top_m) out.resize(static_cast<std::size_t>(top_m));
    return out;
}

TagSet synthetic_tagset() { return TagSet({"n", "v", "d", "u"}); }

namespace {

// Character pools for the synthetic corpora. Codepoints are arbitrary CJK;
// what matters is that each pool is disjoint.
constexpr char32_t kNounSingle[] = {0x4e00, 0x4e01, 0x4e02, 0x4e03};
constexpr char32_t kNounBegin[] = {0x4e10, 0x4e11, 0x4e12, 0x4e13};
constexpr char32_t kNounEnd[] = {0x4e20, 0x4e21, 0x4e22, 0x4e23};
constexpr char32_t kVerb[] = {0x4e30, 0x4e31, 0x4e32, 0x4e33};
constexpr char32_t kAdverb[] = {0x4e40, 0x4e41, 0x4e42, 0x4e43};
constexpr char32_t kParticle[] = {0x4e50, 0x4e51, 0x4e52, 0x4e53};

template <std::size_t N>
char32_t pick(Rng& rng, const char32_t (&pool)[N]) {
    return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(N) - 1))];
}

void push_word(AnnotatedSentence& s, const std::u32string& surface, int pos) {
    const auto start = static_cast<int>(s.text.size());
    s.text += surface;
    s.spans.push_back({start, start + static_cast<int>(surface.size()), pos});
}

}  // namespace

AnnotatedCorpus overfit_corpus(Rng& rng, const TagSet& tags, int sentences) {
    const int n = tags.require_pos("n");
    const int v = tags.require_pos("v");
    const int d = tags.require_pos("d");
    const int u = tags.require_pos("u");
    AnnotatedCorpus corpus;
    corpus.source_path = "<overfit>";
    for (int i = 0; i < sentences; ++i) {
        AnnotatedSentence s;
        s.source_line = i + 1;
        const auto words = rng.uniform_int(3, 6);
        for (long w = 0; w < words; ++w) {
            switch (rng.uniform_int(0, 4)) {
                case 0: push_word(s, {pick(rng, kNounSingle)}, n); break;
                case 1: push_word(s, {pick(rng, kNounBegin), pick(rng, kNounEnd)}, n); break;
                case 2: push_word(s, {pick(rng, kVerb)}, v); break;
                case 3: push_word(s, {pick(rng, kAdverb)}, d); break;
                default: push_word(s, {pick(rng, kParticle)}, u); break;
            }
        }
        corpus.sentences.push_back(std::move(s));
    }
    return corpus;
}

namespace {

// Ambiguity benchmark pools. The homograph's POS is the parity of its
// prefix/suffix frame indices: n when (a + b) is even, v when odd. Four
// frame combinations are held out of training; they are chosen so that
// every prefix and every suffix still carries mixed label evidence, which
// leaves the held-out frames undecidable from unigram cues.
constexpr char32_t kHomograph = 0x4e60;
constexpr char32_t kPrefix[] = {0x4e70, 0x4e71, 0x4e72, 0x4e73};
constexpr char32_t kSuffix[] = {0x4e80, 0x4e81, 0x4e82, 0x4e83};
constexpr char32_t kMarkerNoun = kNounSingle[0];
constexpr char32_t kMarkerVerb = kVerb[0];

bool frame_is_noun(int a, int b) { return (a + b) % 2 == 0; }

bool held_out(int a, int b) {
    return (a == 0 && b == 1) || (a == 1 && b == 0) || (a == 2 && b == 2) || (a == 3 && b == 3);
}

AnnotatedSentence frame_sentence(int a, int b, int noun, int verb, int particle, int line) {
    AnnotatedSentence s;
    s.source_line = line;
    push_word(s, {kPrefix[a]}, particle);
    push_word(s, {kHomograph}, frame_is_noun(a, b) ? noun : verb);
    push_word(s, {kSuffix[b]}, particle);
    return s;
}

}  // namespace

AmbiguityBenchmark ambiguity_benchmark(Rng& rng) {
    AmbiguityBenchmark bench{TagSet({"n", "v", "u"}), {}, {}, {}};
    const int n = 0, v = 1, u = 2;
    bench.train.source_path = "<ambiguity-train>";
    bench.test.source_path = "<ambiguity-test>";

    // fillers teach the unambiguous pools, marker characters included;
    // 26 fillers + 24 frames = 50 training sentences
    int line = 0;
    for (int i = 0; i < 26; ++i) {
        AnnotatedSentence s;
        s.source_line = ++line;
        push_word(s, {kNounSingle[i % 4]}, n);
        push_word(s, {kVerb[(i + 1) % 4]}, v);
        if (i % 3 == 0) {
            push_word(s, {kNounBegin[i % 4], kNounEnd[(i + 2) % 4]}, n);
        } else {
            push_word(s, {kNounSingle[(i + 2) % 4]}, n);
        }
        if (i % 2 == 0) push_word(s, {kParticle[i % 4]}, u);
        bench.train.sentences.push_back(std::move(s));
    }

    // the twelve training frames, twice each
    for (int copy = 0; copy < 2; ++copy) {
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                if (held_out(a, b)) continue;
                bench.train.sentences.push_back(frame_sentence(a, b, n, v, u, ++line));
            }
        }
    }
    rng.shuffle(bench.train.sentences);

    // test: every frame once, a few fillers to keep certain positions present
    line = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) bench.test.sentences.push_back(frame_sentence(a, b, n, v, u, ++line));
    }
    for (int i = 0; i < 6; ++i) {
        AnnotatedSentence s;
        s.source_line = ++line;
        push_word(s, {kNounSingle[(i + 1) % 4]}, n);
        push_word(s, {kVerb[i % 4]}, v);
        push_word(s, {kParticle[(i + 2) % 4]}, u);
        bench.test.sentences.push_back(std::move(s));
    }

    // knowledge: every frame glossed by a marker character that reveals the
    // homograph's class; markers occur in training fillers, so they are in
    // vocabulary, but the gloss pattern itself exists only here
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            std::u32string gloss;
            gloss += frame_is_noun(a, b) ? kMarkerNoun : kMarkerVerb;
            gloss += kPrefix[a];
            gloss += kHomograph;
            gloss += kSuffix[b];
            bench.knowledge.push_back(std::move(gloss));
        }
    }
    return bench;
}

}  // namespace segtag::testing
