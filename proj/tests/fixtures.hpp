#pragma once

// Shared test fixtures: random generators and independent oracles the test
// suites check the library against. Everything here is deliberately naive;
// nothing in this file may call the implementation path it is used to check.

#include "segtag/corpus.hpp"
#include "segtag/rng.hpp"
#include "segtag/tagset.hpp"
#include "segtag/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace segtag::testing {

// Three-POS tag set (12 joint tags) used by the small exhaustive checks.
TagSet toy_tagset();

// Random tag set with 1..max_pos distinct single-letter POS identifiers.
TagSet random_tagset(Rng& rng, int max_pos);

// Random word tiling of a sentence: 1..max_words words of 1..max_word_len
// characters, each with a random POS from the tag set.
std::vector<std::pair<std::u32string, std::string>> random_words(Rng& rng, const TagSet& tags,
                                                                 int max_words, int max_word_len);

// Row-normalized random emission matrix (n x num_joint).
Matrix random_emissions(Rng& rng, int n, int num_joint);

// Exhaustive enumeration over all legal label sequences of length n,
// scoring each by sum of log emissions. Returns sequences ordered by
// (score desc, tag-index sequence lexicographically asc), at most k.
std::vector<std::vector<int>> enumerate_k_best(const TagSet& tags, const Matrix& emissions, int k);

// Central finite difference of a scalar function at x.
double central_difference(const std::function<double(double)>& f, double x, double step);

// Naive multiset character overlap over summed lengths, written without the
// library's counting code.
double oracle_similarity(const std::u32string& p, const std::u32string& q);

// Full-scan retrieval oracle: candidate sentences found by substring scan
// (edge bigrams for single-character components), scored with
// oracle_similarity, ordered score desc then id asc, truncated to top_m.
// Sentences equal to x are skipped.
struct OracleCandidate {
    int id;
    double score;
};
std::vector<OracleCandidate> oracle_retrieve(const std::vector<std::u32string>& sentences,
                                             const std::u32string& x, int start, int end,
                                             int top_m);

// Relative error between an analytic and a finite-difference derivative.
double gradient_rel_error(double analytic, double numeric);

// ---- synthetic corpora -------------------------------------------------

// Tag set used by the synthetic corpora below.
TagSet synthetic_tagset();

// Small unambiguous corpus for overfitting checks: every character has one
// consistent tag. Returns `sentences` word tilings over a tiny vocabulary.
AnnotatedCorpus overfit_corpus(Rng& rng, const TagSet& tags, int sentences);

// Ambiguity benchmark: a homograph character whose POS is a non-local
// function of the surrounding frame pair. SE training sees only a subset of
// frame combinations; held-out combinations are undecidable from training
// evidence alone. The knowledge corpus covers every combination, glossed by
// a sense-marker character. The markers also appear in training fillers (so
// they are in vocabulary), but the gloss pattern is unique to knowledge.
struct AmbiguityBenchmark {
    TagSet tags;
    AnnotatedCorpus train;
    AnnotatedCorpus test;
    std::vector<std::u32string> knowledge;
};
AmbiguityBenchmark ambiguity_benchmark(Rng& rng);

}  // namespace segtag::testing
