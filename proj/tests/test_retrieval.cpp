#include "segtag/retrieval.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace segtag;
using namespace segtag::testing;

namespace {

std::u32string random_u32(Rng& rng, int min_len, int max_len) {
    const auto len = rng.uniform_int(min_len, max_len);
    std::u32string s;
    for (long i = 0; i < len; ++i) s += static_cast<char32_t>(U'a' + rng.uniform_int(0, 2));
    return s;
}

std::vector<std::u32string> random_sentences(Rng& rng) {
    const auto count = rng.uniform_int(3, 10);
    std::vector<std::u32string> out;
    for (long i = 0; i < count; ++i) out.push_back(random_u32(rng, 1, 8));
    return out;
}

std::vector<int> naive_containing(const std::vector<std::u32string>& sentences,
                                  const std::u32string& text) {
    std::vector<int> ids;
    for (int id = 0; id < static_cast<int>(sentences.size()); ++id) {
        if (sentences[static_cast<std::size_t>(id)].find(text) != std::u32string::npos)
            ids.push_back(id);
    }
    return ids;
}

std::vector<int> ids_of(const std::vector<KnowledgeCandidate>& candidates) {
    std::vector<int> ids;
    for (const auto& c : candidates) ids.push_back(c.sentence_id);
    return ids;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("similarity on fixed pairs") {
    CHECK(similarity(U"abca", U"aab") == 3.0 / 7.0);
    CHECK(similarity(U"abc", U"abc") == 0.5);
    CHECK(similarity(U"abc", U"xyz") == 0.0);
    CHECK(similarity(U"a", U"ab") == 1.0 / 3.0);
    // repeated characters count once per copy
    CHECK(similarity(U"aa", U"a") == 1.0 / 3.0);
    CHECK(similarity(U"aa", U"aa") == 0.5);
}

TEST_CASE("similarity rejects empty sentences") {
    CHECK_THROWS_AS(similarity(U"", U"abc"), UsageError);
    CHECK_THROWS_AS(similarity(U"abc", U""), UsageError);
    CHECK_THROWS_AS(similarity(U"", U""), UsageError);
}

TEST_CASE("similarity is symmetric, bounded, and matches the multiset oracle") {
    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        const auto p = random_u32(rng, 1, 8);
        const auto q = random_u32(rng, 1, 8);
        const double s = similarity(p, q);
        CHECK(s == similarity(q, p));
        CHECK(s >= 0.0);
        CHECK(s <= 0.5);
        CHECK(s == oracle_similarity(p, q));
    }
}

TEST_CASE("unshared characters can only dilute") {
    // adding a character absent from the other side grows the denominator
    CHECK(similarity(U"ab", U"abz") < similarity(U"ab", U"ab"));
}

TEST_CASE("posting lists enumerate and deduplicate occurrences") {
    const auto corpus = KnowledgeCorpus::build({U"abc", U"bcd"}, 2);
    REQUIRE(corpus.postings(U"bc") != nullptr);
    CHECK(*corpus.postings(U"bc") == std::vector<int>{0, 1});
    REQUIRE(corpus.postings(U"a") != nullptr);
    CHECK(*corpus.postings(U"a") == std::vector<int>{0});
    CHECK(corpus.postings(U"zz") == nullptr);
    CHECK(corpus.postings(U"abc") == nullptr);  // longer than max_ngram

    // a sentence with a repeated gram appears once in that gram's list
    const auto repeats = KnowledgeCorpus::build({U"aa"}, 1);
    CHECK(*repeats.postings(U"a") == std::vector<int>{0});
}

TEST_CASE("build validates max_ngram") {
    CHECK_THROWS_AS(KnowledgeCorpus::build({U"abc"}, 0), UsageError);
    CHECK_THROWS_AS(KnowledgeCorpus::build({U"abc"}, -2), UsageError);
}

TEST_CASE("containing handles texts beyond the indexed length") {
    const auto corpus = KnowledgeCorpus::build({U"abcd", U"abce", U"zabcdz"}, 2);
    CHECK(corpus.containing(U"abcd") == std::vector<int>{0, 2});
    CHECK(corpus.containing(U"bcd") == std::vector<int>{0, 2});
    CHECK(corpus.containing(U"abcdz") == std::vector<int>{2});
    CHECK(corpus.containing(U"abcz").empty());
    CHECK_THROWS_AS(corpus.containing(U""), UsageError);

    // every piece present but never contiguously: the verify scan must reject
    const auto pieces = KnowledgeCorpus::build({U"abba"}, 2);
    CHECK(pieces.containing(U"aba").empty());
}

TEST_CASE("containing agrees with a naive scan") {
    Rng rng(12);
    for (int it = 0; it < 100; ++it) {
        const auto sentences = random_sentences(rng);
        const auto max_ngram = static_cast<int>(rng.uniform_int(1, 4));
        const auto corpus = KnowledgeCorpus::build(sentences, max_ngram);
        for (int q = 0; q < 8; ++q) {
            std::u32string text;
            if (q % 2 == 0) {  // guaranteed hit: substring of a random sentence
                const auto& s = sentences[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(sentences.size()) - 1))];
                const auto len = rng.uniform_int(1, static_cast<std::int64_t>(s.size()));
                const auto start = rng.uniform_int(0, static_cast<std::int64_t>(s.size()) - len);
                text = s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(len));
            } else {
                text = random_u32(rng, 1, 6);
            }
            CHECK(corpus.containing(text) == naive_containing(sentences, text));
        }
    }
}

TEST_CASE("retrieve ranks matching sentences and breaks ties by id") {
    const auto corpus = KnowledgeCorpus::build({U"xaby", U"abzz"}, 4);
    const auto ranked = retrieve_text(corpus, U"ab", U"ab", 2);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].sentence_id == 0);
    CHECK(ranked[0].text == U"xaby");
    CHECK(ranked[0].score == 1.0 / 3.0);
    CHECK(ranked[1].sentence_id == 1);
    CHECK(ranked[1].score == 1.0 / 3.0);

    CHECK(ids_of(retrieve_text(corpus, U"ab", U"ab", 1)) == std::vector<int>{0});
}

TEST_CASE("retrieve skips sentences identical to the query") {
    const auto corpus = KnowledgeCorpus::build({U"ab", U"zab"}, 4);
    const auto ranked = retrieve_text(corpus, U"ab", U"ab", 5);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].sentence_id == 1);
    CHECK(ranked[0].score == 2.0 / 5.0);
}

TEST_CASE("single-character components query their edge bigrams") {
    // leading position: only the right bigram counts, so a bare-character
    // match is not enough
    const auto lead = KnowledgeCorpus::build({U"za", U"abq"}, 2);
    CHECK(ids_of(retrieve(lead, U"ab", {0, 1}, 5)) == std::vector<int>{1});

    // trailing position: only the left bigram counts
    const auto trail = KnowledgeCorpus::build({U"zab", U"bq"}, 2);
    CHECK(ids_of(retrieve(trail, U"ab", {1, 2}, 5)) == std::vector<int>{0});

    // interior position: either bigram admits a sentence
    const auto mid = KnowledgeCorpus::build({U"abq", U"qbc", U"bqq"}, 2);
    CHECK(ids_of(retrieve(mid, U"abc", {1, 2}, 5)) == std::vector<int>{0, 1});

    // a sentence matching both bigrams is reported once
    const auto both = KnowledgeCorpus::build({U"abcq"}, 2);
    CHECK(ids_of(retrieve(both, U"abc", {1, 2}, 5)) == std::vector<int>{0});

    // single-character sentence: no bigram exists, fall back to the character
    const auto lone = KnowledgeCorpus::build({U"xa", U"ba", U"zz"}, 2);
    CHECK(ids_of(retrieve(lone, U"a", {0, 1}, 5)) == std::vector<int>{0, 1});
}

TEST_CASE("retrieve validates its arguments") {
    const auto corpus = KnowledgeCorpus::build({U"abc"}, 2);
    CHECK_THROWS_AS(retrieve(corpus, U"ab", {0, 2}, 0), UsageError);
    CHECK_THROWS_AS(retrieve(corpus, U"ab", {0, 2}, -1), UsageError);
    CHECK_THROWS_AS(retrieve(corpus, U"ab", {-1, 1}, 3), UsageError);
    CHECK_THROWS_AS(retrieve(corpus, U"ab", {1, 1}, 3), UsageError);
    CHECK_THROWS_AS(retrieve(corpus, U"ab", {0, 3}, 3), UsageError);
    CHECK_THROWS_AS(retrieve_text(corpus, U"ab", U"zz", 3), UsageError);
    CHECK_THROWS_AS(retrieve_text(corpus, U"ab", U"", 3), UsageError);
}

TEST_CASE("retrieve agrees with the full-scan oracle") {
    Rng rng(13);
    for (int it = 0; it < 100; ++it) {
        const auto sentences = random_sentences(rng);
        const auto corpus =
            KnowledgeCorpus::build(sentences, static_cast<int>(rng.uniform_int(1, 4)));
        const auto x = random_u32(rng, 1, 6);
        const auto start = rng.uniform_int(0, static_cast<std::int64_t>(x.size()) - 1);
        const auto end = rng.uniform_int(start + 1, static_cast<std::int64_t>(x.size()));
        const auto top_m = static_cast<int>(rng.uniform_int(1, 5));

        const auto got = retrieve(corpus, x, {static_cast<int>(start), static_cast<int>(end)}, top_m);
        const auto want = oracle_retrieve(sentences, x, static_cast<int>(start),
                                          static_cast<int>(end), top_m);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got[i].sentence_id == want[i].id);
            CHECK(got[i].score == want[i].score);
            CHECK(got[i].text == sentences[static_cast<std::size_t>(want[i].id)]);
        }
    }
}

TEST_CASE("index save and load round-trips") {
    Rng rng(14);
    const auto corpus = KnowledgeCorpus::build(random_sentences(rng), 3);
    const auto path = std::filesystem::temp_directory_path() / "segtag_index_test.bin";
    const auto path2 = std::filesystem::temp_directory_path() / "segtag_index_test2.bin";
    corpus.save(path.string());

    const auto loaded = KnowledgeCorpus::load(path.string());
    CHECK(loaded == corpus);
    CHECK(loaded.max_ngram() == 3);

    // deterministic bytes: re-saving the loaded index reproduces the file
    loaded.save(path2.string());
    CHECK(slurp(path) == slurp(path2));

    // matches behaviour, not only state
    CHECK(loaded.containing(corpus.sentence(0)) == corpus.containing(corpus.sentence(0)));

    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("index load rejects missing or foreign files") {
    CHECK_THROWS_AS(KnowledgeCorpus::load("/nonexistent/segtag_index.bin"), DataError);

    const auto path = std::filesystem::temp_directory_path() / "segtag_index_bad.bin";
    std::ofstream(path, std::ios::binary) << "not an index";
    CHECK_THROWS_AS(KnowledgeCorpus::load(path.string()), DataError);
    std::filesystem::remove(path);
}
