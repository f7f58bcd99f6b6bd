#include "segtag/tagset.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace segtag;
using namespace segtag::testing;

TEST_CASE("joint indices are boundary-major") {
    const TagSet tags = toy_tagset();  // n, v, u
    CHECK(tags.num_pos() == 3);
    CHECK(tags.num_joint() == 12);
    CHECK(tags.joint_index({Boundary::B, 0}) == 0);
    CHECK(tags.joint_index({Boundary::B, 2}) == 2);
    CHECK(tags.joint_index({Boundary::M, 0}) == 3);
    CHECK(tags.joint_index({Boundary::E, 1}) == 7);
    CHECK(tags.joint_index({Boundary::S, 2}) == 11);
    for (int i = 0; i < tags.num_joint(); ++i) {
        CHECK(tags.joint_index(tags.joint_tag(i)) == i);
    }
    CHECK_THROWS_AS(tags.joint_tag(12), DataError);
    CHECK_THROWS_AS(tags.joint_tag(-1), DataError);
}

TEST_CASE("joint names round-trip") {
    const TagSet tags = toy_tagset();
    CHECK(tags.joint_name({Boundary::B, 0}) == "B-n");
    CHECK(tags.joint_name({Boundary::S, 1}) == "S-v");
    for (int i = 0; i < tags.num_joint(); ++i) {
        const JointTag tag = tags.joint_tag(i);
        CHECK(tags.parse_joint(tags.joint_name(tag)) == tag);
    }
    CHECK_THROWS_AS(tags.parse_joint("B-x"), DataError);
    CHECK_THROWS_AS(tags.parse_joint("Q-n"), DataError);
    CHECK_THROWS_AS(tags.parse_joint("Bn"), DataError);
    CHECK_THROWS_AS(tags.parse_joint(""), DataError);
}

TEST_CASE("tag set construction rejects bad inputs") {
    CHECK_THROWS_AS(TagSet({}), DataError);
    CHECK_THROWS_AS(TagSet({"n", "n"}), DataError);
    CHECK_THROWS_AS(TagSet({"n", ""}), DataError);
    const TagSet tags({"n", "v"});
    CHECK(tags.find_pos("n") == 0);
    CHECK(tags.find_pos("x") == -1);
    CHECK(tags.require_pos("v") == 1);
    CHECK_THROWS_AS(tags.require_pos("x"), DataError);
}

TEST_CASE("tag set file loading skips comments and blanks") {
    const auto path = std::filesystem::temp_directory_path() / "segtag_tagset_test.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n n \n\nv # trailing comment\nu\n";
    }
    const TagSet tags = TagSet::load(path.string());
    CHECK(tags.pos_tags() == std::vector<std::string>{"n", "v", "u"});
    std::filesystem::remove(path);
    CHECK_THROWS_AS(TagSet::load("/nonexistent/tagset.txt"), DataError);
}

TEST_CASE("encode_words produces BMES labels") {
    const TagSet tags = toy_tagset();
    const auto labels = encode_words(tags, {{U"天下", "n"}, {U"定", "v"}});
    const LabelSequence expect = {{Boundary::B, 0}, {Boundary::E, 0}, {Boundary::S, 1}};
    CHECK(labels == expect);
    CHECK(encode_words(tags, {{U"x", "u"}}) == LabelSequence{{Boundary::S, 2}});
    CHECK(encode_words(tags, {{U"abc", "n"}}) ==
          LabelSequence{{Boundary::B, 0}, {Boundary::M, 0}, {Boundary::E, 0}});
    CHECK(encode_words(tags, {}).empty());
    CHECK_THROWS_AS(encode_words(tags, {{U"ab", "x"}}), DataError);
    CHECK_THROWS_AS(encode_words(tags, {{U"", "n"}}), DataError);
}

TEST_CASE("decode_labels inverts encode and repairs illegal sequences") {
    const TagSet tags = toy_tagset();
    const int n = 0, v = 1;
    CHECK(decode_labels({{Boundary::B, n}, {Boundary::E, n}, {Boundary::S, v}}) ==
          std::vector<WordSpan>{{0, 2, n}, {2, 3, v}});
    CHECK(decode_labels({}).empty());
    // repair: close the word before the illegal transition, POS from the
    // word's first character
    CHECK(decode_labels({{Boundary::B, n}, {Boundary::B, v}}) ==
          std::vector<WordSpan>{{0, 1, n}, {1, 2, v}});
    CHECK(decode_labels({{Boundary::M, n}}) == std::vector<WordSpan>{{0, 1, n}});
    CHECK(decode_labels({{Boundary::S, n}, {Boundary::M, v}, {Boundary::E, v}}) ==
          std::vector<WordSpan>{{0, 1, n}, {1, 3, v}});
    CHECK(decode_labels({{Boundary::B, n}, {Boundary::M, n}, {Boundary::M, v}}) ==
          std::vector<WordSpan>{{0, 2, n}, {2, 3, v}});
    CHECK(decode_labels({{Boundary::B, n}, {Boundary::E, v}}) ==
          std::vector<WordSpan>{{0, 1, n}, {1, 2, v}});
}

TEST_CASE("encode/decode round-trips random tilings") {
    Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        TagSet tags = random_tagset(rng, 5);
        const auto words = random_words(rng, tags, 8, 4);
        const auto labels = encode_words(tags, words);

        // expected spans derived from cumulative word lengths
        std::vector<WordSpan> expect;
        int offset = 0;
        for (const auto& [surface, pos] : words) {
            const int len = static_cast<int>(surface.size());
            expect.push_back({offset, offset + len, tags.require_pos(pos)});
            offset += len;
        }
        CHECK(decode_labels(labels) == expect);

        // encoded sequences are always legal, sentinels included
        CHECK(is_legal(std::nullopt, labels.front()));
        CHECK(is_legal(labels.back(), std::nullopt));
        for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
            CHECK(is_legal(labels[i], labels[i + 1]));
        }
    }
}

TEST_CASE("decode_labels always tiles, even on garbage") {
    Rng rng(11);
    const TagSet tags = toy_tagset();
    for (int iter = 0; iter < 200; ++iter) {
        const auto len = rng.uniform_int(1, 10);
        LabelSequence labels;
        for (long i = 0; i < len; ++i) {
            labels.push_back(tags.joint_tag(static_cast<int>(rng.uniform_int(0, tags.num_joint() - 1))));
        }
        const auto spans = decode_labels(labels);
        int cursor = 0;
        for (const auto& span : spans) {
            CHECK(span.start == cursor);
            CHECK(span.end > span.start);
            cursor = span.end;
        }
        CHECK(cursor == static_cast<int>(len));
    }
}

namespace {

// Truth table written out from first principles, independent of is_legal.
bool expected_legal(std::optional<JointTag> prev, std::optional<JointTag> next) {
    const auto starts_word = [](const JointTag& t) {
        return t.boundary == Boundary::B || t.boundary == Boundary::S;
    };
    const auto ends_word = [](const JointTag& t) {
        return t.boundary == Boundary::E || t.boundary == Boundary::S;
    };
    if (!prev && !next) return true;
    if (!prev) return starts_word(*next);
    if (!next) return ends_word(*prev);
    if (ends_word(*prev)) return starts_word(*next);
    const bool continues = next->boundary == Boundary::M || next->boundary == Boundary::E;
    return continues && next->pos == prev->pos;
}

}  // namespace

TEST_CASE("is_legal matches the exhaustive truth table") {
    const TagSet tags = toy_tagset();
    std::vector<std::optional<JointTag>> states{std::nullopt};
    for (int i = 0; i < tags.num_joint(); ++i) states.push_back(tags.joint_tag(i));
    for (const auto& prev : states) {
        for (const auto& next : states) {
            CHECK(is_legal(prev, next) == expected_legal(prev, next));
        }
    }
    // spot checks
    CHECK(is_legal(JointTag{Boundary::B, 0}, JointTag{Boundary::M, 0}));
    CHECK_FALSE(is_legal(JointTag{Boundary::B, 0}, JointTag{Boundary::M, 1}));
    CHECK_FALSE(is_legal(std::nullopt, JointTag{Boundary::M, 0}));
}
