#pragma once

#include "segtag/tagset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace segtag {

struct AnnotatedSentence {
    std::u32string text;
    std::vector<WordSpan> spans;  // tiles [0, |text|)
    int source_line = 0;
};

struct AnnotatedCorpus {
    std::vector<AnnotatedSentence> sentences;
    std::string source_path;
};

enum class CorpusFormat {
    // One sentence per line, tokens "word/pos" separated by single spaces.
    Slash,
    // Two tab-separated columns "char<TAB>joint-tag", blank line between
    // sentences.
    CharColumn,
};

CorpusFormat parse_format(const std::string& name);

// Parses an annotated corpus. Malformed lines raise DataError naming the
// line number. Sentences longer than max_seq_len are split at the last
// word boundary before the limit, preferring one that follows a punctuation
// word; 0 disables splitting.
AnnotatedCorpus load_corpus(const std::string& path, CorpusFormat format, const TagSet& tags,
                            int max_seq_len = 0);
AnnotatedCorpus read_corpus(std::istream& in, CorpusFormat format, const TagSet& tags,
                            int max_seq_len = 0, const std::string& source_path = "<stream>");

void save_corpus(const AnnotatedCorpus& corpus, const std::string& path, CorpusFormat format,
                 const TagSet& tags);
void write_corpus(const AnnotatedCorpus& corpus, std::ostream& out, CorpusFormat format,
                  const TagSet& tags);

// Formats one sentence in the slash format ("word/pos word/pos ...").
std::string format_slash(const std::u32string& text, const std::vector<WordSpan>& spans,
                         const TagSet& tags);

// Unannotated input for prediction: one sentence per line, skipping blanks.
std::vector<std::u32string> load_raw_sentences(const std::string& path);

// True for common CJK and ASCII sentence punctuation; drives long-sentence
// split points.
bool is_punctuation(char32_t cp);

// Splits an over-long raw sentence into chunks of at most max_seq_len
// characters, cutting right after the last punctuation character before the
// limit when one exists, else hard at the limit.
std::vector<std::u32string> split_raw_sentence(const std::u32string& text, int max_seq_len);

}  // namespace segtag
