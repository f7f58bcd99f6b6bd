#include "segtag/corpus.hpp"

#include "segtag/types.hpp"
#include "segtag/utf.hpp"

#include <fstream>
#include <sstream>

namespace segtag {

CorpusFormat parse_format(const std::string& name) {
    if (name == "slash") return CorpusFormat::Slash;
    if (name == "char-column") return CorpusFormat::CharColumn;
    throw UsageError("unknown corpus format '" + name + "' (expected slash or char-column)");
}

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& message) {
    throw DataError(path + ":" + std::to_string(line) + ": " + message);
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool is_punctuation_word(const std::u32string& text, const WordSpan& span) {
    for (int i = span.start; i < span.end; ++i) {
        if (!is_punctuation(text[static_cast<std::size_t>(i)])) return false;
    }
    return true;
}

// Splits one annotated sentence into chunks of at most max_len characters,
// cutting at word boundaries and preferring a boundary right after a
// punctuation word. A single word longer than max_len cannot be split.
void append_chunks(std::vector<AnnotatedSentence>& out, const AnnotatedSentence& sentence,
                   int max_len, const std::string& path) {
    const auto n = static_cast<int>(sentence.text.size());
    if (max_len <= 0 || n <= max_len) {
        out.push_back(sentence);
        return;
    }
    std::size_t first = 0;  // word index opening the current chunk
    while (first < sentence.spans.size()) {
        const int base = sentence.spans[first].start;
        std::size_t last = first;  // last word that still fits
        while (last + 1 < sentence.spans.size() && sentence.spans[last + 1].end - base <= max_len) {
            ++last;
        }
        if (sentence.spans[last].end - base > max_len) {
            fail(path, sentence.source_line,
                 "word of length " + std::to_string(sentence.spans[last].end - sentence.spans[last].start) +
                     " exceeds max_seq_len " + std::to_string(max_len));
        }
        if (last + 1 < sentence.spans.size()) {
            // not the final chunk: prefer to cut after a punctuation word
            for (std::size_t j = last + 1; j-- > first;) {
                if (is_punctuation_word(sentence.text, sentence.spans[j])) {
                    last = j;
                    break;
                }
            }
        }
        AnnotatedSentence chunk;
        chunk.source_line = sentence.source_line;
        const int start = sentence.spans[first].start;
        const int end = sentence.spans[last].end;
        chunk.text = sentence.text.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(end - start));
        for (std::size_t j = first; j <= last; ++j) {
            const auto& s = sentence.spans[j];
            chunk.spans.push_back({s.start - start, s.end - start, s.pos});
        }
        out.push_back(std::move(chunk));
        first = last + 1;
    }
}

AnnotatedSentence parse_slash_line(const std::string& line, int line_no, const TagSet& tags,
                                   const std::string& path) {
    AnnotatedSentence sentence;
    sentence.source_line = line_no;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
        const auto slash = token.rfind('/');
        if (slash == std::string::npos) fail(path, line_no, "token '" + token + "' has no '/'");
        const std::string word_utf8 = token.substr(0, slash);
        const std::string pos_name = token.substr(slash + 1);
        if (word_utf8.empty()) fail(path, line_no, "empty word in token '" + token + "'");
        if (pos_name.empty()) fail(path, line_no, "empty POS in token '" + token + "'");
        const int pos = tags.find_pos(pos_name);
        if (pos < 0) fail(path, line_no, "unknown POS '" + pos_name + "'");
        const std::u32string word = utf8_to_u32(word_utf8);
        const auto start = static_cast<int>(sentence.text.size());
        sentence.text += word;
        sentence.spans.push_back({start, start + static_cast<int>(word.size()), pos});
    }
    return sentence;
}

void read_slash(std::istream& in, const TagSet& tags, int max_len, const std::string& path,
                std::vector<AnnotatedSentence>& out) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        AnnotatedSentence sentence = parse_slash_line(line, line_no, tags, path);
        if (!sentence.text.empty()) append_chunks(out, sentence, max_len, path);
    }
}

void read_char_column(std::istream& in, const TagSet& tags, int max_len, const std::string& path,
                      std::vector<AnnotatedSentence>& out) {
    std::string line;
    int line_no = 0;
    std::u32string text;
    LabelSequence labels;
    int first_line = 0;

    auto flush = [&]() {
        if (text.empty()) return;
        AnnotatedSentence sentence;
        sentence.source_line = first_line;
        sentence.text = std::move(text);
        sentence.spans = decode_labels(labels);
        append_chunks(out, sentence, max_len, path);
        text.clear();
        labels.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            flush();
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) fail(path, line_no, "expected 'char<TAB>tag'");
        const std::u32string ch = utf8_to_u32(line.substr(0, tab));
        if (ch.size() != 1) fail(path, line_no, "first column must hold exactly one character");
        const std::string tag_name = line.substr(tab + 1);
        if (text.empty()) first_line = line_no;
        text += ch;
        try {
            labels.push_back(tags.parse_joint(tag_name));
        } catch (const DataError& e) {
            fail(path, line_no, e.what());
        }
    }
    flush();
}

}  // namespace

AnnotatedCorpus read_corpus(std::istream& in, CorpusFormat format, const TagSet& tags,
                            int max_seq_len, const std::string& source_path) {
    AnnotatedCorpus corpus;
    corpus.source_path = source_path;
    if (format == CorpusFormat::Slash) {
        read_slash(in, tags, max_seq_len, source_path, corpus.sentences);
    } else {
        read_char_column(in, tags, max_seq_len, source_path, corpus.sentences);
    }
    return corpus;
}

AnnotatedCorpus load_corpus(const std::string& path, CorpusFormat format, const TagSet& tags,
                            int max_seq_len) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return read_corpus(in, format, tags, max_seq_len, path);
}

std::string format_slash(const std::u32string& text, const std::vector<WordSpan>& spans,
                         const TagSet& tags) {
    std::string out;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const auto& s = spans[i];
        if (i > 0) out += ' ';
        out += u32_to_utf8(text.substr(static_cast<std::size_t>(s.start), static_cast<std::size_t>(s.end - s.start)));
        out += '/';
        out += tags.pos_name(s.pos);
    }
    return out;
}

void write_corpus(const AnnotatedCorpus& corpus, std::ostream& out, CorpusFormat format,
                  const TagSet& tags) {
    for (const auto& sentence : corpus.sentences) {
        if (format == CorpusFormat::Slash) {
            out << format_slash(sentence.text, sentence.spans, tags) << '\n';
            continue;
        }
        for (const auto& span : sentence.spans) {
            for (int i = span.start; i < span.end; ++i) {
                Boundary b = Boundary::M;
                if (span.end - span.start == 1) {
                    b = Boundary::S;
                } else if (i == span.start) {
                    b = Boundary::B;
                } else if (i == span.end - 1) {
                    b = Boundary::E;
                }
                out << u32_to_utf8(sentence.text[static_cast<std::size_t>(i)]) << '\t'
                    << tags.joint_name({b, span.pos}) << '\n';
            }
        }
        out << '\n';
    }
}

void save_corpus(const AnnotatedCorpus& corpus, const std::string& path, CorpusFormat format,
                 const TagSet& tags) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    write_corpus(corpus, out, format, tags);
    if (!out) throw DataError("failed writing " + path);
}

std::vector<std::u32string> load_raw_sentences(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::u32string> sentences;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (!line.empty()) sentences.push_back(utf8_to_u32(line));
    }
    return sentences;
}

bool is_punctuation(char32_t cp) {
    switch (cp) {
        case U'、':  // 、
        case U'。':  // 。
        case U'，':  // ，
        case U'；':  // ；
        case U'：':  // ：
        case U'？':  // ？
        case U'！':  // ！
        case U'「':
        case U'」':
        case U'『':
        case U'』':
        case U'‘':
        case U'’':
        case U'“':
        case U'”':
        case U'（':
        case U'）':
            return true;
        default:
            return (cp < 0x80 && std::string(".,;:?!()\"'").find(static_cast<char>(cp)) != std::string::npos);
    }
}

std::vector<std::u32string> split_raw_sentence(const std::u32string& text, int max_seq_len) {
    std::vector<std::u32string> chunks;
    if (max_seq_len <= 0 || static_cast<int>(text.size()) <= max_seq_len) {
        if (!text.empty()) chunks.push_back(text);
        return chunks;
    }
    std::size_t start = 0;
    const auto limit = static_cast<std::size_t>(max_seq_len);
    while (start < text.size()) {
        std::size_t end = std::min(start + limit, text.size());
        if (end < text.size()) {
            // cut right after the last punctuation inside the window
            for (std::size_t c = end; c > start; --c) {
                if (is_punctuation(text[c - 1])) {
                    end = c;
                    break;
                }
            }
        }
        chunks.push_back(text.substr(start, end - start));
        start = end;
    }
    return chunks;
}

}  // namespace segtag
