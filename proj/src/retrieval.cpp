#include "segtag/retrieval.hpp"

#include "binio.hpp"

#include <algorithm>
#include <unordered_map>

namespace segtag {

namespace {

constexpr char kMagic[5] = "STKI";
constexpr std::uint32_t kVersion = 1;

}  // namespace

KnowledgeCorpus KnowledgeCorpus::build(std::vector<std::u32string> sentences, int max_ngram) {
    if (max_ngram < 1) throw UsageError("index: max_ngram must be >= 1");
    KnowledgeCorpus corpus;
    corpus.sentences_ = std::move(sentences);
    corpus.max_ngram_ = max_ngram;
    for (int id = 0; id < corpus.size(); ++id) {
        const std::u32string& s = corpus.sentences_[static_cast<std::size_t>(id)];
        const auto n = static_cast<int>(s.size());
        for (int len = 1; len <= max_ngram; ++len) {
            for (int start = 0; start + len <= n; ++start) {
                auto& postings = corpus.index_[s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(len))];
                if (postings.empty() || postings.back() != id) postings.push_back(id);
            }
        }
    }
    return corpus;
}

const std::vector<int>* KnowledgeCorpus::postings(const std::u32string& gram) const {
    auto it = index_.find(gram);
    return it == index_.end() ? nullptr : &it->second;
}

std::vector<int> KnowledgeCorpus::containing(const std::u32string& text) const {
    if (text.empty()) throw UsageError("index query: empty text");
    if (static_cast<int>(text.size()) <= max_ngram_) {
        const auto* p = postings(text);
        return p ? *p : std::vector<int>{};
    }
    // intersect the posting lists of every max_ngram-piece, then verify
    std::vector<int> ids;
    for (std::size_t start = 0; start + static_cast<std::size_t>(max_ngram_) <= text.size(); ++start) {
        const auto* p = postings(text.substr(start, static_cast<std::size_t>(max_ngram_)));
        if (p == nullptr) return {};
        if (start == 0) {
            ids = *p;
        } else {
            std::vector<int> kept;
            std::set_intersection(ids.begin(), ids.end(), p->begin(), p->end(), std::back_inserter(kept));
            ids = std::move(kept);
        }
        if (ids.empty()) return {};
    }
    std::vector<int> out;
    for (int id : ids) {
        if (sentence(id).find(text) != std::u32string::npos) out.push_back(id);
    }
    return out;
}

void KnowledgeCorpus::save(const std::string& path) const {
    auto out = binio::open_out(path);
    out.write(kMagic, 4);
    binio::write_u32(out, kVersion);
    binio::write_u32(out, static_cast<std::uint32_t>(max_ngram_));
    binio::write_u64(out, sentences_.size());
    for (const auto& s : sentences_) binio::write_u32string(out, s);
    binio::write_u64(out, index_.size());
    for (const auto& [gram, postings] : index_) {
        binio::write_u32string(out, gram);
        binio::write_u64(out, postings.size());
        for (int id : postings) binio::write_u32(out, static_cast<std::uint32_t>(id));
    }
    if (!out) throw DataError("failed writing " + path);
}

KnowledgeCorpus KnowledgeCorpus::load(const std::string& path) {
    auto in = binio::open_in(path);
    binio::expect_magic(in, kMagic, "knowledge index");
    const auto version = binio::read_u32(in);
    if (version != kVersion) {
        throw CompatError("knowledge index version " + std::to_string(version) + " unsupported");
    }
    KnowledgeCorpus corpus;
    corpus.max_ngram_ = static_cast<int>(binio::read_u32(in));
    corpus.sentences_.resize(binio::read_u64(in));
    for (auto& s : corpus.sentences_) s = binio::read_u32string(in);
    const std::uint64_t entries = binio::read_u64(in);
    for (std::uint64_t i = 0; i < entries; ++i) {
        std::u32string gram = binio::read_u32string(in);
        std::vector<int> postings(binio::read_u64(in));
        for (auto& id : postings) id = static_cast<int>(binio::read_u32(in));
        corpus.index_.emplace(std::move(gram), std::move(postings));
    }
    return corpus;
}

double similarity(const std::u32string& p, const std::u32string& q) {
    if (p.empty() || q.empty()) throw UsageError("similarity: empty sentence");
    std::unordered_map<char32_t, long> counts;
    for (char32_t c : p) ++counts[c];
    long shared = 0;
    for (char32_t c : q) {
        auto it = counts.find(c);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++shared;
        }
    }
    return static_cast<double>(shared) / static_cast<double>(p.size() + q.size());
}

std::vector<KnowledgeCandidate> retrieve(const KnowledgeCorpus& corpus, const std::u32string& x,
                                         UncertainComponent component, int top_m) {
    if (top_m < 1) throw UsageError("retrieve: top_m must be >= 1");
    const auto n = static_cast<int>(x.size());
    if (component.start < 0 || component.end > n || component.start >= component.end) {
        throw UsageError("retrieve: component span out of range");
    }

    std::vector<int> ids;
    if (component.end - component.start > 1) {
        ids = corpus.containing(x.substr(static_cast<std::size_t>(component.start),
                                         static_cast<std::size_t>(component.end - component.start)));
    } else {
        // single character: query the bigrams it forms with its neighbours
        const int i = component.start;
        if (i > 0) ids = corpus.containing(x.substr(static_cast<std::size_t>(i - 1), 2));
        if (i + 1 < n) {
            for (int id : corpus.containing(x.substr(static_cast<std::size_t>(i), 2))) ids.push_back(id);
        }
        if (i == 0 && n == 1) ids = corpus.containing(x);  // no bigram exists
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }

    std::vector<KnowledgeCandidate> ranked;
    for (int id : ids) {
        const std::u32string& s = corpus.sentence(id);
        if (s == x) continue;
        ranked.push_back({id, s, similarity(s, x)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const KnowledgeCandidate& a, const KnowledgeCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.sentence_id < b.sentence_id;
    });
    if (static_cast<int>(ranked.size()) > top_m) ranked.resize(static_cast<std::size_t>(top_m));
    return ranked;
}

std::vector<KnowledgeCandidate> retrieve_text(const KnowledgeCorpus& corpus,
                                              const std::u32string& x,
                                              const std::u32string& component_text, int top_m) {
    const auto at = x.find(component_text);
    if (component_text.empty() || at == std::u32string::npos) {
        throw UsageError("retrieve: component text must occur in the sentence");
    }
    return retrieve(corpus, x,
                    {static_cast<int>(at), static_cast<int>(at + component_text.size())}, top_m);
}

}  // namespace segtag
