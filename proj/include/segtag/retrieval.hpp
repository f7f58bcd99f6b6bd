#pragma once

#include "segtag/tagset.hpp"

#include <map>
#include <string>
#include <vector>

namespace segtag {

struct KnowledgeCandidate {
    int sentence_id;
    std::u32string text;
    double score;  // similarity against the full query sentence
};

// Sentence store plus an inverted index over all character n-grams of
// lengths 1..max_ngram. Immutable once built.
class KnowledgeCorpus {
public:
    static KnowledgeCorpus build(std::vector<std::u32string> sentences, int max_ngram = 4);

    int size() const { return static_cast<int>(sentences_.size()); }
    int max_ngram() const { return max_ngram_; }
    const std::u32string& sentence(int id) const { return sentences_.at(static_cast<std::size_t>(id)); }

    // Sorted, deduplicated sentence ids for one indexed n-gram; nullptr when
    // the gram never occurs.
    const std::vector<int>* postings(const std::u32string& gram) const;

    // Ids of all sentences containing `text` as a contiguous substring.
    // Texts longer than max_ngram intersect the posting lists of their
    // n-gram pieces, then verify by scan.
    std::vector<int> containing(const std::u32string& text) const;

    void save(const std::string& path) const;
    static KnowledgeCorpus load(const std::string& path);

    friend bool operator==(const KnowledgeCorpus&, const KnowledgeCorpus&) = default;

private:
    std::vector<std::u32string> sentences_;
    std::map<std::u32string, std::vector<int>> index_;
    int max_ngram_ = 4;
};

// Character-overlap similarity: multiset intersection size over the summed
// lengths. Symmetric, in [0, 1/2]; identical sentences score 1/2. Both
// sentences must be non-empty.
double similarity(const std::u32string& p, const std::u32string& q);

// Sentences containing the component's text (multi-character components) or
// either of its edge bigrams within x (single-character components), ranked
// by similarity to x descending, ties toward lower sentence id. Sentences
// equal to x are skipped. Empty result means no auxiliary knowledge.
std::vector<KnowledgeCandidate> retrieve(const KnowledgeCorpus& corpus, const std::u32string& x,
                                         UncertainComponent component, int top_m);

// Convenience for ad-hoc queries: locates the component's first occurrence
// in x. The component text must occur in x.
std::vector<KnowledgeCandidate> retrieve_text(const KnowledgeCorpus& corpus,
                                              const std::u32string& x,
                                              const std::u32string& component_text, int top_m);

}  // namespace segtag
