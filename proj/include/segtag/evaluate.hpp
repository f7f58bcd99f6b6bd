#pragma once

#include "segtag/tagset.hpp"
#include "segtag/types.hpp"

#include <string>
#include <vector>

namespace segtag {

class TaggerModel;

struct EvalCounts {
    long gold_words = 0;
    long pred_words = 0;
    long correct_cws = 0;  // predicted words whose (start, end) matches a gold word
    long correct_pos = 0;  // ... whose (start, end, pos) matches

    EvalCounts& operator+=(const EvalCounts& other);
};

struct EvalReport {
    double cws_precision = 0, cws_recall = 0, cws_f1 = 0;
    double pos_precision = 0, pos_recall = 0, pos_f1 = 0;
    EvalCounts counts;
};

// Validates that spans tile a contiguous [0, n) and returns n.
int require_tiling(const std::vector<WordSpan>& spans);

EvalCounts count_matches(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& pred);
EvalReport report_from_counts(const EvalCounts& counts);

// Word-level scoring. Both span lists must tile the same [0, n).
EvalReport score(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& pred);

// Element-wise mean of the models' emission matrices for one sentence;
// decode the result with a single Viterbi pass. Models must share tag set
// and vocabulary.
Matrix ensemble_predict(const std::vector<TaggerModel*>& models, const std::u32string& sentence);

// "95.606" style fixed three-decimal percent formatting.
std::string format_percent(double fraction);

}  // namespace segtag
