#include "segtag/evaluate.hpp"

#include "segtag/tagger.hpp"

#include <algorithm>
#include <cstdio>

namespace segtag {

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
    gold_words += other.gold_words;
    pred_words += other.pred_words;
    correct_cws += other.correct_cws;
    correct_pos += other.correct_pos;
    return *this;
}

int require_tiling(const std::vector<WordSpan>& spans) {
    int pos = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const auto& s = spans[i];
        if (s.start != pos || s.end <= s.start) {
            throw DataError("word span " + std::to_string(i) + " [" + std::to_string(s.start) + "," +
                            std::to_string(s.end) + ") breaks the tiling at " + std::to_string(pos));
        }
        pos = s.end;
    }
    return pos;
}

EvalCounts count_matches(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& pred) {
    EvalCounts c;
    c.gold_words = static_cast<long>(gold.size());
    c.pred_words = static_cast<long>(pred.size());
    std::vector<WordSpan> g(gold), p(pred);
    std::sort(g.begin(), g.end());
    std::sort(p.begin(), p.end());
    std::size_t i = 0, j = 0;
    while (i < g.size() && j < p.size()) {
        if (g[i].start != p[j].start || g[i].end != p[j].end) {
            if (std::pair(g[i].start, g[i].end) < std::pair(p[j].start, p[j].end)) {
                ++i;
            } else {
                ++j;
            }
            continue;
        }
        ++c.correct_cws;
        if (g[i].pos == p[j].pos) ++c.correct_pos;
        ++i;
        ++j;
    }
    return c;
}

namespace {

double f1(double precision, double recall) {
    return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

double ratio(long num, long den) { return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

}  // namespace

EvalReport report_from_counts(const EvalCounts& counts) {
    EvalReport r;
    r.counts = counts;
    r.cws_precision = ratio(counts.correct_cws, counts.pred_words);
    r.cws_recall = ratio(counts.correct_cws, counts.gold_words);
    r.cws_f1 = f1(r.cws_precision, r.cws_recall);
    r.pos_precision = ratio(counts.correct_pos, counts.pred_words);
    r.pos_recall = ratio(counts.correct_pos, counts.gold_words);
    r.pos_f1 = f1(r.pos_precision, r.pos_recall);
    return r;
}

EvalReport score(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& pred) {
    const int ng = require_tiling(gold);
    const int np = require_tiling(pred);
    if (ng != np) {
        throw CompatError("evaluation: gold covers " + std::to_string(ng) + " characters, prediction " +
                          std::to_string(np));
    }
    return report_from_counts(count_matches(gold, pred));
}

Matrix ensemble_predict(const std::vector<TaggerModel*>& models, const std::u32string& sentence) {
    if (models.empty()) throw UsageError("ensemble: no models");
    for (const auto* m : models) {
        if (!(m->vocab() == models[0]->vocab()) || !(m->tagset() == models[0]->tagset())) {
            throw CompatError("ensemble: models disagree on vocabulary or tag set");
        }
    }
    Rng rng(0);  // dropout is off; never drawn from
    const std::vector<int> ids = models[0]->vocab().encode(sentence);
    Matrix sum = models[0]->forward(ids, false, rng);
    for (std::size_t i = 1; i < models.size(); ++i) sum += models[i]->forward(ids, false, rng);
    return sum / static_cast<Scalar>(models.size());
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", fraction * 100.0);
    return buf;
}

}  // namespace segtag
