#include "segtag/viterbi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segtag {

namespace {

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
constexpr Scalar kProbFloor = 1e-12;

Scalar log_emission(const Matrix& p, Eigen::Index i, Eigen::Index t) {
    return std::log(std::max(p(i, t), kProbFloor));
}

void check_width(const Matrix& emissions, const TransitionMask& mask) {
    if (emissions.cols() != mask.num_tags()) {
        throw CompatError("viterbi: emission width " + std::to_string(emissions.cols()) +
                          " != tag count " + std::to_string(mask.num_tags()));
    }
}

}  // namespace

TransitionMask::TransitionMask(TagSet tags) : tags_(std::move(tags)), num_tags_(tags_.num_joint()) {
    const auto t = static_cast<std::size_t>(num_tags_);
    allowed_.assign(t * t, 0);
    start_.assign(t, 0);
    end_.assign(t, 0);
    for (int a = 0; a < num_tags_; ++a) {
        const JointTag ta = tags_.joint_tag(a);
        start_[static_cast<std::size_t>(a)] = is_legal(std::nullopt, ta) ? 1 : 0;
        end_[static_cast<std::size_t>(a)] = is_legal(ta, std::nullopt) ? 1 : 0;
        for (int b = 0; b < num_tags_; ++b) {
            allowed_[static_cast<std::size_t>(a) * t + static_cast<std::size_t>(b)] =
                is_legal(ta, tags_.joint_tag(b)) ? 1 : 0;
        }
    }
}

LabelSequence viterbi(const Matrix& emissions, const TransitionMask& mask) {
    check_width(emissions, mask);
    const Eigen::Index n = emissions.rows();
    const int t = mask.num_tags();
    if (n == 0) return {};

    Matrix delta(n, t);
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> psi(n, t);
    for (int j = 0; j < t; ++j) {
        delta(0, j) = mask.start_ok(j) ? log_emission(emissions, 0, j) : kNegInf;
        psi(0, j) = -1;
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        for (int j = 0; j < t; ++j) {
            Scalar best = kNegInf;
            int arg = -1;
            for (int p = 0; p < t; ++p) {
                if (!mask.allowed(p, j) || delta(i - 1, p) == kNegInf) continue;
                if (delta(i - 1, p) > best) {
                    best = delta(i - 1, p);
                    arg = p;
                }
            }
            delta(i, j) = arg < 0 ? kNegInf : best + log_emission(emissions, i, j);
            psi(i, j) = arg;
        }
    }

    Scalar best = kNegInf;
    int arg = -1;
    for (int j = 0; j < t; ++j) {
        if (!mask.end_ok(j) || delta(n - 1, j) == kNegInf) continue;
        if (delta(n - 1, j) > best) {
            best = delta(n - 1, j);
            arg = j;
        }
    }
    if (arg < 0) throw DataError("viterbi: no legal path");

    LabelSequence labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        labels[static_cast<std::size_t>(i)] = mask.tagset().joint_tag(arg);
        arg = psi(i, arg);
    }
    return labels;
}

namespace {

struct PathEntry {
    Scalar score;
    int prev_tag;   // -1 at the first position
    int prev_rank;  // index into the predecessor's entry list
};

bool entry_before(const PathEntry& a, const PathEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.prev_tag != b.prev_tag) return a.prev_tag < b.prev_tag;
    return a.prev_rank < b.prev_rank;
}

}  // namespace

std::vector<LabelSequence> viterbi_k_paths(const Matrix& emissions, const TransitionMask& mask,
                                           int k) {
    if (k < 1) throw UsageError("viterbi_k_paths: k must be >= 1");
    check_width(emissions, mask);
    const Eigen::Index n = emissions.rows();
    const int t = mask.num_tags();
    if (n == 0) return {};

    // lists[i][tag] holds up to k best partial paths ending at (i, tag),
    // sorted best first with deterministic tie order.
    std::vector<std::vector<std::vector<PathEntry>>> lists(
        static_cast<std::size_t>(n), std::vector<std::vector<PathEntry>>(static_cast<std::size_t>(t)));
    for (int j = 0; j < t; ++j) {
        if (mask.start_ok(j)) lists[0][static_cast<std::size_t>(j)].push_back({log_emission(emissions, 0, j), -1, -1});
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        for (int j = 0; j < t; ++j) {
            auto& here = lists[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (int p = 0; p < t; ++p) {
                if (!mask.allowed(p, j)) continue;
                const auto& prev = lists[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(p)];
                for (int r = 0; r < static_cast<int>(prev.size()); ++r) {
                    here.push_back({prev[static_cast<std::size_t>(r)].score + log_emission(emissions, i, j), p, r});
                }
            }
            std::sort(here.begin(), here.end(), entry_before);
            if (static_cast<int>(here.size()) > k) here.resize(static_cast<std::size_t>(k));
        }
    }

    struct Final {
        Scalar score;
        int tag;
        int rank;
    };
    std::vector<Final> finals;
    for (int j = 0; j < t; ++j) {
        if (!mask.end_ok(j)) continue;
        const auto& col = lists[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j)];
        for (int r = 0; r < static_cast<int>(col.size()); ++r) finals.push_back({col[static_cast<std::size_t>(r)].score, j, r});
    }
    std::sort(finals.begin(), finals.end(), [](const Final& a, const Final& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.rank < b.rank;
    });
    if (static_cast<int>(finals.size()) > k) finals.resize(static_cast<std::size_t>(k));

    std::vector<LabelSequence> out;
    out.reserve(finals.size());
    for (const auto& f : finals) {
        LabelSequence labels(static_cast<std::size_t>(n));
        int tag = f.tag, rank = f.rank;
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            labels[static_cast<std::size_t>(i)] = mask.tagset().joint_tag(tag);
            const PathEntry& e = lists[static_cast<std::size_t>(i)][static_cast<std::size_t>(tag)][static_cast<std::size_t>(rank)];
            tag = e.prev_tag;
            rank = e.prev_rank;
        }
        out.push_back(std::move(labels));
    }
    return out;
}

}  // namespace segtag
