#pragma once

#include "segtag/tagger.hpp"
#include "segtag/tagset.hpp"
#include "segtag/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace segtag {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    Scalar weight_decay = 0.1;
    Scalar learning_rate = 1e-5;
    Scalar warmup_ratio = 0.1;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct SamplingConfig {
    int k = 8;  // MC-dropout candidate count

    friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct RetrievalConfig {
    int max_ngram = 4;
    int top_m = 1;  // knowledge sentences kept per component

    friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

struct FusionConfig {
    Scalar alpha = 0.1;  // loss weight outside uncertain components

    friend bool operator==(const FusionConfig&, const FusionConfig&) = default;
};

struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    SamplingConfig sampling;
    RetrievalConfig retrieval;
    FusionConfig fusion;
    std::uint64_t seed = 42;
    std::vector<std::string> pos_tags;  // inline tag set
    std::string tagset_file;            // or a file with one POS per line

    void validate() const;
    TagSet make_tagset() const;

    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
    std::string to_json() const;
    static RunConfig from_json(const std::string& text);

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace segtag
