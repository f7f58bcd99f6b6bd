#include "segtag/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace segtag {

using nlohmann::json;

void RunConfig::validate() const {
    model.validate();
    if (train.epochs < 1) throw UsageError("config: epochs must be >= 1");
    if (train.batch_size < 1) throw UsageError("config: batch_size must be >= 1");
    if (train.weight_decay < 0) throw UsageError("config: weight_decay must be >= 0");
    if (train.learning_rate <= 0) throw UsageError("config: learning_rate must be > 0");
    if (train.warmup_ratio < 0 || train.warmup_ratio > 1) {
        throw UsageError("config: warmup_ratio must lie in [0, 1]");
    }
    if (sampling.k < 1) throw UsageError("config: sampling k must be >= 1");
    if (retrieval.max_ngram < 1) throw UsageError("config: max_ngram must be >= 1");
    if (retrieval.top_m < 1) throw UsageError("config: top_m must be >= 1");
    if (fusion.alpha < 0 || fusion.alpha > 1) throw UsageError("config: alpha must lie in [0, 1]");
    if (!pos_tags.empty() && !tagset_file.empty()) {
        throw UsageError("config: give either pos_tags or tagset_file, not both");
    }
}

TagSet RunConfig::make_tagset() const {
    if (!pos_tags.empty()) return TagSet(pos_tags);
    if (!tagset_file.empty()) return TagSet::load(tagset_file);
    throw UsageError("config: no POS tags configured (pos_tags or tagset_file)");
}

namespace {

// Assigns fields present in j, leaves the rest at their defaults, and
// rejects unknown keys so config typos fail loudly.
void expect_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw DataError("config: unknown key '" + where + key + "'");
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    try {
        expect_keys(j, {"model", "train", "sampling", "retrieval", "fusion", "seed", "pos_tags", "tagset_file"},
                    "");
        if (j.contains("model")) {
            const json& m = j.at("model");
            expect_keys(m, {"d_h", "d_b", "d_l", "layers", "heads", "d_ff", "dropout", "max_seq_len"},
                        "model.");
            maybe(m, "d_h", cfg.model.d_h);
            maybe(m, "d_b", cfg.model.d_b);
            maybe(m, "d_l", cfg.model.d_l);
            maybe(m, "layers", cfg.model.layers);
            maybe(m, "heads", cfg.model.heads);
            maybe(m, "d_ff", cfg.model.d_ff);
            maybe(m, "dropout", cfg.model.dropout);
            maybe(m, "max_seq_len", cfg.model.max_seq_len);
        }
        if (j.contains("train")) {
            const json& t = j.at("train");
            expect_keys(t, {"epochs", "batch_size", "weight_decay", "learning_rate", "warmup_ratio"},
                        "train.");
            maybe(t, "epochs", cfg.train.epochs);
            maybe(t, "batch_size", cfg.train.batch_size);
            maybe(t, "weight_decay", cfg.train.weight_decay);
            maybe(t, "learning_rate", cfg.train.learning_rate);
            maybe(t, "warmup_ratio", cfg.train.warmup_ratio);
        }
        if (j.contains("sampling")) {
            expect_keys(j.at("sampling"), {"k"}, "sampling.");
            maybe(j.at("sampling"), "k", cfg.sampling.k);
        }
        if (j.contains("retrieval")) {
            expect_keys(j.at("retrieval"), {"max_ngram", "top_m"}, "retrieval.");
            maybe(j.at("retrieval"), "max_ngram", cfg.retrieval.max_ngram);
            maybe(j.at("retrieval"), "top_m", cfg.retrieval.top_m);
        }
        if (j.contains("fusion")) {
            expect_keys(j.at("fusion"), {"alpha"}, "fusion.");
            maybe(j.at("fusion"), "alpha", cfg.fusion.alpha);
        }
        maybe(j, "seed", cfg.seed);
        maybe(j, "pos_tags", cfg.pos_tags);
        maybe(j, "tagset_file", cfg.tagset_file);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::string RunConfig::to_json() const {
    json j;
    j["model"] = {{"d_h", model.d_h},     {"d_b", model.d_b},
                  {"d_l", model.d_l},     {"layers", model.layers},
                  {"heads", model.heads}, {"d_ff", model.d_ff},
                  {"dropout", model.dropout}, {"max_seq_len", model.max_seq_len}};
    j["train"] = {{"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"weight_decay", train.weight_decay},
                  {"learning_rate", train.learning_rate},
                  {"warmup_ratio", train.warmup_ratio}};
    j["sampling"] = {{"k", sampling.k}};
    j["retrieval"] = {{"max_ngram", retrieval.max_ngram}, {"top_m", retrieval.top_m}};
    j["fusion"] = {{"alpha", fusion.alpha}};
    j["seed"] = seed;
    if (!pos_tags.empty()) j["pos_tags"] = pos_tags;
    if (!tagset_file.empty()) j["tagset_file"] = tagset_file;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << to_json();
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace segtag
