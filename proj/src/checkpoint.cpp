#include "segtag/checkpoint.hpp"

#include "binio.hpp"

#include <json.hpp>

#include <unordered_map>

namespace segtag {

using nlohmann::json;

namespace {

constexpr char kMagic[5] = "STKC";
constexpr std::uint32_t kVersion = 1;

json model_json(const ModelConfig& cfg) {
    return {{"d_h", cfg.d_h},     {"d_b", cfg.d_b},   {"d_l", cfg.d_l},
            {"layers", cfg.layers}, {"heads", cfg.heads}, {"d_ff", cfg.d_ff},
            {"dropout", cfg.dropout}, {"max_seq_len", cfg.max_seq_len}};
}

ModelConfig model_from_json(const json& j) {
    ModelConfig cfg;
    cfg.d_h = j.at("d_h").get<int>();
    cfg.d_b = j.at("d_b").get<int>();
    cfg.d_l = j.at("d_l").get<int>();
    cfg.layers = j.at("layers").get<int>();
    cfg.heads = j.at("heads").get<int>();
    cfg.d_ff = j.at("d_ff").get<int>();
    cfg.dropout = j.at("dropout").get<Scalar>();
    cfg.max_seq_len = j.at("max_seq_len").get<int>();
    return cfg;
}

void write_checkpoint(const std::string& kind, const ModelConfig& cfg, const Vocab& vocab,
                      const TagSet& tags, const nn::ParamRefs& params, const std::string& path) {
    json header;
    header["kind"] = kind;
    header["model"] = model_json(cfg);
    header["pos_tags"] = tags.pos_tags();
    std::vector<std::uint32_t> chars;
    chars.reserve(vocab.chars().size());
    for (char32_t c : vocab.chars()) chars.push_back(static_cast<std::uint32_t>(c));
    header["vocab_chars"] = chars;

    auto out = binio::open_out(path);
    out.write(kMagic, 4);
    binio::write_u32(out, kVersion);
    binio::write_string(out, header.dump());
    binio::write_u64(out, params.size());
    for (const auto* p : params) {
        binio::write_string(out, p->name);
        binio::write_u64(out, static_cast<std::uint64_t>(p->value.rows()));
        binio::write_u64(out, static_cast<std::uint64_t>(p->value.cols()));
        binio::write_u8(out, p->decay ? 1 : 0);
        for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
            for (Eigen::Index j = 0; j < p->value.cols(); ++j) binio::write_f64(out, p->value(i, j));
        }
    }
    if (!out) throw DataError("failed writing " + path);
}

struct CheckpointHead {
    std::string kind;
    ModelConfig cfg;
    Vocab vocab;
    TagSet tags{std::vector<std::string>{"x"}};
};

CheckpointHead read_header(std::istream& in, const std::string& path) {
    binio::expect_magic(in, kMagic, "checkpoint");
    const auto version = binio::read_u32(in);
    if (version != kVersion) {
        throw CompatError(path + ": checkpoint version " + std::to_string(version) + " unsupported");
    }
    json header;
    try {
        header = json::parse(binio::read_string(in));
        CheckpointHead head;
        head.kind = header.at("kind").get<std::string>();
        head.cfg = model_from_json(header.at("model"));
        head.tags = TagSet(header.at("pos_tags").get<std::vector<std::string>>());
        std::vector<char32_t> chars;
        for (std::uint32_t c : header.at("vocab_chars").get<std::vector<std::uint32_t>>()) {
            chars.push_back(static_cast<char32_t>(c));
        }
        head.vocab = Vocab::from_chars(std::move(chars));
        return head;
    } catch (const json::exception& e) {
        throw DataError(path + ": malformed checkpoint header: " + e.what());
    }
}

// Reads the tensor section into an already constructed model whose
// parameter names/shapes must match exactly.
void read_tensors(std::istream& in, const nn::ParamRefs& params, const std::string& path) {
    std::unordered_map<std::string, nn::Parameter*> by_name;
    for (auto* p : params) by_name.emplace(p->name, p);
    const std::uint64_t count = binio::read_u64(in);
    if (count != params.size()) {
        throw CompatError(path + ": checkpoint holds " + std::to_string(count) + " tensors, model has " +
                          std::to_string(params.size()));
    }
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::string name = binio::read_string(in);
        const auto rows = static_cast<Eigen::Index>(binio::read_u64(in));
        const auto cols = static_cast<Eigen::Index>(binio::read_u64(in));
        const bool decay = binio::read_u8(in) != 0;
        auto it = by_name.find(name);
        if (it == by_name.end()) throw CompatError(path + ": unexpected tensor '" + name + "'");
        nn::Parameter* p = it->second;
        if (p->value.rows() != rows || p->value.cols() != cols || p->decay != decay) {
            throw CompatError(path + ": tensor '" + name + "' does not match the model shape");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) p->value(i, j) = binio::read_f64(in);
        }
    }
}

}  // namespace

void save_tagger(TaggerModel& model, const std::string& path) {
    write_checkpoint("se", model.config(), model.vocab(), model.tagset(), model.parameters(), path);
}

TaggerModel load_tagger(const std::string& path) {
    auto in = binio::open_in(path);
    CheckpointHead head = read_header(in, path);
    if (head.kind != "se") {
        throw CompatError(path + ": checkpoint kind '" + head.kind + "', expected 'se'");
    }
    Rng init(0);
    TaggerModel model(head.cfg, std::move(head.vocab), std::move(head.tags), init);
    read_tensors(in, model.parameters(), path);
    return model;
}

void save_knowledge(KnowledgeModel& model, const std::string& path) {
    write_checkpoint("kf", model.config(), model.vocab(), model.tagset(), model.parameters(), path);
}

KnowledgeModel load_knowledge(const std::string& path) {
    auto in = binio::open_in(path);
    CheckpointHead head = read_header(in, path);
    if (head.kind != "kf") {
        throw CompatError(path + ": checkpoint kind '" + head.kind + "', expected 'kf'");
    }
    Rng init(0);
    KnowledgeModel model(head.cfg, std::move(head.vocab), std::move(head.tags), init);
    read_tensors(in, model.parameters(), path);
    return model;
}

std::string checkpoint_kind(const std::string& path) {
    auto in = binio::open_in(path);
    return read_header(in, path).kind;
}

}  // namespace segtag
