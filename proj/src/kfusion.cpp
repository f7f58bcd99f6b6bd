#include "segtag/kfusion.hpp"

#include "segtag/numeric.hpp"

namespace segtag {

KFInput build_kf_input(const std::vector<int>& sentence_ids, const LabelSequence& provisional,
                       const TagSet& tags, UncertainComponent component,
                       const std::vector<int>& knowledge_ids, int max_seq_len) {
    const auto n = static_cast<int>(sentence_ids.size());
    if (static_cast<int>(provisional.size()) != n) {
        throw CompatError("kf input: provisional label count " + std::to_string(provisional.size()) +
                          " != sentence length " + std::to_string(n));
    }
    if (component.start < 0 || component.end > n || component.start >= component.end) {
        throw UsageError("kf input: component span out of range");
    }
    if (n + 1 > max_seq_len) {
        throw DataError("kf input: sentence of length " + std::to_string(n) +
                        " leaves no room under max_seq_len " + std::to_string(max_seq_len));
    }

    KFInput input;
    input.n = n;
    input.component = component;
    input.chars_ext = sentence_ids;
    input.chars_ext.push_back(Vocab::sep_id());
    const auto room = static_cast<std::size_t>(max_seq_len - n - 1);
    for (std::size_t i = 0; i < knowledge_ids.size() && i < room; ++i) {
        input.chars_ext.push_back(knowledge_ids[i]);
    }

    input.aux_labels.reserve(input.chars_ext.size());
    for (int i = 0; i < n; ++i) {
        input.aux_labels.push_back(component.contains(i) ? mask_label_id(tags)
                                                         : tags.joint_index(provisional[static_cast<std::size_t>(i)]));
    }
    input.aux_labels.resize(input.chars_ext.size(), pad_label_id(tags));
    return input;
}

namespace {

ModelConfig kf_validated(ModelConfig cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

KnowledgeModel::KnowledgeModel(ModelConfig cfg, Vocab vocab, TagSet tags, Rng& init_rng)
    : cfg_(kf_validated(cfg)),
      vocab_(std::move(vocab)),
      tags_(std::move(tags)),
      char_emb_("char_emb", vocab_.size(), cfg.d_h),
      label_emb_("label_emb", num_label_symbols(tags_), cfg.d_h),
      encoder_("encoder", cfg.d_h, cfg.heads, cfg.layers, cfg.d_ff, cfg.dropout, cfg.max_seq_len),
      head_("head", cfg.d_h, tags_.num_joint()) {
    const Scalar stddev = 0.02;
    char_emb_.init(init_rng, stddev);
    label_emb_.init(init_rng, stddev);
    encoder_.init(init_rng, stddev);
    head_.init(init_rng, stddev);
}

Matrix KnowledgeModel::forward_all_logits(const KFInput& input, bool dropout_active, Rng& rng) {
    if (input.chars_ext.size() != input.aux_labels.size()) {
        throw CompatError("kf forward: character and label channels differ in length");
    }
    if (static_cast<int>(input.chars_ext.size()) > cfg_.max_seq_len) {
        throw DataError("kf forward: input length " + std::to_string(input.chars_ext.size()) +
                        " exceeds max_seq_len " + std::to_string(cfg_.max_seq_len));
    }
    ++forward_calls_;
    const Matrix embedded = char_emb_.forward(input.chars_ext) + label_emb_.forward(input.aux_labels);
    return head_.forward(encoder_.forward(embedded, dropout_active, rng));
}

Matrix KnowledgeModel::forward(const KFInput& input, bool dropout_active, Rng& rng) {
    if (input.n < 0 || input.n > static_cast<int>(input.chars_ext.size())) {
        throw CompatError("kf forward: sentence length n out of range");
    }
    return softmax_rows(forward_all_logits(input, dropout_active, rng)).topRows(input.n);
}

void KnowledgeModel::backward_from_logits(const Matrix& grad_logits) {
    const Matrix grad_embedded = encoder_.backward(head_.backward(grad_logits));
    char_emb_.backward(grad_embedded);
    label_emb_.backward(grad_embedded);
}

nn::ParamRefs KnowledgeModel::parameters() {
    nn::ParamRefs out;
    char_emb_.collect(out);
    label_emb_.collect(out);
    encoder_.collect(out);
    head_.collect(out);
    return out;
}

void KnowledgeModel::zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
}

Matrix fuse_components(const std::vector<Matrix>& distributions) {
    if (distributions.empty()) throw UsageError("fuse: no distributions");
    Matrix sum = distributions[0];
    for (std::size_t i = 1; i < distributions.size(); ++i) {
        if (distributions[i].rows() != sum.rows() || distributions[i].cols() != sum.cols()) {
            throw CompatError("fuse: distribution shapes disagree");
        }
        sum += distributions[i];
    }
    return sum / static_cast<Scalar>(distributions.size());
}

}  // namespace segtag
