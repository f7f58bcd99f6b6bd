#include "segtag/train.hpp"

#include "segtag/numeric.hpp"
#include "segtag/uncertainty.hpp"
#include "segtag/viterbi.hpp"

#include <numeric>

namespace segtag {

namespace {

LabelSequence gold_labels(const AnnotatedSentence& sentence, const TagSet& tags) {
    std::vector<std::pair<std::u32string, std::string>> words;
    words.reserve(sentence.spans.size());
    for (const auto& span : sentence.spans) {
        words.emplace_back(sentence.text.substr(static_cast<std::size_t>(span.start),
                                                static_cast<std::size_t>(span.end - span.start)),
                           tags.pos_name(span.pos));
    }
    return encode_words(tags, words);
}

}  // namespace

TaggerModel train_se(const AnnotatedCorpus& corpus, const TagSet& tags, const RunConfig& cfg,
                     Rng& rng, TrainReport* report) {
    cfg.validate();
    if (corpus.sentences.empty()) throw DataError("training corpus is empty");

    std::vector<std::u32string> texts;
    texts.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) texts.push_back(s.text);
    TaggerModel model(cfg.model, Vocab::build(texts), tags, rng);

    nn::AdamW opt(model.parameters(), cfg.train.weight_decay);
    const auto count = static_cast<long>(corpus.sentences.size());
    const long steps_per_epoch = (count + cfg.train.batch_size - 1) / cfg.train.batch_size;
    const long total_steps = static_cast<long>(cfg.train.epochs) * steps_per_epoch;
    std::vector<std::size_t> order(corpus.sentences.size());
    std::iota(order.begin(), order.end(), 0);

    long step = 0;
    for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        rng.shuffle(order);
        Scalar epoch_loss = 0;
        for (long start = 0; start < count; start += cfg.train.batch_size) {
            const long stop = std::min(count, start + cfg.train.batch_size);
            const auto batch = static_cast<Scalar>(stop - start);
            model.zero_grad();
            for (long b = start; b < stop; ++b) {
                const auto& sentence = corpus.sentences[order[static_cast<std::size_t>(b)]];
                const std::vector<int> ids = model.vocab().encode(sentence.text);
                const Matrix logits = model.forward_logits(ids, true, rng);
                const Matrix p = softmax_rows(logits);
                const LabelSequence gold = gold_labels(sentence, tags);
                epoch_loss += weighted_loss(p, gold, tags, {}, 1.0);
                model.backward_from_logits(weighted_loss_grad_logits(p, gold, tags, {}, 1.0) / batch);
            }
            opt.step(nn::scheduled_lr(step, total_steps, cfg.train.learning_rate, cfg.train.warmup_ratio));
            ++step;
        }
        if (report) report->epoch_losses.push_back(epoch_loss / static_cast<Scalar>(count));
    }
    return model;
}

std::vector<KFTrainInstance> make_kf_instances(TaggerModel& se, const AnnotatedCorpus& corpus,
                                               const KnowledgeCorpus& knowledge,
                                               const RunConfig& cfg, Rng& rng) {
    const TransitionMask mask(se.tagset());
    std::vector<KFTrainInstance> instances;
    for (const auto& sentence : corpus.sentences) {
        const std::vector<int> ids = se.vocab().encode(sentence.text);
        if (static_cast<int>(ids.size()) + 1 > cfg.model.max_seq_len) continue;  // no room for SEP
        const SamplingReport report = sample_candidates(se, ids, mask, cfg.sampling.k, rng);
        if (report.components.empty()) continue;  // nothing masked, nothing to learn
        const LabelSequence gold = gold_labels(sentence, se.tagset());
        for (const auto& component : report.components) {
            std::u32string ktext;
            for (const auto& hit : retrieve(knowledge, sentence.text, component, cfg.retrieval.top_m)) {
                ktext += hit.text;
            }
            KFTrainInstance instance;
            instance.input = build_kf_input(ids, report.provisional, se.tagset(), component,
                                            se.vocab().encode(ktext), cfg.model.max_seq_len);
            instance.gold = gold;
            instances.push_back(std::move(instance));
        }
    }
    return instances;
}

KnowledgeModel train_kf(TaggerModel& se, const AnnotatedCorpus& corpus,
                        const KnowledgeCorpus& knowledge, const RunConfig& cfg, Rng& rng,
                        TrainReport* report) {
    cfg.validate();
    const std::vector<KFTrainInstance> instances = make_kf_instances(se, corpus, knowledge, cfg, rng);
    if (instances.empty()) {
        throw DataError("knowledge-fusion training: no sentence produced an uncertain component");
    }
    const TagSet& tags = se.tagset();
    KnowledgeModel model(cfg.model, se.vocab(), tags, rng);

    nn::AdamW opt(model.parameters(), cfg.train.weight_decay);
    const auto count = static_cast<long>(instances.size());
    const long steps_per_epoch = (count + cfg.train.batch_size - 1) / cfg.train.batch_size;
    const long total_steps = static_cast<long>(cfg.train.epochs) * steps_per_epoch;
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), 0);

    long step = 0;
    for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        rng.shuffle(order);
        Scalar epoch_loss = 0;
        for (long start = 0; start < count; start += cfg.train.batch_size) {
            const long stop = std::min(count, start + cfg.train.batch_size);
            const auto batch = static_cast<Scalar>(stop - start);
            model.zero_grad();
            for (long b = start; b < stop; ++b) {
                const auto& instance = instances[order[static_cast<std::size_t>(b)]];
                const Matrix logits = model.forward_all_logits(instance.input, true, rng);
                const Matrix p = softmax_rows(logits.topRows(instance.input.n));
                epoch_loss += weighted_loss(p, instance.gold, tags, {instance.input.component},
                                            cfg.fusion.alpha);
                Matrix grad = Matrix::Zero(logits.rows(), logits.cols());
                grad.topRows(instance.input.n) =
                    weighted_loss_grad_logits(p, instance.gold, tags, {instance.input.component},
                                              cfg.fusion.alpha) /
                    batch;
                model.backward_from_logits(grad);
            }
            opt.step(nn::scheduled_lr(step, total_steps, cfg.train.learning_rate, cfg.train.warmup_ratio));
            ++step;
        }
        if (report) report->epoch_losses.push_back(epoch_loss / static_cast<Scalar>(count));
    }
    return model;
}

}  // namespace segtag
