#include "segtag/checkpoint.hpp"
#include "segtag/config.hpp"
#include "segtag/corpus.hpp"
#include "segtag/evaluate.hpp"
#include "segtag/pipeline.hpp"
#include "segtag/retrieval.hpp"
#include "segtag/train.hpp"
#include "segtag/uncertainty.hpp"
#include "segtag/utf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace segtag;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "run configuration (JSON)");
    cmd->add_option("--seed", common.seed, "random seed (overrides the config)");
}

RunConfig resolve_config(const Common& common) {
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : RunConfig::load(common.config_path);
    if (common.seed) cfg.seed = *common.seed;
    cfg.validate();
    return cfg;
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw DataError("cannot open " + path + " for writing");
    return file;
}

void print_epochs(const TrainReport& report) {
    for (std::size_t i = 0; i < report.epoch_losses.size(); ++i) {
        std::cout << "epoch " << i + 1 << " loss " << report.epoch_losses[i] << "\n";
    }
}

// POS identifiers in first-occurrence order across slash-format files, so
// `evaluate` works without a configured tag set.
TagSet tagset_from_slash_files(const std::vector<std::string>& paths) {
    std::vector<std::string> names;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream tokens(line);
            std::string token;
            while (tokens >> token) {
                const auto slash = token.rfind('/');
                if (slash == std::string::npos || slash + 1 == token.size()) {
                    throw DataError(path + ":" + std::to_string(line_no) + ": token '" + token +
                                    "' is not word/pos");
                }
                const std::string pos = token.substr(slash + 1);
                if (std::find(names.begin(), names.end(), pos) == names.end()) names.push_back(pos);
            }
        }
    }
    if (names.empty()) throw DataError("no POS tags found in " + paths.front());
    return TagSet(names);
}

std::string format_components(const std::vector<UncertainComponent>& components) {
    if (components.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i > 0) out += ' ';
        out += "[" + std::to_string(components[i].start) + "," + std::to_string(components[i].end) + ")";
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"joint Chinese word segmentation and POS tagging"};
    app.require_subcommand(1);

    // train-se
    auto* train_se_cmd = app.add_subcommand("train-se", "train the stage-one tagger");
    Common tse_common;
    std::string tse_train, tse_format = "slash", tse_out;
    add_common(train_se_cmd, tse_common);
    train_se_cmd->add_option("--train", tse_train, "annotated training corpus")->required();
    train_se_cmd->add_option("--format", tse_format, "corpus format (slash|char-column)");
    train_se_cmd->add_option("--out", tse_out, "checkpoint to write")->required();
    train_se_cmd->callback([&] {
        const RunConfig cfg = resolve_config(tse_common);
        const TagSet tags = cfg.make_tagset();
        const AnnotatedCorpus corpus =
            load_corpus(tse_train, parse_format(tse_format), tags, cfg.model.max_seq_len);
        Rng rng(cfg.seed);
        TrainReport report;
        TaggerModel model = train_se(corpus, tags, cfg, rng, &report);
        print_epochs(report);
        save_tagger(model, tse_out);
        std::cout << "saved " << tse_out << "\n";
    });

    // train-kf
    auto* train_kf_cmd = app.add_subcommand("train-kf", "train the stage-two knowledge-fusion model");
    Common tkf_common;
    std::string tkf_train, tkf_format = "slash", tkf_se, tkf_index, tkf_out;
    add_common(train_kf_cmd, tkf_common);
    train_kf_cmd->add_option("--train", tkf_train, "annotated training corpus")->required();
    train_kf_cmd->add_option("--format", tkf_format, "corpus format (slash|char-column)");
    train_kf_cmd->add_option("--se", tkf_se, "trained stage-one checkpoint")->required();
    train_kf_cmd->add_option("--index", tkf_index, "knowledge index")->required();
    train_kf_cmd->add_option("--out", tkf_out, "checkpoint to write")->required();
    train_kf_cmd->callback([&] {
        const RunConfig cfg = resolve_config(tkf_common);
        TaggerModel se = load_tagger(tkf_se);
        const KnowledgeCorpus knowledge = KnowledgeCorpus::load(tkf_index);
        const int budget = std::min(se.config().max_seq_len, cfg.model.max_seq_len - 1);
        const AnnotatedCorpus corpus =
            load_corpus(tkf_train, parse_format(tkf_format), se.tagset(), budget);
        Rng rng(cfg.seed);
        TrainReport report;
        KnowledgeModel kf = train_kf(se, corpus, knowledge, cfg, rng, &report);
        print_epochs(report);
        save_knowledge(kf, tkf_out);
        std::cout << "saved " << tkf_out << "\n";
    });

    // index build
    auto* index_cmd = app.add_subcommand("index", "knowledge index maintenance");
    index_cmd->require_subcommand(1);
    auto* index_build_cmd = index_cmd->add_subcommand("build", "build an index from raw sentences");
    Common idx_common;
    std::string idx_corpus, idx_out;
    std::optional<int> idx_max_ngram;
    add_common(index_build_cmd, idx_common);
    index_build_cmd->add_option("--corpus", idx_corpus, "raw text, one sentence per line")->required();
    index_build_cmd->add_option("--out", idx_out, "index file to write")->required();
    index_build_cmd->add_option("--max-ngram", idx_max_ngram, "longest indexed n-gram");
    index_build_cmd->callback([&] {
        const RunConfig cfg = resolve_config(idx_common);
        std::vector<std::u32string> sentences = load_raw_sentences(idx_corpus);
        if (sentences.empty()) throw DataError(idx_corpus + ": empty knowledge corpus");
        const int max_ngram = idx_max_ngram.value_or(cfg.retrieval.max_ngram);
        const KnowledgeCorpus corpus = KnowledgeCorpus::build(std::move(sentences), max_ngram);
        corpus.save(idx_out);
        std::cout << "indexed " << corpus.size() << " sentences (n-grams up to " << max_ngram
                  << ") into " << idx_out << "\n";
    });

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "report uncertain components per sentence");
    Common smp_common;
    std::string smp_se, smp_input;
    add_common(sample_cmd, smp_common);
    sample_cmd->add_option("--se", smp_se, "trained stage-one checkpoint")->required();
    sample_cmd->add_option("--input", smp_input, "raw sentences, one per line")->required();
    sample_cmd->callback([&] {
        RunConfig cfg = resolve_config(smp_common);
        TaggerModel se = load_tagger(smp_se);
        cfg.model = se.config();
        const TransitionMask mask(se.tagset());
        Rng rng(cfg.seed);
        const std::vector<std::u32string> sentences = load_raw_sentences(smp_input);
        for (std::size_t id = 0; id < sentences.size(); ++id) {
            int offset = 0;
            std::vector<UncertainComponent> components;
            int disagreeing = 0;
            for (const auto& chunk : split_raw_sentence(sentences[id], cfg.model.max_seq_len)) {
                const SamplingReport report =
                    sample_candidates(se, se.vocab().encode(chunk), mask, cfg.sampling.k, rng);
                for (const auto& c : report.components) {
                    components.push_back({c.start + offset, c.end + offset});
                }
                for (const auto& candidate : report.candidates) {
                    if (candidate != report.provisional) ++disagreeing;
                }
                offset += static_cast<int>(chunk.size());
            }
            std::cout << id << '\t' << format_components(components) << '\t' << disagreeing << "\n";
        }
    });

    // retrieve
    auto* retrieve_cmd = app.add_subcommand("retrieve", "ad-hoc knowledge query");
    Common ret_common;
    std::string ret_index, ret_sentence, ret_component;
    std::optional<int> ret_top_m;
    add_common(retrieve_cmd, ret_common);
    retrieve_cmd->add_option("--index", ret_index, "knowledge index")->required();
    retrieve_cmd->add_option("--sentence", ret_sentence, "query sentence X")->required();
    retrieve_cmd->add_option("--component", ret_component, "uncertain component text")->required();
    retrieve_cmd->add_option("--top-m", ret_top_m, "hits to keep");
    retrieve_cmd->callback([&] {
        const RunConfig cfg = resolve_config(ret_common);
        const KnowledgeCorpus knowledge = KnowledgeCorpus::load(ret_index);
        const auto hits = retrieve_text(knowledge, utf8_to_u32(ret_sentence), utf8_to_u32(ret_component),
                                        ret_top_m.value_or(cfg.retrieval.top_m));
        std::cout.precision(6);
        std::cout << std::fixed;
        for (const auto& hit : hits) {
            std::cout << hit.sentence_id << '\t' << hit.score << '\t' << u32_to_utf8(hit.text) << "\n";
        }
    });

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "segment and tag raw sentences");
    Common prd_common;
    std::string prd_se, prd_kf, prd_index, prd_input, prd_out;
    add_common(predict_cmd, prd_common);
    predict_cmd->add_option("--se", prd_se, "trained stage-one checkpoint")->required();
    predict_cmd->add_option("--kf", prd_kf, "trained stage-two checkpoint");
    predict_cmd->add_option("--index", prd_index, "knowledge index (required with --kf)");
    predict_cmd->add_option("--input", prd_input, "raw sentences, one per line")->required();
    predict_cmd->add_option("--out", prd_out, "output file (default stdout)");
    predict_cmd->callback([&] {
        RunConfig cfg = resolve_config(prd_common);
        if (prd_kf.empty() != prd_index.empty()) {
            throw UsageError("predict: --kf and --index must be given together");
        }
        TaggerModel se = load_tagger(prd_se);
        cfg.model = se.config();
        std::optional<KnowledgeModel> kf;
        std::optional<KnowledgeCorpus> knowledge;
        if (!prd_kf.empty()) {
            kf = load_knowledge(prd_kf);
            knowledge = KnowledgeCorpus::load(prd_index);
            cfg.model.max_seq_len = std::min(cfg.model.max_seq_len, kf->config().max_seq_len);
        }
        const TransitionMask mask(se.tagset());
        Rng rng(cfg.seed);
        std::ofstream file;
        std::ostream& out = open_sink(file, prd_out);
        for (const auto& sentence : load_raw_sentences(prd_input)) {
            const auto spans = predict_sentence(se, kf ? &*kf : nullptr,
                                                knowledge ? &*knowledge : nullptr, mask, sentence,
                                                cfg, rng);
            out << format_slash(sentence, spans, se.tagset()) << "\n";
        }
        if (!out) throw DataError("failed writing predictions");
    });

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a prediction file against gold");
    std::string ev_gold, ev_pred;
    evaluate_cmd->add_option("--gold", ev_gold, "gold slash-format file")->required();
    evaluate_cmd->add_option("--pred", ev_pred, "predicted slash-format file")->required();
    evaluate_cmd->callback([&] {
        const TagSet tags = tagset_from_slash_files({ev_gold, ev_pred});
        const AnnotatedCorpus gold = load_corpus(ev_gold, CorpusFormat::Slash, tags);
        const AnnotatedCorpus pred = load_corpus(ev_pred, CorpusFormat::Slash, tags);
        if (gold.sentences.size() != pred.sentences.size()) {
            throw CompatError("evaluate: " + std::to_string(gold.sentences.size()) + " gold vs " +
                              std::to_string(pred.sentences.size()) + " predicted sentences");
        }
        EvalCounts counts;
        for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
            if (gold.sentences[i].text != pred.sentences[i].text) {
                throw CompatError("evaluate: sentence " + std::to_string(i) + " texts differ");
            }
            counts += count_matches(gold.sentences[i].spans, pred.sentences[i].spans);
        }
        const EvalReport report = report_from_counts(counts);
        std::cout << "level  precision     recall         f1\n";
        std::cout << "cws      " << format_percent(report.cws_precision) << "    " << format_percent(report.cws_recall)
                  << "    " << format_percent(report.cws_f1) << "\n";
        std::cout << "pos      " << format_percent(report.pos_precision) << "    " << format_percent(report.pos_recall)
                  << "    " << format_percent(report.pos_f1) << "\n\n";
        std::cout << "cws_precision\t" << format_percent(report.cws_precision) << "\n";
        std::cout << "cws_recall\t" << format_percent(report.cws_recall) << "\n";
        std::cout << "cws_f1\t" << format_percent(report.cws_f1) << "\n";
        std::cout << "pos_precision\t" << format_percent(report.pos_precision) << "\n";
        std::cout << "pos_recall\t" << format_percent(report.pos_recall) << "\n";
        std::cout << "pos_f1\t" << format_percent(report.pos_f1) << "\n";
    });

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "uncertainty statistics over an annotated corpus");
    Common st_common;
    std::string st_se, st_gold, st_format = "slash";
    add_common(stats_cmd, st_common);
    stats_cmd->add_option("--se", st_se, "trained stage-one checkpoint")->required();
    stats_cmd->add_option("--gold", st_gold, "annotated corpus")->required();
    stats_cmd->add_option("--format", st_format, "corpus format (slash|char-column)");
    stats_cmd->callback([&] {
        RunConfig cfg = resolve_config(st_common);
        TaggerModel se = load_tagger(st_se);
        cfg.model = se.config();
        const AnnotatedCorpus corpus =
            load_corpus(st_gold, parse_format(st_format), se.tagset(), cfg.model.max_seq_len);
        const TransitionMask mask(se.tagset());
        Rng rng(cfg.seed);
        UncertaintyAccumulator acc;
        for (const auto& sentence : corpus.sentences) {
            std::vector<std::pair<std::u32string, std::string>> words;
            for (const auto& span : sentence.spans) {
                words.emplace_back(sentence.text.substr(static_cast<std::size_t>(span.start),
                                                        static_cast<std::size_t>(span.end - span.start)),
                                   se.tagset().pos_name(span.pos));
            }
            const SamplingReport report =
                sample_candidates(se, se.vocab().encode(sentence.text), mask, cfg.sampling.k, rng);
            acc.add(encode_words(se.tagset(), words), report.provisional, report.components);
        }
        const UncertaintyStats stats = acc.finish();
        const auto opt = [](const std::optional<double>& v) {
            return v ? format_percent(*v) : std::string("n/a");
        };
        std::cout << "CWS F1 Score\t" << format_percent(stats.cws_f1) << "\n";
        std::cout << "CWS Oracle F1 Score\t" << format_percent(stats.oracle_cws_f1) << "\n";
        std::cout << "POS F1 Score\t" << format_percent(stats.pos_f1) << "\n";
        std::cout << "POS Oracle F1 Score\t" << format_percent(stats.oracle_pos_f1) << "\n";
        std::cout << "ACC_uncertain\t" << opt(stats.acc_uncertain) << "\n";
        std::cout << "ACC_certain\t" << opt(stats.acc_certain) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : UsageError::exit_code;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return UsageError::exit_code;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return DataError::exit_code;
    } catch (const CompatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return CompatError::exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return UsageError::exit_code;
    }
}
