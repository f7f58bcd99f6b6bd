#pragma once

#include "segtag/kfusion.hpp"
#include "segtag/tagger.hpp"

#include <string>

namespace segtag {

// Model checkpoints: a magic + version header, a JSON block carrying the
// model kind, config, tag set and vocabulary, then the parameter tensors as
// raw little-endian doubles keyed by name. Round-trips bit-exactly.
void save_tagger(TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

void save_knowledge(KnowledgeModel& model, const std::string& path);
KnowledgeModel load_knowledge(const std::string& path);

// The kind tag stored in a checkpoint, without loading tensors.
std::string checkpoint_kind(const std::string& path);

}  // namespace segtag
