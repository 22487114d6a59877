#pragma once

#include <cstdint>
#include <string>

#include "ignh/encode.hpp"
#include "ignh/graph.hpp"
#include "ignh/model.hpp"
#include "ignh/train.hpp"

namespace ignh {

struct TrainingMeta {
    std::uint64_t seed = 0;
    std::uint32_t best_epoch = 0;
    double best_val_metric = 0.0;
    TrainConfig train_config;
};

/// Everything inference needs in one versioned container (magic "IGNHM\0",
/// CRC-checked): schema, encoders, feature graph, model config, flat
/// parameters, and the training metadata. Loading reproduces predictions
/// bit-for-bit.
struct ModelFile {
    Schema schema;
    EncoderState encoders;
    FeatureGraph graph;
    ModelConfig config;
    ModelParams params;
    TrainingMeta meta;
};

std::vector<std::uint8_t> model_to_bytes(const ModelFile& model);
ModelFile model_from_bytes(std::span<const std::uint8_t> bytes);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace ignh
