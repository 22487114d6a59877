#include "ignh/model_file.hpp"

#include <cstring>
#include <stdexcept>

#include "ignh/bytes.hpp"

namespace ignh {

namespace {

constexpr char kMagic[6] = {'I', 'G', 'N', 'H', 'M', '\0'};
constexpr std::uint32_t kVersion = 1;

void write_encoders(ByteWriter& w, const EncoderState& state) {
    w.u32(static_cast<std::uint32_t>(state.features.size()));
    for (const auto& enc : state.features) {
        w.u8(static_cast<std::uint8_t>(enc.kind));
        if (enc.kind == FeatureKind::Categorical) {
            w.u32(static_cast<std::uint32_t>(enc.categories.size()));
            for (const auto& c : enc.categories) w.str(c);
        } else {
            w.f64(enc.mean);
            w.f64(enc.stdev);
            w.u8(enc.constant ? 1 : 0);
        }
    }
}

EncoderState read_encoders(ByteReader& r) {
    EncoderState state;
    const std::uint32_t n = r.u32();
    state.features.resize(n);
    for (std::uint32_t f = 0; f < n; ++f) {
        FeatureEncoder& enc = state.features[f];
        enc.kind = static_cast<FeatureKind>(r.u8());
        if (enc.kind == FeatureKind::Categorical) {
            const std::uint32_t k = r.u32();
            enc.categories.reserve(k);
            for (std::uint32_t t = 0; t < k; ++t) {
                enc.categories.push_back(r.str());
                enc.token_of[enc.categories.back()] = static_cast<int>(t + 1);
            }
        } else {
            enc.mean = r.f64();
            enc.stdev = r.f64();
            enc.constant = r.u8() != 0;
        }
    }
    return state;
}

void write_model_config(ByteWriter& w, const ModelConfig& c) {
    w.u32(static_cast<std::uint32_t>(c.embed_dim));
    w.u32(static_cast<std::uint32_t>(c.layer_dims.size()));
    for (std::size_t d : c.layer_dims) w.u32(static_cast<std::uint32_t>(d));
    w.u8(static_cast<std::uint8_t>(c.activation));
    w.u8(static_cast<std::uint8_t>(c.sharing));
    w.u8(static_cast<std::uint8_t>(c.task));
    w.u32(static_cast<std::uint32_t>(c.n_classes));
    w.u64(c.seed);
}

ModelConfig read_model_config(ByteReader& r) {
    ModelConfig c;
    c.embed_dim = r.u32();
    const std::uint32_t layers = r.u32();
    c.layer_dims.resize(layers);
    for (std::uint32_t l = 0; l < layers; ++l) c.layer_dims[l] = r.u32();
    c.activation = static_cast<Activation>(r.u8());
    c.sharing = static_cast<WeightSharing>(r.u8());
    c.task = static_cast<Task>(r.u8());
    c.n_classes = r.u32();
    c.seed = r.u64();
    return c;
}

void write_train_config(ByteWriter& w, const TrainConfig& c) {
    w.f64(c.learning_rate);
    w.u32(static_cast<std::uint32_t>(c.max_epochs));
    w.u32(static_cast<std::uint32_t>(c.patience));
    w.u32(static_cast<std::uint32_t>(c.batch_size));
    w.f64(c.beta1);
    w.f64(c.beta2);
    w.f64(c.epsilon);
    w.u64(c.seed);
}

TrainConfig read_train_config(ByteReader& r) {
    TrainConfig c;
    c.learning_rate = r.f64();
    c.max_epochs = r.u32();
    c.patience = r.u32();
    c.batch_size = r.u32();
    c.beta1 = r.f64();
    c.beta2 = r.f64();
    c.epsilon = r.f64();
    c.seed = r.u64();
    return c;
}

}  // namespace

std::vector<std::uint8_t> model_to_bytes(const ModelFile& model) {
    ByteWriter w;
    w.raw(reinterpret_cast<const std::uint8_t*>(kMagic), sizeof(kMagic));
    w.u32(kVersion);
    w.str(schema_to_json(model.schema).dump());
    write_encoders(w, model.encoders);

    const auto graph_bytes = graph_to_bytes(model.graph);
    w.u32(static_cast<std::uint32_t>(graph_bytes.size()));
    w.raw(graph_bytes.data(), graph_bytes.size());

    write_model_config(w, model.config);

    w.u64(model.params.values.size());
    for (double v : model.params.values) w.f64(v);

    w.u64(model.meta.seed);
    w.u32(model.meta.best_epoch);
    w.f64(model.meta.best_val_metric);
    write_train_config(w, model.meta.train_config);

    w.u32(crc32(w.bytes()));
    return w.take();
}

ModelFile model_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) + 4) throw std::runtime_error("model container: file too short");
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("model container: bad magic bytes");
    }
    const std::uint32_t stored_crc = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24;
    if (crc32(bytes.subspan(0, bytes.size() - 4)) != stored_crc) {
        throw std::runtime_error("model container: checksum mismatch (corrupt or truncated file)");
    }

    ByteReader r(bytes.subspan(0, bytes.size() - 4));
    r.raw(sizeof(kMagic));
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("model container: unsupported format version " + std::to_string(version));
    }

    ModelFile model;
    model.schema = schema_from_json(nlohmann::json::parse(r.str()));
    model.encoders = read_encoders(r);

    const std::uint32_t graph_len = r.u32();
    model.graph = graph_from_bytes(r.raw(graph_len));
    if (model.graph.schema_hash != schema_hash(model.schema)) {
        throw std::runtime_error("model container: embedded graph does not match embedded schema");
    }

    model.config = read_model_config(r);
    model.params.layout = ParamLayout::make(model.schema, model.encoders, model.config);

    const std::uint64_t n_values = r.u64();
    if (n_values != model.params.layout.total) {
        throw std::runtime_error("model container: parameter count does not match configuration");
    }
    model.params.values.resize(n_values);
    for (std::uint64_t i = 0; i < n_values; ++i) model.params.values[i] = r.f64();

    model.meta.seed = r.u64();
    model.meta.best_epoch = r.u32();
    model.meta.best_val_metric = r.f64();
    model.meta.train_config = read_train_config(r);
    return model;
}

void save_model(const ModelFile& model, const std::string& path) {
    auto bytes = model_to_bytes(model);
    write_file_bytes(path, bytes);
}

ModelFile load_model(const std::string& path) { return model_from_bytes(read_file_bytes(path)); }

}  // namespace ignh
