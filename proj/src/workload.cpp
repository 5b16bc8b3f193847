#include "shardsim/workload.hpp"

#include <array>
#include <cmath>

#include "shardsim/error.hpp"

namespace shardsim {

namespace {

struct ModelRow {
  const char* name;
  std::int64_t params;
  int layers;
};

const std::array<ModelRow, 5>& model_table() {
  static const std::array<ModelRow, 5> rows = {{
      {"gpt10b", 10'000'000'000, 40},
      {"gpt15b", 15'000'000'000, 40},
      {"gpt20b", 20'000'000'000, 40},
      {"gpt25b", 25'000'000'000, 39},
      {"gpt30b", 30'000'000'000, 40},
  }};
  return rows;
}

}  // namespace

std::int64_t ModelSpec::total_params() const {
  std::int64_t total = 0;
  for (const LayerSpec& l : layers) total += l.param_count;
  return total;
}

std::int64_t ModelSpec::trainable_params() const {
  std::int64_t total = 0;
  for (const LayerSpec& l : layers) total += layer_trainable_params(l);
  return total;
}

void ModelSpec::validate() const {
  if (layers.empty()) throw ConfigError("model.layers: at least one layer required");
  if (param_bytes_per_element != 2 && param_bytes_per_element != 4)
    throw ConfigError("model.dtype_bytes: must be 2 or 4");
  if (optimizer_state_multiplier < 0.0)
    throw ConfigError("model.optimizer_state_multiplier: must be >= 0");
  if (batch_per_gpu < 1) throw ConfigError("model.batch_per_gpu: must be >= 1");
  for (const LayerSpec& l : layers) {
    if (l.param_count <= 0) throw ConfigError("model.layers.param_count: must be > 0");
    if (l.trainable_fraction < 0.0 || l.trainable_fraction > 1.0)
      throw ConfigError("model.layers.trainable_fraction: must be in [0,1]");
    if (l.fwd_compute_s_per_sample < 0.0 || l.bwd_compute_s_per_sample < 0.0)
      throw ConfigError("model.layers: compute coefficients must be >= 0");
    if (l.activation_bytes_per_sample < 0)
      throw ConfigError("model.layers.activation_bytes_per_sample: must be >= 0");
  }
}

std::int64_t layer_trainable_params(const LayerSpec& layer) {
  if (layer.trainable_fraction >= 1.0) return layer.param_count;
  if (layer.trainable_fraction <= 0.0) return 0;
  return std::llround(layer.trainable_fraction * static_cast<double>(layer.param_count));
}

std::uint64_t layer_bytes(const ModelSpec& model, int layer) {
  return static_cast<std::uint64_t>(model.layers.at(layer).param_count) *
         static_cast<std::uint64_t>(model.param_bytes_per_element);
}

std::uint64_t layer_trainable_bytes(const ModelSpec& model, int layer) {
  return static_cast<std::uint64_t>(layer_trainable_params(model.layers.at(layer))) *
         static_cast<std::uint64_t>(model.param_bytes_per_element);
}

std::uint64_t layer_frozen_bytes(const ModelSpec& model, int layer) {
  return layer_bytes(model, layer) - layer_trainable_bytes(model, layer);
}

std::uint64_t param_bytes(const ModelSpec& model) {
  std::uint64_t total = 0;
  for (int l = 0; l < model.num_layers(); ++l) total += layer_bytes(model, l);
  return total;
}

std::uint64_t trainable_param_bytes(const ModelSpec& model) {
  std::uint64_t total = 0;
  for (int l = 0; l < model.num_layers(); ++l) total += layer_trainable_bytes(model, l);
  return total;
}

std::uint64_t frozen_param_bytes(const ModelSpec& model) {
  return param_bytes(model) - trainable_param_bytes(model);
}

std::uint64_t activation_bytes_per_sample_total(const ModelSpec& model) {
  std::uint64_t total = 0;
  for (const LayerSpec& l : model.layers)
    total += static_cast<std::uint64_t>(l.activation_bytes_per_sample);
  return total;
}

ModelSpec model_preset(const std::string& name) {
  for (const ModelRow& row : model_table()) {
    if (name != row.name) continue;
    ModelSpec model;
    model.layers.reserve(row.layers);
    const std::int64_t per_layer =
        std::llround(static_cast<double>(row.params) / static_cast<double>(row.layers));
    for (int i = 0; i < row.layers; ++i) {
      LayerSpec layer;
      layer.layer_id = i;
      layer.param_count = per_layer;
      layer.trainable_fraction = 1.0;
      model.layers.push_back(layer);
    }
    model.validate();
    return model;
  }
  throw ConfigError("unknown model preset: " + name);
}

std::vector<std::string> model_preset_names() {
  std::vector<std::string> names;
  for (const ModelRow& row : model_table()) names.emplace_back(row.name);
  return names;
}

ModelSpec apply_lora_mask(ModelSpec model, double trainable_fraction) {
  if (!(trainable_fraction > 0.0) || trainable_fraction > 1.0)
    throw ConfigError("trainable_fraction: must be in (0,1]");
  for (LayerSpec& l : model.layers) l.trainable_fraction = trainable_fraction;
  return model;
}

}  // namespace shardsim
