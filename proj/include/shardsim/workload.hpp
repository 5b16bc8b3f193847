#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shardsim {

// One transformer block for accounting purposes: a parameter count, the
// trainable slice of it, and linear per-sample compute/activation
// coefficients. Structural detail (attention vs MLP, embeddings) is out of
// scope; schedules and traffic depend only on per-layer sizes.
struct LayerSpec {
  int layer_id = 0;
  std::int64_t param_count = 0;
  double trainable_fraction = 1.0;
  double fwd_compute_s_per_sample = 0.0;
  double bwd_compute_s_per_sample = 0.0;
  std::int64_t activation_bytes_per_sample = 0;
};

struct ModelSpec {
  std::vector<LayerSpec> layers;
  int param_bytes_per_element = 2;        // dtype width: 2 (half) or 4 (float)
  double optimizer_state_multiplier = 6.0;  // optimizer bytes per parameter byte
  int batch_per_gpu = 8;

  int num_layers() const { return static_cast<int>(layers.size()); }
  std::int64_t total_params() const;
  std::int64_t trainable_params() const;
  std::int64_t frozen_params() const { return total_params() - trainable_params(); }
  void validate() const;
};

// Trainable parameters of a layer, rounded to whole parameters.
std::int64_t layer_trainable_params(const LayerSpec& layer);

std::uint64_t layer_bytes(const ModelSpec& model, int layer);
std::uint64_t layer_trainable_bytes(const ModelSpec& model, int layer);
std::uint64_t layer_frozen_bytes(const ModelSpec& model, int layer);
std::uint64_t param_bytes(const ModelSpec& model);            // bytes(W)
std::uint64_t trainable_param_bytes(const ModelSpec& model);  // bytes(W_t)
std::uint64_t frozen_param_bytes(const ModelSpec& model);     // bytes(W_f)
std::uint64_t activation_bytes_per_sample_total(const ModelSpec& model);

// GPT-2-XL-derived presets: gpt10b, gpt15b, gpt20b, gpt25b, gpt30b.
// Parameters are spread uniformly across layers (per-layer count rounded),
// trainable_fraction 1.0, fp16, compute and activation coefficients zero.
ModelSpec model_preset(const std::string& name);
std::vector<std::string> model_preset_names();

// Sets every layer's trainable fraction uniformly. Preserves W, L and byte
// widths; requires 0 < fraction <= 1.
ModelSpec apply_lora_mask(ModelSpec model, double trainable_fraction);

}  // namespace shardsim
