#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pool/dqn/qnet.hpp"
#include "pool/harness/tabular_runner.hpp"
#include "pool/medium.hpp"
#include "pool/nn/dense.hpp"

namespace pool::harness {

struct BufferMeta {
  std::uint64_t capacity = 0;
  std::uint64_t size = 0;
  std::uint64_t inserted = 0;
  friend bool operator==(const BufferMeta&, const BufferMeta&) = default;
};

/// Everything a finished (or aborted) run leaves behind.
struct Checkpoint {
  std::string config_text;  // format_config of the run
  std::uint64_t seed = 0;
  std::int64_t episodes_done = 0;

  std::optional<TabularLearners> tables;
  std::optional<TabularLearners> best_tables;

  std::optional<dqn::QNetwork> online;
  std::optional<dqn::QNetwork> target;
  std::optional<dqn::QNetwork> best;
  std::optional<nn::Adam> processor_opt;
  std::optional<nn::Adam> receptor_opt;
  std::optional<BufferMeta> buffer;
  std::int64_t env_steps = 0;
  std::int64_t grad_steps = 0;

  std::optional<PheromoneField> field;
  int best_episode = -1;
};

// Container layout (little-endian):
//   u32 magic "PLCK", u32 version,
//   u32 section count, then per section: str tag, u64 byte length, payload.
// Strings are u64 length + bytes. Network and optimizer payloads use their
// own versioned encodings (see nn/dense.hpp).
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
/// Throws FormatError on malformed input.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Standalone weight files for a single network.
void save_weights(const std::filesystem::path& path, const nn::DenseNet& net);
nn::DenseNet load_weights(const std::filesystem::path& path);

}  // namespace pool::harness
