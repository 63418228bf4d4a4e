#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "muzero/config.hpp"
#include "muzero/nn.hpp"
#include "muzero/replay.hpp"

namespace muzero {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Complete learner state; restoring it and continuing reproduces an
/// uninterrupted run exactly.
struct TrainingState {
    RunConfig config;
    std::uint64_t step = 0;       // learner steps completed after pretraining
    std::uint64_t env_steps = 0;  // environment steps collected by self-play
    std::uint64_t episodes = 0;
    std::vector<double> params;
    nn::AdamState optimizer;
    std::mt19937_64 self_play_rng;
    ReplayBuffer::Snapshot replay;
};

/// Layout: 8-byte magic "MZCKPT\r\n", u32 version, then length-prefixed
/// sections in a fixed order. Integers and doubles are little-endian.
std::string encode_checkpoint(const TrainingState& state);
TrainingState decode_checkpoint(const std::string& bytes);

/// Writes to a temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const TrainingState& state);
TrainingState load_checkpoint(const std::filesystem::path& path);

}  // namespace muzero
