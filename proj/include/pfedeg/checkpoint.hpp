#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pfedeg/kge.hpp"

namespace pfedeg {

struct CheckpointMeta {
    int round = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::size_t client_count = 0;
};

/// One binary file per client (raw matrices plus vocab hashes) and a small
/// checkpoint.txt manifest. Restoring and resuming from a checkpoint
/// reproduces continued training bit-identically.
struct Checkpoint {
    CheckpointMeta meta;
    std::vector<EmbeddingStore> stores;
    std::vector<std::uint64_t> entity_vocab_hashes;
    std::vector<std::uint64_t> relation_vocab_hashes;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& checkpoint);

Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace pfedeg
