#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pfedeg/kg.hpp"

namespace pfedeg {

/// Knobs for the synthetic federated KG generator.
///
/// Generation samples a latent geometry: every pool entity gets a latent
/// vector, every relation a latent translation, and a triple (h, r, t) is
/// emitted by picking t among the entities closest to latent(h) + latent(r).
/// Clients see per-client drifted copies of the latents; drift grows linearly
/// with the client index, scaled by `heterogeneity`, so low-index clients are
/// semantically close and high-index clients diverge. Relation vocabularies
/// are disjoint across clients.
struct SynthSpec {
    int clients = 3;
    int entities_per_client = 500;
    int relations_per_client = 10;
    int triples_per_client = 3000;
    double overlap = 0.4;        // target shared-entity fraction between client pairs
    double core_fraction = 0.5;  // share of the overlap held by an all-clients core block
    double heterogeneity = 0.4;  // latent drift of the last client; 0 = identical worlds
    int latent_dim = 8;
    int tail_candidates = 4;     // tails are sampled among this many nearest entities
    double tail_temperature = 0.5;
    double relation_scale = 1.0;
    double valid_fraction = 0.1;
    double test_fraction = 0.1;
};

/// Deterministic synthetic dataset; identical (spec, seed) pairs produce
/// identical datasets. Unused entities are dropped from the client
/// vocabularies, so entity counts and overlaps are approximate.
FederatedDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Reads `<root>/client_<c>/{train,valid,test}.tsv`. Vocabularies are built
/// from the train split in first-appearance order; a valid/test line naming an
/// entity or relation absent from train is a LoadError (its embedding would
/// be untrained). Malformed lines raise LoadError naming file and line.
FederatedDataset load_dataset(const std::filesystem::path& root);

/// Writes the on-disk TSV layout read by load_dataset.
void save_dataset(const FederatedDataset& dataset, const std::filesystem::path& root);

}  // namespace pfedeg
