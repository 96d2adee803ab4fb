#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfedeg/matrix.hpp"

namespace pfedeg {

/// A fact (head, relation, tail), all identified by name.
struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// A triple after lookup into a client's local vocabularies.
struct IndexedTriple {
    int head = -1;
    int relation = -1;
    int tail = -1;

    friend bool operator==(const IndexedTriple&, const IndexedTriple&) = default;
};

/// One client's knowledge graph. Immutable once finalized; safe for
/// concurrent readers.
class ClientKG {
public:
    int client_id = 0;
    std::vector<std::string> entities;   // dense local ids 0..n_c-1
    std::vector<std::string> relations;  // dense local ids
    std::vector<Triple> train, valid, test;

    /// Builds index maps, indexed splits and the per-(h,r) tail tables.
    /// Throws InvalidInputError on duplicate vocabulary entries, vocabulary
    /// misses or splits that are not pairwise disjoint.
    void finalize();

    std::size_t entity_count() const { return entities.size(); }
    std::size_t relation_count() const { return relations.size(); }

    int entity_id(const std::string& name) const;      // -1 when absent
    int relation_id(const std::string& name) const;    // -1 when absent

    const std::vector<IndexedTriple>& indexed(const std::string& split) const;
    const std::vector<IndexedTriple>& indexed_train() const { return train_idx_; }
    const std::vector<IndexedTriple>& indexed_valid() const { return valid_idx_; }
    const std::vector<IndexedTriple>& indexed_test() const { return test_idx_; }

    /// Tails t such that (h, r, t) is a train triple. Sorted; empty when none.
    const std::vector<int>& train_tails(int h, int r) const;
    /// Tails over train ∪ valid ∪ test, the filter set for ranking.
    const std::vector<int>& known_tails(int h, int r) const;
    /// Mirror tables for the head slot.
    const std::vector<int>& train_heads(int r, int t) const;
    const std::vector<int>& known_heads(int r, int t) const;

    /// FNV-1a over the ordered vocabulary, used to pair checkpoints with data.
    std::uint64_t entity_vocab_hash() const;
    std::uint64_t relation_vocab_hash() const;

private:
    std::unordered_map<std::string, int> entity_id_;
    std::unordered_map<std::string, int> relation_id_;
    std::vector<IndexedTriple> train_idx_, valid_idx_, test_idx_;
    std::unordered_map<std::uint64_t, std::vector<int>> train_tails_;
    std::unordered_map<std::uint64_t, std::vector<int>> known_tails_;
    std::unordered_map<std::uint64_t, std::vector<int>> train_heads_;
    std::unordered_map<std::uint64_t, std::vector<int>> known_heads_;
};

/// Server-side index over the federation: the global entity vocabulary, the
/// existence matrix M (C x N) and per-client local<->global index maps.
/// Permutation matrices are kept as index maps; products with them are
/// gathers and scatters.
struct GlobalRegistry {
    std::vector<std::string> global_entities;          // sorted by name
    std::vector<std::vector<std::uint8_t>> existence;  // M, C x N
    std::vector<std::vector<int>> local_to_global;     // perm_maps[c][local] = global

    std::size_t client_count() const { return existence.size(); }
    std::size_t global_entity_count() const { return global_entities.size(); }

    bool owns(std::size_t client, std::size_t global_index) const {
        return existence[client][global_index] != 0;
    }

    /// Number of entities shared by clients i and j.
    std::size_t shared_count(std::size_t i, std::size_t j) const;

    /// Global indices owned by both i and j, ascending. Row order for the
    /// shared-entity embedding blocks of the embedding-based weights.
    std::vector<int> shared_globals(std::size_t i, std::size_t j) const;

    /// M as a dense double matrix, the form the aggregation math consumes.
    Matrix existence_matrix() const;
};

struct FederatedDataset {
    std::vector<ClientKG> clients;
    GlobalRegistry registry;

    std::size_t client_count() const { return clients.size(); }
};

/// Builds the registry for a finalized client list. Global order is the
/// sorted union of entity names. Throws InvalidInputError on duplicate
/// entities within one client's vocabulary.
GlobalRegistry build_registry(const std::vector<ClientKG>& clients);

/// Scatters a local n_c x m matrix into N x m, zero rows for entities the
/// client does not own. Equivalent to (P^c)^T x E_c.
Matrix pad_to_global(const Matrix& local, const std::vector<int>& local_to_global,
                     std::size_t global_count);

/// Gathers the owned rows of an N x m matrix back into local order.
/// Inverse of pad_to_global on the owned rows.
Matrix extract_from_global(const Matrix& padded, const std::vector<int>& local_to_global);

}  // namespace pfedeg
