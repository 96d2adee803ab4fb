#include "pfedeg/kg.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "pfedeg/errors.hpp"

namespace pfedeg {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    // separator so {"ab","c"} and {"a","bc"} hash apart
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
    return h;
}

std::uint64_t vocab_hash(const std::vector<std::string>& names) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& name : names) h = fnv1a(h, name);
    return h;
}

std::uint64_t hr_key(int h, int r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(h)) << 32) |
           static_cast<std::uint32_t>(r);
}

std::uint64_t hrt_key(const IndexedTriple& t) {
    std::uint64_t k = static_cast<std::uint32_t>(t.head);
    k = k * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.relation);
    k = k * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.tail);
    return k;
}

}  // namespace

void ClientKG::finalize() {
    entity_id_.clear();
    relation_id_.clear();
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (entities[i].empty())
            throw InvalidInputError("client " + std::to_string(client_id) + ": empty entity name");
        if (!entity_id_.emplace(entities[i], static_cast<int>(i)).second)
            throw InvalidInputError("client " + std::to_string(client_id) +
                                    ": duplicate entity in vocabulary: " + entities[i]);
    }
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].empty())
            throw InvalidInputError("client " + std::to_string(client_id) +
                                    ": empty relation name");
        if (!relation_id_.emplace(relations[i], static_cast<int>(i)).second)
            throw InvalidInputError("client " + std::to_string(client_id) +
                                    ": duplicate relation in vocabulary: " + relations[i]);
    }

    auto index_split = [&](const std::vector<Triple>& split, const char* name) {
        std::vector<IndexedTriple> out;
        out.reserve(split.size());
        for (const Triple& t : split) {
            if (t.head.empty() || t.relation.empty() || t.tail.empty())
                throw InvalidInputError("client " + std::to_string(client_id) + ": " + name +
                                        " contains a triple with an empty field");
            const int h = entity_id(t.head);
            const int r = relation_id(t.relation);
            const int tl = entity_id(t.tail);
            if (h < 0 || r < 0 || tl < 0)
                throw InvalidInputError("client " + std::to_string(client_id) + ": " + name +
                                        " triple (" + t.head + ", " + t.relation + ", " + t.tail +
                                        ") uses a name outside the vocabulary");
            out.push_back({h, r, tl});
        }
        return out;
    };
    train_idx_ = index_split(train, "train");
    valid_idx_ = index_split(valid, "valid");
    test_idx_ = index_split(test, "test");

    // Splits must be pairwise disjoint as triple sets.
    std::unordered_set<std::uint64_t> seen;
    auto check_disjoint = [&](const std::vector<IndexedTriple>& idx, const char* name) {
        std::unordered_set<std::uint64_t> mine;
        for (const IndexedTriple& t : idx) {
            const std::uint64_t k = hrt_key(t);
            if (seen.count(k))
                throw InvalidInputError("client " + std::to_string(client_id) + ": " + name +
                                        " shares a triple with another split");
            mine.insert(k);
        }
        seen.insert(mine.begin(), mine.end());
    };
    check_disjoint(train_idx_, "train");
    check_disjoint(valid_idx_, "valid");
    check_disjoint(test_idx_, "test");

    train_tails_.clear();
    known_tails_.clear();
    train_heads_.clear();
    known_heads_.clear();
    for (const IndexedTriple& t : train_idx_) {
        train_tails_[hr_key(t.head, t.relation)].push_back(t.tail);
        train_heads_[hr_key(t.relation, t.tail)].push_back(t.head);
    }
    for (const auto* split : {&train_idx_, &valid_idx_, &test_idx_})
        for (const IndexedTriple& t : *split) {
            known_tails_[hr_key(t.head, t.relation)].push_back(t.tail);
            known_heads_[hr_key(t.relation, t.tail)].push_back(t.head);
        }
    for (auto* table : {&train_tails_, &known_tails_, &train_heads_, &known_heads_})
        for (auto& [key, ids] : *table) {
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        }
}

int ClientKG::entity_id(const std::string& name) const {
    auto it = entity_id_.find(name);
    return it == entity_id_.end() ? -1 : it->second;
}

int ClientKG::relation_id(const std::string& name) const {
    auto it = relation_id_.find(name);
    return it == relation_id_.end() ? -1 : it->second;
}

const std::vector<IndexedTriple>& ClientKG::indexed(const std::string& split) const {
    if (split == "train") return train_idx_;
    if (split == "valid") return valid_idx_;
    if (split == "test") return test_idx_;
    throw InvalidInputError("unknown split: " + split);
}

const std::vector<int>& ClientKG::train_tails(int h, int r) const {
    static const std::vector<int> kEmpty;
    auto it = train_tails_.find(hr_key(h, r));
    return it == train_tails_.end() ? kEmpty : it->second;
}

const std::vector<int>& ClientKG::known_tails(int h, int r) const {
    static const std::vector<int> kEmpty;
    auto it = known_tails_.find(hr_key(h, r));
    return it == known_tails_.end() ? kEmpty : it->second;
}

const std::vector<int>& ClientKG::train_heads(int r, int t) const {
    static const std::vector<int> kEmpty;
    auto it = train_heads_.find(hr_key(r, t));
    return it == train_heads_.end() ? kEmpty : it->second;
}

const std::vector<int>& ClientKG::known_heads(int r, int t) const {
    static const std::vector<int> kEmpty;
    auto it = known_heads_.find(hr_key(r, t));
    return it == known_heads_.end() ? kEmpty : it->second;
}

std::uint64_t ClientKG::entity_vocab_hash() const { return vocab_hash(entities); }
std::uint64_t ClientKG::relation_vocab_hash() const { return vocab_hash(relations); }

std::size_t GlobalRegistry::shared_count(std::size_t i, std::size_t j) const {
    std::size_t n = 0;
    const auto& a = existence[i];
    const auto& b = existence[j];
    for (std::size_t g = 0; g < a.size(); ++g) n += (a[g] & b[g]);
    return n;
}

std::vector<int> GlobalRegistry::shared_globals(std::size_t i, std::size_t j) const {
    std::vector<int> out;
    const auto& a = existence[i];
    const auto& b = existence[j];
    for (std::size_t g = 0; g < a.size(); ++g)
        if (a[g] && b[g]) out.push_back(static_cast<int>(g));
    return out;
}

Matrix GlobalRegistry::existence_matrix() const {
    Matrix m(client_count(), global_entity_count());
    for (std::size_t c = 0; c < client_count(); ++c)
        for (std::size_t g = 0; g < global_entity_count(); ++g)
            m(c, g) = existence[c][g] ? 1.0 : 0.0;
    return m;
}

GlobalRegistry build_registry(const std::vector<ClientKG>& clients) {
    std::set<std::string> names;
    for (const ClientKG& kg : clients) {
        std::unordered_set<std::string> local(kg.entities.begin(), kg.entities.end());
        if (local.size() != kg.entities.size())
            throw InvalidInputError("client " + std::to_string(kg.client_id) +
                                    ": duplicate entity in vocabulary");
        names.insert(kg.entities.begin(), kg.entities.end());
    }

    GlobalRegistry reg;
    reg.global_entities.assign(names.begin(), names.end());
    std::unordered_map<std::string, int> global_id;
    global_id.reserve(reg.global_entities.size());
    for (std::size_t g = 0; g < reg.global_entities.size(); ++g)
        global_id.emplace(reg.global_entities[g], static_cast<int>(g));

    reg.existence.assign(clients.size(),
                         std::vector<std::uint8_t>(reg.global_entities.size(), 0));
    reg.local_to_global.resize(clients.size());
    for (std::size_t c = 0; c < clients.size(); ++c) {
        auto& perm = reg.local_to_global[c];
        perm.reserve(clients[c].entities.size());
        for (const std::string& name : clients[c].entities) {
            const int g = global_id.at(name);
            reg.existence[c][g] = 1;
            perm.push_back(g);
        }
    }
    return reg;
}

Matrix pad_to_global(const Matrix& local, const std::vector<int>& local_to_global,
                     std::size_t global_count) {
    if (local.rows() != local_to_global.size())
        throw InvalidInputError("pad_to_global: matrix has " + std::to_string(local.rows()) +
                                " rows but the index map has " +
                                std::to_string(local_to_global.size()));
    Matrix padded(global_count, local.cols());
    for (std::size_t i = 0; i < local.rows(); ++i) {
        const int g = local_to_global[i];
        if (g < 0 || static_cast<std::size_t>(g) >= global_count)
            throw InvalidInputError("pad_to_global: global index out of range");
        std::copy(local.row(i).begin(), local.row(i).end(), padded.row(g).begin());
    }
    return padded;
}

Matrix extract_from_global(const Matrix& padded, const std::vector<int>& local_to_global) {
    Matrix local(local_to_global.size(), padded.cols());
    for (std::size_t i = 0; i < local_to_global.size(); ++i) {
        const int g = local_to_global[i];
        if (g < 0 || static_cast<std::size_t>(g) >= padded.rows())
            throw InvalidInputError("extract_from_global: global index out of range");
        std::copy(padded.row(g).begin(), padded.row(g).end(), local.row(i).begin());
    }
    return local;
}

}  // namespace pfedeg
