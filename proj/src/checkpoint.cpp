#include "pfedeg/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "pfedeg/errors.hpp"

namespace fs = std::filesystem;

namespace pfedeg {

namespace {

constexpr std::uint64_t kMagic = 0x50464544454743ULL;  // "PFEDEGC"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const fs::path& file) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw LoadError("truncated checkpoint file: " + file.string());
    return value;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    write_pod<std::uint64_t>(out, m.rows());
    write_pod<std::uint64_t>(out, m.cols());
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix read_matrix(std::ifstream& in, const fs::path& file) {
    const auto rows = read_pod<std::uint64_t>(in, file);
    const auto cols = read_pod<std::uint64_t>(in, file);
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw LoadError("truncated checkpoint file: " + file.string());
    return m;
}

}  // namespace

void save_checkpoint(const fs::path& dir, const Checkpoint& checkpoint) {
    fs::create_directories(dir);
    const std::size_t C = checkpoint.stores.size();
    if (checkpoint.entity_vocab_hashes.size() != C ||
        checkpoint.relation_vocab_hashes.size() != C)
        throw InvalidInputError("save_checkpoint: vocab hash count mismatch");

    for (std::size_t c = 0; c < C; ++c) {
        const fs::path file = dir / ("client_" + std::to_string(c) + ".ckpt");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw LoadError("cannot write " + file.string());
        const EmbeddingStore& store = checkpoint.stores[c];
        write_pod(out, kMagic);
        write_pod(out, kVersion);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(store.scorer));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim));
        write_pod(out, checkpoint.entity_vocab_hashes[c]);
        write_pod(out, checkpoint.relation_vocab_hashes[c]);
        write_matrix(out, store.entities);
        write_matrix(out, store.relations);
        if (!out) throw LoadError("failed writing " + file.string());
    }

    std::ofstream meta(dir / "checkpoint.txt");
    meta << "round=" << checkpoint.meta.round << "\n"
         << "seed=" << checkpoint.meta.seed << "\n"
         << "config_hash=" << checkpoint.meta.config_hash << "\n"
         << "clients=" << C << "\n";
}

Checkpoint load_checkpoint(const fs::path& dir) {
    const fs::path meta_file = dir / "checkpoint.txt";
    std::ifstream meta(meta_file);
    if (!meta) throw LoadError("no checkpoint manifest at " + meta_file.string());

    Checkpoint checkpoint;
    std::string line;
    while (std::getline(meta, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "round") checkpoint.meta.round = std::stoi(value);
        else if (key == "seed") checkpoint.meta.seed = std::stoull(value);
        else if (key == "config_hash") checkpoint.meta.config_hash = std::stoull(value);
        else if (key == "clients") checkpoint.meta.client_count = std::stoull(value);
    }

    for (std::size_t c = 0; c < checkpoint.meta.client_count; ++c) {
        const fs::path file = dir / ("client_" + std::to_string(c) + ".ckpt");
        std::ifstream in(file, std::ios::binary);
        if (!in) throw LoadError("missing checkpoint file: " + file.string());
        if (read_pod<std::uint64_t>(in, file) != kMagic)
            throw LoadError("not a checkpoint file: " + file.string());
        if (read_pod<std::uint32_t>(in, file) != kVersion)
            throw LoadError("unsupported checkpoint version: " + file.string());
        read_pod<std::uint32_t>(in, file);  // client id, implied by the name
        EmbeddingStore store;
        store.scorer = static_cast<ScorerKind>(read_pod<std::uint32_t>(in, file));
        store.dim = static_cast<int>(read_pod<std::uint32_t>(in, file));
        checkpoint.entity_vocab_hashes.push_back(read_pod<std::uint64_t>(in, file));
        checkpoint.relation_vocab_hashes.push_back(read_pod<std::uint64_t>(in, file));
        store.entities = read_matrix(in, file);
        store.relations = read_matrix(in, file);
        checkpoint.stores.push_back(std::move(store));
    }
    return checkpoint;
}

}  // namespace pfedeg
