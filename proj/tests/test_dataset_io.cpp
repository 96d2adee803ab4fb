#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pfedeg/dataset_io.hpp"
#include "pfedeg/errors.hpp"
#include "test_support.hpp"

using namespace pfedeg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pfedeg_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_lines(const fs::path& file, const std::vector<std::string>& lines) {
    std::ofstream out(file, std::ios::binary);
    for (const auto& line : lines) out << line << '\n';
}

}  // namespace

TEST_CASE("load_dataset: round trip through the TSV layout") {
    const auto dir = scratch_dir("roundtrip");
    const auto dataset = generate_synthetic(
        {.clients = 2, .entities_per_client = 25, .relations_per_client = 3,
         .triples_per_client = 90, .overlap = 0.5},
        5);
    save_dataset(dataset, dir);
    const auto loaded = load_dataset(dir);
    REQUIRE(loaded.client_count() == 2);
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(loaded.clients[c].entities == dataset.clients[c].entities);
        CHECK(loaded.clients[c].relations == dataset.clients[c].relations);
        CHECK(loaded.clients[c].train == dataset.clients[c].train);
        CHECK(loaded.clients[c].valid == dataset.clients[c].valid);
        CHECK(loaded.clients[c].test == dataset.clients[c].test);
    }
    CHECK(loaded.registry.global_entities == dataset.registry.global_entities);
}

TEST_CASE("load_dataset: empty split file is fine, malformed lines are not") {
    const auto dir = scratch_dir("malformed");
    fs::create_directories(dir / "client_0");
    write_lines(dir / "client_0/train.tsv", {"a\tr\tb", "b\tr\ta"});
    write_lines(dir / "client_0/valid.tsv", {});
    write_lines(dir / "client_0/test.tsv", {});
    const auto ok = load_dataset(dir);
    CHECK(ok.clients[0].valid.empty());
    CHECK(ok.clients[0].train.size() == 2);

    write_lines(dir / "client_0/train.tsv", {"a\tr\tb", "only_two\tfields"});
    try {
        load_dataset(dir);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("train.tsv") != std::string::npos);
        CHECK(msg.find(":2") != std::string::npos);
    }
}

TEST_CASE("load_dataset: valid/test entities unseen in train are rejected") {
    const auto dir = scratch_dir("unseen");
    fs::create_directories(dir / "client_0");
    write_lines(dir / "client_0/train.tsv", {"a\tr\tb"});
    write_lines(dir / "client_0/valid.tsv", {"a\tr\tghost"});
    write_lines(dir / "client_0/test.tsv", {});
    try {
        load_dataset(dir);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("valid.tsv:1") != std::string::npos);
        CHECK(msg.find("ghost") != std::string::npos);
    }
}

TEST_CASE("generate_synthetic: determinism and split shape") {
    const SynthSpec spec{.clients = 3, .entities_per_client = 40, .relations_per_client = 4,
                         .triples_per_client = 200, .overlap = 0.4};
    const auto a = generate_synthetic(spec, 99);
    const auto b = generate_synthetic(spec, 99);
    REQUIRE(a.client_count() == b.client_count());
    for (std::size_t c = 0; c < a.client_count(); ++c) {
        CHECK(a.clients[c].entities == b.clients[c].entities);
        CHECK(a.clients[c].train == b.clients[c].train);
        CHECK(a.clients[c].valid == b.clients[c].valid);
        CHECK(a.clients[c].test == b.clients[c].test);
    }

    // byte-identical on disk too
    const auto dir_a = scratch_dir("det_a");
    const auto dir_b = scratch_dir("det_b");
    save_dataset(a, dir_a);
    save_dataset(b, dir_b);
    for (int c = 0; c < 3; ++c)
        for (const char* split : {"train.tsv", "valid.tsv", "test.tsv"}) {
            std::ifstream fa(dir_a / ("client_" + std::to_string(c)) / split);
            std::ifstream fb(dir_b / ("client_" + std::to_string(c)) / split);
            const std::string sa((std::istreambuf_iterator<char>(fa)), {});
            const std::string sb((std::istreambuf_iterator<char>(fb)), {});
            CHECK(sa == sb);
        }

    // 0.8/0.1/0.1 within rounding
    for (const ClientKG& kg : a.clients) {
        const std::size_t total = kg.train.size() + kg.valid.size() + kg.test.size();
        CHECK(total >= 195);
        CHECK(kg.valid.size() == total / 10);
        CHECK(kg.test.size() == total / 10);
    }
}

TEST_CASE("generate_synthetic: overlap extremes") {
    const auto disjoint = generate_synthetic(
        {.clients = 3, .entities_per_client = 30, .relations_per_client = 3,
         .triples_per_client = 100, .overlap = 0.0},
        7);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            CHECK(disjoint.registry.shared_count(i, j) == 0);

    const auto full = generate_synthetic(
        {.clients = 2, .entities_per_client = 30, .relations_per_client = 3,
         .triples_per_client = 150, .overlap = 1.0},
        7);
    const auto& reg = full.registry;
    const std::size_t inter = reg.shared_count(0, 1);
    const std::size_t uni = full.clients[0].entity_count() + full.clients[1].entity_count() - inter;
    CHECK(inter == uni);  // Jaccard exactly 1
}

TEST_CASE("generate_synthetic: every valid/test name appears in train") {
    const auto dataset = generate_synthetic(
        {.clients = 2, .entities_per_client = 35, .relations_per_client = 4,
         .triples_per_client = 150, .overlap = 0.3},
        21);
    const auto dir = scratch_dir("coverage");
    save_dataset(dataset, dir);
    CHECK_NOTHROW(load_dataset(dir));  // load enforces the coverage rule
}
