#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "pfedeg/checkpoint.hpp"
#include "pfedeg/errors.hpp"
#include "pfedeg/federation.hpp"
#include "test_support.hpp"

using namespace pfedeg;
using testing::make_kg;

namespace {

FederatedDataset tiny_dataset(int clients = 3, std::uint64_t seed = 404) {
    return generate_synthetic({.clients = clients,
                               .entities_per_client = 30,
                               .relations_per_client = 3,
                               .triples_per_client = 130,
                               .overlap = 0.4},
                              seed);
}

TrainingConfig tiny_config() {
    TrainingConfig cfg;
    cfg.dim = 8;
    cfg.negatives = 8;
    cfg.batch_size = 64;
    cfg.max_rounds = 4;
    cfg.eval_every = 2;
    cfg.seed = 5;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_CASE("select_clients: full fraction, exact cardinality, determinism") {
    Rng rng(derive_seed(71, Stream::Test));
    const auto all = select_clients(6, 1.0, rng);
    CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5});

    std::set<std::vector<int>> seen;
    for (int round = 0; round < 200; ++round) {
        Rng r(derive_seed(72, Stream::Test, round));
        const auto half = select_clients(10, 0.5, r);
        CHECK(half.size() == 5);
        CHECK(std::set<int>(half.begin(), half.end()).size() == 5);
        seen.insert(half);
        Rng r2(derive_seed(72, Stream::Test, round));
        CHECK(select_clients(10, 0.5, r2) == half);
    }
    CHECK(seen.size() > 50);  // actually random across rounds

    Rng r3(derive_seed(73, Stream::Test));
    CHECK(select_clients(3, 0.34, r3).size() == 2);  // ceil
    CHECK_THROWS_AS(select_clients(3, 0.0, r3), ConfigError);
}

TEST_CASE("weighted_mrr: hand mean, single client, equal counts") {
    const std::vector<double> values = {0.4, 0.2};
    const std::vector<std::size_t> counts = {100, 300};
    CHECK(weighted_mrr(values, counts) == doctest::Approx(0.25));

    const std::vector<double> one = {0.7};
    const std::vector<std::size_t> c1 = {42};
    CHECK(weighted_mrr(one, c1) == doctest::Approx(0.7));

    const std::vector<std::size_t> equal = {50, 50};
    CHECK(weighted_mrr(values, equal) == doctest::Approx(0.3));

    CHECK_THROWS_AS(weighted_mrr({}, {}), InvalidInputError);
    const std::vector<std::size_t> zero = {0, 10};
    CHECK_THROWS_AS(weighted_mrr(values, zero), InvalidInputError);
}

TEST_CASE("run: zero rounds returns the untouched initialization") {
    const auto dataset = tiny_dataset();
    auto cfg = tiny_config();
    cfg.max_rounds = 0;
    const auto result = run(dataset, cfg);
    CHECK(result.rounds.empty());
    CHECK_FALSE(result.early_stopped);

    // the stores must equal a fresh seeded initialization
    for (std::size_t c = 0; c < dataset.client_count(); ++c) {
        Rng rng(derive_seed(cfg.seed, Stream::Init, c));
        const auto fresh = make_store(cfg.scorer, cfg.dim, dataset.clients[c].entity_count(),
                                      dataset.clients[c].relation_count(), cfg.gamma, rng);
        CHECK(result.stores[c].bit_equal(fresh));
    }
}

TEST_CASE("run: early stop returns the checkpoint before the drop streak") {
    const auto dataset = tiny_dataset(2);
    auto cfg = tiny_config();
    cfg.max_rounds = 100;
    cfg.eval_every = 1;
    cfg.epochs = 0;  // training itself is irrelevant here

    // scripted MRR: rises to a peak at round 3, then strictly decreases
    const std::map<int, double> script = {{1, 0.10}, {2, 0.20}, {3, 0.30}, {4, 0.25},
                                          {5, 0.24}, {6, 0.23}, {7, 0.22}, {8, 0.21}};
    RunHooks hooks;
    hooks.scripted_weighted_mrr = [&](int round) { return script.at(round); };

    SUBCASE("patience 1 stops at the first drop") {
        cfg.patience = 1;
        const auto result = run(dataset, cfg, &hooks);
        CHECK(result.early_stopped);
        CHECK(result.rounds_run == 4);
        CHECK(result.checkpoint_round == 3);
        CHECK(*result.checkpoint_mrr == doctest::Approx(0.30));
    }
    SUBCASE("patience 3 tolerates two drops") {
        cfg.patience = 3;
        const auto result = run(dataset, cfg, &hooks);
        CHECK(result.early_stopped);
        CHECK(result.rounds_run == 6);
        CHECK(result.checkpoint_round == 3);
        // the early-stop contract: checkpoint MRR >= every in-streak MRR
        for (int round = 4; round <= 6; ++round)
            CHECK(*result.checkpoint_mrr >= script.at(round));
    }
    SUBCASE("a recovery resets the streak") {
        cfg.patience = 2;
        const std::map<int, double> wavy = {{1, 0.3}, {2, 0.2}, {3, 0.25}, {4, 0.2},
                                            {5, 0.1}, {6, 0.05}};
        RunHooks wavy_hooks;
        wavy_hooks.scripted_weighted_mrr = [&](int round) { return wavy.at(round); };
        const auto result = run(dataset, cfg, &wavy_hooks);
        CHECK(result.early_stopped);
        CHECK(result.rounds_run == 5);       // drops at 4 and 5
        CHECK(result.checkpoint_round == 3); // the recovery point, not the global peak
    }
}

TEST_CASE("run: exhausting rounds returns the best-MRR checkpoint") {
    const auto dataset = tiny_dataset(2);
    auto cfg = tiny_config();
    cfg.max_rounds = 5;
    cfg.eval_every = 1;
    cfg.epochs = 0;
    cfg.patience = 10;
    const std::map<int, double> script = {{1, 0.1}, {2, 0.4}, {3, 0.3}, {4, 0.35}, {5, 0.2}};
    RunHooks hooks;
    hooks.scripted_weighted_mrr = [&](int round) { return script.at(round); };
    const auto result = run(dataset, cfg, &hooks);
    CHECK_FALSE(result.early_stopped);
    CHECK(result.checkpoint_round == 2);
    CHECK(*result.checkpoint_mrr == doctest::Approx(0.4));
}

TEST_CASE("run: Single mode never calls the server") {
    const auto dataset = tiny_dataset();
    auto cfg = tiny_config();
    cfg.mode = Mode::Single;
    int server_calls = 0;
    RunHooks hooks;
    hooks.on_supplementary = [&](int, const std::vector<Matrix>&) { ++server_calls; };
    run(dataset, cfg, &hooks);
    CHECK(server_calls == 0);

    cfg.mode = Mode::FedEAvg;
    run(dataset, cfg, &hooks);
    CHECK(server_calls == 4);  // one per round
}

TEST_CASE("run: FedEAvg equals PFedEGStar with forced uniform W, p=1, beta=0, init-only") {
    const auto dataset = tiny_dataset();
    auto fede = tiny_config();
    fede.mode = Mode::FedEAvg;

    auto star = tiny_config();
    star.mode = Mode::PFedEGStar;
    star.strategy = WeightStrategy::Uniform;
    star.p = 1.0;
    star.beta = 0.0;
    star.ablation = Ablation::InitOnly;

    auto capture = [&](const TrainingConfig& cfg) {
        std::vector<std::vector<Matrix>> rounds;
        RunHooks hooks;
        hooks.on_supplementary = [&](int, const std::vector<Matrix>& K) { rounds.push_back(K); };
        const auto result = run(dataset, cfg, &hooks);
        return std::pair{rounds, result};
    };
    const auto [k_fede, r_fede] = capture(fede);
    const auto [k_star, r_star] = capture(star);
    REQUIRE(k_fede.size() == k_star.size());
    for (std::size_t t = 0; t < k_fede.size(); ++t)
        for (std::size_t c = 0; c < k_fede[t].size(); ++c)
            CHECK(k_fede[t][c].bit_equal(k_star[t][c]));
    for (std::size_t c = 0; c < r_fede.final_stores.size(); ++c)
        CHECK(r_fede.final_stores[c].bit_equal(r_star.final_stores[c]));
}

TEST_CASE("run: reproducibility of the full loop") {
    const auto dataset = tiny_dataset();
    auto cfg = tiny_config();
    cfg.mode = Mode::PFedEGPlus;
    const auto a = run(dataset, cfg);
    const auto b = run(dataset, cfg);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
        CHECK(a.rounds[t].selected == b.rounds[t].selected);
        CHECK(a.rounds[t].weighted_mrr == b.rounds[t].weighted_mrr);
    }
    for (std::size_t c = 0; c < a.final_stores.size(); ++c)
        CHECK(a.final_stores[c].bit_equal(b.final_stores[c]));
}

TEST_CASE("relation locality: other clients' relation embeddings never matter") {
    const auto dataset = tiny_dataset();
    const auto cfg = tiny_config().resolved();
    const std::size_t C = dataset.client_count();

    // two store sets differing only in client 2's relation matrix
    std::vector<EmbeddingStore> stores_a, stores_b;
    for (std::size_t c = 0; c < C; ++c) {
        Rng rng(derive_seed(cfg.seed, Stream::Init, c));
        stores_a.push_back(make_store(cfg.scorer, cfg.dim, dataset.clients[c].entity_count(),
                                      dataset.clients[c].relation_count(), cfg.gamma, rng));
    }
    stores_b = stores_a;
    for (std::size_t i = 0; i < stores_b[2].relations.size(); ++i)
        stores_b[2].relations.data()[i] += 42.0;

    auto one_round = [&](std::vector<EmbeddingStore> stores) {
        std::vector<Matrix> entities;
        for (const auto& s : stores) entities.push_back(s.entities);
        const auto K =
            server_update(entities, dataset.registry, WeightStrategy::EmbeddingBased, 0.7);
        LocalTrainConfig local;
        local.epochs = 1;
        local.batch_size = 32;
        local.negatives = 4;
        Rng rng(derive_seed(cfg.seed, Stream::LocalTrain, 0, 1));
        client_update(stores[0], dataset.clients[0], K[0], local, rng);
        return std::pair{K, stores[0]};
    };
    const auto [k_a, store_a] = one_round(stores_a);
    const auto [k_b, store_b] = one_round(stores_b);
    for (std::size_t c = 0; c < C; ++c) CHECK(k_a[c].bit_equal(k_b[c]));
    CHECK(store_a.bit_equal(store_b));
    CHECK(store_a.relations.bit_equal(store_b.relations));
}

TEST_CASE("checkpoint: save/load round trip and bit-identical resume") {
    namespace fs = std::filesystem;
    const auto dataset = tiny_dataset();
    auto cfg = tiny_config();
    cfg.max_rounds = 6;
    cfg.eval_every = 10;  // no evaluation; exercise pure training state

    // full run in one go
    const auto direct = run(dataset, cfg);

    // split run: 3 rounds, checkpoint, reload, 3 more
    auto half_cfg = cfg;
    half_cfg.max_rounds = 3;
    const auto first_half = run(dataset, half_cfg);

    Checkpoint saved;
    saved.meta = {.round = 3, .seed = cfg.seed, .config_hash = 1234,
                  .client_count = dataset.client_count()};
    saved.stores = first_half.final_stores;
    for (const auto& kg : dataset.clients) {
        saved.entity_vocab_hashes.push_back(kg.entity_vocab_hash());
        saved.relation_vocab_hashes.push_back(kg.relation_vocab_hash());
    }
    const fs::path dir = fs::temp_directory_path() / "pfedeg_test_ckpt";
    fs::remove_all(dir);
    save_checkpoint(dir, saved);
    const Checkpoint loaded = load_checkpoint(dir);
    CHECK(loaded.meta.round == 3);
    CHECK(loaded.meta.config_hash == 1234);
    REQUIRE(loaded.stores.size() == saved.stores.size());
    for (std::size_t c = 0; c < saved.stores.size(); ++c) {
        CHECK(loaded.stores[c].bit_equal(saved.stores[c]));
        CHECK(loaded.entity_vocab_hashes[c] == saved.entity_vocab_hashes[c]);
    }

    const auto second_half = run(dataset, cfg, nullptr, loaded.stores, 4);
    REQUIRE(second_half.final_stores.size() == direct.final_stores.size());
    for (std::size_t c = 0; c < direct.final_stores.size(); ++c)
        CHECK(second_half.final_stores[c].bit_equal(direct.final_stores[c]));
}

TEST_CASE("merge_clients: dedup, union vocab, collective degenerate case") {
    const auto a = make_kg(0, {"x", "y"}, {"r"}, {{0, 0, 1}});
    auto b = make_kg(1, {"y", "z"}, {"s"}, {{0, 0, 1}});
    // duplicate one triple across clients
    b.train.push_back({"x", "r", "y"});
    b.entities.push_back("x");
    b.relations.push_back("r");
    b.finalize();

    FederatedDataset dataset;
    dataset.clients = {a, b};
    dataset.registry = build_registry(dataset.clients);
    const ClientKG merged = merge_clients(dataset);
    CHECK(merged.entities == std::vector<std::string>{"x", "y", "z"});
    CHECK(merged.entity_count() == dataset.registry.global_entity_count());
    int xy_count = 0;
    for (const Triple& t : merged.train)
        if (t == Triple{"x", "r", "y"}) ++xy_count;
    CHECK(xy_count == 1);
    CHECK(merged.train.size() == 2);  // (x,r,y) once + (y,s,z)
}

TEST_CASE("run: collective mode trains one merged store") {
    const auto dataset = tiny_dataset(2);
    auto cfg = tiny_config();
    cfg.mode = Mode::Collective;
    const auto result = run(dataset, cfg);
    REQUIRE(result.stores.size() == 1);
    REQUIRE(result.merged.has_value());
    CHECK(result.merged->entity_count() == dataset.registry.global_entity_count());
    CHECK(result.stores[0].entities.rows() == result.merged->entity_count());
}
