#include "pfedeg/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pfedeg/checkpoint.hpp"
#include "pfedeg/config.hpp"
#include "pfedeg/dataset_io.hpp"
#include "pfedeg/errors.hpp"

namespace fs = std::filesystem;

namespace pfedeg {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write " + path.string());
    out << text;
}

std::string weights_csv(const Matrix& W) {
    std::ostringstream out;
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = 0; j < W.cols(); ++j) {
            if (j) out << ',';
            out << fmt(W(i, j), "%.17g");
        }
        out << '\n';
    }
    return out.str();
}

std::string rounds_csv(const RunResult& result, bool log_wall_clock) {
    std::ostringstream out;
    out << "round,client,selected,mrr,hits1,hits5,hits10,weighted_mrr,seconds\n";
    for (const RoundRecord& record : result.rounds) {
        const std::size_t C = record.client_metrics.size();
        for (std::size_t c = 0; c < C; ++c) {
            const bool selected = std::find(record.selected.begin(), record.selected.end(),
                                            static_cast<int>(c)) != record.selected.end();
            out << record.round << ',' << c << ',' << (selected ? 1 : 0) << ',';
            if (record.client_metrics[c]) {
                const MetricReport& m = *record.client_metrics[c];
                out << fmt(m.mrr) << ',' << fmt(m.hits1) << ',' << fmt(m.hits5) << ','
                    << fmt(m.hits10);
            } else {
                out << ",,,";
            }
            out << ',';
            if (record.weighted_mrr) out << fmt(*record.weighted_mrr);
            out << ',' << fmt(log_wall_clock ? record.seconds : 0.0, "%.3f") << '\n';
        }
    }
    return out.str();
}

std::string metrics_block(const std::vector<MetricReport>& reports, const std::string& split,
                          int round) {
    std::ostringstream out;
    out << "split=" << split << "\n";
    out << "round=" << round << "\n";
    std::vector<double> values;
    std::vector<std::size_t> counts;
    for (std::size_t c = 0; c < reports.size(); ++c) {
        const MetricReport& m = reports[c];
        out << "client=" << c << " mrr=" << fmt(m.mrr) << " hits1=" << fmt(m.hits1)
            << " hits5=" << fmt(m.hits5) << " hits10=" << fmt(m.hits10)
            << " count=" << m.triple_count << "\n";
        values.push_back(m.mrr);
        counts.push_back(m.triple_count);
    }
    double wh1 = 0, wh5 = 0, wh10 = 0;
    std::size_t total = 0;
    for (const MetricReport& m : reports) total += m.triple_count;
    for (const MetricReport& m : reports) {
        const double w = static_cast<double>(m.triple_count) / static_cast<double>(total);
        wh1 += w * m.hits1;
        wh5 += w * m.hits5;
        wh10 += w * m.hits10;
    }
    out << "weighted mrr=" << fmt(weighted_mrr(values, counts)) << " hits1=" << fmt(wh1)
        << " hits5=" << fmt(wh5) << " hits10=" << fmt(wh10) << " count=" << total << "\n";
    return out.str();
}

struct TrainFlags {
    std::string config_file;
    ExperimentConfig config;
    // raw CLI capture; only entries the user actually passed are applied
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_option(CLI::App* cmd, TrainFlags& flags, const std::string& flag,
                         const std::string& key, const std::string& help,
                         bool is_flag = false) {
    if (is_flag) {
        cmd->add_flag_function(
            flag,
            [&flags, key](std::int64_t count) {
                if (count > 0) flags.overrides.emplace_back(key, "true");
            },
            help);
    } else {
        cmd->add_option_function<std::string>(
            flag,
            [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); },
            help);
    }
}

int cmd_synth(const SynthSpec& spec, std::uint64_t seed, const std::string& out, bool force) {
    const fs::path root(out);
    if (fs::exists(root) && !fs::is_empty(root) && !force)
        throw ConfigError("output directory " + out + " is not empty (use --force to overwrite)");
    const FederatedDataset dataset = generate_synthetic(spec, seed);
    save_dataset(dataset, root);

    std::cout << "wrote " << dataset.client_count() << " clients, "
              << dataset.registry.global_entity_count() << " global entities\n";
    for (const ClientKG& kg : dataset.clients)
        std::cout << "client " << kg.client_id << ": " << kg.entity_count() << " entities, "
                  << kg.relation_count() << " relations, " << kg.train.size() << "/"
                  << kg.valid.size() << "/" << kg.test.size() << " train/valid/test\n";
    return 0;
}

int cmd_train(TrainFlags& flags) {
    ExperimentConfig config;
    if (!flags.config_file.empty()) apply_config_file(config, flags.config_file);
    for (const auto& [key, value] : flags.overrides) apply_config_entry(config, key, value);

    if (config.dataset.empty()) throw ConfigError("train: dataset path required");
    if (config.out.empty()) throw ConfigError("train: output directory required");
    const TrainingConfig training = config.training.resolved();

    // everything that can fail cheaply fails before outputs appear
    const FederatedDataset dataset = load_dataset(config.dataset);

    const fs::path out(config.out);
    fs::create_directories(out);

    std::ostringstream manifest;
    manifest << "# pfedeg run manifest; load with --config to reproduce\n";
    manifest << manifest_text(config);
    write_text_file(out / "manifest.txt", manifest.str());

    RunHooks hooks;
    if (config.dump_weights)
        hooks.on_weights = [&](int round, const Matrix& W) {
            write_text_file(out / ("weights_round_" + std::to_string(round) + ".csv"),
                            weights_csv(W));
        };

    RunResult result = run(dataset, training, &hooks);
    write_text_file(out / "rounds.csv", rounds_csv(result, config.log_wall_clock));

    // checkpointed stores and their provenance
    Checkpoint checkpoint;
    checkpoint.meta.round = result.checkpoint_round;
    checkpoint.meta.seed = training.seed;
    checkpoint.meta.config_hash = config_hash(config);
    checkpoint.meta.client_count = result.stores.size();
    checkpoint.stores = result.stores;
    if (result.merged) {
        checkpoint.entity_vocab_hashes.push_back(result.merged->entity_vocab_hash());
        checkpoint.relation_vocab_hashes.push_back(result.merged->relation_vocab_hash());
    } else {
        for (const ClientKG& kg : dataset.clients) {
            checkpoint.entity_vocab_hashes.push_back(kg.entity_vocab_hash());
            checkpoint.relation_vocab_hashes.push_back(kg.relation_vocab_hash());
        }
    }
    save_checkpoint(out / "checkpoint", checkpoint);

    const EvalOptions eval_options{.filtered = training.filtered_eval,
                                   .predict_heads = training.predict_heads};
    std::vector<MetricReport> reports;
    if (result.merged) {
        FederatedDataset merged;
        merged.clients.push_back(*result.merged);
        reports = evaluate_all(result.stores, merged, "test", eval_options, training.threads);
    } else {
        reports = evaluate_all(result.stores, dataset, "test", eval_options, training.threads);
    }
    const std::string block = metrics_block(reports, "test", result.checkpoint_round);
    write_text_file(out / "final_metrics.txt", block);

    std::cout << "rounds run: " << result.rounds_run
              << (result.early_stopped ? " (early stop)" : "") << "\n"
              << "checkpoint round: " << result.checkpoint_round << "\n";
    if (result.checkpoint_mrr)
        std::cout << "checkpoint valid mrr: " << fmt(*result.checkpoint_mrr) << "\n";
    std::cout << block;
    return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& dataset_path,
             const std::string& split, bool raw_flag, const std::string& out_file) {
    const fs::path run(run_dir);
    ExperimentConfig config;
    apply_config_file(config, run / "manifest.txt");
    if (raw_flag) config.training.filtered_eval = false;
    const TrainingConfig training = config.training.resolved();

    const std::string data_path = dataset_path.empty() ? config.dataset : dataset_path;
    if (data_path.empty()) throw ConfigError("eval: dataset path required");
    const FederatedDataset dataset = load_dataset(data_path);

    const Checkpoint checkpoint = load_checkpoint(run / "checkpoint");

    FederatedDataset merged;
    const FederatedDataset* eval_dataset = &dataset;
    if (training.mode == Mode::Collective) {
        merged.clients.push_back(merge_clients(dataset));
        merged.registry = build_registry(merged.clients);
        eval_dataset = &merged;
    }
    if (checkpoint.stores.size() != eval_dataset->client_count())
        throw LoadError("eval: checkpoint holds " + std::to_string(checkpoint.stores.size()) +
                        " clients but the dataset has " +
                        std::to_string(eval_dataset->client_count()));
    for (std::size_t c = 0; c < eval_dataset->client_count(); ++c) {
        const ClientKG& kg = eval_dataset->clients[c];
        if (checkpoint.entity_vocab_hashes[c] != kg.entity_vocab_hash() ||
            checkpoint.relation_vocab_hashes[c] != kg.relation_vocab_hash())
            throw LoadError("eval: vocabulary hash mismatch for client " + std::to_string(c) +
                            "; this checkpoint was trained on different data");
    }

    const EvalOptions eval_options{.filtered = training.filtered_eval,
                                   .predict_heads = training.predict_heads};
    const auto reports =
        evaluate_all(checkpoint.stores, *eval_dataset, split, eval_options, training.threads);
    const std::string block = metrics_block(reports, split, checkpoint.meta.round);
    std::cout << block;
    const fs::path out =
        out_file.empty() ? run / ("metrics_" + split + ".txt") : fs::path(out_file);
    write_text_file(out, block);
    return 0;
}

int cmd_inspect_weights(const std::string& dataset_path, const std::string& strategy_name_arg,
                        const std::string& run_dir, const std::string& out_file) {
    const WeightStrategy strategy = strategy_from_name(strategy_name_arg);
    const FederatedDataset dataset = load_dataset(dataset_path);

    std::vector<Matrix> entity_matrices;
    if (strategy == WeightStrategy::EmbeddingBased) {
        if (run_dir.empty())
            throw ConfigError("inspect-weights: the embedding strategy needs --checkpoint");
        const Checkpoint checkpoint = load_checkpoint(fs::path(run_dir) / "checkpoint");
        if (checkpoint.stores.size() != dataset.client_count())
            throw LoadError("inspect-weights: checkpoint/dataset client count mismatch");
        for (const EmbeddingStore& store : checkpoint.stores)
            entity_matrices.push_back(store.entities);
    }

    const Matrix W = compute_weights(strategy, dataset.registry, entity_matrices);
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = 0; j < W.cols(); ++j) std::cout << (j ? " " : "") << fmt(W(i, j));
        std::cout << "\n";
    }
    if (!out_file.empty()) write_text_file(out_file, weights_csv(W));
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"personalized federated knowledge graph embedding"};
    app.require_subcommand(1);

    // synth
    SynthSpec spec;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    bool synth_force = false;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic federated dataset");
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    synth->add_option("--clients", spec.clients, "number of clients");
    synth->add_option("--entities", spec.entities_per_client, "entities per client");
    synth->add_option("--relations", spec.relations_per_client, "relations per client");
    synth->add_option("--triples", spec.triples_per_client, "triples per client");
    synth->add_option("--overlap", spec.overlap, "pairwise shared-entity fraction");
    synth->add_option("--core-fraction", spec.core_fraction,
                      "share of the overlap held by an all-clients core block");
    synth->add_option("--heterogeneity", spec.heterogeneity, "latent drift of the last client");
    synth->add_option("--latent-dim", spec.latent_dim, "latent geometry dimension");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_flag("--force", synth_force, "overwrite a nonempty output directory");

    // train
    TrainFlags train_flags;
    CLI::App* train = app.add_subcommand("train", "run federated training");
    train->add_option("--config", train_flags.config_file, "key=value config file");
    add_override_option(train, train_flags, "--dataset", "dataset", "dataset directory");
    add_override_option(train, train_flags, "--out", "out", "output directory");
    add_override_option(train, train_flags, "--mode", "mode",
                        "pfedeg-star|pfedeg-plus|fedavg|single|collective");
    add_override_option(train, train_flags, "--ablation", "ablation", "full|reg-only|init-only");
    add_override_option(train, train_flags, "--scorer", "scorer", "transe|rotate|complex");
    add_override_option(train, train_flags, "--strategy", "strategy",
                        "ratio|embedding|uniform (default: mode-specific)");
    add_override_option(train, train_flags, "--seed", "seed", "master seed");
    add_override_option(train, train_flags, "--rounds", "rounds", "maximum rounds");
    add_override_option(train, train_flags, "--eval-every", "eval_every", "evaluation cadence");
    add_override_option(train, train_flags, "--epochs", "epochs", "local epochs per round");
    add_override_option(train, train_flags, "--batch-size", "batch_size", "local batch size");
    add_override_option(train, train_flags, "--lr", "learning_rate", "Adam learning rate");
    add_override_option(train, train_flags, "--beta", "beta", "prox coefficient");
    add_override_option(train, train_flags, "--p", "p", "residual combination coefficient");
    add_override_option(train, train_flags, "--gamma", "gamma", "margin");
    add_override_option(train, train_flags, "--alpha", "alpha", "self-adversarial temperature");
    add_override_option(train, train_flags, "--negatives", "negatives", "negatives per positive");
    add_override_option(train, train_flags, "--dim", "dim", "embedding dimension");
    add_override_option(train, train_flags, "--patience", "patience", "early-stop patience");
    add_override_option(train, train_flags, "--fraction", "fraction", "client selection fraction");
    add_override_option(train, train_flags, "--threads", "threads", "client-update parallelism");
    add_override_option(train, train_flags, "--raw", "raw", "rank without filtering", true);
    add_override_option(train, train_flags, "--predict-heads", "predict_heads",
                        "also rank the head slot", true);
    add_override_option(train, train_flags, "--dump-weights", "dump_weights",
                        "write weights_round_<t>.csv", true);
    add_override_option(train, train_flags, "--log-wall-clock", "log_wall_clock",
                        "record wall time in rounds.csv (breaks byte-reproducibility)", true);

    // eval
    std::string eval_checkpoint, eval_dataset, eval_split = "test", eval_out;
    bool eval_raw = false;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpointed run");
    eval->add_option("--checkpoint", eval_checkpoint, "run directory of a finished train")
        ->required();
    eval->add_option("--dataset", eval_dataset, "dataset directory (default: from manifest)");
    eval->add_option("--split", eval_split, "train|valid|test");
    eval->add_flag("--raw", eval_raw, "rank without filtering");
    eval->add_option("--out", eval_out, "metrics output file");

    // inspect-weights
    std::string iw_dataset, iw_strategy = "ratio", iw_checkpoint, iw_out;
    CLI::App* inspect = app.add_subcommand("inspect-weights", "print the client-weight matrix");
    inspect->add_option("--dataset", iw_dataset, "dataset directory")->required();
    inspect->add_option("--strategy", iw_strategy, "ratio|embedding|uniform");
    inspect->add_option("--checkpoint", iw_checkpoint, "run directory (embedding strategy)");
    inspect->add_option("--out", iw_out, "CSV output file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (synth->parsed()) return cmd_synth(spec, synth_seed, synth_out, synth_force);
        if (train->parsed()) return cmd_train(train_flags);
        if (eval->parsed())
            return cmd_eval(eval_checkpoint, eval_dataset, eval_split, eval_raw, eval_out);
        if (inspect->parsed())
            return cmd_inspect_weights(iw_dataset, iw_strategy, iw_checkpoint, iw_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pfedeg
