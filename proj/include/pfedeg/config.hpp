#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "pfedeg/federation.hpp"

namespace pfedeg {

/// On-disk experiment description: the training config plus paths and dump
/// flags. Stored as flat key=value text; unknown keys are rejected.
/// Precedence is CLI flags > config file > defaults.
struct ExperimentConfig {
    TrainingConfig training;
    std::string dataset;
    std::string out;
    bool dump_weights = false;
    bool log_wall_clock = false;  // off: the rounds.csv seconds column stays 0
};

/// Applies one key=value pair. Throws ConfigError on unknown keys or
/// unparseable values.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

/// Reads a key=value file ('#' comments, blank lines ignored) onto the given
/// base config.
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Canonical key=value form of the fully resolved config. Loading this text
/// back reproduces the run, which is what the output manifest is for.
std::map<std::string, std::string> config_entries(const ExperimentConfig& config);

std::string manifest_text(const ExperimentConfig& config);

/// FNV-1a over the canonical manifest text.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace pfedeg
