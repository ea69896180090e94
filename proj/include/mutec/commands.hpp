#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mutec/dialogue.hpp"
#include "mutec/fold.hpp"
#include "mutec/run_config.hpp"
#include "mutec/trainer.hpp"

namespace mutec {

// The operations behind the CLI subcommands, shared with the test binaries.

struct SynthArgs {
    std::string profile = "tiny";
    std::filesystem::path out_dir;
    uint64_t seed = 0;
};

// Writes dialogues.<split>.jsonl for all three splits into out_dir.
std::vector<std::filesystem::path> cmd_synth(const SynthArgs& args);

struct PrepareArgs {
    std::filesystem::path data_dir;  // holds dialogues.<split>.jsonl
    std::string corpus = "dd";       // dd | iemo
    std::filesystem::path out_dir;
    std::vector<int> fold_ids{1};
    bool balanced = false;
    bool with_context = true;
    std::vector<Split> splits{Split::train, Split::val, Split::test};
    uint64_t seed = 0;
    std::optional<long> negative_total;
};

struct PrepareResult {
    struct Row {
        int fold_id = 1;
        bool balanced = false;
        Split split = Split::train;
        std::filesystem::path path;
        FoldCounts counts;
    };
    std::vector<Row> rows;

    std::string summary() const;
};

PrepareResult cmd_prepare(const PrepareArgs& args);

struct TrainArgs {
    RunConfig config;
    std::filesystem::path train_file;
    std::filesystem::path val_file;
    std::filesystem::path out_dir;
    int repeat = 1;  // >1: run<r>/ subdirectories with seeds seed+r, plus aggregate.json
};

struct TrainSummary {
    std::vector<TrainOutput> runs;
    std::filesystem::path aggregate_path;  // empty unless repeat > 1
};

TrainSummary cmd_train(const TrainArgs& args);

struct EvalArgs {
    std::filesystem::path checkpoint;
    std::filesystem::path fold_file;
    std::filesystem::path out_dir;
    std::optional<int> beam_width;
};

EvalOutput cmd_eval(const EvalArgs& args);

struct PredictArgs {
    std::filesystem::path checkpoint;
    std::filesystem::path fold_file;
    std::filesystem::path out_path;
    std::optional<int> beam_width;
};

std::filesystem::path cmd_predict(const PredictArgs& args);

struct SweepArgs {
    std::filesystem::path checkpoint;
    std::filesystem::path fold_file;
    std::filesystem::path out_dir;
    std::vector<int> widths{1, 2, 3, 4, 5};
};

SweepOutput cmd_sweep_beam(const SweepArgs& args);

}  // namespace mutec
