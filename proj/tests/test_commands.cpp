#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mutec/commands.hpp"
#include "mutec/synth.hpp"

using namespace mutec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "mutec_command_tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("synth writes loadable corpora for all three splits") {
    const fs::path dir = fresh_dir("synth");
    SynthArgs args;
    args.profile = "tiny";
    args.out_dir = dir;
    const std::vector<fs::path> paths = cmd_synth(args);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].filename() == "dialogues.train.jsonl");
    CHECK(paths[1].filename() == "dialogues.val.jsonl");
    CHECK(paths[2].filename() == "dialogues.test.jsonl");
    for (const fs::path& p : paths) {
        const std::vector<Dialogue> dialogues = load_corpus(p, CorpusKind::DD);
        CHECK_FALSE(dialogues.empty());
    }
}

TEST_CASE("prepare reproduces a directly built fold") {
    const fs::path data = fresh_dir("prepare_data");
    SynthArgs synth;
    synth.profile = "tiny";
    synth.out_dir = data;
    cmd_synth(synth);

    PrepareArgs args;
    args.data_dir = data;
    args.out_dir = fresh_dir("prepare_out");
    args.splits = {Split::train};
    const PrepareResult result = cmd_prepare(args);
    REQUIRE(result.rows.size() == 1);
    const PrepareResult::Row& row = result.rows.front();
    CHECK(row.path.filename() == "fold1.train.jsonl");
    CHECK(fs::exists(row.path));

    FoldSpec spec;
    spec.fold_id = 1;
    spec.split = Split::train;
    const std::vector<Sample> direct =
        build_fold(load_corpus(data / "dialogues.train.jsonl", CorpusKind::DD), spec);
    const FoldCounts direct_counts = count_fold(direct);
    CHECK(row.counts.positives == direct_counts.positives);
    CHECK(row.counts.negatives == direct_counts.negatives);
    CHECK(read_fold(row.path).size() == direct.size());

    const std::string summary = result.summary();
    CHECK(summary.find("fold1 train:") != std::string::npos);
    CHECK(summary.find(std::to_string(direct_counts.positives) + " positives") !=
          std::string::npos);
}

TEST_CASE("prepare names and trims the balanced variant") {
    const fs::path data = fresh_dir("balanced_data");
    SynthArgs synth;
    synth.profile = "tiny";
    synth.out_dir = data;
    cmd_synth(synth);

    PrepareArgs plain;
    plain.data_dir = data;
    plain.out_dir = fresh_dir("balanced_plain");
    plain.splits = {Split::train};
    PrepareArgs balanced = plain;
    balanced.out_dir = fresh_dir("balanced_out");
    balanced.balanced = true;

    const PrepareResult::Row plain_row = cmd_prepare(plain).rows.front();
    const PrepareResult result = cmd_prepare(balanced);
    const PrepareResult::Row& row = result.rows.front();
    CHECK(row.path.filename() == "fold1.balanced.train.jsonl");
    CHECK(row.counts.positives == plain_row.counts.positives);
    CHECK(row.counts.negatives <= plain_row.counts.negatives);
    CHECK(result.summary().find("fold1 balanced train:") != std::string::npos);
}

TEST_CASE("repeated training aggregates the per-seed runs") {
    const fs::path data = fresh_dir("repeat_data");
    FoldSpec spec;
    spec.fold_id = 1;
    spec.split = Split::train;
    const fs::path fold_file = data / fold_file_name(1, false, Split::train);
    write_fold(fold_file, build_fold(make_synth_corpus("overfit", Split::train, 0), spec));

    TrainArgs args;
    args.config = default_config(Task::cse);
    args.config.encoder.dim = 16;
    args.config.encoder.layers = 2;
    args.config.encoder.heads = 2;
    args.config.epochs = 1;
    args.config.batch_size = 4;
    args.config.max_seq_len = 96;
    args.config.warmup_steps = 0;
    args.config.msd_k = 2;
    args.config.beam_width = 1;
    args.config.seed = 3;
    args.train_file = fold_file;
    args.val_file = fold_file;
    args.out_dir = fresh_dir("repeat_out");
    args.repeat = 2;

    const TrainSummary summary = cmd_train(args);
    REQUIRE(summary.runs.size() == 2);
    CHECK(fs::exists(args.out_dir / "run0" / "checkpoint.bin"));
    CHECK(fs::exists(args.out_dir / "run1" / "manifest.json"));

    const json aggregate = json::parse(slurp(summary.aggregate_path));
    REQUIRE(aggregate.at("runs").size() == 2);
    CHECK(aggregate.at("runs")[0].at("seed").get<uint64_t>() == 3);
    CHECK(aggregate.at("runs")[1].at("seed").get<uint64_t>() == 4);
    const double mean =
        (summary.runs[0].best_metric + summary.runs[1].best_metric) / 2.0;
    CHECK(aggregate.at("mean_best_val_metric").get<double>() == doctest::Approx(mean));
}

TEST_CASE("the inference commands forward to the run layer") {
    const fs::path data = fresh_dir("wire_data");
    FoldSpec spec;
    spec.fold_id = 1;
    spec.split = Split::train;
    const fs::path fold_file = data / fold_file_name(1, false, Split::train);
    write_fold(fold_file, build_fold(make_synth_corpus("overfit", Split::train, 0), spec));

    TrainArgs train;
    train.config = default_config(Task::cse);
    train.config.encoder.dim = 16;
    train.config.encoder.layers = 2;
    train.config.encoder.heads = 2;
    train.config.epochs = 0;
    train.config.max_seq_len = 96;
    train.config.seed = 3;
    train.train_file = fold_file;
    train.val_file = fold_file;
    train.out_dir = fresh_dir("wire_train");
    const TrainSummary trained = cmd_train(train);

    EvalArgs eval;
    eval.checkpoint = trained.runs.front().checkpoint_path;
    eval.fold_file = fold_file;
    eval.out_dir = fresh_dir("wire_eval");
    eval.beam_width = 1;
    const EvalOutput eval_out = cmd_eval(eval);
    CHECK(fs::exists(eval_out.predictions_path));
    CHECK(fs::exists(eval_out.report_path));

    PredictArgs predict;
    predict.checkpoint = trained.runs.front().checkpoint_path;
    predict.fold_file = fold_file;
    predict.out_path = fresh_dir("wire_predict") / "preds.jsonl";
    CHECK(fs::exists(cmd_predict(predict)));

    SweepArgs sweep;
    sweep.checkpoint = trained.runs.front().checkpoint_path;
    sweep.fold_file = fold_file;
    sweep.out_dir = fresh_dir("wire_sweep");
    sweep.widths = {1, 2};
    const SweepOutput sweep_out = cmd_sweep_beam(sweep);
    CHECK(sweep_out.points.size() == 2);
    CHECK(fs::exists(sweep_out.path));
}
