#include "mutec/commands.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mutec/errors.hpp"
#include "mutec/synth.hpp"

namespace mutec {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<fs::path> cmd_synth(const SynthArgs& args) {
    if (args.out_dir.empty()) throw ConfigError("synth needs an output directory");
    fs::create_directories(args.out_dir);
    std::vector<fs::path> paths;
    for (Split split : {Split::train, Split::val, Split::test}) {
        const fs::path path =
            args.out_dir / ("dialogues." + std::string(to_string(split)) + ".jsonl");
        write_corpus(path, make_synth_corpus(args.profile, split, args.seed));
        paths.push_back(path);
    }
    return paths;
}

std::string PrepareResult::summary() const {
    std::ostringstream out;
    for (const Row& r : rows) {
        out << "fold" << r.fold_id << (r.balanced ? " balanced" : "") << " "
            << to_string(r.split) << ": " << r.counts.positives << " positives, "
            << r.counts.negatives << " negatives -> " << r.path.string() << "\n";
    }
    return out.str();
}

PrepareResult cmd_prepare(const PrepareArgs& args) {
    if (args.out_dir.empty()) throw ConfigError("prepare needs an output directory");
    if (args.fold_ids.empty()) throw ConfigError("prepare needs at least one fold id");
    const CorpusKind kind = parse_corpus_kind(args.corpus);
    fs::create_directories(args.out_dir);

    PrepareResult result;
    for (Split split : args.splits) {
        const fs::path corpus_path =
            args.data_dir / ("dialogues." + std::string(to_string(split)) + ".jsonl");
        const std::vector<Dialogue> dialogues = load_corpus(corpus_path, kind);
        for (int fold_id : args.fold_ids) {
            FoldSpec spec;
            spec.fold_id = fold_id;
            spec.balanced = args.balanced;
            spec.split = split;
            spec.seed = args.seed;
            spec.with_context = args.with_context;
            spec.negative_total = args.negative_total;
            const std::vector<Sample> samples = build_fold(dialogues, spec);

            PrepareResult::Row row;
            row.fold_id = fold_id;
            row.balanced = args.balanced;
            row.split = split;
            row.path = args.out_dir / fold_file_name(fold_id, args.balanced, split);
            row.counts = count_fold(samples);
            write_fold(row.path, samples);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

TrainSummary cmd_train(const TrainArgs& args) {
    if (args.repeat < 1) throw ConfigError("repeat must be at least 1");
    TrainSummary summary;
    if (args.repeat == 1) {
        summary.runs.push_back(train_run(args.config, args.train_file, args.val_file,
                                         args.out_dir));
        return summary;
    }
    json aggregate;
    json runs = json::array();
    double metric_sum = 0.0;
    for (int r = 0; r < args.repeat; ++r) {
        RunConfig config = args.config;
        config.seed = args.config.seed + static_cast<uint64_t>(r);
        const fs::path run_dir = args.out_dir / ("run" + std::to_string(r));
        summary.runs.push_back(train_run(config, args.train_file, args.val_file, run_dir));
        const TrainOutput& out = summary.runs.back();
        metric_sum += out.best_metric;
        runs.push_back({{"seed", config.seed},
                        {"dir", run_dir.filename().string()},
                        {"best_epoch", out.best_epoch},
                        {"best_val_metric", out.best_metric}});
    }
    aggregate["runs"] = runs;
    aggregate["mean_best_val_metric"] = metric_sum / static_cast<double>(args.repeat);
    summary.aggregate_path = args.out_dir / "aggregate.json";
    std::ofstream out(summary.aggregate_path);
    out << aggregate.dump(2) << "\n";
    return summary;
}

EvalOutput cmd_eval(const EvalArgs& args) {
    return eval_run(args.checkpoint, args.fold_file, args.out_dir, args.beam_width);
}

fs::path cmd_predict(const PredictArgs& args) {
    return predict_run(args.checkpoint, args.fold_file, args.out_path, args.beam_width);
}

SweepOutput cmd_sweep_beam(const SweepArgs& args) {
    return sweep_beam_run(args.checkpoint, args.fold_file, args.widths, args.out_dir);
}

}  // namespace mutec
