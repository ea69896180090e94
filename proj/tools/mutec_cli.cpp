#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mutec/commands.hpp"
#include "mutec/errors.hpp"
#include "mutec/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mutec;

namespace {

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Run configuration assembled from the subcommand's flags plus an optional
// JSON config file. Keys given in the file override the flags; everything
// else falls back to the task defaults.
class ConfigFlags {
  public:
    void attach(CLI::App& cmd) {
        cmd_ = &cmd;
        cmd.add_option("--task", task_, "cse | cee | e2e")->capture_default_str();
        cmd.add_option("--fold-id", fold_id_, "negative sampling strategy 1-3");
        cmd.add_flag("--balanced,!--no-balanced", balanced_, "use the balanced fold variant");
        cmd.add_flag("--with-context,!--no-context", with_context_,
                     "include the conversational history in the input");
        cmd.add_option("--encoder-kind", encoder_kind_, "toy | external:<states file>");
        cmd.add_option("--encoder-dim", encoder_dim_, "toy encoder width");
        cmd.add_option("--encoder-layers", encoder_layers_, "toy encoder depth");
        cmd.add_option("--encoder-heads", encoder_heads_, "toy encoder attention heads");
        cmd.add_option("--epochs", epochs_, "training epochs");
        cmd.add_option("--batch-size", batch_size_, "gradient accumulation batch");
        cmd.add_option("--max-seq-len", max_seq_len_, "token truncation length");
        cmd.add_option("--lr", lr_, "AdamW learning rate");
        cmd.add_option("--weight-decay", weight_decay_, "AdamW weight decay");
        cmd.add_option("--warmup-steps", warmup_steps_, "linear warmup steps");
        cmd.add_option("--max-answer-length", max_answer_length_,
                       "longest decodable span in tokens");
        cmd.add_option("--n-hidden-states", n_hidden_states_,
                       "encoder layers averaged into the token states");
        cmd.add_option("--msd-p", msd_p_, "span head dropout probability");
        cmd.add_option("--msd-k", msd_k_, "span head dropout passes");
        cmd.add_option("--msd-aggregate", msd_aggregate_, "logits | loss");
        cmd.add_option("--dropout-p", dropout_p_, "entailment feature dropout");
        cmd.add_option("--beam-width", beam_width_, "span decoding beam width");
        cmd.add_option("--bilstm-hidden", bilstm_hidden_, "BiLSTM hidden width");
        cmd.add_option("--beta", beta_, "emotion loss weight");
        cmd.add_flag("--emotion-prediction,!--no-emotion-prediction", emotion_prediction_,
                     "train the auxiliary emotion head");
        cmd.add_option("--emotion-hidden", emotion_hidden_,
                       "emotion head hidden width (-1: encoder dim, 0: single layer)");
        cmd.add_option("--seed", seed_, "run seed");
        cmd.add_option("--data-dir", data_dir_, "fold file directory");
        cmd.add_option("--out-dir", out_dir_, "run output directory");
        cmd.add_option("--config", config_file_, "JSON config file; its keys override the flags")
            ->check(CLI::ExistingFile);
    }

    RunConfig resolve() const {
        json j = json::object();
        auto set = [&](const char* flag, const char* key, const auto& value) {
            if (cmd_->count(flag) > 0) j[key] = value;
        };
        set("--task", "task", task_);
        set("--fold-id", "fold_id", fold_id_);
        set("--balanced", "balanced", balanced_);
        set("--with-context", "with_context", with_context_);
        set("--encoder-kind", "encoder_kind", encoder_kind_);
        set("--encoder-dim", "encoder_dim", encoder_dim_);
        set("--encoder-layers", "encoder_layers", encoder_layers_);
        set("--encoder-heads", "encoder_heads", encoder_heads_);
        set("--epochs", "epochs", epochs_);
        set("--batch-size", "batch_size", batch_size_);
        set("--max-seq-len", "max_seq_len", max_seq_len_);
        set("--lr", "lr", lr_);
        set("--weight-decay", "weight_decay", weight_decay_);
        set("--warmup-steps", "warmup_steps", warmup_steps_);
        set("--max-answer-length", "max_answer_length", max_answer_length_);
        set("--n-hidden-states", "n_hidden_states", n_hidden_states_);
        set("--msd-p", "msd_p", msd_p_);
        set("--msd-k", "msd_k", msd_k_);
        set("--msd-aggregate", "msd_aggregate", msd_aggregate_);
        set("--dropout-p", "dropout_p", dropout_p_);
        set("--beam-width", "beam_width", beam_width_);
        set("--bilstm-hidden", "bilstm_hidden", bilstm_hidden_);
        set("--beta", "beta", beta_);
        set("--emotion-prediction", "emotion_prediction_enabled", emotion_prediction_);
        set("--emotion-hidden", "emotion_hidden", emotion_hidden_);
        set("--seed", "seed", seed_);
        set("--data-dir", "data_dir", data_dir_);
        set("--out-dir", "out_dir", out_dir_);

        std::string origin = "command line";
        if (!config_file_.empty()) {
            json file = json::parse(read_text_file(config_file_), nullptr, false);
            if (file.is_discarded() || !file.is_object())
                throw ParseError(config_file_ + ": config must be a JSON object");
            for (const auto& [key, value] : file.items()) j[key] = value;
            origin = config_file_;
        }
        return config_from_json(j.dump(), origin);
    }

  private:
    CLI::App* cmd_ = nullptr;
    std::string config_file_;
    std::string task_ = "cse";
    int fold_id_ = 1;
    bool balanced_ = false;
    bool with_context_ = true;
    std::string encoder_kind_ = "toy";
    int encoder_dim_ = 32;
    int encoder_layers_ = 2;
    int encoder_heads_ = 2;
    int epochs_ = 12;
    int batch_size_ = 16;
    int max_seq_len_ = 512;
    double lr_ = 4e-5;
    double weight_decay_ = 0.001;
    long warmup_steps_ = 4;
    int max_answer_length_ = 200;
    int n_hidden_states_ = 12;
    double msd_p_ = 0.5;
    int msd_k_ = 5;
    std::string msd_aggregate_ = "logits";
    double dropout_p_ = 0.1;
    int beam_width_ = 3;
    int bilstm_hidden_ = 384;
    double beta_ = 1.0;
    bool emotion_prediction_ = true;
    int emotion_hidden_ = -1;
    uint64_t seed_ = 0;
    std::string data_dir_;
    std::string out_dir_ = "runs";
};

void print_train_output(const TrainOutput& out) {
    for (const EpochStats& e : out.epochs)
        std::cout << "epoch " << e.epoch << "  train_loss " << e.train_loss << "  val_loss "
                  << e.val_loss << "  val_metric " << e.val_metric << "\n";
    std::cout << "best epoch " << out.best_epoch << " (val metric " << out.best_metric << ")\n"
              << "checkpoint " << out.checkpoint_path.string() << "\n"
              << "manifest   " << out.manifest_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational cause span extraction and causal emotion entailment toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
    SynthArgs synth_args;
    synth_cmd->add_option("--profile", synth_args.profile, "reccon-dd | overfit | tiny")
        ->capture_default_str();
    synth_cmd->add_option("--out", synth_args.out_dir, "corpus output directory")->required();
    synth_cmd->add_option("--seed", synth_args.seed, "generator seed");
    synth_cmd->callback([&] {
        for (const fs::path& p : cmd_synth(synth_args))
            std::cout << "wrote " << p.string() << "\n";
    });

    // prepare
    auto* prepare_cmd = app.add_subcommand("prepare", "build fold files from a dialogue corpus");
    PrepareArgs prepare_args;
    std::vector<std::string> split_names{"train", "val", "test"};
    long negative_total = -1;
    bool no_context = false;
    prepare_cmd->add_option("--data", prepare_args.data_dir, "directory with dialogues.<split>.jsonl")
        ->required();
    prepare_cmd->add_option("--corpus", prepare_args.corpus, "dd | iemo")->capture_default_str();
    prepare_cmd->add_option("--out", prepare_args.out_dir, "fold output directory")->required();
    prepare_cmd->add_option("--folds", prepare_args.fold_ids, "fold ids to build (1-3)")
        ->delimiter(',')
        ->capture_default_str();
    prepare_cmd->add_flag("--balanced", prepare_args.balanced, "subsample the fold-1 negatives");
    prepare_cmd->add_flag("--no-context", no_context, "omit the conversational history");
    prepare_cmd->add_option("--splits", split_names, "splits to build")
        ->delimiter(',')
        ->capture_default_str();
    prepare_cmd->add_option("--seed", prepare_args.seed, "negative sampling seed");
    prepare_cmd->add_option("--negative-total", negative_total,
                            "fold 2/3 negatives per split (default: released totals)");
    prepare_cmd->callback([&] {
        prepare_args.with_context = !no_context;
        if (prepare_cmd->count("--negative-total") > 0)
            prepare_args.negative_total = negative_total;
        prepare_args.splits.clear();
        for (const std::string& name : split_names)
            prepare_args.splits.push_back(parse_split(name));
        std::cout << cmd_prepare(prepare_args).summary();
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model on a fold");
    ConfigFlags train_flags;
    train_flags.attach(*train_cmd);
    std::string train_file, val_file, train_out;
    int repeat = 1;
    train_cmd->add_option("--train-file", train_file,
                          "training fold (default: <data dir>/fold<id>[.balanced].train.jsonl)");
    train_cmd->add_option("--val-file", val_file, "validation fold (default analogous)");
    train_cmd->add_option("--out", train_out, "output directory (default: --out-dir)");
    train_cmd->add_option("--repeat", repeat, "seeded repetitions; writes run<r>/ and aggregate.json");
    train_cmd->callback([&] {
        TrainArgs args;
        args.config = train_flags.resolve();
        const fs::path data_dir = resolve_data_dir(args.config);
        args.train_file =
            train_file.empty()
                ? data_dir / fold_file_name(args.config.fold_id, args.config.balanced, Split::train)
                : fs::path(train_file);
        args.val_file =
            val_file.empty()
                ? data_dir / fold_file_name(args.config.fold_id, args.config.balanced, Split::val)
                : fs::path(val_file);
        args.out_dir = train_out.empty() ? fs::path(args.config.out_dir) : fs::path(train_out);
        args.repeat = repeat;
        const TrainSummary summary = cmd_train(args);
        for (size_t r = 0; r < summary.runs.size(); ++r) {
            if (summary.runs.size() > 1) std::cout << "run " << r << "\n";
            print_train_output(summary.runs[r]);
        }
        if (!summary.aggregate_path.empty())
            std::cout << "aggregate  " << summary.aggregate_path.string() << "\n";
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a fold");
    EvalArgs eval_args;
    eval_args.out_dir = "eval";
    int eval_beam = 0;
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint file")->required();
    eval_cmd->add_option("--fold", eval_args.fold_file, "fold file to score")->required();
    eval_cmd->add_option("--out", eval_args.out_dir, "output directory")->capture_default_str();
    eval_cmd->add_option("--beam-width", eval_beam, "beam width override");
    eval_cmd->callback([&] {
        if (eval_cmd->count("--beam-width") > 0) eval_args.beam_width = eval_beam;
        const EvalOutput out = cmd_eval(eval_args);
        std::cout << out.report.table() << "predictions " << out.predictions_path.string() << "\n"
                  << "report      " << out.report_path.string() << "\n";
    });

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "write predictions without scoring");
    PredictArgs predict_args;
    predict_args.out_path = "predictions.jsonl";
    int predict_beam = 0;
    predict_cmd->add_option("--checkpoint", predict_args.checkpoint, "checkpoint file")->required();
    predict_cmd->add_option("--fold", predict_args.fold_file, "fold file to predict")->required();
    predict_cmd->add_option("--out", predict_args.out_path, "prediction JSONL path")
        ->capture_default_str();
    predict_cmd->add_option("--beam-width", predict_beam, "beam width override");
    predict_cmd->callback([&] {
        if (predict_cmd->count("--beam-width") > 0) predict_args.beam_width = predict_beam;
        std::cout << "wrote " << cmd_predict(predict_args).string() << "\n";
    });

    // sweep-beam
    auto* sweep_cmd = app.add_subcommand("sweep-beam", "score a span checkpoint at several beam widths");
    SweepArgs sweep_args;
    sweep_args.out_dir = "sweep";
    sweep_cmd->add_option("--checkpoint", sweep_args.checkpoint, "span checkpoint file")->required();
    sweep_cmd->add_option("--fold", sweep_args.fold_file, "fold file to score")->required();
    sweep_cmd->add_option("--out", sweep_args.out_dir, "output directory")->capture_default_str();
    sweep_cmd->add_option("--widths", sweep_args.widths, "beam widths to try")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->callback([&] {
        const SweepOutput out = cmd_sweep_beam(sweep_args);
        for (const SweepPoint& p : out.points)
            std::cout << "beam " << p.beam_width << "  f1_pos " << p.f1_pos << "\n";
        std::cout << (out.saturated ? "saturates at beam width " + std::to_string(out.saturation_k)
                                    : std::string("no saturation within the tried widths"))
                  << "\n"
                  << "sweep " << out.path.string() << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
