#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mutec/cee_model.hpp"
#include "mutec/commands.hpp"
#include "mutec/cse_model.hpp"
#include "mutec/emotion.hpp"
#include "mutec/errors.hpp"
#include "mutec/metrics.hpp"
#include "mutec/nn.hpp"
#include "mutec/run_config.hpp"
#include "mutec/trainer.hpp"

namespace py = pybind11;
using namespace mutec;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null:
            return py::none();
        case nlohmann::json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case nlohmann::json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default:
            return py::none();
    }
}

py::object json_text_to_py(const std::string& text) {
    return json_to_py(nlohmann::json::parse(text));
}

std::string config_json_from_py(const py::object& config) {
    if (py::isinstance<py::str>(config)) return config.cast<std::string>();
    return py::module_::import("json").attr("dumps")(config).cast<std::string>();
}

py::dict epoch_to_py(const EpochStats& e) {
    py::dict d;
    d["epoch"] = e.epoch;
    d["train_loss"] = e.train_loss;
    d["val_loss"] = e.val_loss;
    d["val_metric"] = e.val_metric;
    return d;
}

py::dict train_output_to_py(const TrainOutput& out) {
    py::dict d;
    d["checkpoint"] = out.checkpoint_path.string();
    d["manifest"] = out.manifest_path.string();
    d["best_epoch"] = out.best_epoch;
    d["best_metric"] = out.best_metric;
    py::list epochs;
    for (const EpochStats& e : out.epochs) epochs.append(epoch_to_py(e));
    d["epochs"] = epochs;
    return d;
}

py::dict eval_output_to_py(const EvalOutput& out) {
    py::dict d;
    d["report"] = json_text_to_py(out.report.to_json());
    d["predictions"] = out.predictions_path.string();
    d["report_path"] = out.report_path.string();
    return d;
}

py::dict sweep_output_to_py(const SweepOutput& out) {
    py::dict d;
    py::list points;
    for (const SweepPoint& p : out.points) {
        py::dict q;
        q["beam_width"] = p.beam_width;
        q["f1_pos"] = p.f1_pos;
        points.append(q);
    }
    d["points"] = points;
    d["saturation_k"] = out.saturation_k;
    d["saturated"] = out.saturated;
    d["path"] = out.path.string();
    return d;
}

std::vector<SpanEvalRecord> records_from_py(
    const std::vector<std::tuple<std::string, std::string, bool>>& tuples) {
    std::vector<SpanEvalRecord> records;
    records.reserve(tuples.size());
    for (const auto& [gold, pred, positive] : tuples)
        records.push_back({gold, pred, positive});
    return records;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cause span extraction and causal emotion entailment core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    // ------------------------------------------------------------- metrics
    m.def(
        "normalize_answer",
        [](const std::string& text, bool drop_articles) {
            return normalize_answer(text, {drop_articles});
        },
        py::arg("text"), py::arg("drop_articles") = false,
        "Lowercase, strip punctuation, collapse whitespace.");

    m.def(
        "token_f1",
        [](const std::string& gold, const std::string& pred, bool drop_articles) {
            const TokenF1 r = token_f1(gold, pred, {drop_articles});
            return std::make_tuple(r.precision, r.recall, r.f1);
        },
        py::arg("gold"), py::arg("pred"), py::arg("drop_articles") = false,
        "Multiset token overlap as (precision, recall, f1).");

    m.def(
        "span_metrics",
        [](const std::vector<std::tuple<std::string, std::string, bool>>& records,
           bool drop_articles, const std::string& overall) {
            SpanMetricOptions opt;
            opt.normalize.drop_articles = drop_articles;
            if (overall == "per_record")
                opt.overall = OverallMode::per_record;
            else if (overall == "class_mean")
                opt.overall = OverallMode::class_mean;
            else
                throw ConfigError("unknown overall mode '" + overall + "'");
            return json_text_to_py(span_metrics(records_from_py(records), opt).to_json());
        },
        py::arg("records"), py::arg("drop_articles") = false,
        py::arg("overall") = "per_record",
        "Span metrics over (gold_text, pred_text, is_positive) records.");

    m.def(
        "entail_metrics",
        [](const std::vector<int>& gold, const std::vector<int>& pred) {
            const EntailMetrics r = entail_metrics(gold, pred);
            py::dict d;
            d["f1_pos"] = r.f1_pos;
            d["f1_neg"] = r.f1_neg;
            d["macro_f1"] = r.macro_f1;
            d["flags"] = r.flags;
            return d;
        },
        py::arg("gold"), py::arg("pred"), "Per-class and macro F1 for binary labels.");

    m.def("accuracy", &accuracy, py::arg("gold"), py::arg("pred"),
          "Label agreement rate; None on empty input.");

    // ------------------------------------------------------------ decoding
    m.def(
        "beam_decode",
        [](const std::vector<double>& start_logits,
           const std::vector<std::vector<double>>& end_logits, int beam_width,
           int max_answer_length) {
            const size_t T = start_logits.size();
            if (end_logits.size() != T)
                throw InputError("end_logits must have one row per token");
            for (const auto& row : end_logits)
                if (row.size() != T) throw InputError("end_logits rows must have length T");
            auto end_for = [&](int s) { return end_logits[static_cast<size_t>(s)]; };
            const BeamResult r = beam_decode(start_logits, end_for, beam_width,
                                             max_answer_length);
            py::dict d;
            d["tok_start"] = r.tok_start;
            d["tok_end"] = r.tok_end;
            d["score"] = r.score;
            d["fallback"] = r.fallback;
            return d;
        },
        py::arg("start_logits"), py::arg("end_logits"), py::arg("beam_width"),
        py::arg("max_answer_length"),
        "Beam search over feasible (start, end) pairs; row s of end_logits "
        "holds the end scores conditioned on start s.");

    m.def("inverse_count_weights", &inverse_count_weights, py::arg("counts"),
          "Class weights proportional to inverse counts, normalized to mean 1.");

    // ------------------------------------------------------------- config
    m.def(
        "default_config",
        [](const std::string& task, bool with_context) {
            return json_text_to_py(default_config(parse_task(task), with_context).to_json());
        },
        py::arg("task") = "cse", py::arg("with_context") = true,
        "Default run configuration for a task, as a dict.");

    m.def(
        "fold_file_name",
        [](int fold_id, bool balanced, const std::string& split) {
            return fold_file_name(fold_id, balanced, parse_split(split));
        },
        py::arg("fold_id"), py::arg("balanced"), py::arg("split"),
        "Canonical fold file name.");

    m.def("emotion_names", [] {
        std::vector<std::string> names;
        for (int i = 0; i < kNumCauseEmotions; ++i)
            names.push_back(to_string(emotion_from_class_index(i)));
        return names;
    });

    // ------------------------------------------------------------ pipeline
    m.def(
        "synth",
        [](const std::string& profile, const std::filesystem::path& out_dir, uint64_t seed) {
            SynthArgs args;
            args.profile = profile;
            args.out_dir = out_dir;
            args.seed = seed;
            std::vector<std::string> out;
            for (const auto& p : cmd_synth(args)) out.push_back(p.string());
            return out;
        },
        py::arg("profile"), py::arg("out_dir"), py::arg("seed") = 0,
        "Write a synthetic dialogue corpus; returns the written file paths.");

    m.def(
        "prepare",
        [](const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
           const std::string& corpus, const std::vector<int>& fold_ids, bool balanced,
           bool with_context, const std::vector<std::string>& splits, uint64_t seed,
           std::optional<long> negative_total) {
            PrepareArgs args;
            args.data_dir = data_dir;
            args.out_dir = out_dir;
            args.corpus = corpus;
            args.fold_ids = fold_ids;
            args.balanced = balanced;
            args.with_context = with_context;
            args.splits.clear();
            for (const std::string& s : splits) args.splits.push_back(parse_split(s));
            args.seed = seed;
            args.negative_total = negative_total;
            const PrepareResult result = cmd_prepare(args);
            py::list rows;
            for (const auto& row : result.rows) {
                py::dict d;
                d["fold_id"] = row.fold_id;
                d["balanced"] = row.balanced;
                d["split"] = std::string(to_string(row.split));
                d["path"] = row.path.string();
                d["positives"] = row.counts.positives;
                d["negatives"] = row.counts.negatives;
                rows.append(d);
            }
            return rows;
        },
        py::arg("data_dir"), py::arg("out_dir"), py::arg("corpus") = "dd",
        py::arg("fold_ids") = std::vector<int>{1}, py::arg("balanced") = false,
        py::arg("with_context") = true,
        py::arg("splits") = std::vector<std::string>{"train", "val", "test"},
        py::arg("seed") = 0, py::arg("negative_total") = std::nullopt,
        "Build fold files from a dialogue corpus; returns one row per file.");

    m.def(
        "train",
        [](const py::object& config, const std::filesystem::path& train_file,
           const std::filesystem::path& val_file, const std::filesystem::path& out_dir,
           int repeat) {
            TrainArgs args;
            args.config = config_from_json(config_json_from_py(config), "config");
            args.train_file = train_file;
            args.val_file = val_file;
            args.out_dir = out_dir;
            args.repeat = repeat;
            const TrainSummary summary = cmd_train(args);
            py::dict d;
            py::list runs;
            for (const TrainOutput& run : summary.runs) runs.append(train_output_to_py(run));
            d["runs"] = runs;
            d["aggregate"] = summary.aggregate_path.empty()
                                 ? py::object(py::none())
                                 : py::object(py::str(summary.aggregate_path.string()));
            return d;
        },
        py::arg("config"), py::arg("train_file"), py::arg("val_file"), py::arg("out_dir"),
        py::arg("repeat") = 1,
        "Train from a config dict (or JSON string); returns run artifacts.");

    m.def(
        "evaluate",
        [](const std::filesystem::path& checkpoint, const std::filesystem::path& fold_file,
           const std::filesystem::path& out_dir, std::optional<int> beam_width) {
            EvalArgs args;
            args.checkpoint = checkpoint;
            args.fold_file = fold_file;
            args.out_dir = out_dir;
            args.beam_width = beam_width;
            return eval_output_to_py(cmd_eval(args));
        },
        py::arg("checkpoint"), py::arg("fold_file"), py::arg("out_dir"),
        py::arg("beam_width") = std::nullopt,
        "Evaluate a checkpoint on a fold file; returns the metrics report and paths.");

    m.def(
        "predict",
        [](const std::filesystem::path& checkpoint, const std::filesystem::path& fold_file,
           const std::filesystem::path& out_path, std::optional<int> beam_width) {
            PredictArgs args;
            args.checkpoint = checkpoint;
            args.fold_file = fold_file;
            args.out_path = out_path;
            args.beam_width = beam_width;
            return cmd_predict(args).string();
        },
        py::arg("checkpoint"), py::arg("fold_file"), py::arg("out_path"),
        py::arg("beam_width") = std::nullopt,
        "Write the prediction JSONL for a fold file; returns its path.");

    m.def(
        "sweep_beam",
        [](const std::filesystem::path& checkpoint, const std::filesystem::path& fold_file,
           const std::filesystem::path& out_dir, const std::vector<int>& widths) {
            SweepArgs args;
            args.checkpoint = checkpoint;
            args.fold_file = fold_file;
            args.out_dir = out_dir;
            args.widths = widths;
            return sweep_output_to_py(cmd_sweep_beam(args));
        },
        py::arg("checkpoint"), py::arg("fold_file"), py::arg("out_dir"),
        py::arg("widths") = std::vector<int>{1, 2, 3, 4, 5},
        "Re-decode a span checkpoint at several beam widths.");
}
