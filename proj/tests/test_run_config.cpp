#include <cstdlib>

#include "doctest.h"
#include "mutec/errors.hpp"
#include "mutec/run_config.hpp"

using namespace mutec;

TEST_CASE("defaults mirror the published hyperparameters") {
    const RunConfig c = default_config(Task::cse, true);
    CHECK(c.epochs == 12);
    CHECK(c.batch_size == 16);
    CHECK(c.max_seq_len == 512);
    CHECK(c.lr == 4e-5);
    CHECK(c.weight_decay == 0.001);
    CHECK(c.warmup_steps == 4);
    CHECK(c.max_answer_length == 200);
    CHECK(c.n_hidden_states == 12);
    CHECK(c.msd_p == 0.5);
    CHECK(c.msd_k == 5);
    CHECK(c.msd_aggregate == "logits");
    CHECK(c.beam_width == 3);
    CHECK(c.bilstm_hidden == 384);
    CHECK(c.beta == 1.0);
    CHECK(c.emotion_prediction_enabled);
    CHECK(c.seed == 0);

    CHECK(default_config(Task::cse, false).max_seq_len == 200);
    CHECK(default_config(Task::cee, true).n_hidden_states == 4);
    CHECK(default_config(Task::e2e, true).n_hidden_states == 12);
}

TEST_CASE("empty config yields the defaults") {
    const RunConfig c = config_from_json("{}", "test");
    const RunConfig d = default_config(Task::cse, true);
    CHECK(c.to_json() == d.to_json());
}

TEST_CASE("task switch re-resolves the task-dependent defaults") {
    const RunConfig c = config_from_json(R"({"task": "cee"})", "test");
    CHECK(c.task == Task::cee);
    CHECK(c.n_hidden_states == 4);
    const RunConfig no_ctx = config_from_json(R"({"with_context": false})", "test");
    CHECK(no_ctx.max_seq_len == 200);
    const RunConfig explicit_len =
        config_from_json(R"({"with_context": false, "max_seq_len": 64})", "test");
    CHECK(explicit_len.max_seq_len == 64);
}

TEST_CASE("config json round-trips") {
    RunConfig c = default_config(Task::e2e, false);
    c.lr = 0.003;
    c.seed = 99;
    c.encoder.dim = 48;
    c.msd_aggregate = "loss";
    c.emotion_prediction_enabled = false;
    const RunConfig back = config_from_json(c.to_json(), "test");
    CHECK(back.to_json() == c.to_json());
    CHECK(back.task == Task::e2e);
    CHECK(back.lr == 0.003);
    CHECK(back.encoder.dim == 48);
    CHECK_FALSE(back.emotion_prediction_enabled);
}

TEST_CASE("later sources override earlier ones key by key") {
    RunConfig c = default_config(Task::cse, true);
    apply_config_json(c, R"({"lr": 0.01, "epochs": 3})", "flags");
    apply_config_json(c, R"({"epochs": 7})", "file");
    CHECK(c.lr == 0.01);
    CHECK(c.epochs == 7);
    CHECK(c.batch_size == 16);
}

TEST_CASE("unknown keys and bad values are rejected") {
    RunConfig c = default_config(Task::cse, true);
    CHECK_THROWS_AS(apply_config_json(c, R"({"learning_rate": 0.1})", "test"), ConfigError);
    CHECK_THROWS_AS(apply_config_json(c, R"({"msd_aggregate": "median"})", "test"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[]", "test"), ParseError);
    CHECK_THROWS_AS(config_from_json("not json", "test"), ParseError);
}

TEST_CASE("seed propagates into the encoder config") {
    RunConfig c = default_config(Task::cse, true);
    apply_config_json(c, R"({"seed": 1234})", "test");
    CHECK(c.encoder.seed == 1234);
}

TEST_CASE("fold file names") {
    CHECK(fold_file_name(1, false, Split::train) == "fold1.train.jsonl");
    CHECK(fold_file_name(2, true, Split::test) == "fold2.balanced.test.jsonl");
    CHECK(fold_file_name(3, false, Split::val) == "fold3.val.jsonl");
}

TEST_CASE("data root resolution order") {
    RunConfig c;
    c.data_dir = "/explicit";
    CHECK(resolve_data_dir(c) == std::filesystem::path("/explicit"));
    c.data_dir.clear();
    setenv("MUTEC_DATA_ROOT", "/from-env", 1);
    CHECK(resolve_data_dir(c) == std::filesystem::path("/from-env"));
    unsetenv("MUTEC_DATA_ROOT");
    CHECK(resolve_data_dir(c) == std::filesystem::path("."));
}
