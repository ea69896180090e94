#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mutec/encoder.hpp"
#include "mutec/errors.hpp"
#include "mutec/nn.hpp"

using namespace mutec;

namespace {

EncoderConfig small_config() {
    EncoderConfig cfg;
    cfg.dim = 8;
    cfg.layers = 3;
    cfg.heads = 2;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("toy encoder config validation") {
    ParamStore store(0);
    EncoderConfig bad = small_config();
    bad.dim = 9;  // not divisible by 2 heads
    CHECK_THROWS_AS(ToyEncoder(bad, store), ConfigError);
    bad = small_config();
    bad.layers = 0;
    CHECK_THROWS_AS(ToyEncoder(bad, store), ConfigError);
}

TEST_CASE("construction registers every layer's parameters") {
    ParamStore store(42);
    ToyEncoder enc(small_config(), store);
    CHECK(enc.dim() == 8);
    CHECK(enc.num_layers() == 3);
    CHECK(enc.trainable());
    CHECK(store.has("encoder.l0.attn.wq"));
    CHECK(store.has("encoder.l2.ffn.out.w"));
    CHECK(store.count() == 3 * 8);
}

TEST_CASE("embeddings are deterministic and position-aware") {
    ParamStore store(42);
    ToyEncoder enc(small_config(), store);
    auto tok_a = tokenize("red red", 512);
    auto tok_b = tokenize("red blue", 512);
    Mat ea1 = enc.embed(tok_a);
    Mat ea2 = enc.embed(tok_a);
    CHECK(ea1 == ea2);
    Mat eb = enc.embed(tok_b);
    // Same token at the same position embeds identically across texts.
    CHECK(ea1.row(0) == eb.row(0));  // BOS
    CHECK(ea1.row(1) == eb.row(1));  // "red"
    CHECK(ea1.row(2) != eb.row(2));  // "red" vs "blue"
    // Same token at different positions embeds differently.
    CHECK(ea1.row(1) != ea1.row(2));

    EncoderConfig other = small_config();
    other.seed = 43;
    ParamStore store2(43);
    ToyEncoder enc2(other, store2);
    CHECK(enc.embed(tok_a) != enc2.embed(tok_a));
}

TEST_CASE("two stores with the same seed produce bitwise-equal forwards") {
    auto cfg = small_config();
    auto tok = tokenize("you ran a red light", 512);
    Mat pooled[2], meanpooled[2];
    for (int run = 0; run < 2; ++run) {
        ParamStore store(cfg.seed);
        ToyEncoder enc(cfg, store);
        Tape tape;
        auto out = enc.forward(tape, store, tok, "s0", 2);
        pooled[run] = out.pooled.value();
        meanpooled[run] = out.meanpooled.value();
    }
    CHECK(pooled[0] == pooled[1]);
    CHECK(meanpooled[0] == meanpooled[1]);
}

TEST_CASE("meanpooled states average the trailing layers") {
    auto cfg = small_config();
    ParamStore store(cfg.seed);
    ToyEncoder enc(cfg, store);
    auto tok = tokenize("you ran a red light", 512);
    Tape tape;
    auto out = enc.forward(tape, store, tok, "s0", 2);
    REQUIRE(out.layer_states.size() == 3);
    Mat expected =
        (out.layer_states[1].value() + out.layer_states[2].value()) / 2.0;
    CHECK((out.meanpooled.value() - expected).cwiseAbs().maxCoeff() < 1e-15);

    Tape tape_all;
    auto out_all = enc.forward(tape_all, store, tok, "s0", 3);
    Mat expected_all = (out_all.layer_states[0].value() + out_all.layer_states[1].value() +
                        out_all.layer_states[2].value()) /
                       3.0;
    CHECK((out_all.meanpooled.value() - expected_all).cwiseAbs().maxCoeff() < 1e-15);

    Tape tape_last;
    auto out_last = enc.forward(tape_last, store, tok, "s0", 1);
    CHECK(out_last.meanpooled.value() == out_last.layer_states[2].value());

    // Pooled summary is the final layer's first position.
    CHECK(out.pooled.value() == out.layer_states[2].value().row(0));
    CHECK(out.pooled.rows() == 1);
    CHECK(out.pooled.cols() == 8);
    CHECK(out.meanpooled.rows() == tok.size());
}

TEST_CASE("pool depth outside the layer count is rejected") {
    auto cfg = small_config();
    ParamStore store(cfg.seed);
    ToyEncoder enc(cfg, store);
    auto tok = tokenize("red", 512);
    Tape tape;
    CHECK_THROWS_AS(enc.forward(tape, store, tok, "s0", 4), ConfigError);
    CHECK_THROWS_AS(enc.forward(tape, store, tok, "s0", 0), ConfigError);
}

TEST_CASE("gradients reach the encoder parameters") {
    auto cfg = small_config();
    ParamStore store(cfg.seed);
    ToyEncoder enc(cfg, store);
    auto tok = tokenize("you ran a red light", 512);
    Tape tape;
    auto out = enc.forward(tape, store, tok, "s0", 3);
    Var logits = linear(tape, store, "probe", tape.mean_rows(out.meanpooled), 8, 3);
    Var loss = tape.softmax_ce(logits, 1);
    tape.backward(loss);
    CHECK(store.grad("encoder.l0.attn.wq").cwiseAbs().maxCoeff() > 0.0);
    CHECK(store.grad("encoder.l2.ffn.hidden.w").cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("precomputed-states encoder serves stored layers") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "mutec_test_encoder";
    fs::create_directories(dir);
    const auto path = dir / "states.jsonl";
    {
        std::ofstream out(path);
        out << R"({"sample_id":"s1","layers":[[[1.0,2.0],[3.0,4.0]],[[5.0,6.0],[7.0,8.0]]]})"
            << "\n";
    }
    EncoderConfig cfg;
    cfg.kind = "external:" + path.string();
    ParamStore store(0);
    auto enc = make_encoder(cfg, store);
    CHECK(enc->dim() == 2);
    CHECK(enc->num_layers() == 2);
    CHECK_FALSE(enc->trainable());

    auto tok = tokenize("ab cd", 512);
    Tape tape;
    auto out = enc->forward(tape, store, tok, "s1", 2);
    Mat expected(2, 2);
    expected << 3.0, 4.0, 5.0, 6.0;  // mean of the two layers
    CHECK(out.meanpooled.value() == expected);
    CHECK(out.pooled.value()(0, 0) == 5.0);
    CHECK(out.pooled.value()(0, 1) == 6.0);

    CHECK_THROWS_AS(enc->forward(tape, store, tok, "unknown", 2), InputError);
    CHECK_THROWS_AS(enc->forward(tape, store, tok, "s1", 3), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("encoder factory") {
    ParamStore store(0);
    EncoderConfig cfg = small_config();
    auto enc = make_encoder(cfg, store);
    CHECK(enc->trainable());
    cfg.kind = "huge";
    CHECK_THROWS_AS(make_encoder(cfg, store), ConfigError);
    cfg.kind = "external:/nonexistent/states.jsonl";
    CHECK_THROWS_AS(make_encoder(cfg, store), InputError);
}
