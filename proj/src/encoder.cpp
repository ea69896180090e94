#include "mutec/encoder.hpp"

#include <cmath>
#include <fstream>

#include "mutec/errors.hpp"
#include "mutec/nn.hpp"
#include "mutec/rng.hpp"
#include "json.hpp"

namespace mutec {

namespace {

void fill_row(Mat& m, int row, uint64_t seed) {
    auto eng = make_engine(seed);
    std::normal_distribution<double> dist(0.0, 0.5);
    for (int c = 0; c < m.cols(); ++c) m(row, c) = dist(eng);
}

}  // namespace

ToyEncoder::ToyEncoder(const EncoderConfig& cfg, ParamStore& store) : cfg_(cfg) {
    if (cfg_.dim < 1 || cfg_.layers < 1 || cfg_.heads < 1)
        throw ConfigError("toy encoder needs positive dim, layers and heads");
    if (cfg_.dim % cfg_.heads != 0)
        throw ConfigError("toy encoder dim " + std::to_string(cfg_.dim) +
                          " is not divisible by " + std::to_string(cfg_.heads) + " heads");
    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string p = "encoder.l" + std::to_string(l);
        store.get_or_create(p + ".attn.wq", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".attn.wk", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".attn.wv", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".attn.wo", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".ffn.hidden.w", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".ffn.hidden.b", 1, cfg_.dim, Init::zeros);
        store.get_or_create(p + ".ffn.out.w", cfg_.dim, cfg_.dim, Init::scaled_normal);
        store.get_or_create(p + ".ffn.out.b", 1, cfg_.dim, Init::zeros);
    }
}

Mat ToyEncoder::embed(const TokenizedInput& tok) const {
    const int T = tok.size();
    Mat x(T, cfg_.dim);
    Mat pos(T, cfg_.dim);
    for (int t = 0; t < T; ++t) {
        fill_row(x, t, mix_seed(cfg_.seed, "tok_emb", tok.token_ids[static_cast<size_t>(t)]));
        fill_row(pos, t, mix_seed(cfg_.seed, "pos_emb", static_cast<uint64_t>(t)));
    }
    return x + pos;
}

EncoderOut ToyEncoder::forward(Tape& tape, ParamStore& store, const TokenizedInput& tok,
                               const std::string& /*sample_id*/, int n_hidden_states) const {
    if (n_hidden_states < 1 || n_hidden_states > cfg_.layers)
        throw ConfigError("n_hidden_states " + std::to_string(n_hidden_states) +
                          " outside the encoder's " + std::to_string(cfg_.layers) + " layers");
    const int dk = cfg_.dim / cfg_.heads;
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dk));

    Var x = tape.input(embed(tok));
    std::vector<Var> layer_states;
    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string p = "encoder.l" + std::to_string(l);
        Var q = tape.matmul(x, tape.param(store, p + ".attn.wq"));
        Var k = tape.matmul(x, tape.param(store, p + ".attn.wk"));
        Var v = tape.matmul(x, tape.param(store, p + ".attn.wv"));
        std::vector<Var> heads;
        for (int h = 0; h < cfg_.heads; ++h) {
            Var qh = tape.slice_cols(q, h * dk, dk);
            Var kh = tape.slice_cols(k, h * dk, dk);
            Var vh = tape.slice_cols(v, h * dk, dk);
            Var scores = tape.scale(tape.matmul(qh, tape.transpose(kh)), inv_scale);
            heads.push_back(tape.matmul(tape.softmax_rows(scores), vh));
        }
        Var attn = tape.matmul(cfg_.heads == 1 ? heads[0] : tape.concat_cols(heads),
                               tape.param(store, p + ".attn.wo"));
        x = tape.add(x, attn);
        Var ffn = linear(tape, store, p + ".ffn.out",
                         tape.tanh(linear(tape, store, p + ".ffn.hidden", x, cfg_.dim, cfg_.dim)),
                         cfg_.dim, cfg_.dim);
        x = tape.add(x, ffn);
        layer_states.push_back(x);
    }

    EncoderOut out;
    out.layer_states = layer_states;
    out.pooled = tape.row(layer_states.back(), 0);
    std::vector<Var> pool_set(layer_states.end() - n_hidden_states, layer_states.end());
    out.meanpooled = pool_set.size() == 1 ? pool_set[0] : tape.mean(pool_set);
    return out;
}

ExternalStatesEncoder::ExternalStatesEncoder(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open encoder states file '" + path + "'");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const std::string sid = j.at("sample_id").get<std::string>();
        std::vector<Mat> layers;
        for (const auto& layer : j.at("layers")) {
            const int T = static_cast<int>(layer.size());
            if (T == 0) throw ParseError(path + ": empty layer for sample " + sid);
            const int D = static_cast<int>(layer.at(0).size());
            Mat m(T, D);
            for (int t = 0; t < T; ++t)
                for (int d = 0; d < D; ++d) m(t, d) = layer.at(t).at(d).get<double>();
            layers.push_back(std::move(m));
        }
        if (layers.empty()) throw ParseError(path + ": no layers for sample " + sid);
        if (dim_ == 0) {
            dim_ = static_cast<int>(layers.front().cols());
            layers_ = static_cast<int>(layers.size());
        }
        states_[sid] = std::move(layers);
    }
    if (states_.empty()) throw InputError("encoder states file '" + path + "' is empty");
}

EncoderOut ExternalStatesEncoder::forward(Tape& tape, ParamStore& /*store*/,
                                          const TokenizedInput& /*tok*/,
                                          const std::string& sample_id,
                                          int n_hidden_states) const {
    auto it = states_.find(sample_id);
    if (it == states_.end())
        throw InputError("no precomputed states for sample '" + sample_id + "'");
    const auto& layers = it->second;
    if (n_hidden_states < 1 || n_hidden_states > static_cast<int>(layers.size()))
        throw ConfigError("n_hidden_states " + std::to_string(n_hidden_states) +
                          " outside the " + std::to_string(layers.size()) +
                          " precomputed layers");
    EncoderOut out;
    for (const Mat& m : layers) out.layer_states.push_back(tape.input(m));
    out.pooled = tape.row(out.layer_states.back(), 0);
    std::vector<Var> pool_set(out.layer_states.end() - n_hidden_states,
                              out.layer_states.end());
    out.meanpooled = pool_set.size() == 1 ? pool_set[0] : tape.mean(pool_set);
    return out;
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg, ParamStore& store) {
    if (cfg.kind == "toy") return std::make_unique<ToyEncoder>(cfg, store);
    if (cfg.kind.rfind("external:", 0) == 0)
        return std::make_unique<ExternalStatesEncoder>(cfg.kind.substr(9));
    throw ConfigError("unknown encoder kind '" + cfg.kind + "'");
}

}  // namespace mutec
