#include "mutec/cee_model.hpp"

#include <cmath>

#include "mutec/errors.hpp"
#include "mutec/nn.hpp"
#include "mutec/rng.hpp"

namespace mutec {

std::vector<int> tokens_in_range(const TokenizedInput& tok, std::pair<int, int> range) {
    std::vector<int> indices;
    for (int t = 0; t < tok.size(); ++t) {
        const auto [b, e] = tok.char_offsets[static_cast<size_t>(t)];
        if (b >= range.first && b < e && e <= range.second) indices.push_back(t);
    }
    return indices;
}

namespace {

void register_bilstm(ParamStore& store, const std::string& prefix, int in, int hidden) {
    for (const char* dir : {".fwd", ".bwd"}) {
        store.get_or_create(prefix + dir + ".x.w", in, 4 * hidden, Init::scaled_normal);
        store.get_or_create(prefix + dir + ".h.w", hidden, 4 * hidden, Init::scaled_normal);
        store.get_or_create(prefix + dir + ".h.b", 1, 4 * hidden, Init::zeros);
    }
}

double class_weight(const std::vector<double>& weights, int cls) {
    if (weights.empty()) return 1.0;
    return weights[static_cast<size_t>(cls)];
}

struct CeeFeatures {
    Var em_summary;  // 1 x D, mean over the target-utterance BiLSTM outputs
    Var features;    // 1 x 3D entailment input
};

}  // namespace

CeeModel::CeeModel(const CeeConfig& cfg, const Encoder& encoder, ParamStore& store)
    : cfg_(cfg), encoder_(&encoder), store_(&store) {
    const int dim = encoder.dim();
    if (cfg_.beta < 0.0) throw ConfigError("beta must be non-negative");
    if (cfg_.dropout_p < 0.0 || cfg_.dropout_p >= 1.0)
        throw ConfigError("dropout probability must be in [0,1)");
    if (cfg_.n_hidden_states < 1 || cfg_.n_hidden_states > encoder.num_layers())
        throw ConfigError("n_hidden_states " + std::to_string(cfg_.n_hidden_states) +
                          " exceeds the encoder's " + std::to_string(encoder.num_layers()) +
                          " layers");
    hidden_ = cfg_.bilstm_hidden == 0 ? dim / 2 : cfg_.bilstm_hidden;
    if (2 * hidden_ != dim)
        throw ConfigError("bilstm hidden size " + std::to_string(hidden_) +
                          " must be half the encoder width " + std::to_string(dim));
    if (cfg_.entail_weights.size() != 2)
        throw ConfigError("entailment needs exactly two class weights");
    if (!cfg_.emotion_weights.empty() &&
        cfg_.emotion_weights.size() != static_cast<size_t>(cfg_.num_emotions))
        throw ConfigError("emotion weights must cover every class");
    register_bilstm(store, "bilstm.em", dim, hidden_);
    register_bilstm(store, "bilstm.ca", dim, hidden_);
    register_mlp(store, "head.entail", 3 * dim, dim, 2);
    if (cfg_.emotion_enabled) register_mlp(store, "head.emotion", dim, 0, cfg_.num_emotions);
}

namespace {

CeeFeatures cee_features(Tape& tape, ParamStore& store, const Encoder& encoder,
                         const TokenizedInput& tok, const std::string& sample_id,
                         int n_hidden_states, int hidden) {
    EncoderOut enc = encoder.forward(tape, store, tok, sample_id, n_hidden_states);
    const std::vector<int> target_tokens = tokens_in_range(tok, tok.target_range);
    if (target_tokens.empty())
        throw SampleError("sample " + sample_id + " has no target-utterance tokens" +
                          (tok.truncated ? " left after truncation" : ""));
    const std::vector<int> candidate_tokens = tokens_in_range(tok, tok.candidate_range);
    if (candidate_tokens.empty())
        throw SampleError("sample " + sample_id + " has no candidate-utterance tokens" +
                          (tok.truncated ? " left after truncation" : ""));

    Var em_in = tape.gather_rows(enc.meanpooled, target_tokens);
    Var em_seq = bilstm(tape, store, "bilstm.em", em_in, hidden);
    Var em_summary = tape.mean_rows(em_seq);

    Var candidate_states = tape.gather_rows(enc.meanpooled, candidate_tokens);
    Var ca_in = tape.concat_rows({em_seq, candidate_states});
    Var ca_seq = bilstm(tape, store, "bilstm.ca", ca_in, hidden);
    Var ca_summary = tape.mean_rows(ca_seq);

    return CeeFeatures{em_summary, tape.concat_cols({enc.pooled, em_summary, ca_summary})};
}

}  // namespace

CeeForward CeeModel::forward_train(Tape& tape, const TokenizedInput& tok,
                                   const std::string& sample_id, int gold_label,
                                   int gold_emotion, bool training, uint64_t step_seed) const {
    if (gold_label < 0 || gold_label > 1)
        throw InputError("entailment label must be 0 or 1, got " + std::to_string(gold_label));
    const int dim = encoder_->dim();
    CeeFeatures feat = cee_features(tape, *store_, *encoder_, tok, sample_id,
                                    cfg_.n_hidden_states, hidden_);

    CeeForward out;
    if (cfg_.emotion_enabled) {
        if (gold_emotion < 0 || gold_emotion >= cfg_.num_emotions)
            throw InputError("emotion class " + std::to_string(gold_emotion) +
                             " is outside [0," + std::to_string(cfg_.num_emotions) + ")");
        out.emotion_logits =
            mlp(tape, *store_, "head.emotion", feat.em_summary, dim, 0, cfg_.num_emotions);
        out.emotion_loss = tape.softmax_ce(out.emotion_logits, gold_emotion,
                                           class_weight(cfg_.emotion_weights, gold_emotion));
    }

    Var features = feat.features;
    if (training && cfg_.dropout_p > 0.0) {
        Mat mask = dropout_mask(1, 3 * dim, cfg_.dropout_p, mix_seed(step_seed, "features"));
        features = tape.dropout(features, mask, cfg_.dropout_p);
    }
    out.entail_logits = mlp(tape, *store_, "head.entail", features, 3 * dim, dim, 2);
    out.entail_loss = tape.softmax_ce(out.entail_logits, gold_label,
                                      class_weight(cfg_.entail_weights, gold_label));
    out.loss = cfg_.emotion_enabled
                   ? tape.add(out.entail_loss, tape.scale(out.emotion_loss, cfg_.beta))
                   : out.entail_loss;
    return out;
}

EntailPrediction CeeModel::predict(const TokenizedInput& tok, const std::string& sample_id) const {
    Tape tape;
    const int dim = encoder_->dim();
    CeeFeatures feat = cee_features(tape, *store_, *encoder_, tok, sample_id,
                                    cfg_.n_hidden_states, hidden_);
    Var logits = mlp(tape, *store_, "head.entail", feat.features, 3 * dim, dim, 2);

    EntailPrediction out;
    out.label = argmax_index(logits.value());
    out.prob = 1.0 / (1.0 + std::exp(logits.value()(0, 0) - logits.value()(0, 1)));
    if (cfg_.emotion_enabled) {
        Var em = mlp(tape, *store_, "head.emotion", feat.em_summary, dim, 0, cfg_.num_emotions);
        out.aux_emotion = argmax_index(em.value());
    }
    return out;
}

}  // namespace mutec
