#include "mutec/e2e_model.hpp"

#include <cmath>

#include "mutec/errors.hpp"
#include "mutec/nn.hpp"

namespace mutec {

namespace {

double class_weight(const std::vector<double>& weights, int cls) {
    if (weights.empty()) return 1.0;
    return weights[static_cast<size_t>(cls)];
}

}  // namespace

E2eModel::E2eModel(const E2eConfig& cfg, const Encoder& encoder, ParamStore& store)
    : cfg_(cfg), encoder_(&encoder), store_(&store) {
    if (cfg_.msd_p < 0.0 || cfg_.msd_p >= 1.0) throw ConfigError("msd_p must be in [0,1)");
    if (cfg_.msd_k < 1) throw ConfigError("msd_k must be at least 1");
    if (cfg_.max_answer_length < 0) throw ConfigError("max answer length must be non-negative");
    if (cfg_.n_hidden_states < 1 || cfg_.n_hidden_states > encoder.num_layers())
        throw ConfigError("n_hidden_states " + std::to_string(cfg_.n_hidden_states) +
                          " exceeds the encoder's " + std::to_string(encoder.num_layers()) +
                          " layers");
    if (cfg_.entail_weights.size() != 2)
        throw ConfigError("entailment needs exactly two class weights");
    if (!cfg_.emotion_weights.empty() &&
        cfg_.emotion_weights.size() != static_cast<size_t>(cfg_.num_emotions))
        throw ConfigError("emotion weights must cover every class");
    register_span_heads(store, encoder.dim());
    register_mlp(store, "head.entail", encoder.dim(), 0, 2);
    if (cfg_.emotion_enabled) register_mlp(store, "head.emotion", encoder.dim(), 0, cfg_.num_emotions);
}

E2eForward E2eModel::forward_train(Tape& tape, const TokenizedInput& tok,
                                   const std::string& sample_id, int gold_start, int gold_end,
                                   int gold_label, int gold_emotion, bool training,
                                   uint64_t step_seed) const {
    if (gold_label < 0 || gold_label > 1)
        throw InputError("entailment label must be 0 or 1, got " + std::to_string(gold_label));
    const int dim = encoder_->dim();
    EncoderOut enc = encoder_->forward(tape, *store_, tok, sample_id, cfg_.n_hidden_states);
    SpanHeadsOut heads = span_heads_forward(tape, *store_, enc.meanpooled, dim, gold_start,
                                            training, cfg_.msd_p, cfg_.msd_k, step_seed);

    E2eForward out;
    out.start_logits = heads.start_logits;
    out.end_logits = heads.end_logits;
    out.span_loss = span_ce(tape, heads, gold_start, gold_end, cfg_.msd_aggregate_loss);
    out.entail_logits = mlp(tape, *store_, "head.entail", enc.pooled, dim, 0, 2);
    out.entail_loss = tape.softmax_ce(out.entail_logits, gold_label,
                                      class_weight(cfg_.entail_weights, gold_label));
    out.loss = tape.add(out.span_loss, out.entail_loss);
    if (cfg_.emotion_enabled) {
        if (gold_emotion < 0 || gold_emotion >= cfg_.num_emotions)
            throw InputError("emotion class " + std::to_string(gold_emotion) +
                             " is outside [0," + std::to_string(cfg_.num_emotions) + ")");
        out.emotion_logits = mlp(tape, *store_, "head.emotion", tape.row(enc.meanpooled, 0), dim,
                                 0, cfg_.num_emotions);
        out.emotion_loss = tape.softmax_ce(out.emotion_logits, gold_emotion,
                                           class_weight(cfg_.emotion_weights, gold_emotion));
        out.loss = tape.add(out.loss, out.emotion_loss);
    }
    return out;
}

E2ePrediction E2eModel::predict(const TokenizedInput& tok, const std::string& sample_id,
                                int beam_width) const {
    Tape tape;
    const int dim = encoder_->dim();
    EncoderOut enc = encoder_->forward(tape, *store_, tok, sample_id, cfg_.n_hidden_states);
    SpanLogits logits = span_logits_eval(tape, *store_, enc.meanpooled, dim);
    BeamResult decoded = beam_decode(logits.start, logits.end_for, beam_width,
                                     cfg_.max_answer_length);

    E2ePrediction out;
    out.span = make_span_prediction(tok, decoded);
    Var entail = mlp(tape, *store_, "head.entail", enc.pooled, dim, 0, 2);
    out.entail.label = argmax_index(entail.value());
    out.entail.prob = 1.0 / (1.0 + std::exp(entail.value()(0, 0) - entail.value()(0, 1)));
    if (cfg_.emotion_enabled) {
        Var em = mlp(tape, *store_, "head.emotion", tape.row(enc.meanpooled, 0), dim, 0,
                     cfg_.num_emotions);
        out.span.predicted_emotion = argmax_index(em.value());
        out.entail.aux_emotion = out.span.predicted_emotion;
    }
    const bool span_empty = out.span.tok_start == 0 && out.span.tok_end == 0;
    out.consistent = (out.entail.label == 1) == !span_empty;
    return out;
}

}  // namespace mutec
