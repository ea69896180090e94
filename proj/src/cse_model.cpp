#include "mutec/cse_model.hpp"

#include <algorithm>
#include <numeric>

#include "mutec/errors.hpp"

namespace mutec {

namespace {

std::vector<int> top_k_indices(const std::vector<double>& values, int k) {
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    order.resize(std::min<size_t>(order.size(), static_cast<size_t>(k)));
    return order;
}

std::vector<double> column_to_vector(const Var& col) {
    std::vector<double> v(static_cast<size_t>(col.rows()));
    for (int t = 0; t < col.rows(); ++t) v[static_cast<size_t>(t)] = col.value()(t, 0);
    return v;
}

}  // namespace

BeamResult beam_decode(const std::vector<double>& start_logits,
                       const std::function<std::vector<double>(int)>& end_logits_for,
                       int beam_width, int max_answer_length) {
    const int T = static_cast<int>(start_logits.size());
    if (T < 1) throw InputError("beam decode needs at least one token position");
    if (beam_width < 1) throw ConfigError("beam width must be positive");
    if (max_answer_length < 0) throw ConfigError("max answer length must be non-negative");

    BeamResult best;
    bool found = false;
    for (int s : top_k_indices(start_logits, beam_width)) {
        const std::vector<double> ends = end_logits_for(s);
        if (static_cast<int>(ends.size()) != T)
            throw InputError("end logits disagree with the sequence length");
        const int lo = s;
        const int hi = s == 0 ? 0 : std::min(T - 1, s + max_answer_length);
        int e_pick = -1;
        for (int e = lo; e <= hi; ++e)
            if (e_pick < 0 || ends[e] > ends[e_pick]) e_pick = e;
        if (e_pick < 0) continue;
        const double score = start_logits[s] + ends[e_pick];
        const bool wins = !found || score > best.score ||
                          (score == best.score &&
                           (s < best.tok_start || (s == best.tok_start && e_pick < best.tok_end)));
        if (wins) {
            best = BeamResult{s, e_pick, score, false};
            found = true;
        }
    }
    if (!found) return BeamResult{0, 0, 0.0, true};
    return best;
}

SpanPrediction make_span_prediction(const TokenizedInput& tok, const BeamResult& decoded) {
    SpanPrediction p;
    p.tok_start = decoded.tok_start;
    p.tok_end = decoded.tok_end;
    p.score = decoded.score;
    p.fallback = decoded.fallback;
    p.char_span = token_span_to_char_span(tok, decoded.tok_start, decoded.tok_end);
    p.text = span_text(tok, decoded.tok_start, decoded.tok_end);
    return p;
}

void register_span_heads(ParamStore& store, int dim) {
    store.get_or_create("head.start.w", dim, 1, Init::scaled_normal);
    store.get_or_create("head.start.b", 1, 1, Init::zeros);
    store.get_or_create("head.end.w", 2 * dim, 1, Init::scaled_normal);
    store.get_or_create("head.end.b", 1, 1, Init::zeros);
}

SpanHeadsOut span_heads_forward(Tape& tape, ParamStore& store, Var meanpooled, int dim,
                                int gold_start, bool training, double msd_p, int msd_k,
                                uint64_t step_seed) {
    const int T = meanpooled.rows();
    if (gold_start < 0 || gold_start >= T)
        throw InputError("gold start " + std::to_string(gold_start) +
                         " is outside the token range [0," + std::to_string(T) + ")");
    SpanHeadsOut out;
    out.start_passes =
        msd_passes(tape, store, "head.start", meanpooled, dim, 1, training, msd_p, msd_k,
                   step_seed);
    Var anchored = tape.gather_rows(meanpooled, std::vector<int>(static_cast<size_t>(T),
                                                                 gold_start));
    Var end_in = tape.concat_cols({meanpooled, anchored});
    out.end_passes =
        msd_passes(tape, store, "head.end", end_in, 2 * dim, 1, training, msd_p, msd_k,
                   step_seed);
    out.start_logits = tape.transpose(tape.mean(out.start_passes));
    out.end_logits = tape.transpose(tape.mean(out.end_passes));
    return out;
}

Var span_ce(Tape& tape, const SpanHeadsOut& heads, int gold_start, int gold_end,
            bool aggregate_loss) {
    const int T = heads.start_logits.cols();
    if (gold_end < gold_start || gold_end >= T)
        throw InputError("gold end " + std::to_string(gold_end) + " is outside [" +
                         std::to_string(gold_start) + "," + std::to_string(T) + ")");
    if (!aggregate_loss || heads.start_passes.size() == 1) {
        Var ce_start = tape.softmax_ce(heads.start_logits, gold_start);
        Var ce_end = tape.softmax_ce(heads.end_logits, gold_end);
        return tape.scale(tape.add(ce_start, ce_end), 0.5);
    }
    std::vector<Var> losses;
    losses.reserve(heads.start_passes.size());
    for (size_t i = 0; i < heads.start_passes.size(); ++i) {
        Var ce_start = tape.softmax_ce(tape.transpose(heads.start_passes[i]), gold_start);
        Var ce_end = tape.softmax_ce(tape.transpose(heads.end_passes[i]), gold_end);
        losses.push_back(tape.scale(tape.add(ce_start, ce_end), 0.5));
    }
    return tape.mean(losses);
}

SpanLogits span_logits_eval(Tape& tape, ParamStore& store, Var meanpooled, int dim) {
    SpanLogits out;
    out.start = column_to_vector(
        msd_passes(tape, store, "head.start", meanpooled, dim, 1, false, 0.0, 1, 0)[0]);
    const int T = static_cast<int>(out.start.size());
    Tape* tp = &tape;
    ParamStore* sp = &store;
    out.end_for = [tp, sp, meanpooled, dim, T](int s) {
        Var anchored =
            tp->gather_rows(meanpooled, std::vector<int>(static_cast<size_t>(T), s));
        Var end_in = tp->concat_cols({meanpooled, anchored});
        return column_to_vector(
            msd_passes(*tp, *sp, "head.end", end_in, 2 * dim, 1, false, 0.0, 1, 0)[0]);
    };
    return out;
}

CseModel::CseModel(const CseConfig& cfg, const Encoder& encoder, ParamStore& store)
    : cfg_(cfg), encoder_(&encoder), store_(&store) {
    if (cfg_.beta < 0.0) throw ConfigError("beta must be non-negative");
    if (cfg_.msd_p < 0.0 || cfg_.msd_p >= 1.0) throw ConfigError("msd_p must be in [0,1)");
    if (cfg_.msd_k < 1) throw ConfigError("msd_k must be at least 1");
    if (cfg_.max_answer_length < 0) throw ConfigError("max answer length must be non-negative");
    if (cfg_.n_hidden_states < 1 || cfg_.n_hidden_states > encoder.num_layers())
        throw ConfigError("n_hidden_states " + std::to_string(cfg_.n_hidden_states) +
                          " exceeds the encoder's " + std::to_string(encoder.num_layers()) +
                          " layers");
    register_span_heads(store, encoder.dim());
    if (cfg_.emotion_enabled)
        register_mlp(store, "head.emotion", encoder.dim(), emotion_hidden_width(), cfg_.num_emotions);
}

int CseModel::emotion_hidden_width() const {
    return cfg_.emotion_hidden < 0 ? encoder_->dim() : cfg_.emotion_hidden;
}

CseForward CseModel::forward_train(Tape& tape, const TokenizedInput& tok,
                                   const std::string& sample_id, int gold_start, int gold_end,
                                   int gold_emotion, bool training, uint64_t step_seed) const {
    EncoderOut enc = encoder_->forward(tape, *store_, tok, sample_id, cfg_.n_hidden_states);
    SpanHeadsOut heads = span_heads_forward(tape, *store_, enc.meanpooled, encoder_->dim(),
                                            gold_start, training, cfg_.msd_p, cfg_.msd_k,
                                            step_seed);
    CseForward out;
    out.start_logits = heads.start_logits;
    out.end_logits = heads.end_logits;
    out.span_loss = span_ce(tape, heads, gold_start, gold_end, cfg_.msd_aggregate_loss);
    if (cfg_.emotion_enabled) {
        if (gold_emotion < 0 || gold_emotion >= cfg_.num_emotions)
            throw InputError("emotion class " + std::to_string(gold_emotion) +
                             " is outside [0," + std::to_string(cfg_.num_emotions) + ")");
        out.emotion_logits = mlp(tape, *store_, "head.emotion", tape.row(enc.meanpooled, 0),
                                 encoder_->dim(), emotion_hidden_width(), cfg_.num_emotions);
        out.emotion_loss = tape.softmax_ce(out.emotion_logits, gold_emotion);
        out.loss = tape.add(out.span_loss, tape.scale(out.emotion_loss, cfg_.beta));
    } else {
        out.loss = out.span_loss;
    }
    return out;
}

SpanPrediction CseModel::predict(const TokenizedInput& tok, const std::string& sample_id,
                                 int beam_width) const {
    Tape tape;
    EncoderOut enc = encoder_->forward(tape, *store_, tok, sample_id, cfg_.n_hidden_states);
    SpanLogits logits = span_logits_eval(tape, *store_, enc.meanpooled, encoder_->dim());
    BeamResult decoded = beam_decode(logits.start, logits.end_for, beam_width,
                                     cfg_.max_answer_length);
    SpanPrediction out = make_span_prediction(tok, decoded);
    if (cfg_.emotion_enabled) {
        Var em = mlp(tape, *store_, "head.emotion", tape.row(enc.meanpooled, 0), encoder_->dim(),
                     emotion_hidden_width(), cfg_.num_emotions);
        out.predicted_emotion = argmax_index(em.value());
    }
    return out;
}

}  // namespace mutec
