#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mutec/emotion.hpp"
#include "mutec/encoder.hpp"
#include "mutec/nn.hpp"
#include "mutec/tape.hpp"
#include "mutec/tokenizer.hpp"

namespace mutec {

struct BeamResult {
    int tok_start = 0;
    int tok_end = 0;
    double score = 0.0;
    bool fallback = false;  // no feasible pair among the top-k starts
};

// Pure beam decode over token logits. end_logits_for(s) returns the length-T
// end-logit row conditioned on start s. Feasible pairs are (0,0) plus
// 1 <= s <= e <= s + max_answer_length with e < T; the score of a pair is the
// raw sum of its start and end logits. Ties prefer the smaller start, then
// the smaller end; top-k selection breaks logit ties toward lower indices.
// beam_width 1 is plain greedy decoding.
BeamResult beam_decode(const std::vector<double>& start_logits,
                       const std::function<std::vector<double>(int)>& end_logits_for,
                       int beam_width, int max_answer_length);

struct SpanPrediction {
    int tok_start = 0;
    int tok_end = 0;
    CharSpan char_span{0, 0};
    std::string text;  // empty exactly for the (0,0) no-cause span
    double score = 0.0;
    bool fallback = false;
    int predicted_emotion = -1;  // cause-emotion class; -1 when the head is disabled
};

SpanPrediction make_span_prediction(const TokenizedInput& tok, const BeamResult& decoded);

// Span head forward shared by the cause-extraction and end-to-end models.
// Start logits come from a multi-sample-dropout linear head over the
// meanpooled states; end logits condition every position on the state at
// gold_start by concatenating it column-wise before the end head.
struct SpanHeadsOut {
    std::vector<Var> start_passes;  // each T x 1
    std::vector<Var> end_passes;    // each T x 1
    Var start_logits;               // 1 x T, mean over passes
    Var end_logits;                 // 1 x T, mean over passes
};

void register_span_heads(ParamStore& store, int dim);

SpanHeadsOut span_heads_forward(Tape& tape, ParamStore& store, Var meanpooled, int dim,
                                int gold_start, bool training, double msd_p, int msd_k,
                                uint64_t step_seed);

// Mean of the start and end token-axis cross-entropies. With
// aggregate_loss the per-pass losses are averaged instead of the logits.
Var span_ce(Tape& tape, const SpanHeadsOut& heads, int gold_start, int gold_end,
            bool aggregate_loss);

// Eval-mode start logits plus an end-logit closure for beam_decode, all on the
// caller's tape.
struct SpanLogits {
    std::vector<double> start;
    std::function<std::vector<double>(int)> end_for;
};

SpanLogits span_logits_eval(Tape& tape, ParamStore& store, Var meanpooled, int dim);

struct CseConfig {
    double beta = 1.0;
    double msd_p = 0.5;
    int msd_k = 5;
    bool msd_aggregate_loss = false;  // aggregate pass losses instead of pass logits
    int max_answer_length = 200;
    int n_hidden_states = 12;
    bool emotion_enabled = true;
    int emotion_hidden = -1;  // hidden width of the emotion head; -1: encoder dim
    int num_emotions = kNumCauseEmotions;
};

struct CseForward {
    Var loss;           // span loss + beta * emotion loss
    Var span_loss;
    Var emotion_loss;   // invalid when the emotion head is disabled
    Var start_logits;   // 1 x T
    Var end_logits;     // 1 x T, conditioned on the gold start
    Var emotion_logits; // 1 x num_emotions, invalid when disabled
};

// Cause span extraction: start/end pointer heads under multi-sample dropout
// with an auxiliary emotion head, teacher-forced on the gold start during
// training, beam decoded at inference.
class CseModel {
  public:
    CseModel(const CseConfig& cfg, const Encoder& encoder, ParamStore& store);

    const CseConfig& config() const { return cfg_; }

    // Teacher-forced training pass. gold_start/gold_end index tokens (0 for
    // the empty span); gold_emotion is a cause-emotion class index, ignored
    // when the emotion head is disabled.
    CseForward forward_train(Tape& tape, const TokenizedInput& tok, const std::string& sample_id,
                             int gold_start, int gold_end, int gold_emotion, bool training,
                             uint64_t step_seed) const;

    SpanPrediction predict(const TokenizedInput& tok, const std::string& sample_id,
                           int beam_width) const;

  private:
    int emotion_hidden_width() const;

    CseConfig cfg_;
    const Encoder* encoder_;
    ParamStore* store_;
};

}  // namespace mutec
