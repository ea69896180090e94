#pragma once

#include <string>
#include <vector>

#include "mutec/cee_model.hpp"
#include "mutec/cse_model.hpp"
#include "mutec/emotion.hpp"
#include "mutec/encoder.hpp"

namespace mutec {

struct E2eConfig {
    double msd_p = 0.5;
    int msd_k = 5;
    bool msd_aggregate_loss = false;
    int max_answer_length = 200;
    int n_hidden_states = 12;
    bool emotion_enabled = true;
    int num_emotions = kNumCauseEmotions;
    std::vector<double> entail_weights{1.0, 1.0};
    std::vector<double> emotion_weights;  // empty: unweighted
};

struct E2eForward {
    Var loss;            // unweighted sum of the task losses
    Var span_loss;
    Var entail_loss;
    Var emotion_loss;    // invalid when the emotion head is disabled
    Var start_logits;    // 1 x T
    Var end_logits;      // 1 x T, conditioned on the gold start
    Var entail_logits;   // 1 x 2
    Var emotion_logits;  // 1 x num_emotions, invalid when disabled
};

struct E2ePrediction {
    SpanPrediction span;
    EntailPrediction entail;
    bool consistent = true;  // entail verdict agrees with span emptiness; never corrected
};

// Joint model: one shared encoder feeding the cause-span heads, a single-layer
// entailment head over the pooled vector, and a single-layer emotion head.
class E2eModel {
  public:
    E2eModel(const E2eConfig& cfg, const Encoder& encoder, ParamStore& store);

    const E2eConfig& config() const { return cfg_; }

    E2eForward forward_train(Tape& tape, const TokenizedInput& tok, const std::string& sample_id,
                             int gold_start, int gold_end, int gold_label, int gold_emotion,
                             bool training, uint64_t step_seed) const;

    E2ePrediction predict(const TokenizedInput& tok, const std::string& sample_id,
                          int beam_width) const;

  private:
    E2eConfig cfg_;
    const Encoder* encoder_;
    ParamStore* store_;
};

}  // namespace mutec
