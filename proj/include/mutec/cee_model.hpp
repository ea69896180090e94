#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mutec/emotion.hpp"
#include "mutec/encoder.hpp"
#include "mutec/tape.hpp"
#include "mutec/tokenizer.hpp"

namespace mutec {

// Indices of the tokens whose character range lies fully inside `range`.
// Specials with sentinel offsets never match.
std::vector<int> tokens_in_range(const TokenizedInput& tok, std::pair<int, int> range);

struct EntailPrediction {
    int label = 0;        // argmax, ties toward the negative class
    double prob = 0.5;    // softmax probability of the positive class
    int aux_emotion = -1; // cause-emotion class; -1 when the head is disabled
};

struct CeeConfig {
    double beta = 1.0;
    int bilstm_hidden = 0;  // 0: half the encoder width, the only valid size
    int n_hidden_states = 4;
    double dropout_p = 0.1;  // feature dropout on the entailment input
    bool emotion_enabled = true;
    int num_emotions = kNumCauseEmotions;
    std::vector<double> entail_weights{1.0, 1.0};
    std::vector<double> emotion_weights;  // empty: unweighted
};

struct CeeForward {
    Var loss;            // entail loss + beta * emotion loss
    Var entail_loss;
    Var emotion_loss;    // invalid when the emotion head is disabled
    Var entail_logits;   // 1 x 2
    Var emotion_logits;  // 1 x num_emotions, invalid when disabled
};

// Causal emotion entailment. A BiLSTM over the target utterance's token
// states feeds the emotion head; its output sequence, extended along the time
// axis with the candidate utterance's states, feeds a second BiLSTM whose
// summary joins the pooled encoder vector in the entailment features.
class CeeModel {
  public:
    CeeModel(const CeeConfig& cfg, const Encoder& encoder, ParamStore& store);

    const CeeConfig& config() const { return cfg_; }
    int hidden() const { return hidden_; }

    CeeForward forward_train(Tape& tape, const TokenizedInput& tok, const std::string& sample_id,
                             int gold_label, int gold_emotion, bool training,
                             uint64_t step_seed) const;

    EntailPrediction predict(const TokenizedInput& tok, const std::string& sample_id) const;

  private:
    CeeConfig cfg_;
    int hidden_ = 0;
    const Encoder* encoder_;
    ParamStore* store_;
};

}  // namespace mutec
