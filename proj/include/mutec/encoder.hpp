#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mutec/tape.hpp"
#include "mutec/tokenizer.hpp"

namespace mutec {

struct EncoderConfig {
    std::string kind = "toy";  // "toy" or "external:<states file>"
    int dim = 32;
    int layers = 2;
    int heads = 2;
    uint64_t seed = 0;
};

struct EncoderOut {
    Var pooled;                    // 1 x D, final-layer state at position 0
    Var meanpooled;                // T x D, mean over the last n layer states
    std::vector<Var> layer_states; // L entries of T x D
};

class Encoder {
  public:
    virtual ~Encoder() = default;
    virtual int dim() const = 0;
    virtual int num_layers() const = 0;
    virtual bool trainable() const = 0;
    // n_hidden_states selects how many trailing layers the meanpooled states
    // average over; it must not exceed num_layers().
    virtual EncoderOut forward(Tape& tape, ParamStore& store, const TokenizedInput& tok,
                               const std::string& sample_id, int n_hidden_states) const = 0;
};

// Deterministic trainable encoder: fixed seeded token/position embeddings
// followed by `layers` self-attention + tanh feed-forward blocks with
// residual connections.
class ToyEncoder : public Encoder {
  public:
    ToyEncoder(const EncoderConfig& cfg, ParamStore& store);

    int dim() const override { return cfg_.dim; }
    int num_layers() const override { return cfg_.layers; }
    bool trainable() const override { return true; }
    EncoderOut forward(Tape& tape, ParamStore& store, const TokenizedInput& tok,
                       const std::string& sample_id, int n_hidden_states) const override;

    Mat embed(const TokenizedInput& tok) const;

  private:
    EncoderConfig cfg_;
};

// Precomputed per-sample states loaded from a JSONL file of records
// {sample_id, layers: [[ [D floats] x T ] x L]}. A thin adapter for plugging
// real encoder outputs in; carries no trainable parameters.
class ExternalStatesEncoder : public Encoder {
  public:
    explicit ExternalStatesEncoder(const std::string& path);

    int dim() const override { return dim_; }
    int num_layers() const override { return layers_; }
    bool trainable() const override { return false; }
    EncoderOut forward(Tape& tape, ParamStore& store, const TokenizedInput& tok,
                       const std::string& sample_id, int n_hidden_states) const override;

  private:
    std::map<std::string, std::vector<Mat>> states_;
    int dim_ = 0;
    int layers_ = 0;
};

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg, ParamStore& store);

}  // namespace mutec
