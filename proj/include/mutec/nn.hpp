#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mutec/tape.hpp"

namespace mutec {

// Index of the largest coefficient in a 1 x C row, first one on ties.
int argmax_index(const Mat& row);

// y = x W + b with W named prefix+".w" (in x out) and b prefix+".b" (1 x out).
Var linear(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int in, int out,
           bool bias = true);

// One tanh hidden layer; hidden == 0 collapses to a single linear map.
Var mlp(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int in, int hidden,
        int out);

// Creates the tensors an mlp/linear call with the same prefix would, so models
// can materialize every head at construction time.
void register_mlp(ParamStore& store, const std::string& prefix, int in, int hidden, int out);

// Bernoulli keep-mask with keep probability 1-p, seeded independently of any
// other stream.
Mat dropout_mask(int rows, int cols, double p, uint64_t seed);

// k independently masked passes of the same linear head over x (training
// mode); a single clean pass when training == false. Aggregation is left to
// the caller.
std::vector<Var> msd_passes(Tape& tape, ParamStore& store, const std::string& prefix, Var x,
                            int in, int out, bool training, double p, int k, uint64_t seed);

// x: T x D  ->  T x 2H (forward and backward hidden states concatenated).
Var bilstm(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int hidden);

// Weights proportional to inverse class counts, normalized to mean 1 (sum
// equals the class count). A zero count throws WeightingError.
std::vector<double> inverse_count_weights(const std::vector<long>& counts);

struct AdamWConfig {
    double lr = 4e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.001;
};

// Decoupled weight decay; step() applies lr * lr_factor to every parameter in
// the store using whatever gradients are currently accumulated.
class AdamW {
  public:
    AdamW(ParamStore& store, AdamWConfig cfg) : store_(store), cfg_(cfg) {}

    void step(double lr_factor = 1.0);
    long steps_taken() const { return t_; }

  private:
    ParamStore& store_;
    AdamWConfig cfg_;
    long t_ = 0;
};

// Linear warmup then linear decay to zero: step/warmup while warming up, then
// (total-step)/(total-warmup), clamped at zero. step counts completed
// optimizer steps, so the very first step runs at factor 0 when warmup > 0.
double linear_warmup_factor(long step, long warmup_steps, long total_steps);

struct GradCheckReport {
    int checked = 0;
    int within_tol = 0;
    double worst_rel_err = 0.0;
    double fraction_ok() const {
        return checked > 0 ? static_cast<double>(within_tol) / checked : 1.0;
    }
};

// Central finite differences against the analytic gradient. `loss` must be a
// pure deterministic function of the store contents; when backward is true it
// must also accumulate gradients (the checker zeroes them first).
GradCheckReport finite_difference_check(
    const std::function<double(ParamStore&, bool backward)>& loss, ParamStore& store,
    int coords_per_param, double eps, double rel_tol, uint64_t seed);

}  // namespace mutec
