#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mutec {

using Mat = Eigen::MatrixXd;

enum class Init { zeros, scaled_normal };  // scaled_normal: N(0, 0.02)

// Named parameter tensors with gradients and Adam moments. Initialization is
// seeded per name, so a tensor's initial value depends only on (seed, name,
// shape) and never on creation order; structurally identical submodels of two
// different models therefore start from identical weights.
class ParamStore {
  public:
    explicit ParamStore(uint64_t seed = 0) : seed_(seed) {}

    uint64_t seed() const { return seed_; }

    Mat& get_or_create(const std::string& name, int rows, int cols, Init init);
    bool has(const std::string& name) const { return values_.count(name) > 0; }
    Mat& value(const std::string& name);
    const Mat& value(const std::string& name) const;
    Mat& grad(const std::string& name);
    void zero_grads();
    std::vector<std::string> names() const;
    size_t count() const { return values_.size(); }

    Mat& adam_m(const std::string& name);
    Mat& adam_v(const std::string& name);

  private:
    uint64_t seed_;
    std::map<std::string, Mat> values_;
    std::map<std::string, Mat> grads_;
    std::map<std::string, Mat> m_;
    std::map<std::string, Mat> v_;
};

class Tape;

// Handle to a tape node. Valid only while its tape is alive.
class Var {
  public:
    Var() = default;
    const Mat& value() const;
    const Mat& grad() const;
    int rows() const { return static_cast<int>(value().rows()); }
    int cols() const { return static_cast<int>(value().cols()); }
    bool valid() const { return tape_ != nullptr; }

  private:
    friend class Tape;
    Var(Tape* tape, int idx) : tape_(tape), idx_(idx) {}
    Tape* tape_ = nullptr;
    int idx_ = -1;
};

// Reverse-mode autodiff over dense double matrices. Build a fresh tape per
// forward pass; backward() walks the nodes in reverse and accumulates
// parameter gradients into their stores.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var input(Mat value);  // constant leaf
    Var param(ParamStore& store, const std::string& name);

    // loss must be 1x1; seeds d(loss)/d(loss) = 1 and runs the backward walk.
    void backward(const Var& loss);

    size_t size() const { return nodes_.size(); }

    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var add_rowvec(Var a, Var row);  // row broadcast over a's rows
    Var scale(Var a, double s);
    Var hadamard(Var a, Var b);
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var softmax_rows(Var a);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    Var slice_rows(Var a, int begin, int count);
    Var slice_cols(Var a, int begin, int count);
    Var row(Var a, int r) { return slice_rows(a, r, 1); }
    Var gather_rows(Var a, std::vector<int> indices);
    Var mean_rows(Var a);                     // 1 x C column means
    Var mean(const std::vector<Var>& parts);  // elementwise mean, equal shapes
    // value = a .* mask / (1-p); mask entries are 0 or 1
    Var dropout(Var a, const Mat& mask, double p);
    // logits: 1 x C row; returns 1x1 loss = -weight * log softmax(logits)[target]
    Var softmax_ce(Var logits, int target, double weight = 1.0);

  private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void()> backprop;  // may be empty for leaves
    };

    friend class Var;

    int emit(Mat value, std::function<void()> backprop = {});
    Mat& grad_ref(int idx);
    const Mat& val(const Var& v) const;
    void check(const Var& v) const;

    std::vector<Node> nodes_;

    struct Binding {
        int node;
        ParamStore* store;
        std::string name;
    };
    std::vector<Binding> bindings_;
};

}  // namespace mutec
