#include "mutec/tape.hpp"

#include <cmath>

#include "mutec/errors.hpp"
#include "mutec/rng.hpp"

namespace mutec {

Mat& ParamStore::get_or_create(const std::string& name, int rows, int cols, Init init) {
    auto it = values_.find(name);
    if (it != values_.end()) {
        if (it->second.rows() != rows || it->second.cols() != cols)
            throw ConfigError("parameter '" + name + "' requested with shape " +
                              std::to_string(rows) + "x" + std::to_string(cols) +
                              " but exists with shape " + std::to_string(it->second.rows()) +
                              "x" + std::to_string(it->second.cols()));
        return it->second;
    }
    Mat m(rows, cols);
    if (init == Init::zeros) {
        m.setZero();
    } else {
        auto eng = make_engine(mix_seed(seed_, name));
        std::normal_distribution<double> dist(0.0, 0.02);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = dist(eng);
    }
    return values_.emplace(name, std::move(m)).first->second;
}

Mat& ParamStore::value(const std::string& name) {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

const Mat& ParamStore::value(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

Mat& ParamStore::grad(const std::string& name) {
    const Mat& v = value(name);
    auto it = grads_.find(name);
    if (it == grads_.end())
        it = grads_.emplace(name, Mat::Zero(v.rows(), v.cols())).first;
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [name, g] : grads_) g.setZero();
}

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [name, v] : values_) out.push_back(name);
    return out;
}

Mat& ParamStore::adam_m(const std::string& name) {
    const Mat& v = value(name);
    auto it = m_.find(name);
    if (it == m_.end()) it = m_.emplace(name, Mat::Zero(v.rows(), v.cols())).first;
    return it->second;
}

Mat& ParamStore::adam_v(const std::string& name) {
    const Mat& val = value(name);
    auto it = v_.find(name);
    if (it == v_.end()) it = v_.emplace(name, Mat::Zero(val.rows(), val.cols())).first;
    return it->second;
}

const Mat& Var::value() const {
    if (!tape_) throw InputError("use of an empty Var");
    return tape_->nodes_[static_cast<size_t>(idx_)].value;
}

const Mat& Var::grad() const {
    if (!tape_) throw InputError("use of an empty Var");
    return tape_->nodes_[static_cast<size_t>(idx_)].grad;
}

int Tape::emit(Mat value, std::function<void()> backprop) {
    nodes_.push_back(Node{std::move(value), Mat(), std::move(backprop)});
    return static_cast<int>(nodes_.size()) - 1;
}

Mat& Tape::grad_ref(int idx) {
    Node& n = nodes_[static_cast<size_t>(idx)];
    if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    return n.grad;
}

const Mat& Tape::val(const Var& v) const { return nodes_[static_cast<size_t>(v.idx_)].value; }

void Tape::check(const Var& v) const {
    if (v.tape_ != this) throw InputError("Var belongs to a different tape");
}

Var Tape::input(Mat value) { return Var(this, emit(std::move(value))); }

Var Tape::param(ParamStore& store, const std::string& name) {
    int idx = emit(store.value(name));
    bindings_.push_back(Binding{idx, &store, name});
    return Var(this, idx);
}

void Tape::backward(const Var& loss) {
    check(loss);
    if (loss.value().rows() != 1 || loss.value().cols() != 1)
        throw InputError("backward expects a 1x1 loss");
    grad_ref(loss.idx_)(0, 0) += 1.0;
    for (int i = loss.idx_; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.backprop && n.grad.size() != 0) n.backprop();
    }
    for (const Binding& b : bindings_) {
        Node& n = nodes_[static_cast<size_t>(b.node)];
        if (n.grad.size() != 0) b.store->grad(b.name) += n.grad;
    }
}

Var Tape::matmul(Var a, Var b) {
    check(a);
    check(b);
    if (a.cols() != b.rows())
        throw InputError("matmul shape mismatch: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
    int ia = a.idx_, ib = b.idx_;
    int idx = emit(val(a) * val(b));
    nodes_.back().backprop = [this, ia, ib, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g * nodes_[static_cast<size_t>(ib)].value.transpose();
        grad_ref(ib) += nodes_[static_cast<size_t>(ia)].value.transpose() * g;
    };
    return Var(this, idx);
}

Var Tape::transpose(Var a) {
    check(a);
    int ia = a.idx_;
    int idx = emit(val(a).transpose());
    nodes_.back().backprop = [this, ia, idx] {
        grad_ref(ia) += nodes_[static_cast<size_t>(idx)].grad.transpose();
    };
    return Var(this, idx);
}

Var Tape::add(Var a, Var b) {
    check(a);
    check(b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("add shape mismatch");
    int ia = a.idx_, ib = b.idx_;
    int idx = emit(val(a) + val(b));
    nodes_.back().backprop = [this, ia, ib, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g;
        grad_ref(ib) += g;
    };
    return Var(this, idx);
}

Var Tape::sub(Var a, Var b) {
    check(a);
    check(b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("sub shape mismatch");
    int ia = a.idx_, ib = b.idx_;
    int idx = emit(val(a) - val(b));
    nodes_.back().backprop = [this, ia, ib, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g;
        grad_ref(ib) -= g;
    };
    return Var(this, idx);
}

Var Tape::add_rowvec(Var a, Var row) {
    check(a);
    check(row);
    if (row.rows() != 1 || row.cols() != a.cols())
        throw InputError("add_rowvec expects a 1x" + std::to_string(a.cols()) + " row");
    int ia = a.idx_, ir = row.idx_;
    int idx = emit(val(a).rowwise() + val(row).row(0));
    nodes_.back().backprop = [this, ia, ir, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g;
        grad_ref(ir) += g.colwise().sum();
    };
    return Var(this, idx);
}

Var Tape::scale(Var a, double s) {
    check(a);
    int ia = a.idx_;
    int idx = emit(val(a) * s);
    nodes_.back().backprop = [this, ia, idx, s] {
        grad_ref(ia) += nodes_[static_cast<size_t>(idx)].grad * s;
    };
    return Var(this, idx);
}

Var Tape::hadamard(Var a, Var b) {
    check(a);
    check(b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("hadamard shape mismatch");
    int ia = a.idx_, ib = b.idx_;
    int idx = emit(val(a).cwiseProduct(val(b)));
    nodes_.back().backprop = [this, ia, ib, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g.cwiseProduct(nodes_[static_cast<size_t>(ib)].value);
        grad_ref(ib) += g.cwiseProduct(nodes_[static_cast<size_t>(ia)].value);
    };
    return Var(this, idx);
}

Var Tape::tanh(Var a) {
    check(a);
    int ia = a.idx_;
    int idx = emit(val(a).array().tanh().matrix());
    nodes_.back().backprop = [this, ia, idx] {
        const Node& n = nodes_[static_cast<size_t>(idx)];
        grad_ref(ia) +=
            n.grad.cwiseProduct((1.0 - n.value.array().square()).matrix());
    };
    return Var(this, idx);
}

Var Tape::sigmoid(Var a) {
    check(a);
    int ia = a.idx_;
    Mat s = (1.0 / (1.0 + (-val(a).array()).exp())).matrix();
    int idx = emit(std::move(s));
    nodes_.back().backprop = [this, ia, idx] {
        const Node& n = nodes_[static_cast<size_t>(idx)];
        grad_ref(ia) += n.grad.cwiseProduct(
            (n.value.array() * (1.0 - n.value.array())).matrix());
    };
    return Var(this, idx);
}

Var Tape::softmax_rows(Var a) {
    check(a);
    int ia = a.idx_;
    Mat v = val(a);
    for (int r = 0; r < v.rows(); ++r) {
        const double m = v.row(r).maxCoeff();
        v.row(r) = (v.row(r).array() - m).exp();
        v.row(r) /= v.row(r).sum();
    }
    int idx = emit(std::move(v));
    nodes_.back().backprop = [this, ia, idx] {
        const Node& n = nodes_[static_cast<size_t>(idx)];
        Eigen::VectorXd rowsum = n.grad.cwiseProduct(n.value).rowwise().sum();
        Mat centered = n.grad;
        centered.colwise() -= rowsum;
        grad_ref(ia) += n.value.cwiseProduct(centered);
    };
    return Var(this, idx);
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw InputError("concat_cols of nothing");
    int rows = parts.front().rows();
    int cols = 0;
    for (const Var& p : parts) {
        check(p);
        if (p.rows() != rows) throw InputError("concat_cols row mismatch");
        cols += p.cols();
    }
    Mat v(rows, cols);
    std::vector<int> idxs;
    std::vector<int> widths;
    int off = 0;
    for (const Var& p : parts) {
        v.middleCols(off, p.cols()) = val(p);
        idxs.push_back(p.idx_);
        widths.push_back(p.cols());
        off += p.cols();
    }
    int idx = emit(std::move(v));
    nodes_.back().backprop = [this, idxs, widths, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        int o = 0;
        for (size_t k = 0; k < idxs.size(); ++k) {
            grad_ref(idxs[k]) += g.middleCols(o, widths[k]);
            o += widths[k];
        }
    };
    return Var(this, idx);
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw InputError("concat_rows of nothing");
    int cols = parts.front().cols();
    int rows = 0;
    for (const Var& p : parts) {
        check(p);
        if (p.cols() != cols) throw InputError("concat_rows column mismatch");
        rows += p.rows();
    }
    Mat v(rows, cols);
    std::vector<int> idxs;
    std::vector<int> heights;
    int off = 0;
    for (const Var& p : parts) {
        v.middleRows(off, p.rows()) = val(p);
        idxs.push_back(p.idx_);
        heights.push_back(p.rows());
        off += p.rows();
    }
    int idx = emit(std::move(v));
    nodes_.back().backprop = [this, idxs, heights, idx] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        int o = 0;
        for (size_t k = 0; k < idxs.size(); ++k) {
            grad_ref(idxs[k]) += g.middleRows(o, heights[k]);
            o += heights[k];
        }
    };
    return Var(this, idx);
}

Var Tape::slice_rows(Var a, int begin, int count) {
    check(a);
    if (begin < 0 || count < 1 || begin + count > a.rows())
        throw InputError("slice_rows out of range");
    int ia = a.idx_;
    int idx = emit(val(a).middleRows(begin, count));
    nodes_.back().backprop = [this, ia, idx, begin, count] {
        grad_ref(ia).middleRows(begin, count) += nodes_[static_cast<size_t>(idx)].grad;
    };
    return Var(this, idx);
}

Var Tape::slice_cols(Var a, int begin, int count) {
    check(a);
    if (begin < 0 || count < 1 || begin + count > a.cols())
        throw InputError("slice_cols out of range");
    int ia = a.idx_;
    int idx = emit(val(a).middleCols(begin, count));
    nodes_.back().backprop = [this, ia, idx, begin, count] {
        grad_ref(ia).middleCols(begin, count) += nodes_[static_cast<size_t>(idx)].grad;
    };
    return Var(this, idx);
}

Var Tape::gather_rows(Var a, std::vector<int> indices) {
    check(a);
    for (int r : indices)
        if (r < 0 || r >= a.rows()) throw InputError("gather_rows index out of range");
    Mat v(static_cast<int>(indices.size()), a.cols());
    for (size_t k = 0; k < indices.size(); ++k) v.row(static_cast<int>(k)) = val(a).row(indices[k]);
    int ia = a.idx_;
    int idx = emit(std::move(v));
    nodes_.back().backprop = [this, ia, idx, indices = std::move(indices)] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        Mat& ga = grad_ref(ia);
        for (size_t k = 0; k < indices.size(); ++k)
            ga.row(indices[k]) += g.row(static_cast<int>(k));
    };
    return Var(this, idx);
}

Var Tape::mean_rows(Var a) {
    check(a);
    int ia = a.idx_;
    const int r = a.rows();
    int idx = emit(val(a).colwise().mean());
    nodes_.back().backprop = [this, ia, idx, r] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        grad_ref(ia) += g.replicate(r, 1) / static_cast<double>(r);
    };
    return Var(this, idx);
}

Var Tape::mean(const std::vector<Var>& parts) {
    if (parts.empty()) throw InputError("mean of nothing");
    const int rows = parts.front().rows(), cols = parts.front().cols();
    Mat v = Mat::Zero(rows, cols);
    std::vector<int> idxs;
    for (const Var& p : parts) {
        check(p);
        if (p.rows() != rows || p.cols() != cols) throw InputError("mean shape mismatch");
        v += val(p);
        idxs.push_back(p.idx_);
    }
    const double k = static_cast<double>(parts.size());
    v /= k;
    int idx = emit(std::move(v));
    nodes_.back().backprop = [this, idxs, idx, k] {
        const Mat& g = nodes_[static_cast<size_t>(idx)].grad;
        for (int ip : idxs) grad_ref(ip) += g / k;
    };
    return Var(this, idx);
}

Var Tape::dropout(Var a, const Mat& mask, double p) {
    check(a);
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout probability must be in [0,1)");
    if (mask.rows() != a.rows() || mask.cols() != a.cols())
        throw InputError("dropout mask shape mismatch");
    const double keep = 1.0 - p;
    int ia = a.idx_;
    int idx = emit(val(a).cwiseProduct(mask) / keep);
    nodes_.back().backprop = [this, ia, idx, mask, keep] {
        grad_ref(ia) += nodes_[static_cast<size_t>(idx)].grad.cwiseProduct(mask) / keep;
    };
    return Var(this, idx);
}

Var Tape::softmax_ce(Var logits, int target, double weight) {
    check(logits);
    if (logits.rows() != 1)
        throw InputError("softmax_ce expects a single row of logits");
    if (target < 0 || target >= logits.cols())
        throw InputError("cross-entropy target " + std::to_string(target) +
                         " out of range for " + std::to_string(logits.cols()) + " classes");
    const Mat& l = val(logits);
    const double m = l.row(0).maxCoeff();
    Eigen::RowVectorXd shifted = l.row(0).array() - m;
    const double logsum = std::log(shifted.array().exp().sum());
    Eigen::RowVectorXd soft = (shifted.array() - logsum).exp();
    Mat loss(1, 1);
    loss(0, 0) = -weight * (shifted(target) - logsum);
    int il = logits.idx_;
    int idx = emit(std::move(loss));
    nodes_.back().backprop = [this, il, idx, soft, target, weight] {
        const double g = nodes_[static_cast<size_t>(idx)].grad(0, 0);
        Mat& gl = grad_ref(il);
        gl.row(0) += g * weight * soft;
        gl(0, target) -= g * weight;
    };
    return Var(this, idx);
}

}  // namespace mutec
