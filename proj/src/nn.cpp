#include "mutec/nn.hpp"

#include <algorithm>
#include <cmath>

#include "mutec/errors.hpp"
#include "mutec/rng.hpp"

namespace mutec {

int argmax_index(const Mat& row) {
    if (row.rows() != 1 || row.cols() < 1) throw InputError("argmax expects a non-empty row");
    int best = 0;
    for (int c = 1; c < row.cols(); ++c)
        if (row(0, c) > row(0, best)) best = c;
    return best;
}

Var linear(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int in, int out,
           bool bias) {
    store.get_or_create(prefix + ".w", in, out, Init::scaled_normal);
    Var y = tape.matmul(x, tape.param(store, prefix + ".w"));
    if (bias) {
        store.get_or_create(prefix + ".b", 1, out, Init::zeros);
        y = tape.add_rowvec(y, tape.param(store, prefix + ".b"));
    }
    return y;
}

Var mlp(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int in, int hidden,
        int out) {
    if (hidden <= 0) return linear(tape, store, prefix + ".out", x, in, out);
    Var h = tape.tanh(linear(tape, store, prefix + ".hidden", x, in, hidden));
    return linear(tape, store, prefix + ".out", h, hidden, out);
}

void register_mlp(ParamStore& store, const std::string& prefix, int in, int hidden, int out) {
    if (hidden > 0) {
        store.get_or_create(prefix + ".hidden.w", in, hidden, Init::scaled_normal);
        store.get_or_create(prefix + ".hidden.b", 1, hidden, Init::zeros);
        store.get_or_create(prefix + ".out.w", hidden, out, Init::scaled_normal);
        store.get_or_create(prefix + ".out.b", 1, out, Init::zeros);
    } else {
        store.get_or_create(prefix + ".out.w", in, out, Init::scaled_normal);
        store.get_or_create(prefix + ".out.b", 1, out, Init::zeros);
    }
}

Mat dropout_mask(int rows, int cols, double p, uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout probability must be in [0,1)");
    Mat mask(rows, cols);
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) mask(r, c) = u(eng) < p ? 0.0 : 1.0;
    return mask;
}

std::vector<Var> msd_passes(Tape& tape, ParamStore& store, const std::string& prefix, Var x,
                            int in, int out, bool training, double p, int k, uint64_t seed) {
    if (k < 1) throw ConfigError("multi-sample dropout needs at least one pass");
    std::vector<Var> passes;
    if (!training || p == 0.0) {
        // Dropout is identity at p=0, so one clean pass is exact for any k.
        passes.push_back(linear(tape, store, prefix, x, in, out));
        return passes;
    }
    for (int i = 0; i < k; ++i) {
        Mat mask = dropout_mask(x.rows(), x.cols(), p,
                                mix_seed(seed, prefix, static_cast<uint64_t>(i)));
        passes.push_back(linear(tape, store, prefix, tape.dropout(x, mask, p), in, out));
    }
    return passes;
}

namespace {

// One direction of an LSTM over x (T x D); returns the T x H hidden states.
Var lstm_direction(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int hidden,
                   bool reverse) {
    const int T = x.rows();
    const int D = x.cols();
    store.get_or_create(prefix + ".x.w", D, 4 * hidden, Init::scaled_normal);
    store.get_or_create(prefix + ".h.w", hidden, 4 * hidden, Init::scaled_normal);
    store.get_or_create(prefix + ".h.b", 1, 4 * hidden, Init::zeros);
    Var wx = tape.param(store, prefix + ".x.w");
    Var wh = tape.param(store, prefix + ".h.w");
    Var b = tape.param(store, prefix + ".h.b");

    Var h = tape.input(Mat::Zero(1, hidden));
    Var c = tape.input(Mat::Zero(1, hidden));
    std::vector<Var> outputs(static_cast<size_t>(T));
    for (int step = 0; step < T; ++step) {
        const int t = reverse ? T - 1 - step : step;
        Var xt = tape.row(x, t);
        Var gates = tape.add_rowvec(tape.add(tape.matmul(xt, wx), tape.matmul(h, wh)), b);
        Var i_g = tape.sigmoid(tape.slice_cols(gates, 0, hidden));
        Var f_g = tape.sigmoid(tape.slice_cols(gates, hidden, hidden));
        Var g_g = tape.tanh(tape.slice_cols(gates, 2 * hidden, hidden));
        Var o_g = tape.sigmoid(tape.slice_cols(gates, 3 * hidden, hidden));
        c = tape.add(tape.hadamard(f_g, c), tape.hadamard(i_g, g_g));
        h = tape.hadamard(o_g, tape.tanh(c));
        outputs[static_cast<size_t>(t)] = h;
    }
    return tape.concat_rows(outputs);
}

}  // namespace

Var bilstm(Tape& tape, ParamStore& store, const std::string& prefix, Var x, int hidden) {
    if (hidden < 1) throw ConfigError("bilstm hidden size must be positive");
    Var fwd = lstm_direction(tape, store, prefix + ".fwd", x, hidden, false);
    Var bwd = lstm_direction(tape, store, prefix + ".bwd", x, hidden, true);
    return tape.concat_cols({fwd, bwd});
}

std::vector<double> inverse_count_weights(const std::vector<long>& counts) {
    if (counts.empty()) throw WeightingError("no classes to weight");
    std::vector<double> w(counts.size());
    double sum = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] <= 0)
            throw WeightingError("class " + std::to_string(i) +
                                 " has no instances; cannot form inverse-count weights");
        w[i] = 1.0 / static_cast<double>(counts[i]);
        sum += w[i];
    }
    const double scale = static_cast<double>(counts.size()) / sum;
    for (double& x : w) x *= scale;
    return w;
}

void AdamW::step(double lr_factor) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const double lr = cfg_.lr * lr_factor;
    for (const std::string& name : store_.names()) {
        Mat& p = store_.value(name);
        const Mat& g = store_.grad(name);
        Mat& m = store_.adam_m(name);
        Mat& v = store_.adam_v(name);
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
        const Mat m_hat = m / bc1;
        const Mat v_hat = v / bc2;
        p -= lr * (m_hat.array() / (v_hat.array().sqrt() + cfg_.eps)).matrix();
        p -= lr * cfg_.weight_decay * p;
    }
}

double linear_warmup_factor(long step, long warmup_steps, long total_steps) {
    if (step < warmup_steps)
        return static_cast<double>(step) / static_cast<double>(std::max<long>(1, warmup_steps));
    const double denom = static_cast<double>(std::max<long>(1, total_steps - warmup_steps));
    return std::max(0.0, static_cast<double>(total_steps - step) / denom);
}

GradCheckReport finite_difference_check(
    const std::function<double(ParamStore&, bool backward)>& loss, ParamStore& store,
    int coords_per_param, double eps, double rel_tol, uint64_t seed) {
    store.zero_grads();
    loss(store, true);

    std::map<std::string, Mat> analytic;
    for (const std::string& name : store.names()) analytic[name] = store.grad(name);

    GradCheckReport report;
    auto eng = make_engine(mix_seed(seed, "gradcheck"));
    for (const std::string& name : store.names()) {
        Mat& p = store.value(name);
        const long size = p.size();
        const int n = static_cast<int>(std::min<long>(coords_per_param, size));
        for (int k = 0; k < n; ++k) {
            const long flat = static_cast<long>(eng() % static_cast<uint64_t>(size));
            double* coeff = p.data() + flat;
            const double orig = *coeff;
            *coeff = orig + eps;
            const double up = loss(store, false);
            *coeff = orig - eps;
            const double down = loss(store, false);
            *coeff = orig;
            const double fd = (up - down) / (2.0 * eps);
            const double an = analytic[name].data()[flat];
            const double scale = std::max({1e-8, std::abs(fd), std::abs(an)});
            const double rel = std::abs(fd - an) / scale;
            ++report.checked;
            if (rel <= rel_tol) ++report.within_tol;
            report.worst_rel_err = std::max(report.worst_rel_err, rel);
        }
    }
    return report;
}

}  // namespace mutec
