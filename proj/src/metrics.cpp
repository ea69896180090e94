#include "mutec/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "mutec/errors.hpp"
#include "json.hpp"

namespace mutec {

using json = nlohmann::json;

std::string normalize_answer(const std::string& text, const NormalizeOptions& opt) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (std::ispunct(c)) continue;
        cleaned += static_cast<char>(std::tolower(c));
    }
    std::istringstream in(cleaned);
    std::string word, out;
    while (in >> word) {
        if (opt.drop_articles && (word == "a" || word == "an" || word == "the")) continue;
        if (!out.empty()) out += ' ';
        out += word;
    }
    return out;
}

std::vector<std::string> normalize_tokens(const std::string& text, const NormalizeOptions& opt) {
    std::istringstream in(normalize_answer(text, opt));
    std::vector<std::string> tokens;
    std::string word;
    while (in >> word) tokens.push_back(word);
    return tokens;
}

TokenF1 token_f1(const std::string& gold_text, const std::string& pred_text,
                 const NormalizeOptions& opt) {
    const auto gold = normalize_tokens(gold_text, opt);
    const auto pred = normalize_tokens(pred_text, opt);
    std::map<std::string, long> gold_counts;
    for (const auto& t : gold) gold_counts[t]++;
    long same = 0;
    for (const auto& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++same;
        }
    }
    TokenF1 r;
    const long p = static_cast<long>(pred.size());
    const long g = static_cast<long>(gold.size());
    r.precision = p > 0 ? static_cast<double>(same) / static_cast<double>(p) : 0.0;
    r.recall = g > 0 ? static_cast<double>(same) / static_cast<double>(g) : 0.0;
    r.f1 = (p + g) > 0 ? 2.0 * static_cast<double>(same) / static_cast<double>(p + g) : 0.0;
    return r;
}

namespace {

bool predicted_empty(const SpanEvalRecord& rec, const NormalizeOptions& opt) {
    return normalize_answer(rec.pred_text, opt).empty();
}

}  // namespace

std::optional<double> em_pos(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt) {
    long positives = 0, exact = 0;
    for (const auto& rec : records) {
        if (!rec.is_positive) continue;
        ++positives;
        if (normalize_answer(rec.gold_text, opt) == normalize_answer(rec.pred_text, opt))
            ++exact;
    }
    if (positives == 0) return std::nullopt;
    return static_cast<double>(exact) / static_cast<double>(positives);
}

std::optional<double> f1_pos(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt) {
    long positives = 0;
    double sum = 0.0;
    for (const auto& rec : records) {
        if (!rec.is_positive) continue;
        ++positives;
        sum += token_f1(rec.gold_text, rec.pred_text, opt).f1;
    }
    if (positives == 0) return std::nullopt;
    return sum / static_cast<double>(positives);
}

std::optional<double> f1_neg(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt, bool* flagged) {
    if (flagged) *flagged = false;
    long negatives = 0, pred_empty = 0, correct_empty = 0;
    for (const auto& rec : records) {
        const bool empty = predicted_empty(rec, opt);
        if (!rec.is_positive) {
            ++negatives;
            if (empty) ++correct_empty;
        }
        if (empty) ++pred_empty;
    }
    if (negatives == 0) return std::nullopt;
    if (pred_empty == 0) {
        if (flagged) *flagged = true;
        return 0.0;
    }
    const double p = static_cast<double>(correct_empty) / static_cast<double>(pred_empty);
    const double r = static_cast<double>(correct_empty) / static_cast<double>(negatives);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

std::optional<double> f1_overall(const std::vector<SpanEvalRecord>& records,
                                 const SpanMetricOptions& opt) {
    if (records.empty()) return std::nullopt;
    if (opt.overall == OverallMode::class_mean) {
        auto pos = f1_pos(records, opt.normalize);
        auto neg = f1_neg(records, opt.normalize);
        if (!pos && !neg) return std::nullopt;
        return (pos.value_or(0.0) + neg.value_or(0.0)) / 2.0;
    }
    double sum = 0.0;
    for (const auto& rec : records) {
        if (rec.is_positive)
            sum += token_f1(rec.gold_text, rec.pred_text, opt.normalize).f1;
        else
            sum += predicted_empty(rec, opt.normalize) ? 1.0 : 0.0;
    }
    return sum / static_cast<double>(records.size());
}

MetricsReport span_metrics(const std::vector<SpanEvalRecord>& records,
                           const SpanMetricOptions& opt) {
    MetricsReport report;
    report.em_pos = em_pos(records, opt.normalize);
    report.f1_pos = f1_pos(records, opt.normalize);
    bool flagged = false;
    report.f1_neg = f1_neg(records, opt.normalize, &flagged);
    if (flagged) report.flags.push_back("f1_neg: nothing predicted empty");
    report.f1_overall = f1_overall(records, opt);
    return report;
}

EntailMetrics entail_metrics(const std::vector<int>& gold_labels,
                             const std::vector<int>& pred_labels) {
    if (gold_labels.size() != pred_labels.size())
        throw InputError("entail_metrics: gold and prediction counts differ");
    EntailMetrics m;
    double per_class[2] = {0.0, 0.0};
    for (int cls = 0; cls < 2; ++cls) {
        long tp = 0, fp = 0, fn = 0, gold_count = 0;
        for (size_t i = 0; i < gold_labels.size(); ++i) {
            const bool g = gold_labels[i] == cls;
            const bool p = pred_labels[i] == cls;
            if (g) ++gold_count;
            if (g && p) ++tp;
            if (!g && p) ++fp;
            if (g && !p) ++fn;
        }
        if (gold_count == 0)
            m.flags.push_back(std::string("entail class ") + std::to_string(cls) +
                              " absent from gold");
        const long denom = 2 * tp + fp + fn;
        per_class[cls] = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom)
                                   : 0.0;
    }
    m.f1_neg = per_class[0];
    m.f1_pos = per_class[1];
    m.macro_f1 = (per_class[0] + per_class[1]) / 2.0;
    return m;
}

std::optional<double> accuracy(const std::vector<int>& gold, const std::vector<int>& pred) {
    if (gold.size() != pred.size()) throw InputError("accuracy: label counts differ");
    if (gold.empty()) return std::nullopt;
    long correct = 0;
    for (size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == pred[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace {

void put(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

std::optional<double> take(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string MetricsReport::to_json() const {
    json j = json::object();
    put(j, "em_pos", em_pos);
    put(j, "f1_pos", f1_pos);
    put(j, "f1_neg", f1_neg);
    put(j, "f1_overall", f1_overall);
    put(j, "macro_f1", macro_f1);
    put(j, "emotion_acc", emotion_acc);
    if (!extras.empty()) j["extras"] = extras;
    if (!flags.empty()) j["flags"] = flags;
    return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("metrics report: ") + e.what());
    }
    MetricsReport r;
    r.em_pos = take(j, "em_pos");
    r.f1_pos = take(j, "f1_pos");
    r.f1_neg = take(j, "f1_neg");
    r.f1_overall = take(j, "f1_overall");
    r.macro_f1 = take(j, "macro_f1");
    r.emotion_acc = take(j, "emotion_acc");
    if (j.contains("extras")) r.extras = j.at("extras").get<std::map<std::string, double>>();
    if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

std::string MetricsReport::table() const {
    std::ostringstream out;
    auto row = [&](const char* name, const std::optional<double>& v) {
        if (!v) return;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  %-12s %.4f\n", name, *v);
        out << buf;
    };
    row("em_pos", em_pos);
    row("f1_pos", f1_pos);
    row("f1_neg", f1_neg);
    row("f1_overall", f1_overall);
    row("macro_f1", macro_f1);
    row("emotion_acc", emotion_acc);
    for (const auto& [k, v] : extras) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  %-12s %.4f\n", k.c_str(), v);
        out << buf;
    }
    for (const auto& f : flags) out << "  note: " << f << "\n";
    return out.str();
}

}  // namespace mutec
