#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mutec {

// Span-text normalization used by every span metric: ASCII lowercase, strip
// punctuation characters, collapse whitespace; optionally drop the articles
// {a, an, the}. Article dropping defaults off so that
// token_f1("you ran a red light", "ran a red light") = (1, 0.8, 8/9).
struct NormalizeOptions {
    bool drop_articles = false;
};

std::string normalize_answer(const std::string& text, const NormalizeOptions& opt = {});
std::vector<std::string> normalize_tokens(const std::string& text,
                                          const NormalizeOptions& opt = {});

struct TokenF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Multiset token overlap; F1 computed in the rational form 2s/(p+g).
TokenF1 token_f1(const std::string& gold_text, const std::string& pred_text,
                 const NormalizeOptions& opt = {});

struct SpanEvalRecord {
    std::string gold_text;  // empty for negatives
    std::string pred_text;
    bool is_positive = false;
};

// How the overall span F1 averages positives and negatives: per-record mean
// (every sample contributes one F1), or the mean of the aggregate F1_pos and
// F1_neg values.
enum class OverallMode { per_record, class_mean };

struct SpanMetricOptions {
    NormalizeOptions normalize;
    OverallMode overall = OverallMode::per_record;
};

struct MetricsReport {
    std::optional<double> em_pos;
    std::optional<double> f1_pos;
    std::optional<double> f1_neg;
    std::optional<double> f1_overall;
    std::optional<double> macro_f1;
    std::optional<double> emotion_acc;
    std::map<std::string, double> extras;
    std::vector<std::string> flags;

    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);
    std::string table() const;
};

std::optional<double> em_pos(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt = {});
// Mean per-positive-record token F1.
std::optional<double> f1_pos(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt = {});
// Empty-span agreement: P = correct empties / predicted empties,
// R = correct empties / negatives. Returns 0 and sets *flagged when nothing
// is predicted empty; nullopt when there are no negatives.
std::optional<double> f1_neg(const std::vector<SpanEvalRecord>& records,
                             const NormalizeOptions& opt = {}, bool* flagged = nullptr);
std::optional<double> f1_overall(const std::vector<SpanEvalRecord>& records,
                                 const SpanMetricOptions& opt = {});

// Fills em_pos/f1_pos/f1_neg/f1_overall.
MetricsReport span_metrics(const std::vector<SpanEvalRecord>& records,
                           const SpanMetricOptions& opt = {});

struct EntailMetrics {
    double f1_pos = 0.0;
    double f1_neg = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::string> flags;
};

EntailMetrics entail_metrics(const std::vector<int>& gold_labels,
                             const std::vector<int>& pred_labels);

std::optional<double> accuracy(const std::vector<int>& gold, const std::vector<int>& pred);

}  // namespace mutec
