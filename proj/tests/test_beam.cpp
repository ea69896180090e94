#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "mutec/cse_model.hpp"
#include "mutec/errors.hpp"

using namespace mutec;

namespace {

// Exhaustive reference: enumerate every feasible (start, end) pair whose start
// ranks in the top k by start logit, score by the raw logit sum, pick the
// best with ties broken toward the smaller start then the smaller end.
BeamResult oracle_decode(const std::vector<double>& start_logits,
                         const std::vector<std::vector<double>>& end_table, int k,
                         int max_answer_length) {
    const int T = static_cast<int>(start_logits.size());
    std::vector<int> order(static_cast<size_t>(T));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return start_logits[a] > start_logits[b]; });
    order.resize(static_cast<size_t>(std::min(T, k)));

    BeamResult best;
    bool found = false;
    for (int s = 0; s < T; ++s) {
        if (std::find(order.begin(), order.end(), s) == order.end()) continue;
        for (int e = 0; e < T; ++e) {
            const bool feasible =
                (s == 0 && e == 0) || (s >= 1 && s <= e && e - s <= max_answer_length);
            if (!feasible) continue;
            const double score = start_logits[s] + end_table[static_cast<size_t>(s)][static_cast<size_t>(e)];
            const bool wins =
                !found || score > best.score ||
                (score == best.score &&
                 (s < best.tok_start || (s == best.tok_start && e < best.tok_end)));
            if (wins) {
                best = BeamResult{s, e, score, false};
                found = true;
            }
        }
    }
    if (!found) return BeamResult{0, 0, 0.0, true};
    return best;
}

std::function<std::vector<double>(int)> table_lookup(
    const std::vector<std::vector<double>>& end_table) {
    return [&end_table](int s) { return end_table[static_cast<size_t>(s)]; };
}

}  // namespace

TEST_CASE("beam decode matches exhaustive search over 500 random instances") {
    std::mt19937_64 eng(20240817);
    std::uniform_real_distribution<double> logit(-4.0, 4.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int T = 1 + static_cast<int>(eng() % 12);
        const int k = 1 + static_cast<int>(eng() % static_cast<uint64_t>(T));
        const int max_len = static_cast<int>(eng() % 12);
        std::vector<double> starts(static_cast<size_t>(T));
        for (double& v : starts) v = logit(eng);
        std::vector<std::vector<double>> ends(static_cast<size_t>(T),
                                              std::vector<double>(static_cast<size_t>(T)));
        for (auto& row : ends)
            for (double& v : row) v = logit(eng);

        const BeamResult got = beam_decode(starts, table_lookup(ends), k, max_len);
        const BeamResult want = oracle_decode(starts, ends, k, max_len);
        REQUIRE(got.tok_start == want.tok_start);
        REQUIRE(got.tok_end == want.tok_end);
        REQUIRE(got.score == want.score);
        REQUIRE(got.fallback == want.fallback);
    }
}

TEST_CASE("width one is greedy: argmax start then argmax feasible end") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> logit(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int T = 2 + static_cast<int>(eng() % 10);
        const int max_len = static_cast<int>(eng() % 6);
        std::vector<double> starts(static_cast<size_t>(T));
        for (double& v : starts) v = logit(eng);
        std::vector<std::vector<double>> ends(static_cast<size_t>(T),
                                              std::vector<double>(static_cast<size_t>(T)));
        for (auto& row : ends)
            for (double& v : row) v = logit(eng);

        const int s = static_cast<int>(std::max_element(starts.begin(), starts.end()) -
                                       starts.begin());
        int e = s == 0 ? 0 : s;
        if (s >= 1)
            for (int cand = s; cand < T && cand - s <= max_len; ++cand)
                if (ends[static_cast<size_t>(s)][static_cast<size_t>(cand)] >
                    ends[static_cast<size_t>(s)][static_cast<size_t>(e)])
                    e = cand;

        const BeamResult got = beam_decode(starts, table_lookup(ends), 1, max_len);
        REQUIRE(got.tok_start == s);
        REQUIRE(got.tok_end == e);
    }
}

TEST_CASE("the best score never drops as the beam widens") {
    std::mt19937_64 eng(42);
    std::uniform_real_distribution<double> logit(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int T = 3 + static_cast<int>(eng() % 9);
        std::vector<double> starts(static_cast<size_t>(T));
        for (double& v : starts) v = logit(eng);
        std::vector<std::vector<double>> ends(static_cast<size_t>(T),
                                              std::vector<double>(static_cast<size_t>(T)));
        for (auto& row : ends)
            for (double& v : row) v = logit(eng);
        double prev = -1e300;
        for (int k = 1; k <= T; ++k) {
            const BeamResult r = beam_decode(starts, table_lookup(ends), k, 5);
            CHECK(r.score >= prev);
            prev = r.score;
        }
        // Widths beyond the sequence length change nothing.
        const BeamResult at_T = beam_decode(starts, table_lookup(ends), T, 5);
        const BeamResult beyond = beam_decode(starts, table_lookup(ends), 5 * T, 5);
        CHECK(at_T.tok_start == beyond.tok_start);
        CHECK(at_T.tok_end == beyond.tok_end);
    }
}

TEST_CASE("start mass on position zero yields the empty span") {
    const std::vector<double> starts{5.0, 1.0, 0.5, 0.2};
    const std::vector<std::vector<double>> ends(4, std::vector<double>{9.0, 9.0, 9.0, 9.0});
    const BeamResult r = beam_decode(starts, table_lookup(ends), 1, 10);
    CHECK(r.tok_start == 0);
    CHECK(r.tok_end == 0);
    CHECK_FALSE(r.fallback);
}

TEST_CASE("the answer length cap restricts the end choice") {
    std::vector<double> starts{0.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<std::vector<double>> ends(6, std::vector<double>(6, 0.0));
    ends[1][5] = 100.0;  // far end, outside the cap
    ends[1][3] = 1.0;
    const BeamResult r = beam_decode(starts, table_lookup(ends), 1, 2);
    CHECK(r.tok_start == 1);
    CHECK(r.tok_end == 3);
}

TEST_CASE("score ties prefer the smaller start then the smaller end") {
    const std::vector<double> starts{-1.0, 2.0, 2.0};
    const std::vector<std::vector<double>> ends(3, std::vector<double>(3, 0.0));
    const BeamResult r = beam_decode(starts, table_lookup(ends), 3, 4);
    CHECK(r.tok_start == 1);
    CHECK(r.tok_end == 1);
}

TEST_CASE("degenerate inputs are rejected") {
    const std::vector<double> starts{1.0, 0.0};
    const std::vector<std::vector<double>> ends(2, std::vector<double>(2, 0.0));
    CHECK_THROWS_AS(beam_decode({}, table_lookup(ends), 1, 5), InputError);
    CHECK_THROWS_AS(beam_decode(starts, table_lookup(ends), 0, 5), ConfigError);
    CHECK_THROWS_AS(beam_decode(starts, table_lookup(ends), 1, -1), ConfigError);
    const auto short_ends = [](int) { return std::vector<double>{1.0}; };
    CHECK_THROWS_AS(beam_decode(starts, short_ends, 1, 5), InputError);
}
