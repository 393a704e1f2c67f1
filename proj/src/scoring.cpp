#include "ocff/scoring.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace ocff {

namespace {

void check_equal_lengths(const char* op, Index a, Index b) {
    if (a != b)
        throw ShapeError(std::string(op) + ": length mismatch, " +
                         std::to_string(a) + " vs " + std::to_string(b));
}

void check_binary_labels(const char* op, const IntVector& labels) {
    for (Index i = 0; i < labels.size(); ++i)
        if (labels[i] != 0 && labels[i] != 1)
            throw DataError(std::string(op) +
                            ": labels must be 0 or 1, found " +
                            std::to_string(labels[i]));
}

} // namespace

Calibration calibrate(const Vector& train_scores, double nu) {
    if (train_scores.size() == 0)
        throw DataError("calibrate: empty score vector");
    if (!(nu > 0.0 && nu < 1.0))
        throw ConfigError("calibrate: nu must lie in (0,1), got " +
                          std::to_string(nu));
    const double max_distance = train_scores.maxCoeff();
    if (!(max_distance > 0.0))
        throw DataError("calibrate: degenerate calibration, all training "
                        "scores are zero");
    Calibration calib;
    calib.train_max_distance = max_distance;
    calib.nu = nu;
    calib.threshold = quantile(train_scores / max_distance, 1.0 - nu);
    return calib;
}

Vector to_probabilities(const Vector& scores, const Calibration& calib) {
    if (!calib.valid())
        throw ConfigError("to_probabilities: calibration is not fitted");
    return scores / calib.train_max_distance;
}

Vector to_probabilities_batch_max(const Vector& scores) {
    if (scores.size() == 0)
        throw DataError("to_probabilities_batch_max: empty score vector");
    const double max_score = scores.maxCoeff();
    if (!(max_score > 0.0))
        throw DataError("to_probabilities_batch_max: all scores are zero");
    return scores / max_score;
}

IntVector flag_outliers(const Vector& probabilities,
                        const Calibration& calib) {
    if (!calib.valid())
        throw ConfigError("flag_outliers: calibration is not fitted");
    return (probabilities.array() > calib.threshold).cast<int>();
}

double accuracy(const IntVector& flags, const IntVector& labels) {
    check_equal_lengths("accuracy", flags.size(), labels.size());
    if (flags.size() == 0)
        throw DataError("accuracy: empty input");
    Index hits = 0;
    for (Index i = 0; i < flags.size(); ++i)
        hits += (flags[i] == labels[i]);
    return double(hits) / double(flags.size());
}

double f1_score(const IntVector& flags, const IntVector& labels) {
    check_equal_lengths("f1_score", flags.size(), labels.size());
    check_binary_labels("f1_score", labels);
    Index tp = 0, fp = 0, fn = 0;
    for (Index i = 0; i < flags.size(); ++i) {
        const bool predicted = flags[i] != 0;
        const bool actual = labels[i] != 0;
        tp += (predicted && actual);
        fp += (predicted && !actual);
        fn += (!predicted && actual);
    }
    const Index denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * double(tp) / double(denom);
}

double auc(const Vector& scores, const IntVector& labels) {
    check_equal_lengths("auc", scores.size(), labels.size());
    check_binary_labels("auc", labels);
    const Index n = scores.size();
    Index n_pos = 0;
    for (Index i = 0; i < n; ++i)
        n_pos += labels[i];
    const Index n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("auc: undefined, labels contain a single class");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] < scores[b]; });

    // Sweep tie groups, counting pairs exactly as the pairwise definition
    // does: wins are positives strictly above a negative, ties split 1/2.
    std::int64_t wins = 0, ties = 0, negatives_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::int64_t pos_in_group = 0, neg_in_group = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? pos_in_group : neg_in_group)++;
            ++j;
        }
        wins += pos_in_group * negatives_below;
        ties += pos_in_group * neg_in_group;
        negatives_below += neg_in_group;
        i = j;
    }
    return (double(wins) + 0.5 * double(ties)) /
           (double(n_pos) * double(n_neg));
}

} // namespace ocff
