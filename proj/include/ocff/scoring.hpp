#pragma once

#include "ocff/tensor.hpp"

namespace ocff {

/// Inference-time decision state, fitted on the training scores once
/// training is done: the normalizer and the flagging threshold.
struct Calibration {
    double train_max_distance = 0.0;
    double threshold = 0.0;
    double nu = 0.05;

    bool valid() const { return train_max_distance > 0.0; }
};

struct MetricTriple {
    double accuracy = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

/// Fit a Calibration on training distance scores: normalize by the maximum
/// training distance, then set the threshold at the (1-nu) quantile of the
/// resulting probabilities. All-zero scores are rejected as degenerate.
Calibration calibrate(const Vector& train_scores, double nu);

/// scores / train_max_distance. Not re-normalized per batch, so strong
/// outliers may exceed 1.
Vector to_probabilities(const Vector& scores, const Calibration& calib);

/// Ablation: normalize by the batch's own maximum instead of the training
/// one. Couples a sample's probability to its batch-mates; off by default.
Vector to_probabilities_batch_max(const Vector& scores);

/// flags[i] = 1 iff p[i] > threshold.
IntVector flag_outliers(const Vector& probabilities,
                        const Calibration& calib);

/// Mean of (flags == labels); labels code 1 = anomaly.
double accuracy(const IntVector& flags, const IntVector& labels);

/// Harmonic mean of precision and recall with anomaly (1) as the positive
/// class; 0 when there are no true or predicted positives at all.
double f1_score(const IntVector& flags, const IntVector& labels);

/// Probability that a random positive outscores a random negative, ties
/// counted 1/2 (the Mann-Whitney formulation). Requires both classes.
double auc(const Vector& scores, const IntVector& labels);

} // namespace ocff
