#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocff/tensor.hpp"

namespace ocff {

/// The banknote-authentication table: four wavelet-image features per
/// sample (variance, skewness, kurtosis, entropy) plus a binary label,
/// 1 = counterfeit.
struct Dataset {
    Matrix features;
    IntVector labels;

    Index size() const { return features.rows(); }
    Index positives() const {
        Index count = 0;
        for (Index i = 0; i < labels.size(); ++i)
            count += labels[i];
        return count;
    }
};

/// Row and class counts of the published file.
constexpr Index kBanknoteRows = 1372;
constexpr Index kBanknotePositives = 610;

/// Parse a headerless CSV of 4 float features + {0,1} label per row.
/// Malformed rows are rejected with their line number.
Dataset load_banknote(const std::string& path);

bool has_canonical_banknote_counts(const Dataset& ds);

/// Per-feature affine map fitted on training rows; population std, floored
/// at 1e-12 so constant columns map to zero.
struct Standardizer {
    Vector mean;
    Vector stddev;

    Matrix apply(const Matrix& m) const;
};

struct SplitFractions {
    double train = 0.6;
    double valid = 0.2;
    double test = 0.2;

    void validate() const;
};

/// Disjoint index sets over a dataset plus the train-fitted standardizer.
/// The union may cover less than the dataset (see OneClassMode::Discard).
struct Splits {
    std::vector<Index> train;
    std::vector<Index> valid;
    std::vector<Index> test;
    Standardizer standardizer;
};

/// What happens to counterfeit rows that land in the training split.
///   Off      - keep them; training sees both classes.
///   MoveToTest - remove them from train and append them to test.
///   Discard  - remove them from train and drop them entirely, leaving the
///              test split stratified like the full dataset.
enum class OneClassMode { Off, MoveToTest, Discard };

const char* one_class_mode_id(OneClassMode mode);
OneClassMode one_class_mode_from_id(const std::string& id);

/// Deterministic stratified split driven by split_seed alone; the model
/// seeds never touch it. Under MoveToTest/Discard training sees only
/// genuine notes; valid is never filtered. Index lists come out sorted
/// ascending.
Splits make_splits(const Dataset& ds, SplitFractions fractions,
                   std::uint64_t split_seed, OneClassMode mode);

inline Splits make_splits(const Dataset& ds, SplitFractions fractions,
                          std::uint64_t split_seed, bool oneclass) {
    return make_splits(ds, fractions, split_seed,
                       oneclass ? OneClassMode::MoveToTest
                                : OneClassMode::Off);
}

/// Apply the split's train-fitted standardizer to any matrix of the same
/// width.
Matrix standardize(const Splits& splits, const Matrix& m);

IntVector gather_labels(const IntVector& labels,
                        const std::vector<Index>& idx);

/// One index per line; auditing artifact for split reproducibility.
void write_index_file(const std::string& path, const std::vector<Index>& idx);

} // namespace ocff
