#include "ocff/data.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "ocff/rng.hpp"
#include "ocff/text.hpp"

namespace ocff {

Dataset load_banknote(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("load_banknote: cannot open '" + path + "'");

    std::vector<std::array<double, 4>> rows;
    std::vector<int> labels;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 5)
            throw DataError("load_banknote: line " + std::to_string(lineno) +
                            ": expected 5 comma-separated fields, got " +
                            std::to_string(fields.size()));
        const std::string where =
            "load_banknote: line " + std::to_string(lineno);
        std::array<double, 4> feature_row{};
        for (int j = 0; j < 4; ++j) {
            feature_row[static_cast<std::size_t>(j)] =
                parse_double_strict(fields[static_cast<std::size_t>(j)],
                                    where);
            if (!std::isfinite(feature_row[static_cast<std::size_t>(j)]))
                throw DataError(where + ": non-finite feature value");
        }
        const std::string label = trim(fields[4]);
        if (label != "0" && label != "1")
            throw DataError(where + ": label must be 0 or 1, got '" + label +
                            "'");
        rows.push_back(feature_row);
        labels.push_back(label == "1" ? 1 : 0);
    }
    if (rows.empty())
        throw DataError("load_banknote: '" + path + "' contains no data");

    Dataset ds;
    ds.features.resize(static_cast<Index>(rows.size()), 4);
    ds.labels.resize(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 4; ++j)
            ds.features(static_cast<Index>(i), j) =
                rows[i][static_cast<std::size_t>(j)];
        ds.labels[static_cast<Index>(i)] = labels[i];
    }
    return ds;
}

bool has_canonical_banknote_counts(const Dataset& ds) {
    return ds.size() == kBanknoteRows &&
           ds.positives() == kBanknotePositives;
}

Matrix Standardizer::apply(const Matrix& m) const {
    if (m.cols() != mean.size())
        throw ShapeError("standardize: matrix " +
                         detail::shape_of(m.rows(), m.cols()) +
                         " vs standardizer width " +
                         std::to_string(mean.size()));
    return (m.rowwise() - mean.transpose()).array().rowwise() /
           stddev.transpose().array();
}

void SplitFractions::validate() const {
    if (!(train > 0.0 && valid > 0.0 && test > 0.0))
        throw ConfigError("split fractions must all be positive");
    if (std::abs(train + valid + test - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1, got " +
                          full_precision(train + valid + test));
}

const char* one_class_mode_id(OneClassMode mode) {
    switch (mode) {
    case OneClassMode::Off: return "off";
    case OneClassMode::MoveToTest: return "move";
    case OneClassMode::Discard: return "discard";
    }
    throw ConfigError("one_class_mode_id: unknown mode");
}

OneClassMode one_class_mode_from_id(const std::string& id) {
    if (id == "off")
        return OneClassMode::Off;
    if (id == "move")
        return OneClassMode::MoveToTest;
    if (id == "discard")
        return OneClassMode::Discard;
    throw ConfigError("unknown one-class mode '" + id +
                      "' (expected off, move or discard)");
}

Splits make_splits(const Dataset& ds, SplitFractions fractions,
                   std::uint64_t split_seed, OneClassMode mode) {
    fractions.validate();
    if (ds.size() == 0)
        throw DataError("make_splits: empty dataset");
    if (ds.labels.size() != ds.size())
        throw ShapeError("make_splits: labels and features disagree");

    std::vector<Index> by_class[2];
    for (Index i = 0; i < ds.size(); ++i) {
        const int label = ds.labels[i];
        if (label != 0 && label != 1)
            throw DataError("make_splits: labels must be 0 or 1");
        by_class[label].push_back(i);
    }

    SplitMix64 rng(split_seed);
    shuffle(by_class[0], rng);
    shuffle(by_class[1], rng);

    Splits splits;
    for (const std::vector<Index>& pool : by_class) {
        const Index n = static_cast<Index>(pool.size());
        const Index n_train =
            static_cast<Index>(std::floor(fractions.train * double(n)));
        const Index n_valid =
            static_cast<Index>(std::floor(fractions.valid * double(n)));
        splits.train.insert(splits.train.end(), pool.begin(),
                            pool.begin() + n_train);
        splits.valid.insert(splits.valid.end(), pool.begin() + n_train,
                            pool.begin() + n_train + n_valid);
        splits.test.insert(splits.test.end(), pool.begin() + n_train + n_valid,
                           pool.end());
    }

    if (mode != OneClassMode::Off) {
        std::vector<Index> kept;
        kept.reserve(splits.train.size());
        for (Index i : splits.train) {
            if (ds.labels[i] == 1) {
                if (mode == OneClassMode::MoveToTest)
                    splits.test.push_back(i);
            } else {
                kept.push_back(i);
            }
        }
        splits.train = std::move(kept);
        if (splits.train.empty())
            throw DataError("make_splits: one-class filter left an empty "
                            "training split");
    }

    std::sort(splits.train.begin(), splits.train.end());
    std::sort(splits.valid.begin(), splits.valid.end());
    std::sort(splits.test.begin(), splits.test.end());

    const Matrix train_rows = gather_rows(ds.features, splits.train);
    splits.standardizer.mean = col_means(train_rows);
    const Matrix centered =
        train_rows.rowwise() - splits.standardizer.mean.transpose();
    splits.standardizer.stddev = centered.array()
                                     .square()
                                     .colwise()
                                     .mean()
                                     .sqrt()
                                     .matrix()
                                     .transpose()
                                     .cwiseMax(1e-12);
    return splits;
}

Matrix standardize(const Splits& splits, const Matrix& m) {
    return splits.standardizer.apply(m);
}

IntVector gather_labels(const IntVector& labels,
                        const std::vector<Index>& idx) {
    IntVector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= labels.size())
            throw ShapeError("gather_labels: index out of range");
        out[static_cast<Index>(i)] = labels[idx[i]];
    }
    return out;
}

void write_index_file(const std::string& path,
                      const std::vector<Index>& idx) {
    std::ofstream out(path);
    if (!out)
        throw DataError("write_index_file: cannot open '" + path + "'");
    for (Index i : idx)
        out << i << '\n';
}

} // namespace ocff
