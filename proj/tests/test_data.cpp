#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ocff/data.hpp"

using namespace ocff;

namespace {

const std::string kFixture =
    std::string(OCFF_SOURCE_DIR) + "/data/banknote_synthetic.csv";

std::filesystem::path write_temp(const char* name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

} // namespace

TEST_CASE("fixture has the canonical row and class counts") {
    const Dataset ds = load_banknote(kFixture);
    CHECK(ds.size() == 1372);
    CHECK(ds.positives() == 610);
    CHECK(has_canonical_banknote_counts(ds));
    CHECK(ds.features.cols() == 4);
    CHECK(ds.features.allFinite());
}

TEST_CASE("loader parses the published first row format") {
    const auto path = write_temp("ocff_first_row.csv",
                                 "3.6216,8.6661,-2.8073,-0.44699,0\n");
    const Dataset ds = load_banknote(path.string());
    REQUIRE(ds.size() == 1);
    CHECK(ds.features(0, 0) == 3.6216);
    CHECK(ds.features(0, 1) == 8.6661);
    CHECK(ds.features(0, 2) == -2.8073);
    CHECK(ds.features(0, 3) == -0.44699);
    CHECK(ds.labels[0] == 0);
    std::filesystem::remove(path);
}

TEST_CASE("loader rejects bad inputs with line numbers") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_banknote("/no/such/file.csv"), DataError);
    }
    SUBCASE("empty file") {
        const auto path = write_temp("ocff_empty.csv", "");
        CHECK_THROWS_AS(load_banknote(path.string()), DataError);
        std::filesystem::remove(path);
    }
    SUBCASE("wrong column count") {
        const auto path = write_temp("ocff_cols.csv", "1,2,3,0\n");
        try {
            load_banknote(path.string());
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("line 1") != std::string::npos);
        }
        std::filesystem::remove(path);
    }
    SUBCASE("unparseable number names its line") {
        const auto path = write_temp(
            "ocff_badnum.csv", "1,2,3,4,0\n1,zap,3,4,1\n");
        try {
            load_banknote(path.string());
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        std::filesystem::remove(path);
    }
    SUBCASE("label outside {0,1}") {
        const auto path = write_temp("ocff_badlabel.csv", "1,2,3,4,2\n");
        CHECK_THROWS_AS(load_banknote(path.string()), DataError);
        std::filesystem::remove(path);
    }
}

TEST_CASE("make_splits: determinism, disjointness, coverage") {
    const Dataset ds = load_banknote(kFixture);
    const Splits a = make_splits(ds, {}, 0, false);
    const Splits b = make_splits(ds, {}, 0, false);
    CHECK(a.train == b.train);
    CHECK(a.valid == b.valid);
    CHECK(a.test == b.test);

    const Splits c = make_splits(ds, {}, 1, false);
    CHECK(a.train != c.train); // a different split seed reshuffles

    std::set<Index> seen;
    for (const auto* part : {&a.train, &a.valid, &a.test})
        for (Index i : *part) {
            CHECK(seen.insert(i).second); // no index in two splits
            CHECK(i >= 0);
            CHECK(i < ds.size());
        }
    CHECK(seen.size() ==
          a.train.size() + a.valid.size() + a.test.size());
    CHECK(seen.size() <= static_cast<std::size_t>(ds.size()));
}

TEST_CASE("make_splits is stratified") {
    const Dataset ds = load_banknote(kFixture);
    const Splits s = make_splits(ds, {}, 0, false);
    Index train_pos = 0;
    for (Index i : s.train)
        train_pos += ds.labels[i];
    // floor(0.6 * n) per class: 457 genuine, 366 counterfeit
    CHECK(train_pos == 366);
    CHECK(static_cast<Index>(s.train.size()) == 823);
}

TEST_CASE("one-class mode removes counterfeits from training") {
    const Dataset ds = load_banknote(kFixture);
    const Splits s = make_splits(ds, {}, 0, true);
    for (Index i : s.train)
        CHECK(ds.labels[i] == 0);
    CHECK(static_cast<Index>(s.train.size()) <= 762);

    // the displaced counterfeits all land in test
    const Splits plain = make_splits(ds, {}, 0, false);
    CHECK(s.test.size() == plain.test.size() + 366);
    CHECK(s.valid == plain.valid);
}

TEST_CASE("discard mode drops train counterfeits and keeps test stratified") {
    const Dataset ds = load_banknote(kFixture);
    const Splits s = make_splits(ds, {}, 0, OneClassMode::Discard);
    const Splits plain = make_splits(ds, {}, 0, false);
    for (Index i : s.train)
        CHECK(ds.labels[i] == 0);
    CHECK(s.test == plain.test);   // test composition untouched
    CHECK(s.valid == plain.valid);
    CHECK(s.train.size() + 366 == plain.train.size());

    CHECK(one_class_mode_from_id("discard") == OneClassMode::Discard);
    CHECK(std::string(one_class_mode_id(OneClassMode::MoveToTest)) ==
          "move");
    CHECK_THROWS_AS(one_class_mode_from_id("sideways"), ConfigError);
}

TEST_CASE("fraction validation") {
    const Dataset ds = load_banknote(kFixture);
    SplitFractions bad;
    bad.train = 0.5;
    bad.valid = 0.2;
    bad.test = 0.2;
    CHECK_THROWS_AS(make_splits(ds, bad, 0, false), ConfigError);
    bad.test = -0.1;
    CHECK_THROWS_AS(make_splits(ds, bad, 0, false), ConfigError);
}

TEST_CASE("standardize uses train statistics only") {
    const Dataset ds = load_banknote(kFixture);
    const Splits s = make_splits(ds, {}, 0, false);

    const Matrix train = standardize(s, gather_rows(ds.features, s.train));
    const Vector means = col_means(train);
    for (Index j = 0; j < 4; ++j) {
        CHECK(std::abs(means[j]) < 1e-9);
        const double var =
            (train.col(j).array() - means[j]).square().mean();
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }

    const Matrix test = standardize(s, gather_rows(ds.features, s.test));
    // no leakage: the test rows are not mean-zero under train statistics
    CHECK(col_means(test).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("constant columns standardize to zero") {
    Dataset ds;
    ds.features = Matrix::Zero(10, 4);
    ds.features.col(1).setConstant(7.5);
    ds.features.col(2).setLinSpaced(10, 0.0, 9.0);
    ds.features.col(3).setLinSpaced(10, -4.0, 4.0);
    ds.labels = IntVector::Zero(10);
    for (Index i = 5; i < 10; ++i)
        ds.labels[i] = 1;
    const Splits s = make_splits(ds, {}, 0, false);
    const Matrix out = standardize(s, gather_rows(ds.features, s.train));
    CHECK(out.col(0).isZero(0.0));
    CHECK(out.col(1).isZero(0.0));
}

TEST_CASE("index files are one index per line") {
    const auto path =
        std::filesystem::temp_directory_path() / "ocff_indices.idx";
    write_index_file(path.string(), {3, 1, 4});
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "3\n1\n4\n");
    std::filesystem::remove(path);
}
