#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ocff/losses.hpp"
#include "ocff/rng.hpp"

using namespace ocff;

namespace {

Matrix random_matrix(SplitMix64& rng, Index rows, Index cols, double lo,
                     double hi) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = rng.uniform(lo, hi);
    return m;
}

LossSpec spec_of(LossKind kind, double c, double nu = 0.05) {
    LossSpec spec;
    spec.kind = kind;
    spec.c = c;
    spec.nu = nu;
    return spec;
}

// Sort-based quantile oracle, independent of ocff::quantile.
double quantile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

// Keeps SVDD evaluations away from the hinge kink where the subgradient
// convention would poison a finite-difference comparison.
bool clear_of_hinge(const Matrix& h, const LossState& state, double margin) {
    for (Index i = 0; i < h.rows(); ++i) {
        const double d =
            (h.row(i).transpose() - state.center).squaredNorm();
        if (std::abs(d - state.radius_sq) < margin)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("loss kind ids round-trip") {
    for (LossKind kind : kAllLossKinds)
        CHECK(loss_kind_from_id(loss_kind_id(kind)) == kind);
    CHECK_THROWS_AS(loss_kind_from_id("nope"), ConfigError);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(spec_of(LossKind::Goodness, 1.0, 0.0).validate(),
                    ConfigError);
    CHECK_THROWS_AS(spec_of(LossKind::Goodness, 1.0, 1.0).validate(),
                    ConfigError);
    CHECK_THROWS_AS(spec_of(LossKind::Svdd, -1.0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_of(LossKind::LsSvdd, 0.0).validate(), ConfigError);
    CHECK_NOTHROW(spec_of(LossKind::Goodness, -3.0).validate());
}

TEST_CASE("calibrate_state centers and spreads") {
    SUBCASE("identical rows give zero spread") {
        Matrix h(2, 3);
        h << 1, 2, 3, 1, 2, 3;
        const LossState st = calibrate_state(h, spec_of(LossKind::Svdd, 1.0));
        CHECK(st.center == (Vector(3) << 1, 2, 3).finished());
        CHECK(st.radius_sq == 0.0);
    }
    SUBCASE("two equidistant points") {
        Matrix h(2, 1);
        h << 0, 2;
        const LossState st = calibrate_state(h, spec_of(LossKind::Svdd, 1.0));
        CHECK(st.center[0] == 1.0);
        CHECK(st.radius_sq == 1.0);
    }
    SUBCASE("radius matches a sort-based quantile oracle") {
        Matrix h(100, 1);
        for (Index i = 0; i < 100; ++i)
            h(i, 0) = double(i + 1);
        const LossState st =
            calibrate_state(h, spec_of(LossKind::LsSvdd, 1.0, 0.05));
        std::vector<double> sq_dist;
        for (Index i = 0; i < 100; ++i)
            sq_dist.push_back((h(i, 0) - 50.5) * (h(i, 0) - 50.5));
        CHECK(st.radius_sq ==
              doctest::Approx(quantile_oracle(sq_dist, 0.95))
                  .epsilon(1e-12));
    }
    SUBCASE("non-radius kinds keep radius_sq at zero") {
        Matrix h(3, 2);
        h << 1, 2, 3, 4, 5, 6;
        CHECK(calibrate_state(h, spec_of(LossKind::Goodness, 2.0)).radius_sq ==
              0.0);
    }
    SUBCASE("empty batch") {
        CHECK_THROWS_AS(
            calibrate_state(Matrix(0, 2), spec_of(LossKind::Goodness, 2.0)),
            DataError);
    }
}

TEST_CASE("evaluate: goodness on zeros") {
    const Matrix h = Matrix::Zero(3, 2);
    const LossSpec spec = spec_of(LossKind::Goodness, 0.0);
    const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
    for (Index i = 0; i < 3; ++i)
        CHECK(eval.per_sample[i] == 0.5); // sigma(0)
    CHECK(eval.total == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("evaluate: goodness_adjusted zero row gives log 2") {
    const Matrix h = Matrix::Zero(1, 4);
    const LossSpec spec = spec_of(LossKind::GoodnessAdjusted, 0.0);
    const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
    CHECK(eval.per_sample[0] ==
          doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("evaluate: goodness sigmoid value against a long-double oracle") {
    Matrix h(1, 2);
    h << 1, 1;
    const LossSpec spec = spec_of(LossKind::Goodness, 0.0);
    const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
    const long double expected = 1.0L / (1.0L + std::exp(-2.0L));
    CHECK(eval.total == doctest::Approx(double(expected)).epsilon(1e-14));
    CHECK(eval.total == doctest::Approx(0.880797077977882).epsilon(1e-12));
}

TEST_CASE("evaluate: hb_svdd at its own center is flat zero") {
    Matrix h(1, 3);
    h << 4, -1, 2;
    const LossSpec spec = spec_of(LossKind::HbSvdd, 1.0);
    const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
    CHECK(eval.total == 0.0);
    CHECK(eval.grad_h.isZero(0.0));
}

TEST_CASE("evaluate: svdd with every sample inside the sphere") {
    Matrix h(4, 2);
    h << 1, 0, -1, 0, 0, 1, 0, -1;
    LossState state;
    state.center = Vector::Zero(2);
    state.radius_sq = 2.0; // all squared distances are 1
    const LossSpec spec = spec_of(LossKind::Svdd, 3.0);
    const LossEval eval = evaluate(h, spec, state);
    CHECK(eval.total == 2.0);
    CHECK(eval.grad_h.isZero(0.0));
    CHECK(eval.per_sample.isZero(0.0));
}

TEST_CASE("evaluate: ls_svdd hand-computed row formula") {
    Matrix h(2, 1);
    h << 0, 2;
    LossState state;
    state.center = Vector::Constant(1, 1.0);
    state.radius_sq = 1.0;
    const LossEval eval = evaluate(h, spec_of(LossKind::LsSvdd, 2.0), state);
    CHECK(eval.total == 1.0); // 1 + (2/2)((1-1)^2 + (1-1)^2)
}

TEST_CASE("evaluate rejects a state of the wrong width") {
    Matrix h(2, 3);
    h.setZero();
    LossState narrow;
    narrow.center = Vector::Zero(2);
    CHECK_THROWS_AS(evaluate(h, spec_of(LossKind::HbSvdd, 1.0), narrow),
                    ShapeError);
}

TEST_CASE("distance_scores ordering and hinge values") {
    SUBCASE("hb_svdd: the center scores zero") {
        Matrix h(3, 2);
        h << 1, 1, 3, 3, 2, 2; // center is (2,2) = row 2
        const LossSpec spec = spec_of(LossKind::HbSvdd, 1.0);
        CHECK(distance_scores(h, spec, calibrate_state(h, spec))[2] == 0.0);
    }
    SUBCASE("goodness is monotone in the squared norm") {
        Matrix h(2, 2);
        h << 1, 0, 2, 2;
        const LossSpec spec = spec_of(LossKind::Goodness, 2.0);
        const Vector scores =
            distance_scores(h, spec, calibrate_state(h, spec));
        CHECK(scores[0] < scores[1]);
    }
    SUBCASE("svdd hinge by hand: distances 0.5 and 2.0 vs radius 1") {
        Matrix h(2, 1);
        h << std::sqrt(0.5), std::sqrt(2.0);
        LossState state;
        state.center = Vector::Zero(1);
        state.radius_sq = 1.0;
        const Vector scores =
            distance_scores(h, spec_of(LossKind::Svdd, 1.0), state);
        CHECK(scores[0] == 0.0);
        CHECK(scores[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("per-sample ranges") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix h = random_matrix(rng, 6, 3, -2.0, 2.0);
        for (LossKind kind : kAllLossKinds) {
            const LossSpec spec = default_loss_spec(kind);
            const LossState state = calibrate_state(h, spec);
            const LossEval eval = evaluate(h, spec, state);
            if (kind == LossKind::Goodness)
                for (Index i = 0; i < 6; ++i) {
                    CHECK(eval.per_sample[i] > 0.0);
                    CHECK(eval.per_sample[i] < 1.0);
                }
            if (kind == LossKind::GoodnessAdjusted ||
                kind == LossKind::HbSvdd || kind == LossKind::LsSvdd)
                CHECK(eval.total >= 0.0);
            if (kind == LossKind::Svdd)
                CHECK(eval.total >= state.radius_sq);
            // total = sum of per-sample summands plus the shared R^2 term
            const double batch_term =
                loss_uses_radius(kind) ? state.radius_sq : 0.0;
            const double recombined = eval.per_sample.sum() + batch_term;
            CHECK(eval.total ==
                  doctest::Approx(recombined).epsilon(1e-10));
        }
    }
}

TEST_CASE("softplus is the integral of the sigmoid") {
    for (double z = -10.0; z <= 10.0; z += 0.125) {
        const double eps = 1e-6;
        const double derivative =
            (softplus(z + eps) - softplus(z - eps)) / (2.0 * eps);
        CHECK(derivative == doctest::Approx(sigmoid(z)).epsilon(1e-8));
    }
}

TEST_CASE("grad_check: all five kinds at random draws") {
    SplitMix64 rng(23);
    int done = 0;
    for (int trial = 0; done < 100; ++trial) {
        REQUIRE(trial < 1000);
        const LossKind kind = kAllLossKinds[trial % 5];
        const Index n = 2 + Index(rng.bounded(5));
        const Index q = 1 + Index(rng.bounded(4));
        const Matrix h = random_matrix(rng, n, q, -2.0, 2.0);
        LossSpec spec = default_loss_spec(kind);
        spec.c = rng.uniform(0.5, 3.0);
        const LossState state = calibrate_state(h, spec);
        if (kind == LossKind::Svdd && !clear_of_hinge(h, state, 1e-3))
            continue;
        CHECK(grad_check(spec, state, h, 1e-5) < 1e-5);
        ++done;
    }
}

TEST_CASE("grad_check: svdd with every hinge strictly active") {
    Matrix h(3, 2);
    h << 5, 5, -6, 4, 3, -7;
    LossState state;
    state.center = Vector::Zero(2);
    state.radius_sq = 1.0; // distances 50, 52, 58: far from the kink
    CHECK(grad_check(spec_of(LossKind::Svdd, 2.0), state, h, 1e-5) < 1e-5);
}

TEST_CASE("grad_check input validation") {
    const Matrix h = Matrix::Zero(2, 2);
    const LossSpec spec = default_loss_spec(LossKind::HbSvdd);
    CHECK_THROWS_AS(grad_check(spec, calibrate_state(h, spec), h, 0.0),
                    ConfigError);
}

TEST_CASE("goodness-family score order equals squared-norm order") {
    SplitMix64 rng(29);
    for (LossKind kind :
         {LossKind::Goodness, LossKind::GoodnessAdjusted}) {
        const Matrix h = random_matrix(rng, 12, 3, -3.0, 3.0);
        const LossSpec spec = default_loss_spec(kind);
        const Vector scores =
            distance_scores(h, spec, calibrate_state(h, spec));
        const Vector norms = row_sq_norms(h);
        for (Index i = 0; i < h.rows(); ++i)
            for (Index j = 0; j < h.rows(); ++j)
                if (norms[i] < norms[j])
                    CHECK(scores[i] < scores[j]);
    }
}
