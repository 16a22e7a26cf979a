#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "retiomics/models.hpp"

using namespace retiomics;
using namespace retiomics::models;

namespace {

Matrix make_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("logistic regression separates and satisfies its own optimality condition") {
    const Matrix X = make_matrix({{-2}, {-1}, {1}, {2}});
    const std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::LR;
    spec.lambda = 0.1;
    const TrainedModel model = train(X, y, spec);
    REQUIRE(model.weights.size() == 1);
    CHECK(model.weights[0] > 0.0);
    CHECK(model.score_row(std::vector<double>{2.0}) > model.score_row(std::vector<double>{-2.0}));

    // gradient of the penalized objective vanishes at the reported optimum
    std::vector<double> grad(1);
    double grad_b = 0.0;
    lr_gradient(X, y, model.weights, model.intercept, spec.lambda, grad, grad_b);
    CHECK(std::fabs(grad[0]) <= 1e-7);
    CHECK(std::fabs(grad_b) <= 1e-7);
}

TEST_CASE("stronger L2 shrinks logistic weights; intercept stays unpenalized") {
    const Matrix X = make_matrix({{-2}, {-1}, {1}, {2}});
    const std::vector<int> y = {0, 0, 1, 1};
    ModelSpec weak;
    weak.lambda = 0.01;
    ModelSpec strong;
    strong.lambda = 100.0;
    CHECK(std::fabs(train(X, y, strong).weights[0]) <
          std::fabs(train(X, y, weak).weights[0]));

    // symmetric data with an offset label balance: the intercept absorbs the
    // imbalance because it carries no penalty
    const Matrix Xb = make_matrix({{0}, {0}, {0}, {0}});
    const std::vector<int> yb = {1, 1, 1, 0};
    const TrainedModel mb = train(Xb, yb, strong);
    CHECK(mb.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-6));
}

TEST_CASE("class weights rebalance the logistic fit") {
    const Matrix X = make_matrix({{-1}, {-0.5}, {0.4}, {0.5}, {0.6}, {0.7}});
    const std::vector<int> y = {0, 0, 1, 1, 1, 1};
    ModelSpec spec;
    spec.lambda = 0.1;
    const std::vector<double> w = inverse_frequency_weights(y);
    CHECK(w[0] == doctest::Approx(6.0 / 4.0));
    CHECK(w[2] == doctest::Approx(6.0 / 8.0));
    const TrainedModel plain = train(X, y, spec);
    const TrainedModel weighted = train(X, y, spec, w);
    CHECK(plain.intercept != doctest::Approx(weighted.intercept).epsilon(1e-9));
}

TEST_CASE("LDA closed form on a hand-computed 1-D problem") {
    const Matrix X = make_matrix({{0}, {2}, {4}, {6}});
    const std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::LDA;
    spec.shrinkage = 0.0;
    const TrainedModel model = train(X, y, spec);
    // pooled (n-2) variance = 2, w = (5-1)/2 = 2, b = -w*3 + log(1) = -6
    REQUIRE(model.weights.size() == 1);
    CHECK(model.weights[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(model.intercept == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK(model.score_row(std::vector<double>{1.0}) == doctest::Approx(-4.0));
    CHECK(model.score_row(std::vector<double>{5.0}) == doctest::Approx(4.0));

    // shrinkage leaves a 1-D problem unchanged (trace/p equals the variance)
    ModelSpec shrunk = spec;
    shrunk.shrinkage = 0.5;
    CHECK(train(X, y, shrunk).weights[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("LDA on a singular covariance demands shrinkage") {
    // second coordinate is constant -> pooled covariance is singular
    const Matrix X = make_matrix({{0, 1}, {1, 1}, {4, 1}, {5, 1}});
    const std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::LDA;
    spec.shrinkage = 0.0;
    CHECK_THROWS_WITH_AS(train(X, y, spec), doctest::Contains("shrinkage"), DataError);
    spec.shrinkage = 0.5;
    const TrainedModel model = train(X, y, spec);
    CHECK(model.score_row(std::vector<double>{5, 1}) > model.score_row(std::vector<double>{0, 1}));
}

TEST_CASE("linear SVC recovers the max-margin separator") {
    const Matrix X = make_matrix({{-1}, {1}});
    const std::vector<int> y = {0, 1};
    ModelSpec spec;
    spec.kind = ModelKind::SvcLinear;
    spec.C = 10.0;
    const TrainedModel model = train(X, y, spec);
    REQUIRE(model.weights.size() == 1);
    CHECK(model.weights[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(model.intercept == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(svc_kkt_violation(model, X, y) <= spec.svc_tol);
    CHECK(svc_dual_balance(model) <= 1e-8);
}

TEST_CASE("rbf SVC solves XOR, which no linear model can") {
    const Matrix X = make_matrix({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
    const std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::SvcRbf;
    spec.C = 10.0;
    spec.gamma = 1.0;
    const TrainedModel model = train(X, y, spec);
    CHECK(model.score_row(std::vector<double>{0, 1}) > 0.0);
    CHECK(model.score_row(std::vector<double>{1, 0}) > 0.0);
    CHECK(model.score_row(std::vector<double>{0, 0}) < 0.0);
    CHECK(model.score_row(std::vector<double>{1, 1}) < 0.0);
    CHECK(svc_kkt_violation(model, X, y) <= spec.svc_tol);
    CHECK(svc_dual_balance(model) <= 1e-8);
    CHECK_FALSE(model.support_vectors.rows == 0);
}

TEST_CASE("random forest fits XOR and scores are leaf fractions") {
    Matrix X(40, 2);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        const double a = static_cast<double>(i % 2);
        const double b = static_cast<double>((i / 2) % 2);
        X(i, 0) = a + 0.01 * static_cast<double>(i);  // break exact ties
        X(i, 1) = b;
        y[i] = (a != b) ? 1 : 0;
    }
    ModelSpec spec;
    spec.kind = ModelKind::RF;
    spec.n_trees = 60;
    spec.seed = 5;
    const TrainedModel model = train(X, y, spec);
    CHECK(model.trees.size() == 60);
    const std::vector<double> scores = model.score(X);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(scores[i] >= 0.0);
        CHECK(scores[i] <= 1.0);
        if (y[i] == 1) {
            CHECK(scores[i] > 0.5);
        } else {
            CHECK(scores[i] < 0.5);
        }
    }

    // same seed -> identical forest; depth 0 -> a single root leaf
    const TrainedModel again = train(X, y, spec);
    CHECK(again.score(X) == scores);
    ModelSpec stump = spec;
    stump.max_depth = 0;
    const TrainedModel root = train(X, y, stump);
    for (double s : root.score(X)) CHECK(s == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("model JSON round trip preserves scores exactly") {
    const Matrix X = make_matrix({{-1, 2}, {0, 1}, {2, -1}, {3, 0}});
    const std::vector<int> y = {0, 0, 1, 1};
    const Matrix T = make_matrix({{0.5, 0.5}, {-2, 3}, {4, -2}});
    for (ModelKind kind :
         {ModelKind::LR, ModelKind::LDA, ModelKind::SvcLinear, ModelKind::SvcRbf, ModelKind::RF}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.shrinkage = 0.5;
        spec.gamma = 0.5;
        spec.n_trees = 10;
        spec.seed = 3;
        const TrainedModel model = train(X, y, spec);
        const TrainedModel back = model_from_json(model_to_json(model));
        CHECK(back.score(T) == model.score(T));
    }
}

TEST_CASE("spec serialization, naming, and regularization rank") {
    for (const std::string& name : {"LR", "LDA", "SVC-linear", "SVC-rbf", "RF"}) {
        CHECK(to_string(parse_model_kind(name)) == name);
    }
    CHECK_THROWS_AS(parse_model_kind("MLP"), UsageError);

    ModelSpec spec;
    spec.kind = ModelKind::SvcRbf;
    spec.C = 2.5;
    spec.gamma = 0.125;
    const ModelSpec back = spec_from_json(spec_to_json(spec));
    CHECK(back.kind == ModelKind::SvcRbf);
    CHECK(back.C == 2.5);
    CHECK(back.gamma == 0.125);
    CHECK(spec.describe().find("C=2.5") != std::string::npos);

    ModelSpec weak_lr, strong_lr;
    weak_lr.lambda = 0.01;
    strong_lr.lambda = 100.0;
    CHECK(strong_lr.regularization_rank() > weak_lr.regularization_rank());
    ModelSpec weak_svc, strong_svc;
    weak_svc.kind = strong_svc.kind = ModelKind::SvcLinear;
    weak_svc.C = 100.0;   // large C = weak regularization
    strong_svc.C = 0.1;
    CHECK(strong_svc.regularization_rank() > weak_svc.regularization_rank());
}

TEST_CASE("degenerate inputs are rejected") {
    const Matrix X = make_matrix({{1}, {2}});
    ModelSpec spec;
    const std::vector<int> one_class = {1, 1};
    CHECK_THROWS_AS(train(X, one_class, spec), DataError);
    const std::vector<int> bad_label = {0, 2};
    CHECK_THROWS_AS(train(X, bad_label, spec), DataError);
    ModelSpec bad;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

}  // TEST_SUITE
