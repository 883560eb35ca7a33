#include <doctest.h>

#include <cmath>

#include "longipred/forecast.hpp"
#include "test_util.hpp"

using namespace longipred;
using testutil::NA;
using testutil::make_dataset;

namespace {

EnsembleModel intercept_model(double mu, Index p = 1, Index c = 0) {
    EnsembleModel model;
    model.pooled_intercept = mu;
    model.pooled_feature_coefs = Vector::Zero(p);
    model.pooled_covariate_coefs = Vector::Zero(c);
    for (Index j = 0; j < p; ++j) {
        model.mask.selected_features.push_back(j);
        model.feature_names.push_back("f" + std::to_string(j + 1));
    }
    for (Index j = 0; j < c; ++j) model.mask.selected_covariates.push_back(j);
    return model;
}

}  // namespace

TEST_CASE("an all-zero model predicts the intercept everywhere") {
    const auto ds = make_dataset({"f1"}, {},
                                 {{"k", 1, 35.0, {0.4}, {}},
                                  {"k", 2, 36.0, {1.4}, {}},
                                  {"k", 3, 37.0, {-0.4}, {}}});
    const auto fc = predict_subject(intercept_model(40.0), ds, 0);
    REQUIRE(fc.entries.size() == 3);
    for (const auto& e : fc.entries) {
        CHECK_FALSE(e.skipped);
        CHECK(e.y_hat_raw == doctest::Approx(40.0));
        CHECK_FALSE(e.y_hat_adjusted.has_value());
    }
}

TEST_CASE("rows missing a selected cell are skipped with a reason") {
    const auto ds = make_dataset({"f1", "f2"}, {"age"},
                                 {{"k", 1, 35.0, {0.4, 1.0}, {50.0}},
                                  {"k", 2, 36.0, {NA, 1.1}, {50.0}},
                                  {"k", 3, 37.0, {0.6, NA}, {50.0}}});
    EnsembleModel model = intercept_model(40.0, 2, 1);
    model.mask.selected_features = {0};  // only f1 in the model
    const auto fc = predict_subject(model, ds, 0);
    CHECK_FALSE(fc.entries[0].skipped);
    CHECK(fc.entries[1].skipped);
    CHECK(fc.entries[1].skip_reason == "incomplete-observation");
    CHECK_FALSE(fc.entries[2].skipped);  // f2 is not selected, so its hole is irrelevant
}

TEST_CASE("a subject with no complete rows yields an all-skipped forecast") {
    const auto ds = make_dataset({"f1"}, {},
                                 {{"k", 1, 35.0, {NA}, {}}, {"k", 2, 36.0, {NA}, {}}});
    const auto fc = predict_subject(intercept_model(40.0), ds, 0);
    for (const auto& e : fc.entries) CHECK(e.skipped);
}

TEST_CASE("fine-tuning reproduces the worked offset example") {
    // y_k1 = 50, yhat_k1 = 42, yhat_k2 = 45 -> adjusted second prediction 53.
    SubjectForecast fc;
    fc.subject_id = "k";
    fc.entries = {{1, 42.0, std::nullopt, std::nullopt, false, ""},
                  {2, 45.0, std::nullopt, std::nullopt, false, ""}};
    const auto tuned = fine_tune(fc, {1, 50.0});
    REQUIRE(tuned.tuned);
    CHECK(*tuned.tuning_time == 1);
    CHECK(*tuned.entries[0].y_hat_adjusted == doctest::Approx(42.0));  // t = 1 stays raw
    CHECK(*tuned.entries[1].y_hat_adjusted == doctest::Approx(53.0));
}

TEST_CASE("a perfect day-one prediction leaves everything unchanged") {
    SubjectForecast fc;
    fc.entries = {{1, 50.0, std::nullopt, std::nullopt, false, ""},
                  {2, 45.0, std::nullopt, std::nullopt, false, ""},
                  {3, 55.0, std::nullopt, std::nullopt, false, ""}};
    const auto tuned = fine_tune(fc, {1, 50.0});
    for (const auto& e : tuned.entries) CHECK(*e.y_hat_adjusted == doctest::Approx(e.y_hat_raw));
}

TEST_CASE("a singleton subject is adjusted only at its single time") {
    SubjectForecast fc;
    fc.entries = {{1, 44.0, std::nullopt, std::nullopt, false, ""}};
    const auto tuned = fine_tune(fc, {1, 47.0});
    REQUIRE(tuned.tuned);
    CHECK(*tuned.entries[0].y_hat_adjusted == doctest::Approx(44.0));
}

TEST_CASE("offset constancy and trend preservation hold exactly") {
    SubjectForecast fc;
    fc.entries = {{1, 40.0, std::nullopt, std::nullopt, false, ""},
                  {2, 44.0, std::nullopt, std::nullopt, false, ""},
                  {4, 39.0, std::nullopt, std::nullopt, false, ""},
                  {7, 51.0, std::nullopt, std::nullopt, false, ""}};
    const double y1 = 47.5;
    const auto tuned = fine_tune(fc, {1, y1});
    const double offset = y1 - 40.0;
    for (std::size_t i = 1; i < tuned.entries.size(); ++i) {
        const auto& e = tuned.entries[i];
        CHECK(*e.y_hat_adjusted - e.y_hat_raw == doctest::Approx(offset));
        // the hypothetical adjusted value at the tuning time has zero residual
        CHECK(y1 - (tuned.entries[0].y_hat_raw + offset) == doctest::Approx(0.0));
        for (std::size_t j = 1; j < i; ++j)
            CHECK(*e.y_hat_adjusted - *tuned.entries[j].y_hat_adjusted ==
                  doctest::Approx(e.y_hat_raw - tuned.entries[j].y_hat_raw));
    }
}

TEST_CASE("an unavailable day-one prediction leaves the forecast raw with a flag") {
    SubjectForecast fc;
    fc.entries = {{1, 0.0, std::nullopt, std::nullopt, true, "incomplete-observation"},
                  {2, 45.0, std::nullopt, std::nullopt, false, ""}};
    const auto tuned = fine_tune(fc, {1, 50.0});
    CHECK_FALSE(tuned.tuned);
    CHECK(tuned.tuning_note == "untuned: first-day-incomplete");
    for (const auto& e : tuned.entries) CHECK_FALSE(e.y_hat_adjusted.has_value());
}

TEST_CASE("forecast_dataset tunes from the earliest scored time with an outcome") {
    // Outcome missing at t=1, feature row incomplete at t=2; tuning must use t=3.
    const auto ds = make_dataset({"f1"}, {},
                                 {{"k", 1, NA, {0.5}, {}},
                                  {"k", 2, 30.0, {NA}, {}},
                                  {"k", 3, 33.0, {0.7}, {}},
                                  {"k", 4, 35.0, {0.9}, {}}});
    const auto forecasts = forecast_dataset(intercept_model(40.0), ds, true);
    REQUIRE(forecasts.size() == 1);
    const auto& fc = forecasts[0];
    REQUIRE(fc.tuned);
    CHECK(*fc.tuning_time == 3);
    // offset = 33 - 40 = -7
    CHECK(*fc.entries[2].y_hat_adjusted == doctest::Approx(40.0));
    CHECK(*fc.entries[3].y_hat_adjusted == doctest::Approx(33.0));
    // observed outcomes attached for reporting
    CHECK_FALSE(fc.entries[0].y_observed.has_value());
    CHECK(*fc.entries[1].y_observed == doctest::Approx(30.0));
}

TEST_CASE("clamping restricts reported predictions to the scale") {
    const auto ds = make_dataset({"f1"}, {},
                                 {{"k", 1, 150.0, {0.5}, {}}, {"k", 2, 20.0, {0.6}, {}}});
    EnsembleModel model = intercept_model(160.0);
    const auto raw = forecast_dataset(model, ds, false);
    CHECK(raw[0].entries[0].y_hat_raw == doctest::Approx(160.0));
    const auto clamped = forecast_dataset(model, ds, false, std::make_pair(25.0, 145.0));
    CHECK(clamped[0].entries[0].y_hat_raw == doctest::Approx(145.0));
}
