#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "streetmorph/classify.hpp"
#include "streetmorph/detect.hpp"
#include "streetmorph/scene_gen.hpp"
#include "streetmorph/selection.hpp"
#include "streetmorph/stats.hpp"
#include "test_support.hpp"

using namespace streetmorph;

namespace {

/// Hand formula for the one-feature case: lambda = SSW / SST.
double lambda_1d(const std::vector<double>& x, const std::vector<int>& y, int g) {
    std::vector<double> mean(g, 0.0), cnt(g, 0.0);
    double grand = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean[y[i]] += x[i];
        cnt[y[i]] += 1;
        grand += x[i];
    }
    grand /= double(x.size());
    for (int c = 0; c < g; ++c) mean[c] /= cnt[c];
    double ssw = 0, sst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ssw += (x[i] - mean[y[i]]) * (x[i] - mean[y[i]]);
        sst += (x[i] - grand) * (x[i] - grand);
    }
    return ssw / sst;
}

Eigen::MatrixXd gaussian_blobs(std::mt19937& rng, std::vector<int>& labels, int per_class,
                               int classes, int dims, double sep) {
    std::normal_distribution<double> gd(0.0, 1.0);
    Eigen::MatrixXd X(per_class * classes, dims);
    labels.assign(per_class * classes, 0);
    for (int c = 0; c < classes; ++c)
        for (int i = 0; i < per_class; ++i) {
            int r = c * per_class + i;
            labels[r] = c;
            for (int d = 0; d < dims; ++d)
                X(r, d) = gd(rng) + (d == c % dims ? sep * (c + 1) : 0.0);
        }
    return X;
}

}  // namespace

TEST_CASE("incomplete beta identities and F quantiles") {
    for (double x : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        CHECK_THAT(incomplete_beta(1, 1, x), Catch::Matchers::WithinAbs(x, 1e-12));
        CHECK_THAT(incomplete_beta(1, 4, x),
                   Catch::Matchers::WithinAbs(1.0 - std::pow(1.0 - x, 4.0), 1e-12));
        CHECK_THAT(incomplete_beta(2.5, 3.5, x),
                   Catch::Matchers::WithinAbs(1.0 - incomplete_beta(3.5, 2.5, 1.0 - x), 1e-12));
    }
    // tabulated F quantiles
    CHECK_THAT(f_cdf(4.9646, 1, 10), Catch::Matchers::WithinAbs(0.95, 1e-3));
    CHECK_THAT(f_cdf(3.3258, 5, 10), Catch::Matchers::WithinAbs(0.95, 1e-3));
    CHECK_THAT(f_cdf(4.938, 3, 20), Catch::Matchers::WithinAbs(0.99, 1e-3));
    CHECK_THAT(f_tail(4.9646, 1, 10), Catch::Matchers::WithinAbs(0.05, 1e-3));
    CHECK(f_tail(0.0, 3, 10) == 1.0);
}

TEST_CASE("extract_features: constant component and mode rules") {
    Raster h = smtest::make_raster(4, 4, 1.5);
    Raster a = smtest::make_raster(4, 4, 3.0);
    CameraFrame frame = h.frame;  // resolution 20
    std::vector<std::size_t> px = {0, 1, 2, 3};
    FeatureVector f = extract_features(px, h, a, frame);
    CHECK(f.height_mean == 1.5);
    CHECK(f.height_std == 0.0);
    CHECK(f.height_max == 1.5);
    CHECK(f.height_min == 1.5);
    CHECK(f.height_mode == 1.5);
    CHECK(f.acc_mean == 3.0);
    CHECK(f.acc_mode == 3.0);
    CHECK_THAT(f.surface, Catch::Matchers::WithinAbs(0.01, 1e-12));

    h.values[0] = 1.0;
    h.values[1] = 1.0;
    h.values[2] = 1.0;
    h.values[3] = 3.0;
    FeatureVector f2 = extract_features(px, h, a, frame);
    CHECK(f2.height_mode == 1.0);
    CHECK(f2.height_min <= f2.height_mode);
    CHECK(f2.height_mode <= f2.height_max);

    CHECK_THROWS_AS(extract_features({}, h, a, frame), Error);
}

TEST_CASE("car component surface close to the true footprint") {
    SceneSpec spec;
    spec.length = 14;
    spec.width = 9;
    spec.facade_height = 0;
    spec.seed = 19;
    spec.instances = {SceneSpec::car(7, 4.5)};
    GeneratedScene scene = generate_scene(spec);
    CameraFrame frame = fit_frame(scene.cloud, 20.0);
    Projection pr = project(scene.cloud, frame);
    Raster filled = fill_gaps(link_regions(pr.range, Connectivity::Square8), Connectivity::Square8);
    GroundMask gm = segment_ground(filled, 1.0, Connectivity::Cross4);
    ArtifactMap m = filter_small(
        separate_components(detect_artifacts(gm, 0.10), 25, 0.10), pr.accumulation, 10, 3);
    auto feats = extract_component_features(m.components, m.heights, pr.accumulation);
    REQUIRE(feats.size() == 1);
    CHECK_THAT(feats[0].second.surface, Catch::Matchers::WithinRel(4.2 * 1.8, 0.10));
    CHECK(feats[0].second.height_max > 1.4);
    CHECK(feats[0].second.surface > 0.0);
}

TEST_CASE("wilks lambda: noise near 1, strong separation near 0, 1D oracle") {
    std::mt19937 rng(101);
    std::normal_distribution<double> gd(0.0, 1.0);
    const int n = 500;
    std::vector<int> labels(n);
    std::vector<double> noise(n), sep(n);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int i = 0; i < n; ++i) {
        labels[i] = lab(rng);
        noise[i] = gd(rng);
        sep[i] = gd(rng) + 10.0 * labels[i];
    }
    Eigen::MatrixXd Xn(n, 1), Xs(n, 1);
    for (int i = 0; i < n; ++i) {
        Xn(i, 0) = noise[i];
        Xs(i, 0) = sep[i];
    }
    double ln = wilks_lambda(Xn, labels);
    CHECK(ln > 0.9);
    CHECK_THAT(ln, Catch::Matchers::WithinAbs(lambda_1d(noise, labels, 4), 1e-12));
    double ls = wilks_lambda(Xs, labels);
    CHECK(ls < 0.05);
    CHECK_THAT(ls, Catch::Matchers::WithinAbs(lambda_1d(sep, labels, 4), 1e-12));
}

TEST_CASE("wilks lambda: collinear feature raises a singular-scatter error") {
    std::mt19937 rng(102);
    std::vector<int> labels;
    Eigen::MatrixXd X = gaussian_blobs(rng, labels, 50, 3, 3, 2.0);
    Eigen::MatrixXd dup(X.rows(), 4);
    dup << X, X.col(1);
    CHECK_THROWS_WITH(wilks_lambda(dup, labels),
                      Catch::Matchers::ContainsSubstring("singular"));
}

TEST_CASE("wilks lambda: affine invariance and monotonicity") {
    std::mt19937 rng(103);
    std::vector<int> labels;
    Eigen::MatrixXd X = gaussian_blobs(rng, labels, 80, 4, 5, 1.5);
    std::vector<int> all = {0, 1, 2, 3, 4};
    double base = wilks_lambda(X, labels, all);

    Eigen::MatrixXd scaled = X;
    double factors[5] = {3.0, 0.01, 250.0, 1.0, 7.5};
    for (int c = 0; c < 5; ++c) scaled.col(c) *= factors[c];
    CHECK_THAT(wilks_lambda(scaled, labels, all), Catch::Matchers::WithinAbs(base, 1e-9));

    std::vector<int> permuted = {4, 2, 0, 3, 1};
    CHECK_THAT(wilks_lambda(X, labels, permuted), Catch::Matchers::WithinAbs(base, 1e-9));

    // adding any feature never increases lambda
    std::vector<int> cols = {2};
    double prev = wilks_lambda(X, labels, cols);
    for (int c : {0, 4, 1, 3}) {
        cols.push_back(c);
        double cur = wilks_lambda(X, labels, cols);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("stepwise selection picks the dominant feature first") {
    std::mt19937 rng(104);
    std::normal_distribution<double> gd(0.0, 1.0);
    const int n = 400;
    std::vector<int> labels(n);
    Eigen::MatrixXd X(n, 6);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int i = 0; i < n; ++i) {
        labels[i] = lab(rng);
        for (int d = 0; d < 6; ++d) X(i, d) = gd(rng);
        X(i, 2) += 6.0 * labels[i];  // only feature 2 is informative
    }
    // oracle: exhaustive single-feature lambda
    int oracle = 0;
    double best = 2.0;
    for (int c = 0; c < 6; ++c) {
        double lam = wilks_lambda(X, labels, {c});
        if (lam < best) {
            best = lam;
            oracle = c;
        }
    }
    REQUIRE(oracle == 2);
    SelectionTrace t = stepwise_select(X, labels, 0.01);
    REQUIRE_FALSE(t.selected.empty());
    CHECK(t.selected[0] == 2);
    // lambda strictly decreasing over accepted steps
    double prev = 1.0;
    for (const auto& s : t.steps) {
        if (!s.accepted) continue;
        CHECK(s.lambda < prev);
        prev = s.lambda;
    }
    // selected = accepted prefix
    for (std::size_t i = 0; i < t.selected.size(); ++i) {
        CHECK(t.steps[i].accepted);
        CHECK(t.steps[i].feature == t.selected[i]);
    }

    // cutoff 0 admits a feature only when its p-value is exactly zero
    SelectionTrace none = stepwise_select(X, labels, 0.0);
    for (std::size_t i = 0; i < none.selected.size(); ++i) CHECK(none.steps[i].p_value == 0.0);
}

TEST_CASE("train_classifier: symmetric boundary and separable accuracy") {
    std::mt19937 rng(105);
    std::normal_distribution<double> gd(0.0, 1.0);
    const int per = 400;
    Eigen::MatrixXd X(2 * per, 1);
    std::vector<int> y(2 * per);
    for (int i = 0; i < per; ++i) {
        X(i, 0) = gd(rng) - 10.0;
        y[i] = 0;
        X(per + i, 0) = gd(rng) + 10.0;
        y[per + i] = 1;
    }
    ClassifierModel m = train_classifier(X, y);
    double boundary = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.001) {
        Eigen::RowVectorXd v(1);
        v << x;
        if (m.predict(v) == 1) {
            boundary = x;
            break;
        }
    }
    CHECK(std::abs(boundary) <= 0.1);

    std::vector<int> labels;
    Eigen::MatrixXd blobs = gaussian_blobs(rng, labels, 60, 4, 4, 10.0);
    ClassifierModel m4 = train_classifier(blobs, labels);
    for (Eigen::Index r = 0; r < blobs.rows(); ++r)
        REQUIRE(m4.predict(blobs.row(r)) == labels[r]);
}

TEST_CASE("classifier is deterministic and order invariant") {
    std::mt19937 rng(106);
    std::vector<int> labels;
    Eigen::MatrixXd X = gaussian_blobs(rng, labels, 50, 3, 4, 3.0);
    ClassifierModel a = train_classifier(X, labels);

    // shuffled storage order
    std::vector<std::size_t> order(X.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd Xs(X.rows(), X.cols());
    std::vector<int> ls(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        Xs.row(i) = X.row(order[i]);
        ls[i] = labels[order[i]];
    }
    ClassifierModel b = train_classifier(Xs, ls);
    std::normal_distribution<double> gd(0.0, 4.0);
    for (int t = 0; t < 200; ++t) {
        Eigen::RowVectorXd v(4);
        for (int d = 0; d < 4; ++d) v(d) = gd(rng);
        REQUIRE(a.predict(v) == b.predict(v));
    }

    // duplicated training point classifies like the original
    Eigen::MatrixXd Xd(X.rows() + 1, X.cols());
    Xd << X, X.row(7);
    std::vector<int> ld = labels;
    ld.push_back(labels[7]);
    ClassifierModel c = train_classifier(Xd, ld);
    CHECK(c.predict(X.row(7)) == a.predict(X.row(7)));
}

TEST_CASE("cross_validate: separable data, row sums, error identity") {
    std::mt19937 rng(107);
    std::vector<int> labels;
    Eigen::MatrixXd X = gaussian_blobs(rng, labels, 60, 4, 4, 10.0);
    ConfusionMatrix cm = cross_validate(X, labels, 10, 42,
                                        {"Car", "Lamppost", "Pedestrian", "Rest"});
    for (int c = 0; c < 4; ++c) {
        double row = 0;
        for (int p = 0; p < 4; ++p) row += cm.percent[c][p];
        CHECK_THAT(row, Catch::Matchers::WithinAbs(100.0, 0.01));
        CHECK_THAT(cm.percent[c][c], Catch::Matchers::WithinAbs(100.0, 1e-9));
    }
    CHECK(cm.total_error == 0.0);

    // total error equals 100 - sum(diagonal * prior)
    std::vector<int> labels2;
    Eigen::MatrixXd X2 = gaussian_blobs(rng, labels2, 80, 4, 3, 1.0);
    ConfusionMatrix cm2 = cross_validate(X2, labels2, 10, 42);
    double acc = 0;
    std::int64_t total = 0;
    for (int c = 0; c < 4; ++c) {
        std::int64_t row = 0;
        for (int p = 0; p < 4; ++p) row += cm2.counts[c][p];
        total += row;
        acc += cm2.percent[c][c] * double(row);
    }
    CHECK_THAT(cm2.total_error, Catch::Matchers::WithinAbs(100.0 - acc / double(total), 0.01));
}

TEST_CASE("cross_validate: random labels hover at chance level") {
    std::mt19937 rng(108);
    std::normal_distribution<double> gd(0.0, 1.0);
    const int n = 400;
    double diag_sum = 0;
    int diag_n = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Eigen::MatrixXd X(n, 3);
        std::vector<int> labels(n);
        for (int i = 0; i < n; ++i) {
            labels[i] = i % 4;  // balanced
            for (int d = 0; d < 3; ++d) X(i, d) = gd(rng);
        }
        ConfusionMatrix cm = cross_validate(X, labels, 10, seed);
        for (int c = 0; c < 4; ++c) {
            diag_sum += cm.percent[c][c];
            ++diag_n;
        }
    }
    CHECK_THAT(diag_sum / diag_n, Catch::Matchers::WithinAbs(25.0, 5.0));
}

TEST_CASE("cross_validate rejects classes smaller than the fold count") {
    Eigen::MatrixXd X(12, 1);
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) {
        X(i, 0) = i;
        labels[i] = i < 5 ? 0 : 1;
    }
    CHECK_THROWS_AS(cross_validate(X, labels, 10, 1), Error);
}

TEST_CASE("confusion and trace exports are well formed") {
    std::mt19937 rng(109);
    std::vector<int> labels;
    Eigen::MatrixXd X = gaussian_blobs(rng, labels, 60, 4, 4, 6.0);
    ConfusionMatrix cm = cross_validate(X, labels, 5, 7, {"Car", "Lamppost", "Pedestrian", "Rest"});
    std::ostringstream csv;
    write_confusion_csv(cm, csv);
    CHECK(csv.str().find("true_class,Car,Lamppost,Pedestrian,Rest") == 0);
    CHECK(csv.str().find("total_error,") != std::string::npos);

    SelectionTrace t = stepwise_select(X, labels, 0.01);
    std::ostringstream tcsv;
    write_selection_trace_csv(t, tcsv);
    CHECK(tcsv.str().rfind("step,feature,lambda,p_value,accepted", 0) == 0);
}
