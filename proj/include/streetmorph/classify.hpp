#ifndef STREETMORPH_CLASSIFY_HPP
#define STREETMORPH_CLASSIFY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "features.hpp"
#include "selection.hpp"

namespace streetmorph {

/// Regularized linear discriminant model: pooled covariance, per-class means
/// and priors. Deterministic, closed form.
struct ClassifierModel {
    Eigen::MatrixXd means;     // g x k
    Eigen::MatrixXd cov_inv;   // k x k
    Eigen::VectorXd log_prior; // g
    int classes = 0;

    int predict(const Eigen::RowVectorXd& x) const {
        int best = 0;
        double best_score = -1e300;
        for (int c = 0; c < classes; ++c) {
            Eigen::VectorXd mu = means.row(c).transpose();
            double score = x * cov_inv * mu - 0.5 * mu.dot(cov_inv * mu) + log_prior(c);
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        return best;
    }
};

inline ClassifierModel train_classifier(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const int g = select_detail::class_count(labels);
    const int k = static_cast<int>(X.cols());
    const auto n = X.rows();
    if (n != static_cast<Eigen::Index>(labels.size()))
        throw DimensionMismatch("train_classifier: rows and labels differ");

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(g);
    for (int l : labels) counts(l) += 1.0;
    for (int c = 0; c < g; ++c)
        if (counts(c) < k + 1)
            throw Error("train_classifier: class " + std::to_string(c) + " has fewer than " +
                        std::to_string(k + 1) + " samples");

    ClassifierModel m;
    m.classes = g;
    m.means = Eigen::MatrixXd::Zero(g, k);
    for (Eigen::Index r = 0; r < n; ++r) m.means.row(labels[r]) += X.row(r);
    for (int c = 0; c < g; ++c) m.means.row(c) /= counts(c);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::RowVectorXd d = X.row(r) - m.means.row(labels[r]);
        pooled += d.transpose() * d;
    }
    pooled /= double(n - g);
    double eps = 1e-6 * pooled.trace() / k;
    if (!(eps > 0)) eps = 1e-12;
    pooled += eps * Eigen::MatrixXd::Identity(k, k);
    m.cov_inv = pooled.llt().solve(Eigen::MatrixXd::Identity(k, k));

    m.log_prior = Eigen::VectorXd(g);
    for (int c = 0; c < g; ++c) m.log_prior(c) = std::log(counts(c) / double(n));
    return m;
}

/// Row-stochastic confusion matrix in percent, plus raw counts and the total
/// error rate in percent. Row = true class, column = predicted.
struct ConfusionMatrix {
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::vector<double>> percent;
    double total_error = 0.0;
    std::vector<std::string> class_names;

    void finalize() {
        const std::size_t g = counts.size();
        percent.assign(g, std::vector<double>(g, 0.0));
        std::int64_t total = 0, correct = 0;
        for (std::size_t r = 0; r < g; ++r) {
            std::int64_t row = 0;
            for (auto v : counts[r]) row += v;
            for (std::size_t c = 0; c < g; ++c)
                if (row > 0) percent[r][c] = 100.0 * double(counts[r][c]) / double(row);
            total += row;
            correct += counts[r][r];
        }
        total_error = total > 0 ? 100.0 * double(total - correct) / double(total) : 0.0;
    }
};

namespace classify_detail {

/// Deterministic Fisher-Yates so fold membership is stable across platforms.
inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
}

}  // namespace classify_detail

/// Stratified seeded K-fold cross-validation.
inline ConfusionMatrix cross_validate(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                      int folds, std::uint64_t seed,
                                      const std::vector<std::string>& class_names = {}) {
    if (folds < 2) throw Error("cross_validate: need at least 2 folds");
    const int g = select_detail::class_count(labels);
    std::vector<std::vector<std::size_t>> by_class(g);
    for (std::size_t r = 0; r < labels.size(); ++r) by_class[labels[r]].push_back(r);
    for (int c = 0; c < g; ++c)
        if (static_cast<int>(by_class[c].size()) < folds)
            throw Error("cross_validate: class " + std::to_string(c) +
                        " has fewer samples than folds");

    std::vector<int> fold_of(labels.size(), 0);
    std::mt19937_64 rng(seed);
    for (int c = 0; c < g; ++c) {
        classify_detail::shuffle_indices(by_class[c], rng);
        for (std::size_t i = 0; i < by_class[c].size(); ++i)
            fold_of[by_class[c][i]] = static_cast<int>(i % folds);
    }

    ConfusionMatrix cm;
    cm.counts.assign(g, std::vector<std::int64_t>(g, 0));
    cm.class_names = class_names;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t r = 0; r < labels.size(); ++r)
            (fold_of[r] == f ? test : train).push_back(r);
        Eigen::MatrixXd Xt(train.size(), X.cols());
        std::vector<int> yt(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            Xt.row(i) = X.row(train[i]);
            yt[i] = labels[train[i]];
        }
        ClassifierModel model = train_classifier(Xt, yt);
        for (std::size_t r : test) ++cm.counts[labels[r]][model.predict(X.row(r))];
    }
    cm.finalize();
    return cm;
}

// ---- text exports ----

inline void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
    const std::size_t g = cm.counts.size();
    auto name = [&](std::size_t c) {
        return c < cm.class_names.size() ? cm.class_names[c] : "class" + std::to_string(c);
    };
    out << "true_class";
    for (std::size_t c = 0; c < g; ++c) out << ',' << name(c);
    out << "\n";
    out << std::fixed << std::setprecision(2);
    for (std::size_t r = 0; r < g; ++r) {
        out << name(r);
        for (std::size_t c = 0; c < g; ++c) out << ',' << cm.percent[r][c];
        out << "\n";
    }
    out << "total_error," << cm.total_error << "\n";
}

inline void write_confusion_text(const ConfusionMatrix& cm, std::ostream& out) {
    const std::size_t g = cm.counts.size();
    auto name = [&](std::size_t c) {
        return c < cm.class_names.size() ? cm.class_names[c] : "class" + std::to_string(c);
    };
    out << std::left << std::setw(12) << "true\\pred";
    for (std::size_t c = 0; c < g; ++c) out << std::right << std::setw(12) << name(c);
    out << "\n" << std::fixed << std::setprecision(2);
    for (std::size_t r = 0; r < g; ++r) {
        out << std::left << std::setw(12) << name(r);
        for (std::size_t c = 0; c < g; ++c) out << std::right << std::setw(12) << cm.percent[r][c];
        out << "\n";
    }
    out << "total error: " << cm.total_error << "%\n";
}

inline void write_selection_trace_csv(const SelectionTrace& trace, std::ostream& out) {
    out << "step,feature,lambda,p_value,accepted\n";
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const auto& st = trace.steps[s];
        out << s + 1 << ',' << st.name << ',' << st.lambda << ',' << st.p_value << ','
            << (st.accepted ? 1 : 0) << "\n";
    }
}

inline void write_features_csv(
    const std::vector<std::pair<std::int32_t, FeatureVector>>& rows,
    const std::vector<std::string>& row_labels, std::ostream& out) {
    out << "component_id";
    for (const auto& n : FeatureVector::names()) out << ',' << n;
    if (!row_labels.empty()) out << ",label";
    out << "\n";
    std::ostringstream num;
    num << std::setprecision(17);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << rows[r].first;
        for (double v : rows[r].second.values()) {
            num.str("");
            num << v;
            out << ',' << num.str();
        }
        if (!row_labels.empty()) out << ',' << row_labels[r];
        out << "\n";
    }
}

}  // namespace streetmorph

#endif
