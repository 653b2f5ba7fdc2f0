#ifndef STREETMORPH_SELECTION_HPP
#define STREETMORPH_SELECTION_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core.hpp"
#include "features.hpp"
#include "stats.hpp"

namespace streetmorph {

namespace select_detail {

inline int class_count(const std::vector<int>& labels) {
    int g = 0;
    for (int l : labels) g = std::max(g, l + 1);
    return g;
}

/// Within-class and total scatter matrices of the given feature columns.
inline void scatter(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                    const std::vector<int>& cols, Eigen::MatrixXd& W, Eigen::MatrixXd& T) {
    const auto n = X.rows();
    const int k = static_cast<int>(cols.size());
    const int g = class_count(labels);
    Eigen::MatrixXd sub(n, k);
    for (int c = 0; c < k; ++c) sub.col(c) = X.col(cols[c]);

    Eigen::RowVectorXd grand = sub.colwise().mean();
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(g, k);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(g);
    for (Eigen::Index r = 0; r < n; ++r) {
        means.row(labels[r]) += sub.row(r);
        counts(labels[r]) += 1.0;
    }
    for (int c = 0; c < g; ++c)
        if (counts(c) > 0) means.row(c) /= counts(c);

    W = Eigen::MatrixXd::Zero(k, k);
    T = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::RowVectorXd dw = sub.row(r) - means.row(labels[r]);
        Eigen::RowVectorXd dt = sub.row(r) - grand;
        W += dw.transpose() * dw;
        T += dt.transpose() * dt;
    }
}

inline std::string column_list(const std::vector<int>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(cols[i]);
    }
    return s;
}

}  // namespace select_detail

/// Wilks' Lambda det(W)/det(T) for the given feature columns (all columns when
/// cols is empty is not allowed; pass the full index list instead).
inline double wilks_lambda(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                           const std::vector<int>& cols) {
    const int g = select_detail::class_count(labels);
    const int k = static_cast<int>(cols.size());
    if (k == 0) throw Error("wilks_lambda: no feature columns");
    if (X.rows() != static_cast<Eigen::Index>(labels.size()))
        throw DimensionMismatch("wilks_lambda: rows and labels differ");
    if (X.rows() <= k + g) throw Error("wilks_lambda: too few samples for the feature count");

    Eigen::MatrixXd W, T;
    select_detail::scatter(X, labels, cols, W, T);
    Eigen::FullPivLU<Eigen::MatrixXd> luT(T), luW(W);
    if (!luT.isInvertible() || !luW.isInvertible())
        throw Error("wilks_lambda: singular scatter for features [" +
                    select_detail::column_list(cols) + "]");
    double lam = luW.determinant() / luT.determinant();
    return std::min(lam, 1.0);
}

inline double wilks_lambda(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    std::vector<int> cols(X.cols());
    for (int c = 0; c < X.cols(); ++c) cols[c] = c;
    return wilks_lambda(X, labels, cols);
}

struct SelectionStep {
    int feature = -1;
    std::string name;
    double lambda = 1.0;
    double p_value = 1.0;
    bool accepted = false;
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;     // accepted steps plus the stopping candidate
    std::vector<int> selected;            // accepted feature columns, in order
    std::vector<std::string> notes;       // skipped singular candidates etc.
};

/// Greedy forward selection on Wilks' Lambda with a partial-F stopping rule.
inline SelectionTrace stepwise_select(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                      double p_cutoff,
                                      const std::vector<std::string>& names = {}) {
    const int g = select_detail::class_count(labels);
    if (g < 2) throw Error("stepwise_select: need at least 2 classes");
    const int nfeat = static_cast<int>(X.cols());
    const auto n = static_cast<double>(X.rows());

    SelectionTrace trace;
    std::vector<char> used(nfeat, 0);
    double lambda_prev = 1.0;
    auto feature_name = [&](int c) {
        return c < static_cast<int>(names.size()) ? names[c] : "f" + std::to_string(c);
    };

    for (int step = 0; step < nfeat; ++step) {
        const int k = static_cast<int>(trace.selected.size());
        double dof2 = n - g - k;
        if (dof2 <= 0) break;
        int best = -1;
        double best_lambda = 2.0;
        for (int c = 0; c < nfeat; ++c) {
            if (used[c]) continue;
            std::vector<int> cols = trace.selected;
            cols.push_back(c);
            double lam;
            try {
                lam = wilks_lambda(X, labels, cols);
            } catch (const Error&) {
                trace.notes.push_back("skipped singular candidate " + feature_name(c));
                used[c] = 1;
                continue;
            }
            if (lam < best_lambda) {
                best_lambda = lam;
                best = c;
            }
        }
        if (best < 0) break;

        double f = best_lambda > 0 ? (lambda_prev / best_lambda - 1.0) * dof2 / (g - 1.0)
                                   : 1e300;
        double p = f_tail(f, g - 1.0, dof2);
        SelectionStep s{best, feature_name(best), best_lambda, p, p <= p_cutoff};
        trace.steps.push_back(s);
        if (!s.accepted) break;
        trace.selected.push_back(best);
        used[best] = 1;
        lambda_prev = best_lambda;
    }
    return trace;
}

}  // namespace streetmorph

#endif
