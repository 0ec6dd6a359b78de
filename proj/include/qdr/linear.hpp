// Logistic regression (deterministic Newton solver, L2 on coefficients with
// inverse regularization C, intercept unpenalized) and the constant-prior
// dummy baseline.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qdr/common.hpp"
#include "qdr/dataset.hpp"
#include "qdr/gbdt.hpp"  // detail::sigmoid / log1p_exp

namespace qdr {

struct logistic_model {
    std::vector<double> coefficients;
    double intercept = 0.0;
    double inverse_regularization = 1.0;
    int iterations_used = 0;
    double final_gradient_norm = 0.0;
};

// Minimizes sum_i w_i [ln(1+e^{z_i}) - y_i z_i] + ||beta||^2 / (2C) by damped
// Newton steps until the gradient inf-norm falls below 1e-8 or the iteration
// cap. Features must be dense (impute upstream).
inline logistic_model logreg_fit(const dataset& train, double inverse_regularization,
                                 int max_iterations = 100) {
    train.validate();
    if (inverse_regularization <= 0.0) {
        throw validation_error("logreg_fit: C must be positive");
    }
    const std::size_t m = train.num_rows;
    const std::size_t f = train.num_features;
    const std::size_t pos = train.positives();
    if (pos == 0 || pos == m) {
        throw validation_error("logreg_fit: training set must contain both classes");
    }
    for (double v : train.features) {
        if (is_missing(v)) throw validation_error("logreg_fit: missing values not supported");
    }

    const double inv_c = 1.0 / inverse_regularization;
    const Eigen::Index dim = static_cast<Eigen::Index>(f) + 1;  // + intercept
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        train.features.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(f));

    auto loss_at = [&](const Eigen::VectorXd& b) {
        double loss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = x.row(static_cast<Eigen::Index>(i)).dot(b.head(f)) + b(dim - 1);
            loss += train.weights[i] * (detail::log1p_exp(z) - train.labels[i] * z);
        }
        loss += 0.5 * inv_c * b.head(f).squaredNorm();
        return loss;
    };

    logistic_model model;
    model.inverse_regularization = inverse_regularization;
    double current_loss = loss_at(beta);

    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::VectorXd gradient = Eigen::VectorXd::Zero(dim);
        Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = x.row(static_cast<Eigen::Index>(i));
            const double z = row.dot(beta.head(f)) + beta(dim - 1);
            const double p = detail::sigmoid(z);
            const double g = train.weights[i] * (p - train.labels[i]);
            const double h = std::max(train.weights[i] * p * (1.0 - p), 1e-12);
            gradient.head(f) += g * row.transpose();
            gradient(dim - 1) += g;
            hessian.topLeftCorner(f, f).noalias() += h * row.transpose() * row;
            hessian.topRightCorner(f, 1) += h * row.transpose();
            hessian.bottomLeftCorner(1, f) += h * row;
            hessian(dim - 1, dim - 1) += h;
        }
        gradient.head(f) += inv_c * beta.head(f);
        hessian.topLeftCorner(f, f) += inv_c * Eigen::MatrixXd::Identity(f, f);

        model.final_gradient_norm = gradient.cwiseAbs().maxCoeff();
        model.iterations_used = iter;
        if (model.final_gradient_norm <= 1e-8) break;

        Eigen::VectorXd step = hessian.ldlt().solve(gradient);
        double damping = 1.0;
        Eigen::VectorXd candidate = beta - damping * step;
        double candidate_loss = loss_at(candidate);
        while (candidate_loss > current_loss && damping > 1e-8) {
            damping *= 0.5;
            candidate = beta - damping * step;
            candidate_loss = loss_at(candidate);
        }
        beta = candidate;
        current_loss = candidate_loss;
    }

    model.coefficients.assign(beta.data(), beta.data() + f);
    model.intercept = beta(dim - 1);
    return model;
}

inline std::vector<double> logreg_predict_proba(const logistic_model& model,
                                                const std::vector<double>& features,
                                                std::size_t num_features) {
    if (num_features != model.coefficients.size()) {
        throw validation_error("logreg_predict_proba: feature count mismatch");
    }
    const std::size_t rows = features.size() / num_features;
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double z = model.intercept;
        for (std::size_t c = 0; c < num_features; ++c) {
            z += model.coefficients[c] * features[r * num_features + c];
        }
        out[r] = detail::sigmoid(z);
    }
    return out;
}

inline std::vector<double> logreg_predict_proba(const logistic_model& model,
                                                const dataset& data) {
    return logreg_predict_proba(model, data.features, data.num_features);
}

// Weighted analytic loss gradient at a parameter vector; exposed so tests can
// compare against central finite differences of the loss.
inline std::vector<double> logreg_loss_gradient(const dataset& train,
                                                const std::vector<double>& coefficients,
                                                double intercept,
                                                double inverse_regularization) {
    const std::size_t f = train.num_features;
    std::vector<double> gradient(f + 1, 0.0);
    for (std::size_t i = 0; i < train.num_rows; ++i) {
        double z = intercept;
        for (std::size_t c = 0; c < f; ++c) z += coefficients[c] * train.at(i, c);
        const double g = train.weights[i] * (detail::sigmoid(z) - train.labels[i]);
        for (std::size_t c = 0; c < f; ++c) gradient[c] += g * train.at(i, c);
        gradient[f] += g;
    }
    for (std::size_t c = 0; c < f; ++c) gradient[c] += coefficients[c] / inverse_regularization;
    return gradient;
}

inline double logreg_loss(const dataset& train, const std::vector<double>& coefficients,
                          double intercept, double inverse_regularization) {
    double loss = 0.0;
    for (std::size_t i = 0; i < train.num_rows; ++i) {
        double z = intercept;
        for (std::size_t c = 0; c < train.num_features; ++c) {
            z += coefficients[c] * train.at(i, c);
        }
        loss += train.weights[i] * (detail::log1p_exp(z) - train.labels[i] * z);
    }
    double reg = 0.0;
    for (double c : coefficients) reg += c * c;
    return loss + 0.5 * reg / inverse_regularization;
}

// Constant-score baseline: every row gets the (unweighted) positive prior.
struct dummy_model {
    double prior = 0.5;
};

inline dummy_model dummy_fit(const dataset& train) {
    if (train.num_rows == 0) throw validation_error("dummy_fit: empty training set");
    return {static_cast<double>(train.positives()) / static_cast<double>(train.num_rows)};
}

inline std::vector<double> dummy_predict(const dummy_model& model, std::size_t rows) {
    return std::vector<double>(rows, model.prior);
}

}  // namespace qdr
