#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbsde/errors.hpp"

namespace rbsde {

/// Least-squares projection settings for the ensemble backend.
struct RegressionSpec {
  int degree = 4;      // monomial degree per state component
  double ridge = 1e-8; // Tikhonov weight; 0 switches to rank-checked QR
};

namespace detail {

/// Per-step polynomial regression. Basis: for each state component c, the
/// powers u_c^0 .. u_c^q of the standardized component, (q+1)*d columns in
/// total, column 0 being the intercept. The ridge penalty skips the
/// intercept, which makes the fit commute with constant shifts of the
/// response exactly (in exact arithmetic); several floor/translation
/// identities in the test-suite lean on that.
class StepRegression {
 public:
  StepRegression(const std::vector<double>& states, int rows, int dim,
                 const RegressionSpec& spec, int step)
      : rows_(rows), cols_((spec.degree + 1) * dim), ridge_(spec.ridge) {
    if (rows < 1) throw ParameterError("regression: no rows");
    // standardize each component; a constant component collapses to 0 and
    // its higher powers become zero columns (harmless under ridge,
    // rank-deficient and loudly rejected when ridge = 0)
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (int m = 0; m < rows; ++m)
      for (int c = 0; c < dim; ++c) mean[c] += states[m * dim + c];
    for (int c = 0; c < dim; ++c) mean[c] /= rows;
    for (int m = 0; m < rows; ++m)
      for (int c = 0; c < dim; ++c) {
        const double d = states[m * dim + c] - mean[c];
        sd[c] += d * d;
      }
    for (int c = 0; c < dim; ++c) sd[c] = sd[c] > 0.0 ? std::sqrt(sd[c] / rows) : 0.0;

    phi_.resize(rows_, cols_);
    for (int m = 0; m < rows; ++m)
      for (int c = 0; c < dim; ++c) {
        const double u =
            sd[c] > 0.0 ? (states[m * dim + c] - mean[c]) / sd[c] : 0.0;
        double p = 1.0;
        for (int k = 0; k <= spec.degree; ++k) {
          phi_(m, c * (spec.degree + 1) + k) = p;
          p *= u;
        }
      }

    if (ridge_ > 0.0) {
      Eigen::MatrixXd gram = phi_.transpose() * phi_;
      for (int k = 1; k < cols_; ++k) gram(k, k) += ridge_;
      ldlt_.compute(gram);
      if (ldlt_.info() != Eigen::Success)
        throw NumericalError("degenerate regression at step " +
                             std::to_string(step));
    } else {
      qr_.compute(phi_);
      if (qr_.rank() < cols_)
        throw NumericalError("degenerate regression at step " +
                             std::to_string(step) +
                             ": basis is rank deficient and ridge = 0");
    }
  }

  /// Fitted values of the projection of y onto the basis.
  std::vector<double> fit(std::span<const double> y) const {
    Eigen::Map<const Eigen::VectorXd> ym(y.data(), rows_);
    Eigen::VectorXd beta;
    if (ridge_ > 0.0)
      beta = ldlt_.solve(phi_.transpose() * ym);
    else
      beta = qr_.solve(ym);
    Eigen::VectorXd fitted = phi_ * beta;
    return std::vector<double>(fitted.data(), fitted.data() + rows_);
  }

 private:
  int rows_;
  int cols_;
  double ridge_;
  Eigen::MatrixXd phi_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

}  // namespace detail
}  // namespace rbsde
