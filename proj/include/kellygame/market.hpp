#pragma once

// Market description: a risk-free bond B_t = exp(r t) and n stocks following
// correlated geometric Brownian motions dS_i = S_i (mu_i dt + sigma_i dW_i).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <string>
#include <utility>

#include "kellygame/error.hpp"

namespace kelly {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Constant fractions of wealth held in each stock; the remainder
/// 1 - sum(weights) sits in the bond. Any sign or magnitude is allowed.
template <typename Scalar>
struct RebalancingRule {
  Vector<Scalar> weights;

  RebalancingRule() = default;

  template <typename Derived>
  explicit RebalancingRule(const Eigen::MatrixBase<Derived>& w) : weights(w) {}

  RebalancingRule(std::initializer_list<Scalar> w) : weights(static_cast<Eigen::Index>(w.size())) {
    std::copy(w.begin(), w.end(), weights.data());
  }

  static RebalancingRule constant(Eigen::Index n, Scalar value) {
    return RebalancingRule(Vector<Scalar>::Constant(n, value));
  }

  Eigen::Index size() const { return weights.size(); }
  Scalar operator[](Eigen::Index i) const { return weights[i]; }
  Scalar bond_fraction() const { return Scalar(1) - weights.sum(); }

  friend bool operator==(const RebalancingRule& a, const RebalancingRule& b) {
    return a.weights.size() == b.weights.size() && a.weights == b.weights;
  }
};

template <typename Scalar>
class MarketParams;

template <typename Scalar>
MarketParams<Scalar> build_market(Scalar r, Vector<Scalar> mu, Vector<Scalar> sigma,
                                  Matrix<Scalar> rho);

/// Validated, immutable market. Only build_market creates one, so every
/// instance carries a positive definite covariance and its Cholesky factors.
template <typename Scalar>
class MarketParams {
 public:
  using LLT = Eigen::LLT<Matrix<Scalar>>;

  Eigen::Index dimension() const { return mu_.size(); }
  Scalar rate() const { return r_; }
  const Vector<Scalar>& drift() const { return mu_; }
  const Vector<Scalar>& volatility() const { return sigma_; }
  const Matrix<Scalar>& correlation() const { return rho_; }
  const Matrix<Scalar>& covariance() const { return cov_; }

  /// mu - r 1
  Vector<Scalar> excess_drift() const { return mu_.array() - r_; }

  const LLT& covariance_factor() const { return cov_llt_; }

  /// Lower-triangular L with L L' = rho; maps iid normals to correlated ones.
  const Matrix<Scalar>& correlation_factor() const { return rho_chol_; }

  void require_dimension(const RebalancingRule<Scalar>& rule, const char* what) const {
    if (rule.size() != dimension()) {
      throw Error(Errc::dimension_mismatch, std::string(what) + " has " +
                                                std::to_string(rule.size()) + " weights, market has " +
                                                std::to_string(dimension()) + " stocks");
    }
  }

 private:
  friend MarketParams build_market<Scalar>(Scalar, Vector<Scalar>, Vector<Scalar>, Matrix<Scalar>);

  MarketParams() = default;

  Scalar r_{};
  Vector<Scalar> mu_;
  Vector<Scalar> sigma_;
  Matrix<Scalar> rho_;
  Matrix<Scalar> cov_;
  LLT cov_llt_;
  Matrix<Scalar> rho_chol_;
};

namespace detail {

template <typename Scalar>
constexpr Scalar correlation_slack() {
  return Scalar(1e-12);
}

// Cholesky with the pivot test: every pivot L_ii^2 must exceed
// tolerance * max diagonal entry.
template <typename Scalar>
bool factor_positive_definite(const Matrix<Scalar>& a, Eigen::LLT<Matrix<Scalar>>& llt) {
  llt.compute(a);
  if (llt.info() != Eigen::Success) return false;
  const Scalar floor = Scalar(1e-10) * a.diagonal().maxCoeff();
  const Matrix<Scalar> l = llt.matrixL();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Scalar pivot = l(i, i) * l(i, i);
    if (!(pivot > floor)) return false;
  }
  return true;
}

}  // namespace detail

template <typename Scalar>
MarketParams<Scalar> build_market(Scalar r, Vector<Scalar> mu, Vector<Scalar> sigma,
                                  Matrix<Scalar> rho) {
  const Eigen::Index n = mu.size();
  if (n < 1) throw Error(Errc::dimension_mismatch, "market needs at least one stock");
  if (sigma.size() != n || rho.rows() != n || rho.cols() != n) {
    throw Error(Errc::dimension_mismatch, "mu, sigma and rho must agree on n");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sigma[i] > Scalar(0)) || !std::isfinite(static_cast<double>(sigma[i]))) {
      throw Error(Errc::non_positive_volatility, "sigma[" + std::to_string(i) + "] must be > 0");
    }
  }
  if (!std::isfinite(static_cast<double>(r)) || !mu.allFinite()) {
    throw Error(Errc::invalid_argument, "r and mu must be finite");
  }

  const Scalar slack = detail::correlation_slack<Scalar>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(rho(i, i) - Scalar(1)) > slack) {
      throw Error(Errc::invalid_correlation, "rho diagonal must be 1");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(static_cast<double>(rho(i, j))) || std::abs(rho(i, j)) > Scalar(1) + slack) {
        throw Error(Errc::invalid_correlation, "rho entries must lie in [-1, 1]");
      }
      if (std::abs(rho(i, j) - rho(j, i)) > slack) {
        throw Error(Errc::invalid_correlation, "rho must be symmetric");
      }
    }
  }
  // Snap to exact symmetry and unit diagonal so Sigma is exactly symmetric.
  Matrix<Scalar> rho_sym = (rho + rho.transpose()) / Scalar(2);
  rho_sym.diagonal().setOnes();

  Matrix<Scalar> cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = rho_sym(i, j) * (sigma[i] * sigma[j]);

  MarketParams<Scalar> m;
  if (!detail::factor_positive_definite(cov, m.cov_llt_)) {
    throw Error(Errc::singular_covariance, "covariance matrix is not positive definite");
  }
  Eigen::LLT<Matrix<Scalar>> rho_llt;
  if (!detail::factor_positive_definite(rho_sym, rho_llt)) {
    throw Error(Errc::singular_covariance, "correlation matrix is not positive definite");
  }
  m.r_ = r;
  m.mu_ = std::move(mu);
  m.sigma_ = std::move(sigma);
  m.rho_ = std::move(rho_sym);
  m.cov_ = std::move(cov);
  m.rho_chol_ = rho_llt.matrixL();
  return m;
}

/// Single-stock market, embedded as n = 1 with rho = [[1]].
template <typename Scalar>
MarketParams<Scalar> build_market(Scalar r, Scalar mu, Scalar sigma) {
  return build_market<Scalar>(r, Vector<Scalar>::Constant(1, mu), Vector<Scalar>::Constant(1, sigma),
                              Matrix<Scalar>::Identity(1, 1));
}

/// Zero interest, sigma = ln 2, mu = sigma^2 / 2: the continuous analogue of a
/// stock that doubles or halves with equal odds.
template <typename Scalar = double>
MarketParams<Scalar> shannon_demon_market() {
  const Scalar sigma = std::numbers::ln2_v<Scalar>;
  return build_market<Scalar>(Scalar(0), sigma * sigma / Scalar(2), sigma);
}

using Market = MarketParams<double>;
using Rule = RebalancingRule<double>;

}  // namespace kelly
