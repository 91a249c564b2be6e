#include "curate/quality/regression_head.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "curate/core/binary_io.hpp"
#include "curate/core/error.hpp"

namespace curate {

RegressionHead::RegressionHead(std::vector<double> weights, double intercept)
    : weights_(std::move(weights)), intercept_(intercept) {}

RegressionHead RegressionHead::fit(const std::vector<std::vector<double>>& embeddings, std::span<const double> labels,
                                   double lambda) {
  if (embeddings.empty()) throw Error("regression head needs training data");
  if (embeddings.size() != labels.size()) throw Error("embedding and label counts differ");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw Error("ridge lambda must be finite and >= 0");
  const std::size_t d = embeddings.front().size();
  if (d == 0) throw Error("embeddings must be non-empty");
  for (const auto& e : embeddings) {
    if (e.size() != d) throw Error("embedding dimension mismatch");
  }
  const std::size_t n = embeddings.size();
  if (n < d + 1) throw Error("regression head needs at least dim + 1 samples");

  // Augmented least squares: [X 1; sqrt(lambda) I 0] b = [y; 0].
  const auto cols = static_cast<Eigen::Index>(d + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + d), cols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < d; ++j) a(r, static_cast<Eigen::Index>(j)) = embeddings[i][j];
    a(r, cols - 1) = 1.0;
    b(r) = labels[i];
  }
  const double s = std::sqrt(lambda);
  for (std::size_t j = 0; j < d; ++j) a(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(j)) = s;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  if (!x.allFinite()) throw Error("regression head solve failed");
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = x(static_cast<Eigen::Index>(j));
  return RegressionHead(std::move(w), x(cols - 1));
}

double RegressionHead::raw(std::span<const double> embedding) const {
  if (embedding.size() != weights_.size()) throw Error("embedding dimension mismatch");
  double y = intercept_;
  for (std::size_t j = 0; j < weights_.size(); ++j) y += weights_[j] * embedding[j];
  return y;
}

double RegressionHead::predict(std::span<const double> embedding) const {
  return std::clamp(raw(embedding), kMinAnnotationScore, kMaxAnnotationScore);
}

void RegressionHead::write(std::ostream& os) const {
  binio::put_u32(os, static_cast<std::uint32_t>(weights_.size()));
  binio::put_f64(os, intercept_);
  for (double w : weights_) binio::put_f64(os, w);
}

RegressionHead RegressionHead::read(std::istream& is) {
  const auto d = binio::get_u32(is);
  if (d == 0 || d > (1u << 24)) throw Error("regression head file has invalid dimension");
  const double intercept = binio::get_f64(is);
  std::vector<double> w(d);
  for (auto& v : w) v = binio::get_f64(is);
  return RegressionHead(std::move(w), intercept);
}

}  // namespace curate
