#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace curate {

inline constexpr double kMinAnnotationScore = 0.0;
inline constexpr double kMaxAnnotationScore = 5.0;

// Linear map from an embedding vector to a 0-5 quality score. Fitted in
// closed form as ridge regression with an unpenalised intercept.
class RegressionHead {
 public:
  RegressionHead() = default;
  RegressionHead(std::vector<double> weights, double intercept);

  /// Needs >= dim + 1 rows of equal dimension; lambda >= 0.
  static RegressionHead fit(const std::vector<std::vector<double>>& embeddings, std::span<const double> labels,
                            double lambda = 1e-6);

  std::size_t dim() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

  /// Unclamped linear prediction.
  double raw(std::span<const double> embedding) const;
  /// Prediction clamped to [0, 5].
  double predict(std::span<const double> embedding) const;

  void write(std::ostream& os) const;
  static RegressionHead read(std::istream& is);

 private:
  std::vector<double> weights_;
  double intercept_ = 0;
};

}  // namespace curate
