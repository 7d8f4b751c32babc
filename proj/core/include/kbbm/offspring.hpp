#pragma once

#include <string>
#include <vector>

namespace kbbm {

/// Finite-support offspring distribution {p_k}.
class OffspringLaw {
 public:
  /// probabilities[k] = p_k. Entries must be >= 0 and sum to 1 within 1e-12.
  explicit OffspringLaw(std::vector<double> probabilities);

  /// p_2 = 1.
  static OffspringLaw binary();
  /// "binary" or a comma-separated list p_0,p_1,...
  static OffspringLaw parse(const std::string& text);

  const std::vector<double>& probabilities() const { return p_; }
  int max_offspring() const { return static_cast<int>(p_.size()) - 1; }
  double mean() const { return mean_; }
  /// P(k children).
  double prob(int k) const;
  /// Size-biased law k p_k / mu.
  double size_biased_prob(int k) const;

  /// Inverse-CDF draw from a uniform u in (0, 1).
  int sample(double u) const;
  /// Draw from the size-biased law; requires mean() > 0.
  int sample_size_biased(double u) const;

  std::string to_string() const;

 private:
  static int invert(const std::vector<double>& cumulative, double u);

  std::vector<double> p_;
  std::vector<double> cumulative_;
  std::vector<double> biased_cumulative_;
  double mean_ = 0.0;
};

}  // namespace kbbm
