#include "kbbm/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kbbm {
namespace {

std::vector<double> cumulate(const std::vector<double>& weights, double total) {
  std::vector<double> cum(weights.size(), 0.0);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k] / total;
    cum[k] = acc;
    if (weights[k] > 0.0) last_positive = k;
  }
  // Round-off must not leave a sliver above the last atom.
  for (std::size_t k = last_positive; k < cum.size(); ++k) cum[k] = 1.0;
  return cum;
}

}  // namespace

OffspringLaw::OffspringLaw(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw std::invalid_argument("OffspringLaw: empty probability vector");
  double total = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("OffspringLaw: probabilities must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("OffspringLaw: probabilities must sum to 1");
  for (std::size_t k = 0; k < p_.size(); ++k) mean_ += static_cast<double>(k) * p_[k];
  cumulative_ = cumulate(p_, total);
  if (mean_ > 0.0) {
    std::vector<double> biased(p_.size());
    for (std::size_t k = 0; k < p_.size(); ++k) biased[k] = static_cast<double>(k) * p_[k];
    biased_cumulative_ = cumulate(biased, mean_);
  }
}

OffspringLaw OffspringLaw::binary() { return OffspringLaw({0.0, 0.0, 1.0}); }

OffspringLaw OffspringLaw::parse(const std::string& text) {
  if (text == "binary") return binary();
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("offspring law '" + text + "': bad entry '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("offspring law '" + text + "': bad entry '" + item + "'");
    p.push_back(v);
  }
  return OffspringLaw(std::move(p));
}

double OffspringLaw::prob(int k) const {
  if (k < 0 || k > max_offspring()) return 0.0;
  return p_[static_cast<std::size_t>(k)];
}

double OffspringLaw::size_biased_prob(int k) const {
  if (mean_ <= 0.0) throw std::invalid_argument("OffspringLaw: size-biased law needs mean > 0");
  return k * prob(k) / mean_;
}

int OffspringLaw::invert(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return static_cast<int>(cumulative.size()) - 1;
  return static_cast<int>(it - cumulative.begin());
}

int OffspringLaw::sample(double u) const { return invert(cumulative_, u); }

int OffspringLaw::sample_size_biased(double u) const {
  if (biased_cumulative_.empty()) throw std::invalid_argument("OffspringLaw: size-biased law needs mean > 0");
  return invert(biased_cumulative_, u);
}

std::string OffspringLaw::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < p_.size(); ++k) os << (k ? "," : "") << p_[k];
  return os.str();
}

}  // namespace kbbm
