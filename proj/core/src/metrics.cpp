#include "acceldse/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace acceldse {

ErrorReport error_report(const std::vector<double>& actual,
                         const std::vector<double>& predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw std::invalid_argument("error_report: need equal nonzero lengths");
  ErrorReport r;
  r.n = actual.size();
  std::vector<double> apes;
  apes.reserve(r.n);
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if (actual[i] == 0.0)
      throw std::invalid_argument("error_report: zero actual value, APE undefined");
    const double ape = std::abs((actual[i] - predicted[i]) / actual[i]) * 100.0;
    apes.push_back(ape);
    r.mu_ape += ape;
    r.mape = std::max(r.mape, ape);
    const double e = actual[i] - predicted[i];
    sq_sum += e * e;
  }
  const double n = static_cast<double>(r.n);
  r.mu_ape /= n;
  r.rmse = std::sqrt(sq_sum / n);
  double var = 0.0;
  for (const double ape : apes) var += (ape - r.mu_ape) * (ape - r.mu_ape);
  r.std_ape = std::sqrt(var / n);  // population normalization
  return r;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("kendall_tau: need length >= 2");
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 || dy == 0.0) continue;  // tied pairs count in neither bucket
      if ((dx > 0) == (dy > 0)) ++concordant;
      else ++discordant;
    }
  }
  const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
  // tau_b denominator uses tie-pair counts per variable (ties in x regardless
  // of y, and vice versa).
  long long tx = 0, ty = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[i] == x[j]) ++tx;
      if (y[i] == y[j]) ++ty;
    }
  const double dx = n0 - static_cast<double>(tx);
  const double dy = n0 - static_cast<double>(ty);
  if (dx <= 0.0 || dy <= 0.0)
    throw std::invalid_argument("kendall_tau: all-tied input is undefined");
  return (static_cast<double>(concordant) - static_cast<double>(discordant)) /
         std::sqrt(dx * dy);
}

ClassReport class_report(const std::vector<bool>& actual,
                         const std::vector<bool>& predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw std::invalid_argument("class_report: need equal nonzero lengths");
  ClassReport r;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] && predicted[i]) ++r.tp;
    else if (!actual[i] && predicted[i]) ++r.fp;
    else if (!actual[i] && !predicted[i]) ++r.tn;
    else ++r.fn;
  }
  const double n = static_cast<double>(actual.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  const double denom = static_cast<double>(2 * r.tp + r.fp + r.fn);
  r.f1 = denom > 0.0 ? 2.0 * static_cast<double>(r.tp) / denom : 0.0;
  return r;
}

std::string error_report_to_json(const ErrorReport& r) {
  nlohmann::json j{{"mu_ape", r.mu_ape},
                   {"mape", r.mape},
                   {"std_ape", r.std_ape},
                   {"rmse", r.rmse},
                   {"n", r.n}};
  return j.dump();
}

std::string class_report_to_json(const ClassReport& r) {
  nlohmann::json j{{"tp", r.tp},       {"fp", r.fp}, {"tn", r.tn},
                   {"fn", r.fn},       {"accuracy", r.accuracy},
                   {"f1", r.f1}};
  return j.dump();
}

}  // namespace acceldse
