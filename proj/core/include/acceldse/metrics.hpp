#pragma once

#include <string>
#include <vector>

namespace acceldse {

// Percentage-error summary: mu_ape and mape in percent, rmse in target units.
struct ErrorReport {
  double mu_ape = 0.0;   // mean absolute percentage error
  double mape = 0.0;     // maximum absolute percentage error
  double std_ape = 0.0;  // population standard deviation of APEs
  double rmse = 0.0;
  std::size_t n = 0;
};

struct ClassReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

ErrorReport error_report(const std::vector<double>& actual,
                         const std::vector<double>& predicted);

// Hyperparameter-selection loss combining average and worst-case error.
inline double tune_loss(const ErrorReport& r) { return r.mu_ape + 0.3 * r.mape; }

// Tie-corrected Kendall tau_b; throws when either input is all-tied.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Positive class is "in ROI".
ClassReport class_report(const std::vector<bool>& actual,
                         const std::vector<bool>& predicted);

std::string error_report_to_json(const ErrorReport& r);
std::string class_report_to_json(const ClassReport& r);

}  // namespace acceldse
