#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hwr/regression.hpp"

namespace hwr {

struct TermShare {
    Subset u;
    double variance = 0.0;
    double gsi = 0.0;
    bool active = false;
};

struct SensitivityReport {
    std::vector<TermShare> terms;  // every nonempty term of the model, canonical order
    double total_variance = 0.0;
    double constant = 0.0;         // f_emptyset estimate
    double threshold = 0.03;
    std::vector<Subset> active_set;  // includes the empty set

    const TermShare* find(const Subset& u) const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// sum over level blocks of u of a^T (tensor of same-level Grams) a
double term_variance(const RegressionModel& model, const Subset& u);
SensitivityReport gsi(const RegressionModel& model, double eps = 0.03);
int effective_dimension(const SensitivityReport& report, double coverage);
std::vector<Subset> active_set(const SensitivityReport& report, double eps);

}  // namespace hwr
