#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/stc.hpp"

namespace latticeforge {

// ||B_i B_j^H + B_j B_i^H||_F for all pairs.
Matrix anticommutator_norms(const SpaceTimeCode& code);

struct FDReport {
    std::vector<std::vector<int>> groups;
    std::vector<int> conditional;
    int exponent = 0;
    std::string kind;  // "g-group", "conditional" or "none"
    // Groups followed by the conditional set.
    std::vector<int> order;
    // predicted_zero[a][b] (a < b, reindexed) is true when R(a, b) must vanish.
    std::vector<std::vector<bool>> predicted_zero;
    int rank = 0;
};

FDReport hr_group_partition(const SpaceTimeCode& code, double tol = 1e-10);

struct RPattern {
    Matrix r;
    std::vector<std::vector<bool>> zero;
    bool predicted_zeros_present = true;
    bool rank_deficient = false;
    int exponent_from_r = 0;
};

// QR of the columns iota(H B_order[j]) by modified Gram-Schmidt.
RPattern r_matrix_pattern(const SpaceTimeCode& code, const CMatrix& h, const FDReport& report, double tol = 1e-8);

// 1 - exponent / k.
double complexity_reduction(const FDReport& report);

nlohmann::json to_json(const FDReport& report);

}  // namespace latticeforge
