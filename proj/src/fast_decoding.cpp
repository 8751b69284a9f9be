#include "latticeforge/fast_decoding.hpp"

#include <algorithm>
#include <cstdint>

#include "latticeforge/errors.hpp"

namespace latticeforge {

namespace {

// Connected components of the graph restricted to `members`, in order of smallest vertex.
std::vector<std::vector<int>> components(const std::vector<std::vector<bool>>& adj, const std::vector<int>& members) {
    const int k = static_cast<int>(adj.size());
    std::vector<bool> inside(static_cast<std::size_t>(k), false), seen(static_cast<std::size_t>(k), false);
    for (int v : members) inside[static_cast<std::size_t>(v)] = true;
    std::vector<std::vector<int>> out;
    for (int start : members) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::vector<int> comp{start}, stack{start};
        seen[static_cast<std::size_t>(start)] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < k; ++w)
                if (inside[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)] &&
                    adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    comp.push_back(w);
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

std::size_t largest(const std::vector<std::vector<int>>& comps) {
    std::size_t m = 0;
    for (const auto& c : comps) m = std::max(m, c.size());
    return m;
}

struct Candidate {
    std::vector<int> conditional;
    std::vector<std::vector<int>> groups;
    int exponent = 0;
    std::uint64_t mask = 0;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.exponent != b.exponent) return a.exponent < b.exponent;
    if (a.conditional.size() != b.conditional.size()) return a.conditional.size() < b.conditional.size();
    return a.mask < b.mask;
}

}  // namespace

Matrix anticommutator_norms(const SpaceTimeCode& code) {
    const int k = code.rank();
    Matrix a = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const CMatrix& bi = code.basis[static_cast<std::size_t>(i)];
            const CMatrix& bj = code.basis[static_cast<std::size_t>(j)];
            a(i, j) = a(j, i) = (bi * bj.adjoint() + bj * bi.adjoint()).norm();
        }
    return a;
}

FDReport hr_group_partition(const SpaceTimeCode& code, double tol) {
    const int k = code.rank();
    Matrix a = anticommutator_norms(code);
    std::vector<std::vector<bool>> linked(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) linked[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = i != j && a(i, j) >= tol;

    Candidate best;
    bool have = false;
    auto evaluate = [&](std::uint64_t mask) {
        Candidate c;
        c.mask = mask;
        std::vector<int> rest;
        for (int i = 0; i < k; ++i) (mask >> i & 1U ? c.conditional : rest).push_back(i);
        if (rest.empty()) return;
        c.groups = components(linked, rest);
        if (!c.conditional.empty() && c.groups.size() < 2) return;
        c.exponent = static_cast<int>(c.conditional.size() + largest(c.groups));
        if (!have || better(c, best)) {
            best = std::move(c);
            have = true;
        }
    };
    if (k <= 16) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) evaluate(mask);
    } else {
        // Greedy: condition on the most entangled remaining variable until the rest splits.
        std::uint64_t mask = 0;
        for (int step = 0; step < k; ++step) {
            evaluate(mask);
            int pick = -1, degree = -1;
            for (int i = 0; i < k; ++i) {
                if (mask >> i & 1U) continue;
                int d = 0;
                for (int j = 0; j < k; ++j)
                    if (!(mask >> j & 1U) && linked[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ++d;
                if (d > degree) {
                    degree = d;
                    pick = i;
                }
            }
            if (pick < 0 || degree == 0) break;
            mask |= std::uint64_t{1} << pick;
        }
    }

    FDReport r;
    r.rank = k;
    r.groups = best.groups;
    r.conditional = best.conditional;
    r.exponent = best.exponent;
    if (!r.conditional.empty())
        r.kind = "conditional";
    else
        r.kind = r.groups.size() >= 2 ? "g-group" : "none";
    std::vector<int> group_of;
    for (std::size_t g = 0; g < r.groups.size(); ++g)
        for (int v : r.groups[g]) {
            r.order.push_back(v);
            group_of.push_back(static_cast<int>(g));
        }
    for (int v : r.conditional) r.order.push_back(v);
    r.predicted_zero.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), false));
    for (std::size_t x = 0; x < group_of.size(); ++x)
        for (std::size_t y = x + 1; y < group_of.size(); ++y) r.predicted_zero[x][y] = group_of[x] != group_of[y];
    return r;
}

RPattern r_matrix_pattern(const SpaceTimeCode& code, const CMatrix& h, const FDReport& report, double tol) {
    const int k = code.rank();
    if (h.cols() != code.rows()) throw ConfigError("channel matrix columns must equal n_t");
    if (h.isZero(0.0)) throw DomainError("channel matrix must be nonzero");
    if (static_cast<int>(report.order.size()) != k) throw ConfigError("report does not belong to this code");
    Matrix q(2 * h.rows() * code.cols(), k);
    for (int j = 0; j < k; ++j) q.col(j) = iota(h * code.basis[static_cast<std::size_t>(report.order[static_cast<std::size_t>(j)])]);
    const double scale = std::max(1.0, q.colwise().norm().maxCoeff());
    RPattern out;
    out.r = Matrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < j; ++i) {
            out.r(i, j) = q.col(i).dot(q.col(j));
            q.col(j) -= out.r(i, j) * q.col(i);
        }
        out.r(j, j) = q.col(j).norm();
        if (out.r(j, j) < tol * scale) {
            out.rank_deficient = true;
            q.col(j).setZero();
        } else {
            q.col(j) /= out.r(j, j);
        }
    }
    out.zero.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), false));
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            bool z = std::abs(out.r(a, b)) < tol;
            out.zero[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = z;
            if (report.predicted_zero[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] && !z)
                out.predicted_zeros_present = false;
        }
    const int free_part = k - static_cast<int>(report.conditional.size());
    std::vector<std::vector<bool>> linked(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), false));
    std::vector<int> members;
    for (int a = 0; a < free_part; ++a) {
        members.push_back(a);
        for (int b = a + 1; b < free_part; ++b)
            if (!out.zero[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
                linked[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = linked[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
    }
    out.exponent_from_r = static_cast<int>(report.conditional.size() + largest(components(linked, members)));
    return out;
}

double complexity_reduction(const FDReport& report) {
    return 1.0 - static_cast<double>(report.exponent) / static_cast<double>(report.rank);
}

nlohmann::json to_json(const FDReport& report) {
    nlohmann::json zeros = nlohmann::json::array();
    for (const auto& row : report.predicted_zero) {
        nlohmann::json r = nlohmann::json::array();
        for (bool b : row) r.push_back(b ? 1 : 0);
        zeros.push_back(r);
    }
    return {{"kind", report.kind},
            {"k", report.rank},
            {"groups", report.groups},
            {"conditional", report.conditional},
            {"exponent", report.exponent},
            {"reduction", complexity_reduction(report)},
            {"order", report.order},
            {"r_zero_pattern", zeros}};
}

}  // namespace latticeforge
