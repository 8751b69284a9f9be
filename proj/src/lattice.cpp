#include "latticeforge/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "latticeforge/integer_matrix.hpp"

namespace latticeforge {

namespace {

struct GramSchmidt {
    Matrix mu;  // mu(i, j) = <b_i, b*_j> / |b*_j|^2 for j < i
    Vector norms;
};

GramSchmidt gram_schmidt(const Matrix& b) {
    const int n = static_cast<int>(b.cols());
    Matrix g = b.transpose() * b;
    GramSchmidt gs{Matrix::Zero(n, n), Vector::Zero(n)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double v = g(i, j);
            for (int l = 0; l < j; ++l) v -= gs.mu(j, l) * gs.mu(i, l) * gs.norms(l);
            gs.mu(i, j) = v / gs.norms(j);
        }
        double v = g(i, i);
        for (int l = 0; l < i; ++l) v -= gs.mu(i, l) * gs.mu(i, l) * gs.norms(l);
        gs.norms(i) = v;
        gs.mu(i, i) = 1.0;
    }
    return gs;
}

bool lex_less(const IntVector& a, const IntVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != b(i)) return a(i) < b(i);
    return false;
}

IntVector to_original(const Lattice& lat, const std::vector<std::int64_t>& z) {
    IntVector zr(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) zr(static_cast<Eigen::Index>(i)) = z[i];
    return lat.reduction() * zr;
}

}  // namespace

IntMatrix lll_reduce(const Matrix& basis, double delta) {
    const int n = static_cast<int>(basis.cols());
    Matrix b = basis;
    IntMatrix u = IntMatrix::Identity(n, n);
    if (n <= 1) return u;
    GramSchmidt gs = gram_schmidt(b);
    int k = 1;
    std::size_t guard = 0;
    while (k < n) {
        if (++guard > 1'000'000) throw CapacityError("LLL did not converge");
        for (int j = k - 1; j >= 0; --j) {
            double r = std::round(gs.mu(k, j));
            if (r == 0.0) continue;
            auto ri = static_cast<std::int64_t>(r);
            b.col(k) -= r * b.col(j);
            for (int i = 0; i < n; ++i) u(i, k) = checked_add(u(i, k), -checked_mul(ri, u(i, j)));
            for (int l = 0; l <= j; ++l) gs.mu(k, l) -= r * gs.mu(j, l);
        }
        double m = gs.mu(k, k - 1);
        if (gs.norms(k) < (delta - m * m) * gs.norms(k - 1)) {
            b.col(k).swap(b.col(k - 1));
            u.col(k).swap(u.col(k - 1));
            gs = gram_schmidt(b);
            k = std::max(k - 1, 1);
        } else {
            ++k;
        }
    }
    return u;
}

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
    if (basis_.rows() != basis_.cols() || basis_.rows() == 0)
        throw ConfigError("lattice basis must be a non-empty square matrix");
    if (!basis_.allFinite()) throw ConfigError("lattice basis has non-finite entries");
    const int n = dim();
    gram_ = basis_.transpose() * basis_;
    double det = basis_.fullPivLu().determinant();
    double scale = std::pow(std::max(gram_.diagonal().maxCoeff(), 1e-300), 0.5 * n);
    if (!(std::abs(det) > 1e-12 * scale)) throw ConfigError("lattice basis is singular");
    volume_ = std::abs(det);
    transform_ = lll_reduce(basis_);
    reduced_ = basis_ * to_real(transform_);
    reduced_inverse_ = reduced_.inverse();
    Eigen::LLT<Matrix> llt(reduced_.transpose() * reduced_);
    if (llt.info() != Eigen::Success) throw ConfigError("lattice Gram matrix is not positive definite");
    Matrix r = llt.matrixU();
    mu_ = Matrix::Zero(n, n);
    gs_ = Vector(n);
    for (int k = 0; k < n; ++k) {
        gs_(k) = r(k, k) * r(k, k);
        for (int j = k; j < n; ++j) mu_(k, j) = r(k, j) / r(k, k);
    }
}

Lattice Lattice::from_gram(const Matrix& gram) {
    if (gram.rows() != gram.cols()) throw ConfigError("Gram matrix must be square");
    Matrix sym = 0.5 * (gram + gram.transpose());
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() != Eigen::Success) throw RankError("Gram matrix is not positive definite");
    return Lattice(Matrix(llt.matrixU()));
}

Vector Lattice::reduced_coordinates(const Vector& y) const {
    if (y.size() != dim()) throw ConfigError("target dimension does not match the lattice");
    return reduced_inverse_ * y;
}

double Lattice::covering_radius_bound() const { return 0.5 * std::sqrt(gs_.sum()); }

double volume(const Lattice& lat) { return lat.volume(); }

std::vector<LatticePoint> enumerate_by_norm(const Lattice& lat, double r, const EnumerationLimits& limits) {
    if (r < 0) throw DomainError("enumeration radius must be non-negative");
    std::vector<LatticePoint> out;
    double radius2 = r + norm_tolerance(r);
    Vector t = Vector::Zero(lat.dim());
    detail::enumerate_reduced(lat, t, radius2, limits.max_points,
                              [&](const std::vector<std::int64_t>& z, double p) {
                                  LatticePoint pt;
                                  pt.coords = to_original(lat, z);
                                  pt.vector = lat.point(pt.coords);
                                  pt.norm = pt.vector.squaredNorm();
                                  (void)p;
                                  out.push_back(std::move(pt));
                              });
    std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
        if (std::abs(a.norm - b.norm) > norm_tolerance(std::max(a.norm, b.norm))) return a.norm < b.norm;
        return lex_less(a.coords, b.coords);
    });
    return out;
}

MinimaProfile successive_minima(const Lattice& lat, const EnumerationLimits& limits) {
    const int n = lat.dim();
    Vector lengths = lat.reduced_basis().colwise().squaredNorm();
    const double cap = lengths.maxCoeff();
    double r = lengths.minCoeff();
    while (true) {
        auto pts = enumerate_by_norm(lat, r, limits);
        MinimaProfile prof;
        Matrix ortho(n, 0);
        for (const auto& p : pts) {
            if (p.norm <= norm_tolerance(0.0)) continue;
            Vector v = p.vector;
            for (int j = 0; j < ortho.cols(); ++j) v -= ortho.col(j).dot(v) * ortho.col(j);
            if (v.squaredNorm() <= 1e-18 * std::max(1.0, p.norm)) continue;
            ortho.conservativeResize(Eigen::NoChange, ortho.cols() + 1);
            ortho.col(ortho.cols() - 1) = v.normalized();
            prof.minima.push_back(p.norm);
            prof.vectors.push_back(p.coords);
            if (static_cast<int>(prof.minima.size()) == n) break;
        }
        if (static_cast<int>(prof.minima.size()) == n) {
            double l1 = prof.minima.front();
            for (const auto& p : pts)
                if (p.norm > norm_tolerance(0.0) && std::abs(p.norm - l1) <= norm_tolerance(l1)) ++prof.kissing;
            return prof;
        }
        if (r >= cap) throw RankError("successive minima search failed to find n independent vectors");
        r = std::min(2.0 * r, cap);
    }
}

bool is_well_rounded(const Lattice& lat, double tol, const EnumerationLimits& limits) {
    auto prof = successive_minima(lat, limits);
    return std::abs(prof.minima.back() - prof.minima.front()) <= tol * std::max(1.0, prof.minima.front());
}

LatticePoint closest_vector(const Lattice& lat, const Vector& y, const EnumerationLimits& limits) {
    const int n = lat.dim();
    Vector t = lat.reduced_coordinates(y);
    const Matrix& mu = lat.mu();
    const Vector& d = lat.gs_norms();
    // Babai nearest plane gives the starting radius.
    std::vector<std::int64_t> zb(n);
    double babai = 0.0;
    for (int k = n - 1; k >= 0; --k) {
        double center = t(k);
        for (int j = k + 1; j < n; ++j) center -= mu(k, j) * (static_cast<double>(zb[j]) - t(j));
        zb[k] = static_cast<std::int64_t>(std::llround(center));
        double diff = static_cast<double>(zb[k]) - center;
        babai += d(k) * diff * diff;
    }
    double best = babai;
    double radius2 = best + norm_tolerance(best);
    std::vector<std::vector<std::int64_t>> ties;
    std::vector<double> tie_dist;
    detail::enumerate_reduced(lat, t, radius2, limits.max_points,
                              [&](const std::vector<std::int64_t>& z, double p) {
                                  if (p < best - norm_tolerance(best)) {
                                      best = p;
                                      radius2 = best + norm_tolerance(best);
                                      ties.clear();
                                      tie_dist.clear();
                                  }
                                  if (p < best) best = p;
                                  ties.push_back(z);
                                  tie_dist.push_back(p);
                              });
    LatticePoint out;
    bool have = false;
    for (std::size_t i = 0; i < ties.size(); ++i) {
        if (tie_dist[i] > best + norm_tolerance(best)) continue;
        IntVector c = to_original(lat, ties[i]);
        if (!have || lex_less(c, out.coords)) {
            out.coords = c;
            have = true;
        }
    }
    if (!have) {
        out.coords = to_original(lat, zb);
    }
    out.vector = lat.point(out.coords);
    out.norm = (out.vector - y).squaredNorm();
    return out;
}

IntegerSublattice sublattice(const Lattice& lat, const IntMatrix& map) {
    if (map.rows() != lat.dim() || map.cols() != lat.dim())
        throw ConfigError("sublattice map must be a square matrix of the lattice dimension");
    std::int64_t det = determinant(map);
    if (det == 0) throw RankError("sublattice map is singular");
    return IntegerSublattice{Lattice(lat.basis() * to_real(map)), map, std::llabs(det)};
}

nlohmann::json to_json(const Lattice& lat) {
    const int n = lat.dim();
    std::vector<double> rows;
    rows.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows.push_back(lat.basis()(i, j));
    return {{"n", n}, {"basis", rows}};
}

Lattice lattice_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("basis"))
        throw ConfigError("lattice JSON needs fields \"n\" and \"basis\"");
    int n = j.at("n").get<int>();
    auto rows = j.at("basis").get<std::vector<double>>();
    if (n <= 0 || rows.size() != static_cast<std::size_t>(n) * n)
        throw ConfigError("lattice JSON basis must hold n*n entries");
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) b(i, k) = rows[static_cast<std::size_t>(i) * n + k];
    return Lattice(b);
}

}  // namespace latticeforge
