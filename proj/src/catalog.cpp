#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/lattice.hpp"

namespace latticeforge {

namespace {

// Null space of an integer constraint matrix over F_p, as integer columns in [0, p).
IntMatrix kernel_mod_p(IntMatrix a, std::int64_t p) {
    const int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = floor_mod(a(i, j), p);
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        a.row(r).swap(a.row(piv));
        std::int64_t inv = inverse_mod(a(r, c), p);
        for (int j = 0; j < cols; ++j) a(r, j) = floor_mod(a(r, j) * inv, p);
        for (int i = 0; i < rows; ++i) {
            if (i == r || a(i, c) == 0) continue;
            std::int64_t f = a(i, c);
            for (int j = 0; j < cols; ++j) a(i, j) = floor_mod(a(i, j) - f * a(r, j), p);
        }
        pivots.push_back(c);
        ++r;
    }
    std::vector<int> free;
    for (int c = 0; c < cols; ++c)
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back(c);
    IntMatrix k = IntMatrix::Zero(cols, static_cast<Eigen::Index>(free.size()));
    for (std::size_t f = 0; f < free.size(); ++f) {
        k(free[f], static_cast<Eigen::Index>(f)) = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i)
            k(pivots[i], static_cast<Eigen::Index>(f)) = floor_mod(-a(static_cast<Eigen::Index>(i), free[f]), p);
    }
    return k;
}

Lattice cubic(int n) { return Lattice(Matrix::Identity(n, n)); }

Lattice checkerboard(int n) {
    Matrix b = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        b(i, i) = 1;
        b(i + 1, i) = -1;
    }
    b(n - 2, n - 1) = 1;
    b(n - 1, n - 1) = 1;
    return Lattice(b);
}

Lattice hexagonal() {
    Matrix b(2, 2);
    b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
    return Lattice(b);
}

Lattice gosset() {
    Matrix rows = Matrix::Zero(8, 8);
    rows(0, 0) = 2;
    for (int i = 1; i < 7; ++i) {
        rows(i, i - 1) = -1;
        rows(i, i) = 1;
    }
    rows.row(7).setConstant(0.5);
    return Lattice(rows.transpose());
}

// Coxeter-Todd lattice: sqrt(2/3) times the Eisenstein sublattice
// { x in E^6 : x_i = x_j mod sqrt(-3), sum x_i = 0 mod 3 }.
Lattice coxeter_todd() {
    // Coordinates (a_i, b_i) for x_i = a_i + b_i w. Since w = 1 mod sqrt(-3),
    // x_i mod sqrt(-3) is (a_i + b_i) mod 3.
    IntMatrix cons = IntMatrix::Zero(6, 12);
    for (int i = 1; i < 6; ++i) {
        cons(i - 1, 0) = -1;
        cons(i - 1, 1) = -1;
        cons(i - 1, 2 * i) = 1;
        cons(i - 1, 2 * i + 1) = 1;
    }
    for (int i = 0; i < 6; ++i) cons(5, 2 * i) = 1;  // sum a_i = 0 (mod 3); the b-sum follows
    IntMatrix gens = kernel_mod_p(cons, 3);
    IntMatrix h = hermite_basis(gens, 3);
    Matrix embed = Matrix::Zero(12, 12);
    for (int i = 0; i < 6; ++i) {
        embed(2 * i, 2 * i) = 1.0;
        embed(2 * i, 2 * i + 1) = -0.5;
        embed(2 * i + 1, 2 * i + 1) = std::sqrt(3.0) / 2.0;
    }
    return Lattice(std::sqrt(2.0 / 3.0) * embed * to_real(h));
}

// Leech lattice: (1/sqrt 8) { x in Z^24 : x_i = m mod 2, sum x_i = 4m mod 8,
// each residue class mod 4 supported on a Golay codeword }.
Lattice leech() {
    auto golay = golay_generator();
    std::vector<IntVector> gens;
    for (const auto& w : golay) {
        IntVector v(24);
        for (int i = 0; i < 24; ++i) v(i) = 2 * w[static_cast<std::size_t>(i)];
        gens.push_back(v);
    }
    for (int i = 0; i < 24; ++i)
        for (int j = i + 1; j < 24; ++j) {
            IntVector v = IntVector::Zero(24);
            v(i) = 4;
            v(j) = 4;
            gens.push_back(v);
            v(j) = -4;
            gens.push_back(v);
        }
    IntVector odd = IntVector::Ones(24);
    odd(0) = -3;
    gens.push_back(odd);
    IntMatrix g(24, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t c = 0; c < gens.size(); ++c) g.col(static_cast<Eigen::Index>(c)) = gens[c];
    IntMatrix h = hermite_basis(g, 8);
    return Lattice(to_real(h) / std::sqrt(8.0));
}

int parse_dim(const std::string& s, std::size_t from) {
    if (from >= s.size()) return -1;
    for (std::size_t i = from; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
    return std::stoi(s.substr(from));
}

}  // namespace

std::vector<std::vector<int>> golay_generator() {
    // g(x) = x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1, cyclic length 23, plus parity.
    const int g[] = {1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1};
    std::vector<std::vector<int>> rows;
    for (int s = 0; s < 12; ++s) {
        std::vector<int> w(24, 0);
        for (int i = 0; i < 12; ++i) w[static_cast<std::size_t>(s + i)] = g[i];
        int parity = 0;
        for (int i = 0; i < 23; ++i) parity ^= w[static_cast<std::size_t>(i)];
        w[23] = parity;
        rows.push_back(w);
    }
    return rows;
}

Lattice catalog(const std::string& name) {
    std::string key;
    for (char ch : name) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (key == "A2") return hexagonal();
    if (key == "E8") return gosset();
    if (key == "K12") return coxeter_todd();
    if (key == "LEECH" || key == "LAMBDA24" || key == "L24") return leech();
    if (!key.empty() && key[0] == 'Z') {
        int n = parse_dim(key, 1);
        if (n >= 1 && n <= 64) return cubic(n);
    }
    if (!key.empty() && key[0] == 'D') {
        int n = parse_dim(key, 1);
        if (n >= 2 && n <= 64) return checkerboard(n);
    }
    throw ConfigError("unknown lattice name: " + name);
}

std::vector<std::string> catalog_names() {
    return {"Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "D3", "D4", "D5", "A2", "E8", "K12", "Leech"};
}

}  // namespace latticeforge
