// linalg.hpp
// Dense complex vectors and square matrices, Hermitian eigendecomposition
// (cyclic Jacobi) and PSD projection. Dimensions here are small (<= ~32),
// so everything is straightforward O(d^2)/O(d^3) loops over std::vector
// storage; no external linear algebra dependency.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adkit {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

// <u|v>, conjugate-linear in the first argument.
inline Complex inner_product(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("inner_product: dimension mismatch (" +
                                    std::to_string(u.size()) + " vs " +
                                    std::to_string(v.size()) + ")");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < u.size(); ++k) {
        acc += std::conj(u[k]) * v[k];
    }
    return acc;
}

inline double norm_squared(const Vector& v) {
    double acc = 0.0;
    for (const Complex& x : v) acc += std::norm(x);
    return acc;
}

inline double norm(const Vector& v) { return std::sqrt(norm_squared(v)); }

inline bool is_unit(const Vector& v, double tol = 1e-12) {
    return std::abs(norm_squared(v) - 1.0) <= 2.0 * tol + tol * tol;
}

inline void require_unit(const Vector& v, double tol, const char* what) {
    if (!is_unit(v, tol)) {
        throw std::invalid_argument(std::string(what) + ": vector is not unit norm");
    }
}

inline Vector normalized(Vector v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    for (Complex& x : v) x /= n;
    return v;
}

// Square complex matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("Matrix: dimension must be positive");
    }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    // |v><v|
    static Matrix outer(const Vector& v) {
        Matrix m(static_cast<int>(v.size()));
        for (int r = 0; r < m.dim_; ++r)
            for (int c = 0; c < m.dim_; ++c)
                m(r, c) = v[static_cast<std::size_t>(r)] * std::conj(v[static_cast<std::size_t>(c)]);
        return m;
    }

    int dim() const { return dim_; }

    Complex& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * dim_ + c]; }
    const Complex& operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * dim_ + c];
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (Complex& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    Matrix adjoint() const {
        Matrix m(dim_);
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double acc = 0.0;
        for (const Complex& x : data_) acc += std::norm(x);
        return std::sqrt(acc);
    }

    Vector apply(const Vector& v) const {
        if (static_cast<int>(v.size()) != dim_) {
            throw std::invalid_argument("Matrix::apply: dimension mismatch");
        }
        Vector out(static_cast<std::size_t>(dim_));
        for (int r = 0; r < dim_; ++r) {
            Complex acc{0.0, 0.0};
            for (int c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] = acc;
        }
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.check_same_dim(b);
        Matrix m(a.dim_);
        for (int r = 0; r < a.dim_; ++r)
            for (int k = 0; k < a.dim_; ++k) {
                const Complex ark = a(r, k);
                if (ark == Complex{0.0, 0.0}) continue;
                for (int c = 0; c < a.dim_; ++c) m(r, c) += ark * b(k, c);
            }
        return m;
    }

    // max_{ij} |m_ij - conj(m_ji)|
    double hermiticity_error() const {
        double worst = 0.0;
        for (int r = 0; r < dim_; ++r)
            for (int c = r; c < dim_; ++c)
                worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return worst;
    }

    // (M + M^dagger)/2
    void hermitize() {
        for (int r = 0; r < dim_; ++r) {
            (*this)(r, r) = Complex{(*this)(r, r).real(), 0.0};
            for (int c = r + 1; c < dim_; ++c) {
                const Complex avg = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
                (*this)(r, c) = avg;
                (*this)(c, r) = std::conj(avg);
            }
        }
    }

private:
    void check_same_dim(const Matrix& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("Matrix: dimension mismatch");
    }

    int dim_ = 0;
    std::vector<Complex> data_;
};

// <v|M|v>, real part (M is Hermitian in every use here).
inline double expectation(const Matrix& m, const Vector& v) {
    const Vector mv = m.apply(v);
    return inner_product(v, mv).real();
}

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    std::vector<Vector> eigenvectors; // same order, orthonormal
};

namespace detail {

// One two-sided Jacobi rotation annihilating the (p,q) entry of a Hermitian
// matrix, accumulated into v (columns of v become the eigenvectors).
inline void jacobi_rotate(Matrix& a, Matrix& v, int p, int q) {
    const Complex g = a(p, q);
    const double absg = std::abs(g);
    if (absg == 0.0) return;
    const Complex phase = g / absg;
    const double alpha = a(p, p).real();
    const double beta = a(q, q).real();
    const double tau = (alpha - beta) / (2.0 * absg);
    double t;
    if (tau >= 0.0) {
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    } else {
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const Complex spq = s * phase;        // rotation entries: u_pq = -s*phase
    const Complex sqp = s * std::conj(phase);

    const int n = a.dim();
    // A <- A U (columns p, q)
    for (int k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = c * akp + sqp * akq;
        a(k, q) = -spq * akp + c * akq;
    }
    // A <- U^dagger A (rows p, q)
    for (int k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = c * apk + spq * aqk;
        a(q, k) = -sqp * apk + c * aqk;
    }
    // V <- V U
    for (int k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = c * vkp + sqp * vkq;
        v(k, q) = -spq * vkp + c * vkq;
    }
}

inline double offdiag_frobenius(const Matrix& a) {
    double acc = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c)
            if (r != c) acc += std::norm(a(r, c));
    return std::sqrt(acc);
}

} // namespace detail

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
// Converges when the off-diagonal Frobenius mass drops below 1e-14 * ||M||_F,
// capped at 100 sweeps.
inline EigenDecomposition hermitian_eigen(const Matrix& m, double hermiticity_tol = 1e-12) {
    if (m.hermiticity_error() > hermiticity_tol) {
        throw std::invalid_argument("hermitian_eigen: input is not Hermitian within tolerance");
    }
    const int n = m.dim();
    Matrix a = m;
    a.hermitize();
    Matrix v = Matrix::identity(n);

    const double scale = a.frobenius_norm();
    if (n > 1 && scale > 0.0) {
        const double target = 1e-14 * scale;
        const double skip = 1e-18 * scale;
        for (int sweep = 0; sweep < 100; ++sweep) {
            if (detail::offdiag_frobenius(a) <= target) break;
            for (int p = 0; p < n - 1; ++p)
                for (int q = p + 1; q < n; ++q)
                    if (std::abs(a(p, q)) > skip) detail::jacobi_rotate(a, v, p, q);
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.reserve(static_cast<std::size_t>(n));
    out.eigenvectors.reserve(static_cast<std::size_t>(n));
    for (int idx : order) {
        out.eigenvalues.push_back(a(idx, idx).real());
        Vector col(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = v(r, idx);
        out.eigenvectors.push_back(std::move(col));
    }
    return out;
}

inline Matrix reconstruct(const EigenDecomposition& e) {
    const int n = static_cast<int>(e.eigenvalues.size());
    Matrix m(n);
    for (int k = 0; k < n; ++k) {
        const Vector& vec = e.eigenvectors[static_cast<std::size_t>(k)];
        const double lam = e.eigenvalues[static_cast<std::size_t>(k)];
        if (lam == 0.0) continue;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                m(r, c) += lam * vec[static_cast<std::size_t>(r)] * std::conj(vec[static_cast<std::size_t>(c)]);
    }
    return m;
}

inline double min_eigenvalue(const Matrix& m) {
    return hermitian_eigen(m).eigenvalues.front();
}

inline double max_eigenvalue(const Matrix& m) {
    return hermitian_eigen(m).eigenvalues.back();
}

// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues at 0.
inline Matrix psd_project(const Matrix& m) {
    EigenDecomposition e = hermitian_eigen(m);
    for (double& lam : e.eigenvalues) lam = std::max(lam, 0.0);
    return reconstruct(e);
}

// Orthonormal basis of span{vectors} by modified Gram-Schmidt with
// re-orthogonalization; directions below `tol` are treated as dependent.
inline std::vector<Vector> orthonormal_span(std::span<const Vector> vectors, double tol = 1e-10) {
    std::vector<Vector> basis;
    for (const Vector& v : vectors) {
        Vector w = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& b : basis) {
                const Complex coef = inner_product(b, w);
                for (std::size_t k = 0; k < w.size(); ++k) w[k] -= coef * b[k];
            }
        }
        const double n = norm(w);
        if (n > tol) {
            for (Complex& x : w) x /= n;
            basis.push_back(std::move(w));
        }
    }
    return basis;
}

} // namespace adkit
