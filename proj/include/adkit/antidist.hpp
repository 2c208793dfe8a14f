// antidist.hpp
// Deciding antidistinguishability of pure states: the Caves-Fuchs-Schack
// overlap criterion for triples, and the state-exclusion semidefinite program
//
//   primal: minimize sum_z <rho_z|Pi_z|rho_z>  s.t.  Pi_z >= 0, sum_z Pi_z = I
//   dual:   maximize tr(Y)                     s.t.  Y <= |rho_z><rho_z|  for all z
//
// solved by ADMM over the product of PSD cones with the completeness affine
// constraint. Verdicts are never taken from solver internals: the returned
// POVM and dual certificate are re-verified from scratch, and anything that
// fails both re-verified thresholds is reported as indeterminate.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adkit/linalg.hpp"

namespace adkit {

// Squared overlap moduli of a state triple (rho_j, rho_k, rho_m):
// a = |<rho_j|rho_k>|^2, b = |<rho_j|rho_m>|^2, c = |<rho_m|rho_k>|^2.
struct TripleOverlaps {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

// Caves-Fuchs-Schack condition for a projectively antidistinguishable triple:
// a + b + c < 1 (strict) and (1 - a - b - c)^2 >= 4abc (non-strict). Used only
// in the sufficient direction; the exclusion SDP is the ground truth.
inline bool cfs_criterion(const TripleOverlaps& t) {
    const double slack = 1e-9;
    for (double x : {t.a, t.b, t.c}) {
        if (!(x >= -slack && x <= 1.0 + slack)) {
            throw std::invalid_argument("cfs_criterion: overlaps must lie in [0, 1]");
        }
    }
    const double rest = 1.0 - t.a - t.b - t.c;
    return (t.a + t.b + t.c < 1.0) && (rest * rest >= 4.0 * t.a * t.b * t.c);
}

inline TripleOverlaps triple_overlaps(const Vector& u, const Vector& v, const Vector& w) {
    if (u.size() != v.size() || u.size() != w.size()) {
        throw std::invalid_argument("triple_overlaps: dimension mismatch");
    }
    TripleOverlaps t;
    t.a = std::norm(inner_product(u, v));
    t.b = std::norm(inner_product(u, w));
    t.c = std::norm(inner_product(w, v));
    return t;
}

// n-outcome measurement: PSD elements summing to the identity.
struct Povm {
    int dim = 0;
    std::vector<Matrix> elements;

    int outcomes() const { return static_cast<int>(elements.size()); }
};

inline double povm_completeness_error(const Povm& p) {
    Matrix sum(p.dim);
    for (const Matrix& e : p.elements) sum += e;
    return (sum - Matrix::identity(p.dim)).frobenius_norm();
}

inline double povm_min_eigenvalue(const Povm& p) {
    double worst = 0.0;
    bool first = true;
    for (const Matrix& e : p.elements) {
        const double lam = min_eigenvalue(e);
        if (first || lam < worst) worst = lam;
        first = false;
    }
    return worst;
}

// sum_z <rho_z|Pi_z|rho_z>: the exclusion error of a POVM on the given states.
// Depends only on the inputs, not on how the POVM was produced.
inline double exclusion_value(std::span<const Vector> states, const Povm& povm) {
    if (static_cast<int>(states.size()) != povm.outcomes()) {
        throw std::invalid_argument("exclusion_value: states/POVM outcome count mismatch");
    }
    double acc = 0.0;
    for (std::size_t z = 0; z < states.size(); ++z) {
        acc += expectation(povm.elements[z], states[z]);
    }
    return acc;
}

struct DualCheck {
    double trace = 0.0;          // tr(Y)
    double max_violation = 0.0;  // max_z lambda_max(Y - |rho_z><rho_z|)
};

inline DualCheck check_dual_certificate(std::span<const Vector> states, const Matrix& y) {
    DualCheck out;
    out.trace = y.trace().real();
    bool first = true;
    for (const Vector& s : states) {
        Matrix diff = y - Matrix::outer(s);
        diff.hermitize();
        const double lam = max_eigenvalue(diff);
        if (first || lam > out.max_violation) out.max_violation = lam;
        first = false;
    }
    return out;
}

enum class ExclusionStatus { antidistinguishable, not_antidistinguishable, indeterminate };

inline const char* to_string(ExclusionStatus s) {
    switch (s) {
        case ExclusionStatus::antidistinguishable: return "antidistinguishable";
        case ExclusionStatus::not_antidistinguishable: return "not_antidistinguishable";
        case ExclusionStatus::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

struct SdpOptions {
    double stop_tol = 1e-8;       // primal residual, dual residual, and gap
    long max_iterations = 50000;
    double verdict_tol = 1e-6;    // primal <= tol / dual trace >= tol classification band
    double over_relaxation = 1.5;
};

struct ExclusionResult {
    ExclusionStatus status = ExclusionStatus::indeterminate;
    double primal_value = 0.0;  // re-verified exclusion value of `povm`
    double dual_value = 0.0;    // re-verified trace of `dual_certificate`
    double duality_gap = 0.0;   // primal_value - dual_value
    std::optional<Povm> povm;
    std::optional<Matrix> dual_certificate;
    // re-verification residuals and solver diagnostics
    double povm_min_eig = 0.0;
    double povm_completeness = 0.0;
    double dual_max_violation = 0.0;
    long iterations = 0;
    bool converged = false;
};

namespace detail {

inline Matrix psd_part(const Matrix& m) {
    Matrix h = m;
    h.hermitize();
    return psd_project(h);
}

// ADMM state for the exclusion SDP in the (possibly reduced) working space.
struct ExclusionAdmm {
    int n = 0;
    int dim = 0;
    std::vector<Matrix> targets;  // P_z = |rho_z><rho_z|
    std::vector<Matrix> x, z, u;
    double sigma = 1.0;

    explicit ExclusionAdmm(std::span<const Vector> states) {
        n = static_cast<int>(states.size());
        dim = static_cast<int>(states[0].size());
        const Matrix init = Matrix::identity(dim) * (1.0 / n);
        for (const Vector& s : states) {
            targets.push_back(Matrix::outer(s));
            x.push_back(init);
            z.push_back(init);
            u.push_back(Matrix(dim));
        }
    }

    // Candidate dual variable: Y = mean_z (P_z + sigma U_z).
    Matrix dual_estimate() const {
        Matrix y(dim);
        for (int k = 0; k < n; ++k) {
            y += targets[static_cast<std::size_t>(k)];
            y += u[static_cast<std::size_t>(k)] * sigma;
        }
        y *= 1.0 / n;
        y.hermitize();
        return y;
    }

    // One ADMM iteration; returns (primal residual, dual residual, gap).
    std::array<double, 3> step(double alpha) {
        // x-update: projection of Z - U - P/sigma onto {sum X_z = I}
        Matrix defect(dim);
        for (int k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k);
            x[idx] = z[idx] - u[idx] - targets[idx] * (1.0 / sigma);
            defect += x[idx];
        }
        defect -= Matrix::identity(dim);
        defect *= 1.0 / n;
        for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] -= defect;

        // z-update on the over-relaxed point, then scaled dual update
        double primal_sq = 0.0, dual_sq = 0.0;
        for (int k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k);
            const Matrix relaxed = x[idx] * alpha + z[idx] * (1.0 - alpha);
            const Matrix zold = z[idx];
            z[idx] = psd_part(relaxed + u[idx]);
            u[idx] += relaxed - z[idx];
            primal_sq += std::pow((x[idx] - z[idx]).frobenius_norm(), 2);
            dual_sq += std::pow((z[idx] - zold).frobenius_norm(), 2);
        }

        double obj = 0.0;
        for (int k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k);
            double dot = 0.0;
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    dot += (std::conj(targets[idx](r, c)) * z[idx](r, c)).real();
            obj += dot;
        }
        const double gap = std::abs(obj - dual_estimate().trace().real());
        return {std::sqrt(primal_sq), sigma * std::sqrt(dual_sq), gap};
    }

    void rescale_penalty(double primal_res, double dual_res) {
        double factor = 1.0;
        if (primal_res > 10.0 * dual_res && sigma < 1e4) {
            factor = 2.0;
        } else if (dual_res > 10.0 * primal_res && sigma > 1e-4) {
            factor = 0.5;
        }
        if (factor != 1.0) {
            sigma *= factor;
            for (Matrix& m : u) m *= 1.0 / factor;
        }
    }
};

} // namespace detail

// Solve the state-exclusion SDP for n >= 2 unit states of equal dimension.
// The work happens in the span of the states (rank r <= min(n, d)); the POVM
// and dual certificate are lifted back and re-verified in the full space.
inline ExclusionResult exclusion_sdp(std::span<const Vector> states,
                                     const SdpOptions& opts = {}) {
    const int n = static_cast<int>(states.size());
    if (n < 2) throw std::invalid_argument("exclusion_sdp: need at least 2 states");
    const int d = static_cast<int>(states[0].size());
    if (d < 1) throw std::invalid_argument("exclusion_sdp: empty state vector");
    for (const Vector& s : states) {
        if (static_cast<int>(s.size()) != d) {
            throw std::invalid_argument("exclusion_sdp: states have mismatched dimensions");
        }
        require_unit(s, 1e-8, "exclusion_sdp");
    }

    // Reduce to the span of the states.
    const std::vector<Vector> basis = orthonormal_span(states);
    const int r = static_cast<int>(basis.size());
    std::vector<Vector> reduced(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Vector& t = reduced[static_cast<std::size_t>(k)];
        t.resize(static_cast<std::size_t>(r));
        for (int b = 0; b < r; ++b) {
            t[static_cast<std::size_t>(b)] = inner_product(basis[static_cast<std::size_t>(b)], states[k]);
        }
    }

    detail::ExclusionAdmm admm(reduced);
    ExclusionResult res;
    for (long iter = 1; iter <= opts.max_iterations; ++iter) {
        const auto [primal_res, dual_res, gap] = admm.step(opts.over_relaxation);
        res.iterations = iter;
        if (primal_res <= opts.stop_tol && dual_res <= opts.stop_tol && gap <= opts.stop_tol) {
            res.converged = true;
            break;
        }
        if (iter % 50 == 0) admm.rescale_penalty(primal_res, dual_res);
    }

    // Lift the POVM: Pi_z = B Z_z B^dagger + (I - B B^dagger)/n, where B maps
    // the working space back into the original one.
    Matrix lift_tail(d);
    {
        Matrix bbdag(d);
        for (const Vector& b : basis) bbdag += Matrix::outer(b);
        lift_tail = (Matrix::identity(d) - bbdag) * (1.0 / n);
        lift_tail.hermitize();
    }
    auto lift = [&](const Matrix& small) {
        Matrix out(d);
        for (int p = 0; p < r; ++p) {
            for (int q = 0; q < r; ++q) {
                const Complex coef = small(p, q);
                if (coef == Complex{0.0, 0.0}) continue;
                const Vector& bp = basis[static_cast<std::size_t>(p)];
                const Vector& bq = basis[static_cast<std::size_t>(q)];
                for (int row = 0; row < d; ++row)
                    for (int col = 0; col < d; ++col)
                        out(row, col) += coef * bp[static_cast<std::size_t>(row)] *
                                         std::conj(bq[static_cast<std::size_t>(col)]);
            }
        }
        return out;
    };

    Povm povm;
    povm.dim = d;
    for (int k = 0; k < n; ++k) {
        Matrix elem = lift(admm.z[static_cast<std::size_t>(k)]) + lift_tail;
        elem.hermitize();
        if (min_eigenvalue(elem) < -1e-10) elem = psd_project(elem);
        povm.elements.push_back(std::move(elem));
    }
    // Distribute the completeness residual equally across the elements.
    {
        Matrix residual = Matrix::identity(d);
        for (const Matrix& e : povm.elements) residual -= e;
        residual *= 1.0 / n;
        residual.hermitize();
        for (Matrix& e : povm.elements) e += residual;
    }

    // Dual certificate: repair feasibility in the working space (shift by the
    // worst eigenvalue violation), then lift.
    Matrix y_small = admm.dual_estimate();
    {
        double viol = 0.0;
        bool first = true;
        for (int k = 0; k < n; ++k) {
            Matrix diff = y_small - admm.targets[static_cast<std::size_t>(k)];
            diff.hermitize();
            const double lam = max_eigenvalue(diff);
            if (first || lam > viol) viol = lam;
            first = false;
        }
        if (viol > 0.0) y_small -= Matrix::identity(r) * viol;
    }
    Matrix y = lift(y_small);
    y.hermitize();

    // Independent re-verification of both certificates against the original states.
    // The verified value of an almost-feasible POVM can dip a few 1e-9 below
    // zero; report it clamped, with the raw residuals kept alongside.
    res.primal_value = std::max(0.0, exclusion_value(states, povm));
    res.povm_min_eig = povm_min_eigenvalue(povm);
    res.povm_completeness = povm_completeness_error(povm);
    const DualCheck dual = check_dual_certificate(states, y);
    res.dual_value = dual.trace;
    res.dual_max_violation = dual.max_violation;
    res.duality_gap = res.primal_value - res.dual_value;
    res.povm = std::move(povm);
    res.dual_certificate = std::move(y);

    const bool povm_ok = res.povm_min_eig >= -1e-8 && res.povm_completeness <= 1e-8;
    const bool dual_ok = res.dual_max_violation <= 1e-8;
    const bool gap_ok = std::abs(res.duality_gap) <= 1e-7;
    if (res.primal_value <= opts.verdict_tol && povm_ok && gap_ok) {
        res.status = ExclusionStatus::antidistinguishable;
    } else if (res.dual_value >= opts.verdict_tol && dual_ok && gap_ok) {
        res.status = ExclusionStatus::not_antidistinguishable;
    } else {
        res.status = ExclusionStatus::indeterminate;
    }
    return res;
}

namespace detail {

// Fast path: if each state has a distinct exactly-zero coordinate and there
// are as many states as dimensions, the permuted computational-basis
// projectors form an excluding measurement (the missing-basis pattern).
inline std::optional<Povm> basis_projector_povm(std::span<const Vector> states) {
    const int n = static_cast<int>(states.size());
    const int d = static_cast<int>(states[0].size());
    if (n != d) return std::nullopt;
    std::vector<int> assigned(static_cast<std::size_t>(d), -1);
    for (int z = 0; z < n; ++z) {
        int zero_at = -1;
        for (int k = 0; k < d; ++k) {
            if (std::abs(states[static_cast<std::size_t>(z)][static_cast<std::size_t>(k)]) <= 1e-12) {
                if (zero_at >= 0) return std::nullopt;  // ambiguous, let the SDP decide
                zero_at = k;
            }
        }
        if (zero_at < 0 || assigned[static_cast<std::size_t>(zero_at)] >= 0) return std::nullopt;
        assigned[static_cast<std::size_t>(zero_at)] = z;
    }
    Povm povm;
    povm.dim = d;
    povm.elements.assign(static_cast<std::size_t>(n), Matrix(d));
    for (int k = 0; k < d; ++k) {
        Vector e(static_cast<std::size_t>(d));
        e[static_cast<std::size_t>(k)] = 1.0;
        povm.elements[static_cast<std::size_t>(assigned[static_cast<std::size_t>(k)])] = Matrix::outer(e);
    }
    return povm;
}

} // namespace detail

// Measurement that never yields outcome z on state z, with element order
// matching the input order. Throws if the states are not antidistinguishable.
inline Povm antidistinguishing_povm(std::span<const Vector> states, const SdpOptions& opts = {}) {
    if (states.size() >= 2) {
        for (const Vector& s : states) require_unit(s, 1e-8, "antidistinguishing_povm");
        if (auto fast = detail::basis_projector_povm(states)) {
            if (exclusion_value(states, *fast) <= opts.verdict_tol) return std::move(*fast);
        }
    }
    ExclusionResult res = exclusion_sdp(states, opts);
    if (res.status != ExclusionStatus::antidistinguishable) {
        throw std::invalid_argument(std::string("antidistinguishing_povm: states are ") +
                                    to_string(res.status));
    }
    return std::move(*res.povm);
}

// Triple decision: the overlap criterion in its sufficient direction first,
// the exclusion SDP as ground truth otherwise.
inline bool is_antidistinguishable_triple(const Vector& u, const Vector& v, const Vector& w,
                                          const SdpOptions& opts = {}) {
    for (const Vector* s : {&u, &v, &w}) require_unit(*s, 1e-8, "is_antidistinguishable_triple");
    if (u.size() != v.size() || u.size() != w.size()) {
        throw std::invalid_argument("is_antidistinguishable_triple: dimension mismatch");
    }
    if (cfs_criterion(triple_overlaps(u, v, w))) return true;
    const std::array<Vector, 3> states{u, v, w};
    return exclusion_sdp(states, opts).status == ExclusionStatus::antidistinguishable;
}

} // namespace adkit
