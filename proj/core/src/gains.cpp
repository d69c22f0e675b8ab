#include "voltrack/gains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "voltrack/errors.hpp"

namespace voltrack {
namespace {

void check_order(int k) {
    if (k < 0 || k > kMaxOrder) {
        throw ArgumentError("smoothness order k must lie in [0, " + std::to_string(kMaxOrder) +
                            "], got " + std::to_string(k));
    }
}

Eigen::MatrixXd shift_matrix(int m) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) a(i, i + 1) = 1.0;
    return a;
}

// Solves Ac X + X Ac' + Q = 0 by vectorization; m <= 9 keeps this at most 81x81.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& ac, const Eigen::MatrixXd& q) {
    const Eigen::Index m = ac.rows();
    const Eigen::Index mm = m * m;
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(mm, mm);
    for (Eigen::Index col = 0; col < m; ++col) {
        for (Eigen::Index row = 0; row < m; ++row) {
            const Eigen::Index r = col * m + row;  // column-major vec index of X(row, col)
            for (Eigen::Index t = 0; t < m; ++t) {
                op(r, col * m + t) += ac(row, t);  // (Ac X)(row, col)
                op(r, t * m + row) += ac(col, t);  // (X Ac')(row, col)
            }
        }
    }
    Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), mm);
    Eigen::VectorXd x = op.partialPivLu().solve(rhs);
    Eigen::MatrixXd out = Eigen::Map<Eigen::MatrixXd>(x.data(), m, m);
    return 0.5 * (out + out.transpose());
}

struct NewtonOutcome {
    Eigen::MatrixXd u;
    bool converged = false;
};

// Kleinman iteration started from the gain whose closed loop has
// characteristic polynomial (lambda + 1)^{k+1}.
NewtonOutcome newton_care(int k) {
    const int m = k + 1;
    const Eigen::MatrixXd a = shift_matrix(m);
    Eigen::VectorXd gain(m);
    double binom = 1.0;
    for (int j = 0; j < m; ++j) {
        binom = binom * (m - j) / (j + 1);  // C(m, j+1)
        gain(j) = binom;
    }

    NewtonOutcome out;
    Eigen::MatrixXd prev;
    double prev_step = std::numeric_limits<double>::infinity();
    constexpr int kMaxIterations = 100;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::MatrixXd ac = a;
        ac.col(0) -= gain;
        Eigen::MatrixXd q = gain * gain.transpose();
        q(m - 1, m - 1) += 1.0;
        Eigen::MatrixXd u = solve_lyapunov(ac, q);
        gain = u.col(0);
        if (it > 0) {
            const double step = (u - prev).norm();
            const double scale = std::max(1.0, u.norm());
            // Converged, or quadratic phase over and rounding noise has taken over.
            if (step <= 1e-12 * scale || (step >= prev_step && step <= 1e-8 * scale)) {
                out.u = std::move(u);
                out.converged = true;
                return out;
            }
            prev_step = step;
        }
        prev = std::move(u);
    }
    out.u = std::move(prev);
    return out;
}

RiccatiSolution compute_solution(int k) {
    NewtonOutcome newton = newton_care(k);
    RiccatiSolution sol;
    sol.k = k;

    if (k <= kMaxTabulatedOrder) {
        const auto table = tabulated_first_column(k);
        bool agrees = newton.converged;
        for (int j = 0; agrees && j <= k; ++j) {
            agrees = std::abs(newton.u(j, 0) - table[static_cast<std::size_t>(j)]) <= 1e-9;
        }
        sol.u_matrix = agrees ? std::move(newton.u) : riccati_from_first_column(k, table);
        sol.first_column.assign(table.begin(), table.end());
    } else {
        if (!newton.converged) {
            const double res = newton.u.size() > 0 ? riccati_residual_norm(k, newton.u)
                                                   : std::numeric_limits<double>::infinity();
            throw SolverError("Riccati Newton iteration did not converge for k=" + std::to_string(k), res);
        }
        sol.u_matrix = std::move(newton.u);
        sol.first_column.resize(static_cast<std::size_t>(k + 1));
        for (int j = 0; j <= k; ++j) sol.first_column[static_cast<std::size_t>(j)] = sol.u_matrix(j, 0);
    }
    sol.residual_norm = riccati_residual_norm(k, sol.u_matrix);
    return sol;
}

}  // namespace

std::span<const double> tabulated_first_column(int k) {
    static const std::array<std::vector<double>, kMaxTabulatedOrder + 1> table = [] {
        const double s2 = std::sqrt(2.0);
        const double s5 = std::sqrt(5.0);
        const double r3 = std::sqrt(4.0 + std::sqrt(8.0));
        return std::array<std::vector<double>, kMaxTabulatedOrder + 1>{
            std::vector<double>{1.0},
            std::vector<double>{s2, 1.0},
            std::vector<double>{2.0, 2.0, 1.0},
            std::vector<double>{r3, 2.0 + s2, r3, 1.0},
            std::vector<double>{1.0 + s5, 3.0 + s5, 3.0 + s5, 1.0 + s5, 1.0},
        };
    }();
    if (k < 0 || k > kMaxTabulatedOrder) {
        throw ArgumentError("no tabulated Riccati column for k=" + std::to_string(k));
    }
    return table[static_cast<std::size_t>(k)];
}

double riccati_residual_norm(int k, const Eigen::MatrixXd& u) {
    const int m = k + 1;
    if (u.rows() != m || u.cols() != m) throw ArgumentError("U has wrong dimensions for order k");
    const Eigen::MatrixXd a = shift_matrix(m);
    Eigen::MatrixXd res = a * u + u * a.transpose() - u.col(0) * u.row(0);
    res(m - 1, m - 1) += 1.0;
    return res.norm();
}

Eigen::MatrixXd riccati_from_first_column(int k, std::span<const double> column) {
    check_order(k);
    const int m = k + 1;
    if (column.size() != static_cast<std::size_t>(m)) throw ArgumentError("column length must be k+1");
    const int mm = m * m;
    Eigen::Map<const Eigen::VectorXd> c(column.data(), m);

    // Rows: m*m Riccati entries, m first-column constraints, m(m-1)/2 symmetry constraints.
    const int rows = mm + m + m * (m - 1) / 2;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(rows, mm);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    auto idx = [m](int r, int col) { return col * m + r; };

    Eigen::MatrixXd target = c * c.transpose();
    target(m - 1, m - 1) -= 1.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const int r = idx(i, j);
            if (i + 1 < m) sys(r, idx(i + 1, j)) += 1.0;  // (aU)(i,j) = U(i+1,j)
            if (j + 1 < m) sys(r, idx(i, j + 1)) += 1.0;  // (Ua')(i,j) = U(i,j+1)
            rhs(r) = target(i, j);
        }
    }
    int r = mm;
    for (int i = 0; i < m; ++i, ++r) {
        sys(r, idx(i, 0)) = 1.0;
        rhs(r) = c(i);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j, ++r) {
            sys(r, idx(i, j)) = 1.0;
            sys(r, idx(j, i)) = -1.0;
        }
    }
    Eigen::VectorXd x = sys.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXd u = Eigen::Map<Eigen::MatrixXd>(x.data(), m, m);
    return 0.5 * (u + u.transpose());
}

const RiccatiSolution& solve_care(int k) {
    check_order(k);
    static const std::array<RiccatiSolution, kMaxOrder + 1> cache = [] {
        std::array<RiccatiSolution, kMaxOrder + 1> all;
        for (int order = 0; order <= kMaxOrder; ++order) all[static_cast<std::size_t>(order)] = compute_solution(order);
        return all;
    }();
    return cache[static_cast<std::size_t>(k)];
}

std::vector<double> characteristic_gains(int k, double theta) {
    check_order(k);
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ArgumentError("theta must be positive and finite");
    const auto& column = solve_care(k).first_column;
    std::vector<double> q(column.size());
    for (int j = 0; j <= k; ++j) {
        const double exponent = static_cast<double>(j + 1) / static_cast<double>(k + 1);
        q[static_cast<std::size_t>(j)] = column[static_cast<std::size_t>(j)] * std::pow(theta, exponent);
    }
    return q;
}

GainSchedule gain_schedule(int k, double theta, std::size_t n) {
    if (n < 2) throw ArgumentError("sample size n must be at least 2");
    GainSchedule s;
    s.k = k;
    s.theta = theta;
    s.n = n;
    s.step_gains = characteristic_gains(k, theta);
    const double nd = static_cast<double>(n);
    const double denom = 2.0 * k + 3.0;
    for (int j = 0; j <= k; ++j) {
        const double exponent = (2.0 * (k + 1) - j) / denom;
        s.step_gains[static_cast<std::size_t>(j)] /= std::pow(nd, exponent);
    }
    return s;
}

double transition_spectral_radius(int k, double theta, std::size_t n) {
    const GainSchedule g = gain_schedule(k, theta, n);
    const Eigen::Index m = k + 1;
    const double nd = static_cast<double>(n);
    Eigen::MatrixXd f = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) f(i, i + 1) = 1.0 / nd;
    for (Eigen::Index i = 0; i < m; ++i) f(i, 0) -= g.step_gains[static_cast<std::size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(f, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double discrete_theta_limit(int k, std::size_t n) {
    auto stable = [&](double theta) { return transition_spectral_radius(k, theta, n) <= 1.0; };
    // Log scan for the first expanding theta, then bisect the crossing.
    double lo = 1e-8;
    if (!stable(lo)) return 0.0;
    double hi = lo;
    while (stable(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<std::complex<double>> monic_roots(std::span<const double> coeffs) {
    const auto m = static_cast<Eigen::Index>(coeffs.size());
    if (m == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) companion(0, j) = -coeffs[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    std::vector<std::complex<double>> roots(ev.data(), ev.data() + ev.size());
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

bool roots_in_closed_left_half_plane(std::span<const double> coeffs, double tol) {
    const auto roots = monic_roots(coeffs);
    return std::all_of(roots.begin(), roots.end(), [tol](const auto& r) { return r.real() <= tol; });
}

StabilityReport stability_report(int k, double theta) {
    const auto q = characteristic_gains(k, theta);
    StabilityReport rep;
    rep.roots = monic_roots(q);

    rep.min_real_gap_to_zero = std::numeric_limits<double>::infinity();
    double max_magnitude = 0.0;
    for (const auto& r : rep.roots) {
        rep.min_real_gap_to_zero = std::min(rep.min_real_gap_to_zero, -r.real());
        max_magnitude = std::max(max_magnitude, std::abs(r));
    }
    rep.all_negative_real = rep.min_real_gap_to_zero > 0.0;

    rep.min_pairwise_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.roots.size(); ++j) {
            rep.min_pairwise_distance = std::min(rep.min_pairwise_distance, std::abs(rep.roots[i] - rep.roots[j]));
        }
    }
    rep.all_distinct = rep.min_pairwise_distance > 1e-8 * max_magnitude;
    return rep;
}

}  // namespace voltrack
