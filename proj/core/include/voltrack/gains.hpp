#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace voltrack {

inline constexpr int kMaxOrder = 8;
// Orders for which the closed-form Riccati column is tabulated.
inline constexpr int kMaxTabulatedOrder = 4;

/**
 * Positive-definite solution U of the filter Riccati equation
 *
 *     a U + U a' + B B' - U A' A U = 0
 *
 * where a is the (k+1)x(k+1) upper shift matrix, A = e_1' selects the first
 * state coordinate and B = e_{k+1} injects noise into the highest derivative.
 * The first column of U gives the gain coefficients U_{00},...,U_{0k}.
 */
struct RiccatiSolution {
    int k = 0;
    Eigen::MatrixXd u_matrix;
    std::vector<double> first_column;
    double residual_norm = 0.0;  // Frobenius norm of the Riccati residual at u_matrix
};

/// Solves the Riccati equation for smoothness order 0 <= k <= 8. Results are
/// computed once per order and cached; the call is thread-safe.
/// Throws SolverError if the Newton iteration does not converge.
[[nodiscard]] const RiccatiSolution& solve_care(int k);

/// Closed-form first column for k <= 4:
/// (1), (sqrt2, 1), (2, 2, 1), (sqrt(4+sqrt8), 2+sqrt2, sqrt(4+sqrt8), 1),
/// (1+sqrt5, 3+sqrt5, 3+sqrt5, 1+sqrt5, 1).
[[nodiscard]] std::span<const double> tabulated_first_column(int k);

/// Frobenius norm of aU + Ua' + BB' - UA'AU for a candidate U of order k.
[[nodiscard]] double riccati_residual_norm(int k, const Eigen::MatrixXd& u);

/// Recovers the full U from its first column by solving the (linear, once the
/// first column is fixed) Riccati equations in least squares.
[[nodiscard]] Eigen::MatrixXd riccati_from_first_column(int k, std::span<const double> column);

/// Characteristic gains q_j(theta) = U_{0j} * theta^{(j+1)/(k+1)}, j = 0..k.
[[nodiscard]] std::vector<double> characteristic_gains(int k, double theta);

struct GainSchedule {
    int k = 0;
    double theta = 1.0;
    std::size_t n = 0;
    // step_gains[j] = U_{0j} theta^{(j+1)/(k+1)} / n^{(2(k+1)-j)/(2k+3)}
    std::vector<double> step_gains;
};

/// Throws ArgumentError for theta <= 0, n < 2 or k outside [0, 8].
[[nodiscard]] GainSchedule gain_schedule(int k, double theta, std::size_t n);

/// Spectral radius of the homogeneous one-step map of the pure order-k
/// recursion, I + N/n - g e_1' (N the upper shift, g the step gains).
[[nodiscard]] double transition_spectral_radius(int k, double theta, std::size_t n);

/// Largest theta at which that map is still non-expanding (spectral radius
/// <= 1). Beyond it the recursion diverges even though the continuous
/// characteristic polynomial is stable.
[[nodiscard]] double discrete_theta_limit(int k, std::size_t n);

struct StabilityReport {
    std::vector<std::complex<double>> roots;
    bool all_negative_real = false;
    bool all_distinct = false;
    double min_real_gap_to_zero = 0.0;   // min_i -Re(root_i)
    double min_pairwise_distance = 0.0;  // +inf for a single root
};

/// Roots of lambda^{k+1} + q_0 lambda^k + ... + q_k with q_j = characteristic_gains(k, theta).
[[nodiscard]] StabilityReport stability_report(int k, double theta);

/// Roots of the monic polynomial x^m + c_0 x^{m-1} + ... + c_{m-1} via
/// eigenvalues of its companion matrix.
[[nodiscard]] std::vector<std::complex<double>> monic_roots(std::span<const double> coeffs);

/// True when every root of the monic polynomial x^m + c_0 x^{m-1} + ... has
/// real part <= tol (non-positive, so a pure integrator root is accepted).
[[nodiscard]] bool roots_in_closed_left_half_plane(std::span<const double> coeffs, double tol = 1e-12);

}  // namespace voltrack
