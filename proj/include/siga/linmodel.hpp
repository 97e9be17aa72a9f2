#pragma once

#include "siga/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace siga {

/// Linear-Gaussian observation model y = A h + z with h ~ CN(0, diag(D)) and
/// z ~ CN(0, sigma_z2 I). A is expected to have unit-magnitude entries.
struct GaussianLinearModel {
    CMatrix A;
    RVector D;
    double sigma_z2 = 1.0;
    CVector y;

    Index rows() const { return A.rows(); }  // N
    Index cols() const { return A.cols(); }  // M
};

struct Violation {
    std::string field;
    std::optional<Index> row;
    std::optional<Index> col;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

inline constexpr double kUnitMagnitudeTol = 1e-9;

/// Checks every model invariant and lists the offending entries. Never throws.
ValidationReport validate_model(const GaussianLinearModel& model, double tol = kUnitMagnitudeTol);

/// Throws std::invalid_argument carrying the first few violations when the report is not empty.
void require_valid(const GaussianLinearModel& model, double tol = kUnitMagnitudeTol);

std::string to_string(const Violation& v);

struct PosteriorExact {
    CVector mu;
    CMatrix Sigma;
    /// Relative gap between D (G D + s I)^{-1} A^H y and Sigma A^H y / s.
    double mean_form_gap = 0.0;
};

/// Exact Gaussian posterior of h given y. The covariance is obtained from a Cholesky
/// factorization of D^{-1} + A^H A / sigma_z2; the mean from D (A^H A D + sigma_z2 I)^{-1} A^H y.
PosteriorExact exact_posterior(const GaussianLinearModel& model);

struct Observation {
    CVector h;
    CVector z;
    CVector y;
};

/// Draws h ~ CN(0, diag(D)), z ~ CN(0, sigma_z2 I) and forms y = A h + z.
/// CN(0, v) has independent real and imaginary parts with variance v / 2 each.
/// With `noiseless` set, z is forced to zero.
Observation simulate_observation(const CMatrix& A, const RVector& D, double sigma_z2,
                                 std::uint64_t seed, bool noiseless = false);

/// N x M matrix whose entries are the phases of i.i.d. complex standard Gaussians.
CMatrix random_unit_magnitude_matrix(Index N, Index M, std::uint64_t seed);

/// Random model of the general scenario: unit-magnitude A, D = 1, simulated y.
GaussianLinearModel make_general_random_model(Index N, Index M, double sigma_z2, std::uint64_t seed);

}  // namespace siga
