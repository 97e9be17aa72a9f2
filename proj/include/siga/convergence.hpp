#pragma once

#include "siga/linmodel.hpp"
#include "siga/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace siga {

inline constexpr double kCertificationTol = 1e-10;

struct FixedPointData {
    RVector nu_star;
    RVector Lambda_star;
    double beta_star = 0.0;
    double residual_g = 0.0;    // ||nu* - g~(nu*)||_inf (checked relative to max(1, ||nu*||_inf))
    double residual_eq21 = 0.0; // max_i |L_i - L_i^2 / beta - 1 / (D_i^{-1} - N/(N-1) nu_i)|
    int iterations = 0;
};

/// Iterates the damped second-order map from `nu_init` (zeros when unset) until the step is
/// below tol * max(1, ||nu||_inf). Throws NonConvergenceError after `itmax` steps.
FixedPointData nu_fixed_point(const GaussianLinearModel& model, double d = 1.0, double tol = 1e-13,
                              int itmax = 100000, const std::optional<RVector>& nu_init = std::nullopt);

/// Applies a Hermitian PSD operator (A^H A) to a vector.
using GramOperator = std::function<CVector(const CVector&)>;

struct ExtremalEigenvalues {
    double min = 0.0;
    double max = 0.0;
};

/// Extremal eigenvalues of a Hermitian operator of dimension `dim` by Lanczos with full
/// reorthogonalization. Stops when both Ritz values move by less than tol * |max|.
ExtremalEigenvalues lanczos_extremal(const GramOperator& op, Index dim, double tol = 1e-9,
                                     int max_steps = 300, std::uint64_t seed = 7);

/// rho(N I - A^H A) = max(|N - v_min|, |N - v_max|) from the eigenvalues of A^H A.
/// Uses a full Hermitian eigendecomposition for M <= dense_limit, Lanczos otherwise.
double rho_shift(const CMatrix& A, Index dense_limit = 3000);

/// Matrix-free variant for structured operators.
double rho_shift(const GramOperator& gram, Index N, Index M, double tol = 1e-9);

struct MimoStructure {
    int K = 1;
    int Fv = 1;
    int Fh = 1;
    int Ftau = 1;
};

struct DampingBounds {
    double general = 0.0;  // 2 / (1 + rho_shift / N)
    double worst = 0.0;    // 2 / M
    std::optional<double> mimo;  // 2 / (K Fv Fh Ftau)
    std::optional<double> apsp;  // 2 / (Fv Fh Ftau)
};

DampingBounds damping_bounds(double rho_shift, Index N, Index M,
                             const std::optional<MimoStructure>& structure = std::nullopt);

struct ConvergenceCertificate {
    double d = 0.0;
    double rho_shift = 0.0;
    double bound_general = 0.0;
    double bound_worst = 0.0;
    RVector eig_Bstar;   // ascending
    RVector eig_Btilde;  // d * eig_Bstar + 1 - d
    double rho_Btilde = 0.0;
    bool certified = false;
    std::map<std::string, bool> lemma_checks;
    FixedPointData fixed_point;
    double lambda_margin = 0.0;  // beta* / N - max Lambda*
    double certification_tol = kCertificationTol;
};

struct CertifyOptions {
    double fixed_point_tol = 1e-13;
    int fixed_point_itmax = 100000;
    double certification_tol = kCertificationTol;
    /// Reuse a known rho(N I - A^H A) instead of recomputing it.
    std::optional<double> rho_shift;
};

/// Certificate for the first-order iteration at damping d: the spectrum of B(nu*) is
/// obtained from the Hermitian matrix S (N I - A^H A) S, S = ((I - D^{-1} Lambda* / N) Lambda* / beta*)^{1/2},
/// which is diagonally similar to B(nu*). `certified` means rho(Btilde*) < 1; a false value
/// only says the sufficient condition failed.
ConvergenceCertificate certify(const GaussianLinearModel& model, double d, const CertifyOptions& options = {});

/// The Hermitian matrix similar to B(nu*) at the given fixed point.
CMatrix hermitian_similar_bstar(const GaussianLinearModel& model, const FixedPointData& fp);

}  // namespace siga
