#pragma once

#include "siga/linmodel.hpp"
#include "siga/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace siga {

/// Common natural parameters shared by all auxiliary factors: theta (first order)
/// and nu (second order).
struct CommonNaturalParams {
    CVector theta;
    RVector nu;
};

struct LambdaBeta {
    RVector lambda;  // diag of (D^{-1} - Diag(nu))^{-1}
    double beta = 0.0;  // sigma_z2 + trace(Lambda)
};

/// Lambda_i = 1 / (D_i^{-1} - nu_i), beta = sigma_z2 + sum_i Lambda_i.
/// Throws DomainError if any nu_i > 0.
LambdaBeta lambda_beta(const RVector& nu, const RVector& D, double sigma_z2);

/// Undamped second-order map g_i(nu) = -(N - 1) / (sigma_z2 + sum_{i' != i} Lambda_i'(nu)).
RVector nu_map(const RVector& nu, const RVector& D, double sigma_z2, Index N);

/// Damped second-order update d * g(nu) + (1 - d) * nu.
RVector nu_step(const RVector& nu, double d, const RVector& D, double sigma_z2, Index N);

/// Lower bound -(N - 1) / sigma_z2 * 1 of the second-order iteration.
RVector nu_lower_bound(Index M, Index N, double sigma_z2);

/// Quantities reused by every first-order update of one run.
class SigaWorkspace {
public:
    explicit SigaWorkspace(const GaussianLinearModel& model);

    const CMatrix& gram() const { return G_; }        // A^H A
    const CVector& matched() const { return q_; }     // A^H y
    const RVector& prior() const { return D_; }
    double sigma_z2() const { return sigma_z2_; }
    Index N() const { return N_; }
    Index M() const { return G_.rows(); }

private:
    CMatrix G_;
    CVector q_;
    RVector D_;
    double sigma_z2_;
    Index N_;
};

/// theta' = Btilde(nu) theta + b(nu) using only diagonal inversions and one product with A^H A.
CVector theta_step(const CVector& theta, const RVector& nu, double d, const SigaWorkspace& ws);

/// Dense B(nu) = (N - 1) / beta * T(nu) (I - A^H A / N) Lambda(nu), T = (I - Lambda / beta)^{-1}.
CMatrix iteration_matrix(const RVector& nu, const SigaWorkspace& ws);

/// b(nu) = 2 d (N - 1) / (N beta) * T(nu) A^H y.
CVector offset_vector(const RVector& nu, double d, const SigaWorkspace& ws);

enum class SigaStatus { Converged, MaxIterations, Diverged };

std::string_view to_string(SigaStatus status);

struct SigaConfig {
    double d = 1.0;
    int t_max = 10000;
    double tol_nu = 1e-12;
    double tol_theta = 1e-10;
    std::optional<RVector> nu_init;     // zeros when unset
    std::optional<CVector> theta_init;  // zeros when unset
    /// Abort threshold on ||theta||_inf; 1e12 * (1 + ||theta(0)||_inf) when unset.
    std::optional<double> divergence_guard;
    /// Hold theta at its initial value and iterate nu alone; convergence is judged on nu only.
    bool nu_only = false;
};

/// Throws std::invalid_argument when the configuration is inconsistent with the model.
void validate_config(const SigaConfig& config, Index N, Index M, double sigma_z2);

struct TrajectoryRecord {
    int t = 0;
    double nu_norm2 = 0.0;
    double theta_norm2 = 0.0;
    double dnu_inf = 0.0;
    double dtheta_inf = 0.0;
};

struct SigaResult {
    CVector theta_star;
    RVector nu_star;
    CVector theta0;     // N / (N - 1) * theta_star
    RVector nu0;        // N / (N - 1) * nu_star
    CVector mu0;
    RVector sigma0_diag;
    int iterations = 0;
    SigaStatus status = SigaStatus::MaxIterations;
    double residual_nu = 0.0;     // ||nu - g~(nu)||_inf at the returned point
    double residual_theta = 0.0;  // ||theta - Btilde theta - b||_inf at the returned point
    std::vector<TrajectoryRecord> trajectory;  // row t = 0 holds the initialization
};

/// Synchronous damped iteration of (theta, nu) followed by the output map
/// Sigma0 = (D^{-1} - Diag(nu0))^{-1}, mu0 = Sigma0 theta0 / 2.
SigaResult run(const GaussianLinearModel& model, const SigaConfig& config);

}  // namespace siga
