#include "siga/siga.hpp"

#include <cmath>
#include <string>

namespace siga {

namespace {

// beta - Lambda_i = sigma_z2 + sum_{i' != i} Lambda_i'
RVector beta_minus_lambda(const LambdaBeta& lb, double sigma_z2)
{
    const double total = lb.lambda.sum();
    RVector out(lb.lambda.size());
    for (Index i = 0; i < lb.lambda.size(); ++i) {
        out(i) = sigma_z2 + (total - lb.lambda(i));
    }
    return out;
}

double inf_norm(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double inf_norm(const RVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool all_finite(const CVector& v)
{
    return v.array().real().isFinite().all() && v.array().imag().isFinite().all();
}

}  // namespace

LambdaBeta lambda_beta(const RVector& nu, const RVector& D, double sigma_z2)
{
    if (nu.size() != D.size()) {
        throw DimensionError("nu and D differ in length");
    }
    LambdaBeta lb;
    lb.lambda.resize(nu.size());
    for (Index i = 0; i < nu.size(); ++i) {
        if (!(nu(i) <= 0.0)) {
            throw DomainError("nu[" + std::to_string(i) + "] is positive or NaN; the update is only defined for nu <= 0");
        }
        lb.lambda(i) = 1.0 / (1.0 / D(i) - nu(i));
    }
    lb.beta = sigma_z2 + lb.lambda.sum();
    return lb;
}

RVector nu_map(const RVector& nu, const RVector& D, double sigma_z2, Index N)
{
    const LambdaBeta lb = lambda_beta(nu, D, sigma_z2);
    const RVector rest = beta_minus_lambda(lb, sigma_z2);
    const double scale = static_cast<double>(N - 1);
    return (-scale) * rest.cwiseInverse();
}

RVector nu_step(const RVector& nu, double d, const RVector& D, double sigma_z2, Index N)
{
    return d * nu_map(nu, D, sigma_z2, N) + (1.0 - d) * nu;
}

RVector nu_lower_bound(Index M, Index N, double sigma_z2)
{
    return RVector::Constant(M, -static_cast<double>(N - 1) / sigma_z2);
}

SigaWorkspace::SigaWorkspace(const GaussianLinearModel& model)
    : G_(model.A.adjoint() * model.A),
      q_(model.A.adjoint() * model.y),
      D_(model.D),
      sigma_z2_(model.sigma_z2),
      N_(model.A.rows())
{
}

CVector theta_step(const CVector& theta, const RVector& nu, double d, const SigaWorkspace& ws)
{
    if (theta.size() != ws.M()) {
        throw DimensionError("theta length does not match M");
    }
    const LambdaBeta lb = lambda_beta(nu, ws.prior(), ws.sigma_z2());
    const RVector rest = beta_minus_lambda(lb, ws.sigma_z2());
    const double N = static_cast<double>(ws.N());

    const CVector scaled = lb.lambda.cast<Complex>().cwiseProduct(theta);
    const CVector coupled = ws.gram() * scaled;

    CVector next(theta.size());
    const double c_b = (N - 1.0) / lb.beta;
    const double c_off = 2.0 * d * (N - 1.0) / (N * lb.beta);
    for (Index i = 0; i < theta.size(); ++i) {
        const double t_i = lb.beta / rest(i);
        const Complex b_theta = c_b * t_i * (scaled(i) - coupled(i) / N);
        next(i) = d * b_theta + (1.0 - d) * theta(i) + c_off * t_i * ws.matched()(i);
    }
    return next;
}

CMatrix iteration_matrix(const RVector& nu, const SigaWorkspace& ws)
{
    const LambdaBeta lb = lambda_beta(nu, ws.prior(), ws.sigma_z2());
    const RVector rest = beta_minus_lambda(lb, ws.sigma_z2());
    const double N = static_cast<double>(ws.N());
    const Index M = ws.M();

    CMatrix B = -ws.gram() / N;
    B.diagonal().array() += Complex(1.0, 0.0);
    for (Index i = 0; i < M; ++i) {
        const double row = (N - 1.0) / lb.beta * (lb.beta / rest(i));
        B.row(i) *= row;
    }
    for (Index j = 0; j < M; ++j) {
        B.col(j) *= lb.lambda(j);
    }
    return B;
}

CVector offset_vector(const RVector& nu, double d, const SigaWorkspace& ws)
{
    const LambdaBeta lb = lambda_beta(nu, ws.prior(), ws.sigma_z2());
    const RVector rest = beta_minus_lambda(lb, ws.sigma_z2());
    const double N = static_cast<double>(ws.N());
    const double c = 2.0 * d * (N - 1.0) / (N * lb.beta);
    CVector b(ws.M());
    for (Index i = 0; i < ws.M(); ++i) {
        b(i) = c * (lb.beta / rest(i)) * ws.matched()(i);
    }
    return b;
}

std::string_view to_string(SigaStatus status)
{
    switch (status) {
    case SigaStatus::Converged:
        return "Converged";
    case SigaStatus::MaxIterations:
        return "MaxIterations";
    case SigaStatus::Diverged:
        return "Diverged";
    }
    return "Unknown";
}

void validate_config(const SigaConfig& config, Index N, Index M, double sigma_z2)
{
    if (!(config.d > 0.0 && config.d <= 1.0)) {
        throw std::invalid_argument("damping factor d must lie in (0, 1]");
    }
    if (config.t_max < 1) {
        throw std::invalid_argument("t_max must be positive");
    }
    if (!(config.tol_nu > 0.0) || !(config.tol_theta > 0.0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (config.divergence_guard && !(*config.divergence_guard > 0.0)) {
        throw std::invalid_argument("divergence_guard must be positive");
    }
    if (config.nu_init) {
        const RVector& nu = *config.nu_init;
        if (nu.size() != M) {
            throw DimensionError("nu_init length does not match M");
        }
        const double lower = -static_cast<double>(N - 1) / sigma_z2;
        for (Index i = 0; i < M; ++i) {
            if (!(nu(i) <= 0.0 && nu(i) >= lower)) {
                throw std::invalid_argument("nu_init[" + std::to_string(i) +
                                            "] outside [-(N-1)/sigma_z2, 0]");
            }
        }
    }
    if (config.theta_init) {
        if (config.theta_init->size() != M) {
            throw DimensionError("theta_init length does not match M");
        }
        if (!all_finite(*config.theta_init)) {
            throw std::invalid_argument("theta_init must be finite");
        }
    }
}

SigaResult run(const GaussianLinearModel& model, const SigaConfig& config)
{
    require_valid(model);
    const Index N = model.rows();
    const Index M = model.cols();
    if (N < 2) {
        throw std::invalid_argument("the iteration needs at least two observations (N >= 2)");
    }
    validate_config(config, N, M, model.sigma_z2);

    const SigaWorkspace ws(model);
    const double d = config.d;

    RVector nu = config.nu_init.value_or(RVector::Zero(M));
    CVector theta = config.theta_init.value_or(CVector::Zero(M));
    const double guard = config.divergence_guard.value_or(1e12 * (1.0 + inf_norm(theta)));

    SigaResult result;
    result.trajectory.reserve(static_cast<std::size_t>(std::min(config.t_max, 100000)) + 1);
    result.trajectory.push_back({0, nu.norm(), theta.norm(), 0.0, 0.0});
    result.status = SigaStatus::MaxIterations;

    for (int t = 0; t < config.t_max; ++t) {
        RVector nu_next = nu_step(nu, d, model.D, model.sigma_z2, N);
        CVector theta_next = config.nu_only ? theta : theta_step(theta, nu, d, ws);

        if (!all_finite(theta_next) || !nu_next.array().isFinite().all()) {
            result.status = SigaStatus::Diverged;
            break;
        }
        const double dnu = inf_norm(RVector(nu_next - nu));
        const double dtheta = inf_norm(CVector(theta_next - theta));
        const double theta_scale = inf_norm(theta);

        nu = std::move(nu_next);
        theta = std::move(theta_next);
        result.iterations = t + 1;
        result.trajectory.push_back({t + 1, nu.norm(), theta.norm(), dnu, dtheta});

        if (inf_norm(theta) > guard) {
            result.status = SigaStatus::Diverged;
            break;
        }
        if (dnu <= config.tol_nu && dtheta <= config.tol_theta * (1.0 + theta_scale)) {
            result.status = SigaStatus::Converged;
            break;
        }
    }

    result.nu_star = nu;
    result.theta_star = theta;
    result.residual_nu = inf_norm(RVector(nu - nu_step(nu, d, model.D, model.sigma_z2, N)));
    result.residual_theta = inf_norm(CVector(theta - theta_step(theta, nu, d, ws)));

    const double ratio = static_cast<double>(N) / static_cast<double>(N - 1);
    result.nu0 = ratio * nu;
    result.theta0 = ratio * theta;
    result.sigma0_diag = (model.D.cwiseInverse() - result.nu0).cwiseInverse();
    result.mu0 = 0.5 * result.sigma0_diag.cast<Complex>().cwiseProduct(result.theta0);
    return result;
}

}  // namespace siga
