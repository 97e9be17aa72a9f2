#include "siga/convergence.hpp"
#include "siga/random.hpp"
#include "siga/siga.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace siga {

FixedPointData nu_fixed_point(const GaussianLinearModel& model, double d, double tol, int itmax,
                              const std::optional<RVector>& nu_init)
{
    require_valid(model);
    const Index N = model.rows();
    const Index M = model.cols();
    if (N < 2) {
        throw std::invalid_argument("fixed point analysis needs N >= 2");
    }
    if (!(d > 0.0 && d <= 1.0)) {
        throw std::invalid_argument("damping factor d must lie in (0, 1]");
    }

    RVector nu = nu_init.value_or(RVector::Zero(M));
    if (nu.size() != M) {
        throw DimensionError("nu_init length does not match M");
    }

    FixedPointData fp;
    bool done = false;
    for (int t = 0; t < itmax; ++t) {
        RVector next = nu_step(nu, d, model.D, model.sigma_z2, N);
        const double step = (next - nu).cwiseAbs().maxCoeff();
        nu = std::move(next);
        fp.iterations = t + 1;
        if (step <= tol * std::max(1.0, nu.cwiseAbs().maxCoeff())) {
            done = true;
            break;
        }
    }
    if (!done) {
        throw NonConvergenceError("second-order iteration did not reach tolerance within " +
                                  std::to_string(itmax) + " steps; the tolerance is likely too tight");
    }

    const LambdaBeta lb = lambda_beta(nu, model.D, model.sigma_z2);
    fp.nu_star = nu;
    fp.Lambda_star = lb.lambda;
    fp.beta_star = lb.beta;
    fp.residual_g = (nu - nu_step(nu, d, model.D, model.sigma_z2, N)).cwiseAbs().maxCoeff();

    const double ratio = static_cast<double>(N) / static_cast<double>(N - 1);
    double worst = 0.0;
    for (Index i = 0; i < M; ++i) {
        const double l = lb.lambda(i);
        const double lhs = l - l * l / lb.beta;
        const double rhs = 1.0 / (1.0 / model.D(i) - ratio * nu(i));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    fp.residual_eq21 = worst;
    return fp;
}

ExtremalEigenvalues lanczos_extremal(const GramOperator& op, Index dim, double tol, int max_steps,
                                     std::uint64_t seed)
{
    if (dim < 1) {
        throw DimensionError("operator dimension must be positive");
    }
    detail::ComplexGaussian gauss(seed);
    CVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        v(i) = gauss();
    }
    v.normalize();

    const int steps = static_cast<int>(std::min<Index>(max_steps, dim));
    std::vector<CVector> basis;
    basis.reserve(static_cast<std::size_t>(steps));
    std::vector<double> alpha;
    std::vector<double> beta;

    ExtremalEigenvalues current{0.0, 0.0};
    ExtremalEigenvalues previous{std::nan(""), std::nan("")};

    for (int k = 0; k < steps; ++k) {
        basis.push_back(v);
        CVector w = op(v);
        const double a = v.dot(w).real();
        alpha.push_back(a);
        // Full reorthogonalization, applied twice for stability.
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVector& b : basis) {
                w -= b * b.dot(w);
            }
        }
        const double bnorm = w.norm();

        const Index m = static_cast<Index>(alpha.size());
        RMatrix T = RMatrix::Zero(m, m);
        for (Index i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) {
                T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> es(T, Eigen::EigenvaluesOnly);
        current = {es.eigenvalues()(0), es.eigenvalues()(m - 1)};

        const double scale = std::max(std::abs(current.max), std::abs(current.min));
        const bool invariant = bnorm <= 1e-12 * std::max(1.0, scale);
        if (invariant) {
            break;
        }
        if (k >= 2 && std::abs(current.max - previous.max) <= tol * std::max(1.0, scale) &&
            std::abs(current.min - previous.min) <= tol * std::max(1.0, scale)) {
            break;
        }
        previous = current;
        beta.push_back(bnorm);
        v = w / bnorm;
    }
    return current;
}

double rho_shift(const CMatrix& A, Index dense_limit)
{
    const double N = static_cast<double>(A.rows());
    if (A.cols() <= dense_limit) {
        const CMatrix G = A.adjoint() * A;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
        const RVector& v = es.eigenvalues();
        return std::max(std::abs(N - v(0)), std::abs(N - v(v.size() - 1)));
    }
    const GramOperator op = [&A](const CVector& x) -> CVector { return A.adjoint() * (A * x); };
    return rho_shift(op, A.rows(), A.cols());
}

double rho_shift(const GramOperator& gram, Index N, Index M, double tol)
{
    const ExtremalEigenvalues ext = lanczos_extremal(gram, M, tol, 400);
    const double n = static_cast<double>(N);
    // A^H A is PSD; clamp Ritz noise below zero.
    const double vmin = std::max(0.0, ext.min);
    return std::max(std::abs(n - vmin), std::abs(n - ext.max));
}

DampingBounds damping_bounds(double rho, Index N, Index M, const std::optional<MimoStructure>& structure)
{
    if (!(rho >= 0.0)) {
        throw std::invalid_argument("rho_shift must be nonnegative");
    }
    DampingBounds b;
    b.general = 2.0 / (1.0 + rho / static_cast<double>(N));
    b.worst = 2.0 / static_cast<double>(M);
    if (structure) {
        const double fine = static_cast<double>(structure->Fv) * structure->Fh * structure->Ftau;
        b.mimo = 2.0 / (static_cast<double>(structure->K) * fine);
        b.apsp = 2.0 / fine;
    }
    return b;
}

CMatrix hermitian_similar_bstar(const GaussianLinearModel& model, const FixedPointData& fp)
{
    const Index M = model.cols();
    const double N = static_cast<double>(model.rows());
    RVector s(M);
    for (Index i = 0; i < M; ++i) {
        const double l = fp.Lambda_star(i);
        s(i) = std::sqrt((1.0 - l / (N * model.D(i))) * (l / fp.beta_star));
    }
    CMatrix Q = -(model.A.adjoint() * model.A);
    Q.diagonal().array() += Complex(N, 0.0);
    const auto S = s.cast<Complex>().asDiagonal();
    CMatrix out = S * Q * S;
    return 0.5 * (out + out.adjoint());
}

ConvergenceCertificate certify(const GaussianLinearModel& model, double d, const CertifyOptions& options)
{
    if (!(d > 0.0 && d <= 1.0)) {
        throw std::invalid_argument("damping factor d must lie in (0, 1]");
    }
    ConvergenceCertificate cert;
    cert.d = d;
    cert.certification_tol = options.certification_tol;
    // The fixed point does not depend on the damping factor, so it is located undamped.
    cert.fixed_point = nu_fixed_point(model, 1.0, options.fixed_point_tol, options.fixed_point_itmax);
    const FixedPointData& fp = cert.fixed_point;

    const Index N = model.rows();
    const Index M = model.cols();
    const double n = static_cast<double>(N);
    cert.rho_shift = options.rho_shift.value_or(rho_shift(model.A));

    const DampingBounds bounds = damping_bounds(cert.rho_shift, N, M);
    cert.bound_general = bounds.general;
    cert.bound_worst = bounds.worst;

    const CMatrix Q = hermitian_similar_bstar(model, fp);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Q, Eigen::EigenvaluesOnly);
    cert.eig_Bstar = es.eigenvalues();
    cert.eig_Btilde = (d * cert.eig_Bstar).array() + (1.0 - d);
    cert.rho_Btilde = cert.eig_Btilde.cwiseAbs().maxCoeff();
    cert.certified = cert.rho_Btilde < 1.0;

    const RVector g_min = nu_lower_bound(M, N, model.sigma_z2);
    const double nu_scale = std::max(1.0, fp.nu_star.cwiseAbs().maxCoeff());
    cert.lemma_checks["fixed_point"] =
        fp.residual_g <= options.certification_tol * nu_scale && fp.residual_eq21 <= options.certification_tol;
    cert.lemma_checks["nu_star_range"] = (fp.nu_star.array() < 0.0).all() && (fp.nu_star.array() > g_min.array()).all();

    cert.lambda_margin = fp.beta_star / n - fp.Lambda_star.maxCoeff();
    cert.lemma_checks["lambda_margin"] = cert.lambda_margin > 0.0;

    const double lower_b = -cert.rho_shift / n;
    // With A^H A = N I the matrix B(nu*) vanishes and the open lower end degenerates to 0.
    const bool degenerate = cert.rho_shift <= options.certification_tol * n;
    const bool lower_b_ok = degenerate ? (cert.eig_Bstar.cwiseAbs().maxCoeff() <= options.certification_tol)
                                      : (cert.eig_Bstar.array() > lower_b).all();
    cert.lemma_checks["bstar_spectrum"] = lower_b_ok && (cert.eig_Bstar.array() < 1.0).all();

    const double lower_btilde = 1.0 - d * (1.0 + cert.rho_shift / n);
    cert.lemma_checks["btilde_spectrum"] =
        (cert.eig_Btilde.array() > lower_btilde).all() && (cert.eig_Btilde.array() < 1.0).all();
    return cert;
}

}  // namespace siga
