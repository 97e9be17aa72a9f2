#include "siga/linmodel.hpp"
#include "siga/random.hpp"

#include <cmath>
#include <sstream>

namespace siga {

ValidationReport validate_model(const GaussianLinearModel& model, double tol)
{
    ValidationReport report;
    const Index N = model.A.rows();
    const Index M = model.A.cols();

    if (N < 1) {
        report.push_back({"A", std::nullopt, std::nullopt, "measurement matrix has no rows (N >= 1 required)"});
    }
    if (M < 2) {
        report.push_back({"A", std::nullopt, std::nullopt, "fewer than two columns (M >= 2 required)"});
    }
    for (Index j = 0; j < M; ++j) {
        for (Index i = 0; i < N; ++i) {
            const Complex a = model.A(i, j);
            const double mag = std::abs(a);
            if (!std::isfinite(mag) || std::abs(1.0 - mag) > tol) {
                std::ostringstream os;
                os.precision(17);
                os << "entry magnitude " << mag << " is not 1";
                report.push_back({"A", i, j, os.str()});
            }
        }
    }

    if (model.D.size() != M) {
        report.push_back({"D", std::nullopt, std::nullopt,
                          "prior variance vector length " + std::to_string(model.D.size()) +
                              " does not match M = " + std::to_string(M)});
    }
    for (Index i = 0; i < model.D.size(); ++i) {
        if (!(model.D(i) > 0.0) || !std::isfinite(model.D(i))) {
            report.push_back({"D", i, std::nullopt, "nonpositive prior variance"});
        }
    }

    if (!(model.sigma_z2 > 0.0) || !std::isfinite(model.sigma_z2)) {
        report.push_back({"sigma_z2", std::nullopt, std::nullopt, "noise power must be positive"});
    }

    if (model.y.size() != N) {
        report.push_back({"y", std::nullopt, std::nullopt,
                          "observation length " + std::to_string(model.y.size()) +
                              " does not match N = " + std::to_string(N)});
    }
    for (Index i = 0; i < model.y.size(); ++i) {
        if (!std::isfinite(model.y(i).real()) || !std::isfinite(model.y(i).imag())) {
            report.push_back({"y", i, std::nullopt, "non-finite observation entry"});
        }
    }
    return report;
}

std::string to_string(const Violation& v)
{
    std::string s = v.field;
    if (v.row) {
        s += "[" + std::to_string(*v.row);
        if (v.col) {
            s += "," + std::to_string(*v.col);
        }
        s += "]";
    }
    return s + ": " + v.message;
}

void require_valid(const GaussianLinearModel& model, double tol)
{
    const auto report = validate_model(model, tol);
    if (report.empty()) {
        return;
    }
    std::string msg = "invalid model (" + std::to_string(report.size()) + " violation(s))";
    for (std::size_t k = 0; k < report.size() && k < 5; ++k) {
        msg += "; " + to_string(report[k]);
    }
    throw std::invalid_argument(msg);
}

PosteriorExact exact_posterior(const GaussianLinearModel& model)
{
    require_valid(model);
    const Index M = model.cols();
    const double s2 = model.sigma_z2;

    const CMatrix G = model.A.adjoint() * model.A;
    const CVector q = model.A.adjoint() * model.y;

    // Sigma = (D^{-1} + G / s2)^{-1}
    CMatrix precision = G / s2;
    precision.diagonal().array() += model.D.cwiseInverse().array().cast<Complex>();
    Eigen::LLT<CMatrix> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("posterior precision matrix is not positive definite");
    }
    PosteriorExact post;
    post.Sigma = llt.solve(CMatrix::Identity(M, M));
    post.Sigma = (0.5 * (post.Sigma + post.Sigma.adjoint())).eval();

    // mu = D (G D + s2 I)^{-1} A^H y
    CMatrix system = G * model.D.cast<Complex>().asDiagonal();
    system.diagonal().array() += Complex(s2, 0.0);
    Eigen::PartialPivLU<CMatrix> lu(system);
    if (!(lu.rcond() > 1e-14)) {
        throw NumericalError("posterior mean system is numerically singular");
    }
    post.mu = model.D.cast<Complex>().asDiagonal() * lu.solve(q);

    const CVector mu_alt = post.Sigma * q / s2;
    const double scale = std::max(post.mu.norm(), mu_alt.norm());
    post.mean_form_gap = scale > 0.0 ? (post.mu - mu_alt).norm() / scale : 0.0;
    return post;
}

Observation simulate_observation(const CMatrix& A, const RVector& D, double sigma_z2,
                                 std::uint64_t seed, bool noiseless)
{
    if (D.size() != A.cols()) {
        throw DimensionError("prior variance length does not match the number of columns of A");
    }
    detail::ComplexGaussian gauss(seed);
    Observation obs;
    obs.h.resize(A.cols());
    for (Index i = 0; i < A.cols(); ++i) {
        obs.h(i) = gauss(D(i));
    }
    obs.z.resize(A.rows());
    for (Index n = 0; n < A.rows(); ++n) {
        const Complex draw = gauss(sigma_z2);
        obs.z(n) = noiseless ? Complex(0.0, 0.0) : draw;
    }
    obs.y = A * obs.h + obs.z;
    return obs;
}

CMatrix random_unit_magnitude_matrix(Index N, Index M, std::uint64_t seed)
{
    detail::ComplexGaussian gauss(seed);
    CMatrix A(N, M);
    // Column-major fill keeps the draw order stable for a given (N, M, seed).
    for (Index j = 0; j < M; ++j) {
        for (Index i = 0; i < N; ++i) {
            A(i, j) = gauss.phase();
        }
    }
    return A;
}

GaussianLinearModel make_general_random_model(Index N, Index M, double sigma_z2, std::uint64_t seed)
{
    GaussianLinearModel model;
    model.A = random_unit_magnitude_matrix(N, M, seed);
    model.D = RVector::Ones(M);
    model.sigma_z2 = sigma_z2;
    // Independent stream for (h, z) so the same A can be paired with other observations.
    model.y = simulate_observation(model.A, model.D, sigma_z2, seed ^ 0x9e3779b97f4a7c15ULL).y;
    return model;
}

}  // namespace siga
