#pragma once

#include "siga/linmodel.hpp"
#include "siga/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace siga::mimo {

/// Rounding of Nf = Np * Ng / Nc. Floor is the "largest integer not larger than" convention.
enum class NfRounding { Floor, Ceil };

struct MimoOfdmConfig {
    int Nrv = 1;
    int Nrh = 1;
    int K = 1;
    int Np = 1;
    int Nc = 1;
    int Ng = 1;
    int Fv = 1;
    int Fh = 1;
    int Ftau = 1;
    NfRounding rounding = NfRounding::Floor;

    Index Nr() const { return static_cast<Index>(Nrv) * Nrh; }
    Index Nf() const;
    Index N() const { return Nr() * Np; }
    Index Fa() const { return static_cast<Index>(Fv) * Fh; }
    /// Columns of the full general-pilot matrix: K Fv Fh Ftau Nr Nf.
    Index Mtilde_general() const { return K * Fa() * Ftau * Nr() * Nf(); }
    /// Columns of the full APSP matrix: Fv Fh Ftau N.
    Index Mtilde_apsp() const { return Fa() * Ftau * N(); }

    /// Throws std::invalid_argument on nonpositive fields, Np > Nc or Nf < 1.
    void validate() const;
};

/// Desk-scale configuration used throughout the tests: 2x2 array, K = 2, Np = 16, Nc = 64,
/// Ng = 8, all fine factors 2 (N = 64, Nf = 2).
MimoOfdmConfig small_config();

/// Table I parameters: 8x16 array, K = 48, Np = 360, Nc = 2048, Ng = 144, fine factors 2.
MimoOfdmConfig table_config();

struct GeneralPilots {
    std::vector<CVector> x;  // one unit-magnitude length-Np sequence per user
};

struct ApspPilots {
    std::vector<int> shifts;  // n_k in [0, Ftau Np - 1]
    CVector p;                // unit-magnitude basic pilot, length Np
};

using PilotScheme = std::variant<GeneralPilots, ApspPilots>;

struct BeamSupport {
    std::vector<Index> support;  // strictly increasing, 0-based
    RVector omega;               // positive variances, one per support index
};

/// First L rows of the (F L)-point unnormalized DFT: entry (m, n) = exp(-i 2 pi m n / (F L)).
CMatrix partial_dft(Index rows, Index factor);

/// Kronecker product of two dense complex matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// V = Vv (x) Vh, of size Nr x Fv Fh Nr.
CMatrix spatial_basis(const MimoOfdmConfig& cfg);

/// Fd = first Np rows of the Ftau Np-point DFT.
CMatrix delay_basis(const MimoOfdmConfig& cfg);

/// F = first Ftau Nf columns of Fd.
CMatrix truncated_delay_basis(const MimoOfdmConfig& cfg);

/// Np x K Ftau Nf matrix [X_1 F, ..., X_K F] (the transpose of the stacked pilot matrix).
CMatrix pilot_delay_matrix(const MimoOfdmConfig& cfg, const GeneralPilots& pilots);

/// r(n_k)_j = exp(-i 2 pi n_k j / (Ftau Np)) for j = 0 .. Np-1 (contiguous training subcarriers).
CVector apsp_phase(const MimoOfdmConfig& cfg, int shift);

/// Diagonal of X_k = Diag(r(n_k)) P.
CVector apsp_pilot(const MimoOfdmConfig& cfg, const ApspPilots& pilots, int user);

GeneralPilots random_general_pilots(const MimoOfdmConfig& cfg, std::uint64_t seed);

struct MeasurementSkeleton {
    CMatrix A;
    RVector D;
};

/// A = (M^T (x) V) E and D = Diag(omega) for general constant-magnitude pilots.
MeasurementSkeleton build_general_measurement(const MimoOfdmConfig& cfg, const GeneralPilots& pilots,
                                              const BeamSupport& support);

/// A = (Fd (x) V) E_p and D = Diag(omega) for adjustable phase shift pilots. The support is an
/// index set into the Fv Fh Ftau N columns of Fd (x) V.
MeasurementSkeleton build_apsp_measurement(const MimoOfdmConfig& cfg, const ApspPilots& pilots,
                                           const BeamSupport& support);

/// Full unextracted matrices, for desk-scale checks.
CMatrix full_general_matrix(const MimoOfdmConfig& cfg, const GeneralPilots& pilots);
CMatrix full_apsp_matrix(const MimoOfdmConfig& cfg);

/// h_i ~ CN(0, omega_i), independent.
CVector sample_channel(const BeamSupport& support, std::uint64_t seed);

/// Every column index with unit variance.
BeamSupport full_support(Index Mtilde);

/// `count` distinct indices drawn uniformly from [0, Mtilde), sorted, with variances uniform in
/// [omega_min, omega_max].
BeamSupport random_support(Index Mtilde, Index count, std::uint64_t seed, double omega_min = 0.1,
                           double omega_max = 1.0);

/// Reads "index [omega]" lines; '#' starts a comment. Missing omega defaults to 1.
BeamSupport load_support(const std::string& path);
void save_support(const std::string& path, const BeamSupport& support);

/// Attaches a simulated observation y = A h + z, h drawn from the support variances.
GaussianLinearModel make_model(const MeasurementSkeleton& skeleton, double sigma_z2, std::uint64_t seed);

/// Matrix-free A = (L (x) V) E with L of size Np x cL and V of size Nr x nV.
class KroneckerOperator {
public:
    KroneckerOperator(CMatrix left, CMatrix basis, std::vector<Index> support);

    Index rows() const { return left_.rows() * basis_.rows(); }
    Index cols() const { return static_cast<Index>(support_.size()); }

    CVector apply(const CVector& x) const;
    CVector apply_adjoint(const CVector& u) const;
    CVector gram(const CVector& x) const { return apply_adjoint(apply(x)); }

    static KroneckerOperator general(const MimoOfdmConfig& cfg, const GeneralPilots& pilots,
                                     const BeamSupport& support);
    static KroneckerOperator apsp(const MimoOfdmConfig& cfg, const BeamSupport& support);

private:
    CMatrix left_;
    CMatrix basis_;
    std::vector<Index> support_;
};

}  // namespace siga::mimo
