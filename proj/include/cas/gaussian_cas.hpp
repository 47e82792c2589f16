#pragma once

// Closed forms for the Gaussian target-response-matrix (TRM) example.
//
// The sensing channel H_s (M_s x N) has i.i.d. columns ~ CN(0, Sigma_s); the
// waveform X (N x T) illuminates it and reaches the user through H_c. Every
// distortion and rate below depends on X only through the Gram Q = X X^H.
//
// Scaling convention: the sensing MSE uses the factor T / sigma_s^2 on Q and
// the channel MI uses T / sigma_c^2. Waveform-level routines (mmse_filter,
// estimate_covariance, the simulator) model the per-block observation noise
// as CN(0, sigma^2 / T) so that they reproduce the Gram-level closed forms.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace cas::gaussian {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct Dimensions
{
    int symbols = 1;       // T
    int tx = 1;            // N
    int sensing_rx = 1;    // M_s
    int comm_rx = 1;       // M_c
};

struct TrmModel
{
    CMatrix sigma_s;       // N x N prior covariance of each column of H_s
    CMatrix h_c;           // M_c x N
    double noise_s = 1.0;  // sigma_s^2
    double noise_c = 1.0;  // sigma_c^2
    Dimensions dims;
    double power = 1.0;    // P_T; Tr(Q) <= T * P_T

    double trace_budget() const { return dims.symbols * power; }
};

// Throws ConfigError on shape, Hermitian-symmetry, or positivity violations.
void validate(const TrmModel& model);

// Hermitian PSD Gram matrix. Construction symmetrizes and clips negative
// eigenvalues; inputs further than 1e-10 from Hermitian are rejected.
class GramMatrix
{
public:
    GramMatrix() = default;
    explicit GramMatrix(const CMatrix& q);

    static GramMatrix zero(int n) { return GramMatrix(CMatrix::Zero(n, n)); }
    static GramMatrix scaled_identity(int n, double p) { return GramMatrix(p * CMatrix::Identity(n, n)); }
    static GramMatrix from_waveform(const CMatrix& x) { return GramMatrix(x * x.adjoint()); }

    const CMatrix& matrix() const { return q_; }
    int dim() const { return static_cast<int>(q_.rows()); }
    double trace() const { return q_.trace().real(); }

private:
    CMatrix q_;
};

// Throws ConfigError when q does not match the model or exceeds the power.
void check_feasible(const TrmModel& model, const GramMatrix& q);

struct Spectrum
{
    std::vector<double> eigenvalues;  // descending, each repeated M_s times
    double xi = 0.0;
};

enum class MseForm
{
    Automatic,   // direct when Sigma_s is invertible, inverse-free otherwise
    Direct,      // M_s Tr[(T/sigma^2 Q + Sigma_s^{-1})^{-1}]
    InverseFree  // M_s Tr[Sigma_s - Sigma_s X R_z^{-1} X^H Sigma_s]
};

// D_s = E||s - s~||^2 for the MMSE estimate.
double sensing_mse(const TrmModel& model, const GramMatrix& q, MseForm form = MseForm::Automatic);

// Per-block MMSE filter W = Sigma_s X R_z^{-1} (N x T) with
// R_z = X^H Sigma_s X + (sigma_s^2 / T) I_T.
CMatrix mmse_filter(const TrmModel& model, const CMatrix& x);

// Per-block covariance of the MMSE estimate, N x N.
CMatrix estimate_block_covariance(const TrmModel& model, const CMatrix& x);
CMatrix estimate_block_covariance(const TrmModel& model, const GramMatrix& q);

// Eigenvalues of I_{M_s} (x) block covariance.
Spectrum estimate_covariance(const TrmModel& model, const CMatrix& x);
Spectrum estimate_spectrum(const TrmModel& model, const GramMatrix& q);

struct WaterfillResult
{
    double xi = 0.0;
    double d_c = 0.0;
    std::vector<double> allocations;  // D_{c_i}, aligned with the input order
};

// Reverse water-filling: D_i = min(lambda_i, xi) with sum log(lambda_i / D_i)
// equal to the rate budget. Eigenvalues below 1e-12 * lambda_max count as 0.
WaterfillResult reverse_waterfill(const std::vector<double>& eigenvalues, double rate_budget);

// sum_i log(lambda_i / D_i) over modes with lambda_i > 0.
double gaussian_rate(const std::vector<double>& eigenvalues, const std::vector<double>& allocations);

// log det(T/sigma_c^2 H_c Q H_c^H + I_{M_c}).
double channel_mi(const TrmModel& model, const GramMatrix& q);

// ---- helpers shared with the optimizer and simulator --------------------

// Sensing-side quantities at many Grams for one model; caches Sigma_s^{1/2}.
// Uses the inverse-free form, so it is valid for singular priors.
class SensingEvaluator
{
public:
    explicit SensingEvaluator(const TrmModel& model);

    struct Terms
    {
        double d_s = 0.0;        // M_s Tr(error covariance)
        CMatrix estimate_block;  // per-block covariance of the estimate
    };
    Terms operator()(const CMatrix& q) const;

private:
    CMatrix root_;
    double gain_ = 1.0;
    int multiplicity_ = 1;
};

// Descending eigenvalues of a Hermitian block, each repeated `multiplicity` times.
Spectrum block_spectrum(const CMatrix& block, int multiplicity);

// Eigen-decomposition of a Hermitian matrix (ascending eigenvalues).
struct HermitianEigen
{
    RVector values;
    CMatrix vectors;
};
HermitianEigen hermitian_eigen(const CMatrix& a);

// PSD square root after clipping negative eigenvalues.
CMatrix psd_sqrt(const CMatrix& a);

// Any N x T waveform with X X^H = q (requires T >= N).
CMatrix waveform_from_gram(const GramMatrix& q, int symbols);

struct RandomModelSpec
{
    Dimensions dims{16, 4, 4, 4};
    double power = 1.0;
    double noise_s = 1.0;
    double noise_c = 1.0;
    std::uint64_t seed = 1;
};

// Deterministic random TRM model: Sigma_s = A A^H scaled to trace N and H_c,
// both from i.i.d. CN(0, 1) draws of a seeded mt19937_64.
TrmModel random_trm_model(const RandomModelSpec& spec);

} // namespace cas::gaussian
