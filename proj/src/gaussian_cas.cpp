#include "cas/gaussian_cas.hpp"

#include "cas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace cas::gaussian {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kEigenFloor = 1e-12;
constexpr double kRankTol = 1e-12;

double hermitian_defect(const CMatrix& a)
{
    if (a.size() == 0)
        return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix hermitian_part(const CMatrix& a)
{
    return 0.5 * (a + a.adjoint());
}

bool all_finite(const CMatrix& a)
{
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag()))
            return false;
    return true;
}

// Positive-definite Hermitian inverse.
CMatrix hpd_inverse(const CMatrix& a)
{
    Eigen::LDLT<CMatrix> ldlt(hermitian_part(a));
    return ldlt.solve(CMatrix::Identity(a.rows(), a.cols()));
}

bool prior_invertible(const TrmModel& m)
{
    const RVector ev = hermitian_eigen(m.sigma_s).values;
    const double top = ev.maxCoeff();
    return top > 0.0 && ev.minCoeff() > kRankTol * top;
}

double sensing_gain(const TrmModel& m) { return m.dims.symbols / m.noise_s; }

} // namespace

// ---- model --------------------------------------------------------------

void validate(const TrmModel& m)
{
    const auto& d = m.dims;
    if (d.symbols < 1 || d.tx < 1 || d.sensing_rx < 1 || d.comm_rx < 1)
        throw ConfigError("all dimensions must be positive");
    if (d.symbols < d.tx)
        throw ConfigError("symbols (T) must be at least the number of transmit antennas (N)");
    if (m.sigma_s.rows() != d.tx || m.sigma_s.cols() != d.tx)
        throw ConfigError("sigma_s must be N x N");
    if (m.h_c.rows() != d.comm_rx || m.h_c.cols() != d.tx)
        throw ConfigError("h_c must be M_c x N");
    if (!all_finite(m.sigma_s) || !all_finite(m.h_c))
        throw ConfigError("model matrices must be finite");
    if (hermitian_defect(m.sigma_s) > kHermitianTol)
        throw ConfigError("sigma_s is not Hermitian");
    const RVector ev = hermitian_eigen(m.sigma_s).values;
    if (ev.minCoeff() < -kEigenFloor * std::max(1.0, ev.cwiseAbs().maxCoeff()))
        throw ConfigError("sigma_s is not positive semidefinite");
    if (!(m.noise_s > 0.0) || !(m.noise_c > 0.0))
        throw ConfigError("noise powers must be positive");
    if (!(m.power > 0.0) || !std::isfinite(m.power))
        throw ConfigError("power budget must be positive");
}

GramMatrix::GramMatrix(const CMatrix& q)
{
    if (q.rows() != q.cols())
        throw ConfigError("Gram matrix must be square");
    if (!all_finite(q))
        throw ConfigError("Gram matrix must be finite");
    const double scale = q.size() ? std::max(1.0, q.cwiseAbs().maxCoeff()) : 1.0;
    if (hermitian_defect(q) > kHermitianTol * scale)
        throw ConfigError("Gram matrix is not Hermitian");
    q_ = hermitian_part(q);
    if (q_.size() == 0)
        return;
    const HermitianEigen eig = hermitian_eigen(q_);
    if (eig.values.minCoeff() < 0.0)
    {
        const RVector clipped = eig.values.cwiseMax(0.0);
        q_ = eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
        q_ = hermitian_part(q_);
    }
}

void check_feasible(const TrmModel& model, const GramMatrix& q)
{
    if (q.dim() != model.dims.tx)
        throw ConfigError("Gram matrix dimension must equal N");
    if (q.trace() > model.trace_budget() + 1e-9)
        throw ConfigError("Gram matrix trace exceeds T * P_T");
}

// ---- sensing ------------------------------------------------------------

double sensing_mse(const TrmModel& model, const GramMatrix& q, MseForm form)
{
    const double a = sensing_gain(model);
    const double ms = model.dims.sensing_rx;
    if (form == MseForm::Automatic)
        form = prior_invertible(model) ? MseForm::Direct : MseForm::InverseFree;

    if (form == MseForm::Direct)
    {
        if (!prior_invertible(model))
            throw SingularPrior("sigma_s is rank deficient; its inverse does not exist");
        const CMatrix info = a * q.matrix() + hpd_inverse(model.sigma_s);
        return ms * hpd_inverse(info).trace().real();
    }

    return SensingEvaluator(model)(q.matrix()).d_s;
}

CMatrix mmse_filter(const TrmModel& model, const CMatrix& x)
{
    const int t = static_cast<int>(x.cols());
    const CMatrix rz = x.adjoint() * model.sigma_s * x +
                       (model.noise_s / model.dims.symbols) * CMatrix::Identity(t, t);
    // W = Sigma X R_z^{-1}; R_z is Hermitian positive definite.
    Eigen::LDLT<CMatrix> ldlt(hermitian_part(rz));
    const CMatrix sx = model.sigma_s * x;
    return ldlt.solve(sx.adjoint()).adjoint();
}

CMatrix estimate_block_covariance(const TrmModel& model, const CMatrix& x)
{
    const CMatrix w = mmse_filter(model, x);
    return hermitian_part(w * x.adjoint() * model.sigma_s.adjoint());
}

CMatrix estimate_block_covariance(const TrmModel& model, const GramMatrix& q)
{
    return SensingEvaluator(model)(q.matrix()).estimate_block;
}

SensingEvaluator::SensingEvaluator(const TrmModel& model)
    : root_(psd_sqrt(model.sigma_s)),
      gain_(sensing_gain(model)),
      multiplicity_(model.dims.sensing_rx)
{
}

SensingEvaluator::Terms SensingEvaluator::operator()(const CMatrix& q) const
{
    // With S = Sigma^{1/2} and M = S Q S = V diag(m) V^H:
    //   error covariance    S (I + aM)^{-1} S
    //   estimate covariance S V diag(am / (1 + am)) V^H S
    const HermitianEigen eig = hermitian_eigen(root_ * q * root_);
    const CMatrix sv = root_ * eig.vectors;
    RVector shrink(eig.values.size());
    double err = 0.0;
    for (Eigen::Index i = 0; i < shrink.size(); ++i)
    {
        const double am = gain_ * std::max(0.0, eig.values[i]);
        shrink[i] = am / (1.0 + am);
        err += sv.col(i).squaredNorm() / (1.0 + am);
    }
    Terms out;
    out.d_s = multiplicity_ * err;
    out.estimate_block = hermitian_part(sv * shrink.cast<Complex>().asDiagonal() * sv.adjoint());
    return out;
}

Spectrum block_spectrum(const CMatrix& block, int multiplicity)
{
    const RVector ev = hermitian_eigen(block).values;
    Spectrum out;
    out.eigenvalues.reserve(static_cast<std::size_t>(ev.size() * multiplicity));
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
        for (int k = 0; k < multiplicity; ++k)
            out.eigenvalues.push_back(std::max(0.0, ev[i]));
    return out;
}

Spectrum estimate_covariance(const TrmModel& model, const CMatrix& x)
{
    return block_spectrum(estimate_block_covariance(model, x), model.dims.sensing_rx);
}

Spectrum estimate_spectrum(const TrmModel& model, const GramMatrix& q)
{
    return block_spectrum(estimate_block_covariance(model, q), model.dims.sensing_rx);
}

// ---- communication ------------------------------------------------------

WaterfillResult reverse_waterfill(const std::vector<double>& eigenvalues, double rate_budget)
{
    WaterfillResult out;
    out.allocations.assign(eigenvalues.size(), 0.0);
    const double top = eigenvalues.empty() ? 0.0 : *std::max_element(eigenvalues.begin(), eigenvalues.end());
    const double floor = kRankTol * top;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        if (top > 0.0 && eigenvalues[i] > floor)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    if (order.empty() || !(rate_budget > 0.0))
    {
        out.xi = std::max(top, 0.0);
        for (std::size_t i : order)
            out.allocations[i] = eigenvalues[i];
    }
    else
    {
        // With the k largest modes active, sum_{i<k} log(lambda_i / xi) = R
        // fixes xi; the right k is the first one whose level clears the
        // next eigenvalue.
        double log_sum = 0.0;
        double xi = 0.0;
        for (std::size_t k = 1; k <= order.size(); ++k)
        {
            log_sum += std::log(eigenvalues[order[k - 1]]);
            xi = std::exp((log_sum - rate_budget) / static_cast<double>(k));
            if (k == order.size() || xi >= eigenvalues[order[k]])
                break;
        }
        out.xi = xi;
        for (std::size_t i : order)
            out.allocations[i] = std::min(eigenvalues[i], xi);
    }
    out.d_c = std::accumulate(out.allocations.begin(), out.allocations.end(), 0.0);
    return out;
}

double gaussian_rate(const std::vector<double>& eigenvalues, const std::vector<double>& allocations)
{
    if (eigenvalues.size() != allocations.size())
        throw ConfigError("eigenvalue and allocation counts differ");
    const double top = eigenvalues.empty() ? 0.0 : *std::max_element(eigenvalues.begin(), eigenvalues.end());
    double rate = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        if (top > 0.0 && eigenvalues[i] > kRankTol * top && allocations[i] > 0.0)
            rate += std::log(eigenvalues[i] / allocations[i]);
    return rate;
}

double channel_mi(const TrmModel& model, const GramMatrix& q)
{
    const double a = model.dims.symbols / model.noise_c;
    const CMatrix& h = model.h_c;
    const CMatrix m = hermitian_part(a * h * q.matrix() * h.adjoint()) +
                      CMatrix::Identity(h.rows(), h.rows());
    Eigen::LLT<CMatrix> llt(m);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    return logdet;
}

// ---- helpers ------------------------------------------------------------

HermitianEigen hermitian_eigen(const CMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix psd_sqrt(const CMatrix& a)
{
    const HermitianEigen eig = hermitian_eigen(a);
    const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    return hermitian_part(eig.vectors * root.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

CMatrix waveform_from_gram(const GramMatrix& q, int symbols)
{
    const int n = q.dim();
    if (symbols < n)
        throw ConfigError("a waveform needs at least as many symbols as antennas");
    CMatrix x = CMatrix::Zero(n, symbols);
    x.leftCols(n) = psd_sqrt(q.matrix());
    return x;
}

TrmModel random_trm_model(const RandomModelSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    auto cn = [&]() { return Complex(gauss(rng), gauss(rng)); };

    const auto& d = spec.dims;
    TrmModel m;
    m.dims = d;
    m.power = spec.power;
    m.noise_s = spec.noise_s;
    m.noise_c = spec.noise_c;

    CMatrix a(d.tx, d.tx);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            a(i, j) = cn();
    m.sigma_s = hermitian_part(a * a.adjoint());
    m.sigma_s *= d.tx / m.sigma_s.trace().real();

    m.h_c.resize(d.comm_rx, d.tx);
    for (Eigen::Index i = 0; i < m.h_c.rows(); ++i)
        for (Eigen::Index j = 0; j < m.h_c.cols(); ++j)
            m.h_c(i, j) = cn();
    validate(m);
    return m;
}

} // namespace cas::gaussian
