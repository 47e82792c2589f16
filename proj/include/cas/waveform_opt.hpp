#pragma once

// Waveform design for the TRM example: minimize D_s + D_c over the transmit
// Gram Q subject to Tr(Q) <= T P_T, where D_c is the reverse water-filling
// distortion at the rate the communication link supports.

#include "cas/gaussian_cas.hpp"
#include "cas/tradeoff.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cas::waveform {

using gaussian::CMatrix;
using gaussian::GramMatrix;
using gaussian::TrmModel;

struct Evaluation
{
    double d_s = 0.0;
    double d_c = 0.0;
    double mi = 0.0;    // nats the link supports
    double rate = 0.0;  // R(D_c) actually used; equals mi unless the estimate is degenerate
    double total() const { return d_s + d_c; }
};

// D_s(Q) + D_c(Q) for the ISAC scheme, with D_c the reverse water-filling
// distortion at rate MI(Q).
class IsacObjective
{
public:
    explicit IsacObjective(const TrmModel& model);

    Evaluation evaluate(const CMatrix& q) const;
    double operator()(const CMatrix& q) const { return evaluate(q).total(); }

    const TrmModel& model() const { return model_; }

private:
    TrmModel model_;
    gaussian::SensingEvaluator sensing_;
};

struct OptResult
{
    GramMatrix q_star;                  // ISAC Gram, or the sensing Gram for SW
    std::optional<GramMatrix> q_comm;   // SW communication Gram
    TradeoffPoint point;                // capacity holds the MI in nats
    double trace_used = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double split = 1.0;                 // SW power fraction given to sensing
};

struct IsacOptions
{
    std::optional<GramMatrix> init;     // default (T P_T / N) I
    std::size_t max_iterations = 2000;
    double fd_step = 1e-5;              // relative to T P_T / N
    double stall_tol = 1e-8;            // objective decrease over stall_window iterations
    std::size_t stall_window = 5;
    double armijo = 1e-4;
};

// Euclidean projection onto {Q >= 0, Tr Q <= budget}.
CMatrix project_gram(const CMatrix& q, double budget);

// Projected gradient descent with central finite-difference gradients and
// Armijo backtracking. Returns the best iterate (a local optimum).
// Throws NonFiniteObjective if the objective evaluates to NaN or infinity.
OptResult optimize_isac(const TrmModel& model, const IsacOptions& opts = {});

// p_i = (level - floor_i)^+ with sum p_i = total; infinite floors get nothing.
std::vector<double> water_filling(const std::vector<double>& floors, double total);

// Gram minimizing D_s under Tr <= power (allocation on the Sigma_s eigenbasis).
GramMatrix sensing_gram(const TrmModel& model, double trace_power);
// Gram maximizing the MI under Tr <= power (water-filling on H_c^H H_c).
GramMatrix comm_gram(const TrmModel& model, double trace_power);

// Separated waveforms at a fixed sensing power fraction rho.
OptResult evaluate_sw(const TrmModel& model, double rho);
// Best split over rho in {0, 1/(n-1), ..., 1}.
OptResult optimize_sw(const TrmModel& model, int split_grid = 201);

enum class Scheme
{
    Isac,
    Sw
};
std::string scheme_name(Scheme s);

struct SweepEntry
{
    double snr_db = 0.0;
    Scheme scheme = Scheme::Isac;
    OptResult result;
    bool failed = false;
    std::string error;
};

struct SweepCurve
{
    std::vector<double> snr_db;
    std::vector<SweepEntry> entries;  // ordered by snr, then scheme
};

struct SweepOptions
{
    IsacOptions isac;
    int split_grid = 201;
    // ISAC is also started from the best SW pair Q_s + Q_c and the better
    // local optimum is kept.
    bool warm_start_from_sw = true;
};

// Per SNR point sets P_T = sigma_s^2 10^{snr/10} and runs each scheme.
// Failures are recorded per point without aborting the sweep.
SweepCurve sweep_snr(const TrmModel& model_template, const std::vector<double>& snr_db,
                     const std::vector<Scheme>& schemes, const SweepOptions& opts = {});

TrmModel with_snr(const TrmModel& model, double snr_db);

} // namespace cas::waveform
