#pragma once

// Monte Carlo check of the Gaussian chain
//   s ~ CN(0, I (x) Sigma_s) -> z = (I (x) X^H) s + n -> s~ (MMSE) -> s^
// where the link is replaced by the distortion-achieving forward test
// channel on the eigenmodes of the estimate covariance.

#include "cas/gaussian_cas.hpp"

#include <cstdint>
#include <vector>

namespace cas::sim {

using gaussian::CMatrix;
using gaussian::TrmModel;

struct Estimate
{
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
};

struct TrialRecord
{
    double d_s = 0.0;
    double d_c = 0.0;
    double d_total = 0.0;
    double cross = 0.0;
};

struct SimOptions
{
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    // Trials are split into contiguous chunks, one seeded substream per
    // worker; results depend on (seed, workers) only.
    unsigned workers = 1;
    bool keep_trials = false;
};

struct SimReport
{
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double rate_budget = 0.0;

    Estimate d_s;
    Estimate d_c;
    Estimate d_total;
    Estimate cross_term;  // Re <s - s~, s~ - s^>

    double analytic_d_s = 0.0;
    double analytic_d_c = 0.0;
    double analytic_d_total = 0.0;

    // Per distinct eigenmode of the estimate block covariance (descending):
    // lambda_i, D_i, and the empirical E|s^_i|^2 averaged over blocks.
    std::vector<double> mode_lambda;
    std::vector<double> mode_allocation;
    std::vector<Estimate> mode_power;

    std::vector<TrialRecord> trials;  // filled when keep_trials is set
};

// Sensing stage only: d_c, d_total and cross_term refer to s^ = s~.
SimReport simulate_sensing(const TrmModel& model, const CMatrix& x, const SimOptions& opts);

// Full chain at the given link rate (nats).
SimReport simulate_end_to_end(const TrmModel& model, const CMatrix& x, double rate_budget,
                              const SimOptions& opts);

} // namespace cas::sim
