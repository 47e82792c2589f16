#pragma once

// Finite-alphabet limits of communication-assisted sensing.
//
// A state S ~ P_S is observed through a sensing law Q_{Z|SX} driven by the
// channel input X, which is simultaneously sent over a communication channel
// Q_{Y|X}. The transmitter estimates S from (X, Z); the receiver reconstructs
// the estimate from Y. All information quantities are in nats.

#include "cas/tradeoff.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace cas::discrete {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct FiniteCasModel
{
    Vector state_prior;               // P_S over S
    std::vector<Matrix> sensing_law;  // [x](s, z) = Q_{Z|SX}(z | x, s)
    Matrix comm_law;                  // (x, y) = Q_{Y|X}(y | x)
    Matrix distortion;                // (s, s~) = d(s, s~), S x S~
    Vector cost;                      // b(x)
    // d(s~, s^) used by the reconstruction stage. Defaults to `distortion`,
    // which must then be square (S~ = S).
    std::optional<Matrix> reconstruction_distortion;

    std::size_t num_states() const { return static_cast<std::size_t>(state_prior.size()); }
    std::size_t num_inputs() const { return sensing_law.size(); }
    std::size_t num_observations() const;
    std::size_t num_outputs() const { return static_cast<std::size_t>(comm_law.cols()); }
    std::size_t num_estimates() const { return static_cast<std::size_t>(distortion.cols()); }

    const Matrix& reconstruction() const;
};

// Throws ConfigError describing the first violated invariant.
void validate(const FiniteCasModel& model);

struct InputDistribution
{
    Vector probs;
};

using cas::TradeoffPoint;

struct SolverOptions
{
    // Blahut-Arimoto stops once the gap between its upper and lower bounds
    // on the Lagrangian value drops below this, or after max_iterations.
    double ba_gap_tol = 1e-13;
    std::size_t max_iterations = 100000;
    // Multiplier bisection stops once the slack of the active constraint is
    // below this.
    double slack_tol = 1e-10;
};

// ---- estimator ----------------------------------------------------------

// Bayes-optimal estimate of S from (x, z). Ties go to the lowest index.
// Throws ZeroProbabilityObservation when P(z | x) = 0.
std::size_t optimal_estimate(const FiniteCasModel& model, std::size_t x, std::size_t z);

// Table [x][z] of optimal estimates; impossible pairs map to 0.
std::vector<std::vector<std::size_t>> estimator_table(const FiniteCasModel& model);

// e(x) = E[d(S, s~*(X, Z)) | X = x].
double estimate_cost(const FiniteCasModel& model, std::size_t x);
Vector estimate_costs(const FiniteCasModel& model);

// Distribution of s~*(X, Z) over the estimate alphabet when X ~ input.
Vector estimate_marginal(const FiniteCasModel& model, const Vector& input);

// ---- information measures -----------------------------------------------

double entropy(const Vector& p);
double mutual_information(const Vector& input, const Matrix& channel);

struct CapacityResult
{
    double capacity = 0.0;
    InputDistribution argmax;
    double estimate_multiplier = 0.0;
    double cost_multiplier = 0.0;
};

// Unconstrained capacity max_P I(X; Y) of a row-stochastic channel.
CapacityResult channel_capacity(const Matrix& channel, const SolverOptions& opts = {});

// max I(X; Y) over P_X with E[e(X)] <= d_s and E[b(X)] <= budget.
// Throws InfeasibleConstraint when no distribution meets both constraints.
CapacityResult constrained_capacity(const FiniteCasModel& model, double d_s, double budget,
                                    const SolverOptions& opts = {});

// Same problem on explicit per-symbol cost vectors.
CapacityResult constrained_capacity(const Matrix& channel, const Vector& estimate_cost,
                                    double d_s, const Vector& resource_cost, double budget,
                                    const SolverOptions& opts = {});

struct RateDistortionResult
{
    double rate = 0.0;
    double distortion = 0.0;  // E[d] attained by test_channel
    Matrix test_channel;      // (s~, s^) = P(s^ | s~)
    double slope = 0.0;       // Lagrange slope (infinite at the lossless end)
};

// Smallest and largest distortions of interest: below the first nothing is
// achievable, at or above the second the rate is zero.
double min_distortion(const Vector& source, const Matrix& distortion);
double zero_rate_distortion(const Vector& source, const Matrix& distortion);

// R(d_c) = min I(S~; S^) subject to E[d(S~, S^)] <= d_c.
// Throws UnreachableDistortion when d_c < min_distortion.
RateDistortionResult rate_distortion_discrete(const Vector& source, const Matrix& distortion,
                                              double d_c, const SolverOptions& opts = {});

// Inverse: the smallest d_c with R(d_c) <= rate.
RateDistortionResult distortion_rate_discrete(const Vector& source, const Matrix& distortion,
                                              double rate, const SolverOptions& opts = {});

// ---- feasibility ---------------------------------------------------------

struct FeasibilityResult
{
    bool feasible = false;
    double margin = 0.0;  // capacity - rate, nats
    double capacity = 0.0;
    double rate = 0.0;
    InputDistribution input;
    Vector estimate_source;
};

// Checks R(d_c) <= C(d_s, budget). The rate is evaluated on the estimate
// marginal induced by the capacity-achieving input.
FeasibilityResult theorem1_feasible(const FiniteCasModel& model, double d_s, double d_c,
                                    double budget, const SolverOptions& opts = {});

// Minimizes d_s + d_c along the feasibility boundary by sweeping d_s over
// [min e, max e] with the given step.
TradeoffPoint min_total_distortion(const FiniteCasModel& model, double budget, double grid_step,
                                   const SolverOptions& opts = {});

} // namespace cas::discrete
