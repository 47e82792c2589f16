#include "cas/discrete_limits.hpp"

#include "cas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cas::discrete {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kFaceTol = 1e-12;
constexpr double kMaxMultiplier = 1e12;
constexpr int kMaxBisections = 200;

std::string fmt_index(const char* what, std::size_t i)
{
    std::ostringstream os;
    os << what << "[" << i << "]";
    return os.str();
}

void check_probability_vector(const Eigen::Ref<const Vector>& p, const std::string& what)
{
    if (p.size() == 0)
        throw ConfigError(what + ": empty probability vector");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
    {
        if (!std::isfinite(p[i]) || p[i] < 0.0)
            throw ConfigError(what + ": entry " + std::to_string(i) + " is negative or not finite");
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kProbTol)
    {
        std::ostringstream os;
        os.precision(17);
        os << what << ": entries sum to " << sum << ", expected 1";
        throw ConfigError(os.str());
    }
}

void check_nonnegative(const Matrix& m, const std::string& what)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j)) || m(i, j) < 0.0)
                throw ConfigError(what + ": entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") is negative or not finite");
}

void check_channel(const Matrix& w)
{
    if (w.rows() == 0 || w.cols() == 0)
        throw ConfigError("channel matrix is empty");
    for (Eigen::Index x = 0; x < w.rows(); ++x)
        check_probability_vector(w.row(x).transpose(), fmt_index("channel row", static_cast<std::size_t>(x)));
}

double dot(const Vector& p, const Vector& v) { return p.dot(v); }

// Numerically stable log(sum_i p_i exp(a_i)) over entries with p_i > 0.
double log_weighted_sum_exp(const Vector& p, const Vector& a)
{
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0.0)
            m = std::max(m, a[i]);
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0.0)
            s += p[i] * std::exp(a[i] - m);
    return m + std::log(s);
}

// Relative entropies D(W(.|x) || q) for every input row.
Vector divergences(const Matrix& w, const Vector& q)
{
    Vector d = Vector::Zero(w.rows());
    for (Eigen::Index x = 0; x < w.rows(); ++x)
    {
        double acc = 0.0;
        for (Eigen::Index y = 0; y < w.cols(); ++y)
        {
            const double wxy = w(x, y);
            if (wxy <= 0.0)
                continue;
            if (q[y] <= 0.0)
            {
                acc = std::numeric_limits<double>::infinity();
                break;
            }
            acc += wxy * std::log(wxy / q[y]);
        }
        d[x] = acc;
    }
    return d;
}

Vector uniform_on(const std::vector<bool>& allowed)
{
    Vector p = Vector::Zero(static_cast<Eigen::Index>(allowed.size()));
    const auto n = std::count(allowed.begin(), allowed.end(), true);
    for (std::size_t i = 0; i < allowed.size(); ++i)
        if (allowed[i])
            p[static_cast<Eigen::Index>(i)] = 1.0 / static_cast<double>(n);
    return p;
}

// Blahut-Arimoto for max_P I(P, W) - E_P[c] over distributions supported on
// the support of `p`.
Vector blahut_arimoto_cost(const Matrix& w, const Vector& c, Vector p, const SolverOptions& opts)
{
    for (std::size_t it = 0; it < opts.max_iterations; ++it)
    {
        const Vector q = w.transpose() * p;
        Vector a = divergences(w, q) - c;
        double upper = -std::numeric_limits<double>::infinity();
        for (Eigen::Index x = 0; x < p.size(); ++x)
            if (p[x] > 0.0)
                upper = std::max(upper, a[x]);
        const double lower = log_weighted_sum_exp(p, a);
        if (upper - lower < opts.ba_gap_tol)
            break;
        for (Eigen::Index x = 0; x < p.size(); ++x)
            if (p[x] > 0.0)
                p[x] *= std::exp(a[x] - lower);
        p /= p.sum();
    }
    return p;
}

struct Bracket
{
    double lo = 0.0;
    double hi = 0.0;
    Vector p_lo;  // violates the constraint
    Vector p_hi;  // satisfies it
};

// Drives a single multiplier so that E_P[v] <= level, where `solve(m)` returns
// the Lagrangian maximizer at multiplier m. Returns a distribution meeting the
// constraint with equality up to the slack tolerance (mixing the bracket
// endpoints when the map m -> E[v] jumps) and the final multiplier.
template <class Solve>
std::pair<Vector, double> drive_multiplier(Solve&& solve, const Vector& v, double level,
                                           const SolverOptions& opts)
{
    Vector p0 = solve(0.0);
    if (dot(p0, v) <= level)
        return {p0, 0.0};

    Bracket br;
    br.lo = 0.0;
    br.p_lo = p0;
    br.hi = 1.0;
    br.p_hi = solve(br.hi);
    while (dot(br.p_hi, v) > level)
    {
        br.lo = br.hi;
        br.p_lo = br.p_hi;
        br.hi *= 2.0;
        if (br.hi > kMaxMultiplier)
            throw SolverError("constraint multiplier diverged; the feasible set is numerically empty");
        br.p_hi = solve(br.hi);
    }

    for (int k = 0; k < kMaxBisections; ++k)
    {
        if (level - dot(br.p_hi, v) < opts.slack_tol)
            break;
        const double mid = 0.5 * (br.lo + br.hi);
        if (mid <= br.lo || mid >= br.hi)
            break;
        Vector p = solve(mid);
        if (dot(p, v) > level)
        {
            br.lo = mid;
            br.p_lo = std::move(p);
        }
        else
        {
            br.hi = mid;
            br.p_hi = std::move(p);
        }
    }

    const double v_lo = dot(br.p_lo, v);
    const double v_hi = dot(br.p_hi, v);
    if (level - v_hi >= opts.slack_tol && v_lo > v_hi)
    {
        const double theta = (level - v_hi) / (v_lo - v_hi);
        Vector mixed = theta * br.p_lo + (1.0 - theta) * br.p_hi;
        if (dot(mixed, v) <= level)
            return {mixed, br.hi};
    }
    return {br.p_hi, br.hi};
}

// Smallest E[b] over distributions with E[e] <= level supported on `allowed`.
// The optimum of this two-constraint linear program sits on at most two
// atoms, so enumerating points and pairs is exact.
double min_cost_given_level(const Vector& e, const Vector& b, double level,
                            const std::vector<bool>& allowed)
{
    double best = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(e.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!allowed[i])
            continue;
        const auto ii = static_cast<Eigen::Index>(i);
        if (e[ii] <= level)
            best = std::min(best, b[ii]);
        for (std::size_t j = 0; j < n; ++j)
        {
            const auto jj = static_cast<Eigen::Index>(j);
            if (!allowed[j] || !(e[ii] < level && level < e[jj]))
                continue;
            const double lambda = (e[jj] - level) / (e[jj] - e[ii]);
            best = std::min(best, lambda * b[ii] + (1.0 - lambda) * b[jj]);
        }
    }
    return best;
}

// Restricts `allowed` to the face where v attains its minimum when the level
// sits on that minimum. Returns true when the constraint stays active.
bool restrict_to_face(const Vector& v, double level, std::vector<bool>& allowed)
{
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < allowed.size(); ++i)
        if (allowed[i])
            lo = std::min(lo, v[static_cast<Eigen::Index>(i)]);
    if (level > lo + kFaceTol)
        return true;
    for (std::size_t i = 0; i < allowed.size(); ++i)
        if (v[static_cast<Eigen::Index>(i)] > lo + kFaceTol)
            allowed[i] = false;
    return false;
}

// ---- rate-distortion helpers --------------------------------------------

// Per-row kernel K(s, s^) = exp(-slope (d(s, s^) - min_s^ d(s, .))); with an
// infinite slope only the per-row minimizers keep weight 1.
Matrix rd_kernel(const Matrix& d, double slope)
{
    Matrix k(d.rows(), d.cols());
    for (Eigen::Index s = 0; s < d.rows(); ++s)
    {
        const double m = d.row(s).minCoeff();
        const double scale = std::max(1.0, std::abs(m));
        for (Eigen::Index t = 0; t < d.cols(); ++t)
        {
            const double excess = d(s, t) - m;
            if (std::isinf(slope))
                k(s, t) = excess <= kFaceTol * scale ? 1.0 : 0.0;
            else
                k(s, t) = std::exp(-slope * excess);
        }
    }
    return k;
}

struct RdState
{
    Matrix channel;
    double rate = 0.0;
    double distortion = 0.0;
};

double channel_rate(const Vector& source, const Matrix& channel)
{
    return mutual_information(source, channel);
}

double channel_distortion(const Vector& source, const Matrix& channel, const Matrix& d)
{
    double acc = 0.0;
    for (Eigen::Index s = 0; s < d.rows(); ++s)
        for (Eigen::Index t = 0; t < d.cols(); ++t)
            acc += source[s] * channel(s, t) * d(s, t);
    return acc;
}

// Blahut's rate-distortion iteration at a fixed slope.
RdState blahut_rd(const Vector& source, const Matrix& d, double slope, const SolverOptions& opts)
{
    const Matrix k = rd_kernel(d, slope);
    Vector q = Vector::Constant(d.cols(), 1.0 / static_cast<double>(d.cols()));
    for (std::size_t it = 0; it < opts.max_iterations; ++it)
    {
        const Vector z = k * q;
        Vector c = Vector::Zero(d.cols());
        for (Eigen::Index s = 0; s < d.rows(); ++s)
            if (source[s] > 0.0)
                c += (source[s] / z[s]) * k.row(s).transpose();
        double gap = 0.0;
        for (Eigen::Index t = 0; t < c.size(); ++t)
            if (q[t] > 0.0 || c[t] > 0.0)
                gap = std::max(gap, std::log(std::max(c[t], 1e-300)));
        q = q.cwiseProduct(c);
        q /= q.sum();
        if (gap < opts.ba_gap_tol)
            break;
    }
    RdState out;
    out.channel.resize(d.rows(), d.cols());
    for (Eigen::Index s = 0; s < d.rows(); ++s)
    {
        Eigen::RowVectorXd row = k.row(s).cwiseProduct(q.transpose());
        const double z = row.sum();
        out.channel.row(s) = z > 0.0 ? Eigen::RowVectorXd(row / z) : Eigen::RowVectorXd(q.transpose());
    }
    out.rate = channel_rate(source, out.channel);
    out.distortion = channel_distortion(source, out.channel, d);
    return out;
}

RdState zero_rate_state(const Vector& source, const Matrix& d)
{
    const Vector col_risk = d.transpose() * source;
    Eigen::Index best = 0;
    for (Eigen::Index t = 1; t < col_risk.size(); ++t)
        if (col_risk[t] < col_risk[best])
            best = t;
    RdState out;
    out.channel = Matrix::Zero(d.rows(), d.cols());
    out.channel.col(best).setOnes();
    out.rate = 0.0;
    out.distortion = col_risk[best];
    return out;
}

void check_rd_inputs(const Vector& source, const Matrix& d)
{
    check_probability_vector(source, "source");
    if (d.rows() != source.size() || d.cols() == 0)
        throw ConfigError("distortion matrix shape does not match the source alphabet");
    check_nonnegative(d, "distortion");
}

RateDistortionResult to_result(const RdState& st, double slope)
{
    RateDistortionResult r;
    r.rate = std::max(0.0, st.rate);
    r.distortion = st.distortion;
    r.test_channel = st.channel;
    r.slope = slope;
    return r;
}

} // namespace

// ---- model --------------------------------------------------------------

std::size_t FiniteCasModel::num_observations() const
{
    return sensing_law.empty() ? 0 : static_cast<std::size_t>(sensing_law.front().cols());
}

const Matrix& FiniteCasModel::reconstruction() const
{
    return reconstruction_distortion ? *reconstruction_distortion : distortion;
}

void validate(const FiniteCasModel& m)
{
    check_probability_vector(m.state_prior, "state_prior");
    const auto ns = m.state_prior.size();
    if (m.sensing_law.empty())
        throw ConfigError("sensing_law: input alphabet is empty");
    const auto nz = m.sensing_law.front().cols();
    if (nz == 0)
        throw ConfigError("sensing_law: observation alphabet is empty");
    for (std::size_t x = 0; x < m.sensing_law.size(); ++x)
    {
        const Matrix& law = m.sensing_law[x];
        if (law.rows() != ns || law.cols() != nz)
            throw ConfigError(fmt_index("sensing_law", x) + ": expected " + std::to_string(ns) + " x " +
                              std::to_string(nz) + " entries");
        for (Eigen::Index s = 0; s < ns; ++s)
            check_probability_vector(law.row(s).transpose(),
                                     fmt_index("sensing_law", x) + fmt_index("", static_cast<std::size_t>(s)));
    }
    if (m.comm_law.rows() != static_cast<Eigen::Index>(m.sensing_law.size()))
        throw ConfigError("comm_law: row count must equal the input alphabet size");
    if (m.comm_law.cols() == 0)
        throw ConfigError("comm_law: output alphabet is empty");
    for (Eigen::Index x = 0; x < m.comm_law.rows(); ++x)
        check_probability_vector(m.comm_law.row(x).transpose(), fmt_index("comm_law", static_cast<std::size_t>(x)));
    if (m.distortion.rows() != ns || m.distortion.cols() == 0)
        throw ConfigError("distortion: expected one row per state");
    check_nonnegative(m.distortion, "distortion");
    if (m.cost.size() != static_cast<Eigen::Index>(m.sensing_law.size()))
        throw ConfigError("cost: expected one entry per input symbol");
    for (Eigen::Index x = 0; x < m.cost.size(); ++x)
        if (!std::isfinite(m.cost[x]) || m.cost[x] < 0.0)
            throw ConfigError(fmt_index("cost", static_cast<std::size_t>(x)) + " is negative or not finite");
    if (m.reconstruction_distortion)
    {
        if (m.reconstruction_distortion->rows() != m.distortion.cols() || m.reconstruction_distortion->cols() == 0)
            throw ConfigError("reconstruction_distortion: expected one row per estimate symbol");
        check_nonnegative(*m.reconstruction_distortion, "reconstruction_distortion");
    }
    else if (m.distortion.rows() != m.distortion.cols())
    {
        throw ConfigError("distortion must be square unless reconstruction_distortion is given");
    }
}

// ---- estimator ----------------------------------------------------------

namespace {

// Returns the argmin and whether the pair has positive probability.
std::pair<std::size_t, bool> bayes_estimate(const FiniteCasModel& m, std::size_t x, std::size_t z)
{
    const Matrix& law = m.sensing_law[x];
    const auto zi = static_cast<Eigen::Index>(z);
    Vector joint = m.state_prior.cwiseProduct(law.col(zi));
    const double norm = joint.sum();
    if (!(norm > 0.0))
        return {0, false};
    joint /= norm;
    const Vector risk = m.distortion.transpose() * joint;
    const double scale = std::max(1.0, risk.cwiseAbs().maxCoeff());
    std::size_t best = 0;
    for (Eigen::Index t = 1; t < risk.size(); ++t)
        if (risk[t] < risk[static_cast<Eigen::Index>(best)] - 1e-15 * scale)
            best = static_cast<std::size_t>(t);
    return {best, true};
}

void check_symbols(const FiniteCasModel& m, std::size_t x, std::size_t z)
{
    if (x >= m.num_inputs())
        throw ConfigError("input symbol " + std::to_string(x) + " out of range");
    if (z >= m.num_observations())
        throw ConfigError("observation symbol " + std::to_string(z) + " out of range");
}

} // namespace

std::size_t optimal_estimate(const FiniteCasModel& model, std::size_t x, std::size_t z)
{
    check_symbols(model, x, z);
    const auto [est, possible] = bayes_estimate(model, x, z);
    if (!possible)
        throw ZeroProbabilityObservation("observation " + std::to_string(z) + " has zero probability under input " +
                                         std::to_string(x));
    return est;
}

std::vector<std::vector<std::size_t>> estimator_table(const FiniteCasModel& model)
{
    std::vector<std::vector<std::size_t>> table(model.num_inputs(),
                                                std::vector<std::size_t>(model.num_observations(), 0));
    for (std::size_t x = 0; x < model.num_inputs(); ++x)
        for (std::size_t z = 0; z < model.num_observations(); ++z)
            table[x][z] = bayes_estimate(model, x, z).first;
    return table;
}

double estimate_cost(const FiniteCasModel& model, std::size_t x)
{
    if (x >= model.num_inputs())
        throw ConfigError("input symbol " + std::to_string(x) + " out of range");
    const Matrix& law = model.sensing_law[x];
    double acc = 0.0;
    for (Eigen::Index z = 0; z < law.cols(); ++z)
    {
        const auto [est, possible] = bayes_estimate(model, x, static_cast<std::size_t>(z));
        if (!possible)
            continue;
        for (Eigen::Index s = 0; s < law.rows(); ++s)
            acc += model.state_prior[s] * law(s, z) * model.distortion(s, static_cast<Eigen::Index>(est));
    }
    return acc;
}

Vector estimate_costs(const FiniteCasModel& model)
{
    Vector e(static_cast<Eigen::Index>(model.num_inputs()));
    for (std::size_t x = 0; x < model.num_inputs(); ++x)
        e[static_cast<Eigen::Index>(x)] = estimate_cost(model, x);
    return e;
}

Vector estimate_marginal(const FiniteCasModel& model, const Vector& input)
{
    if (input.size() != static_cast<Eigen::Index>(model.num_inputs()))
        throw ConfigError("input distribution size does not match the input alphabet");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(model.num_estimates()));
    const auto table = estimator_table(model);
    for (std::size_t x = 0; x < model.num_inputs(); ++x)
    {
        const Matrix& law = model.sensing_law[x];
        const Vector pz = law.transpose() * model.state_prior;
        for (Eigen::Index z = 0; z < law.cols(); ++z)
            out[static_cast<Eigen::Index>(table[x][static_cast<std::size_t>(z)])] +=
                input[static_cast<Eigen::Index>(x)] * pz[z];
    }
    return out / out.sum();
}

// ---- information measures -----------------------------------------------

double entropy(const Vector& p)
{
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0.0)
            h -= p[i] * std::log(p[i]);
    return h;
}

double mutual_information(const Vector& input, const Matrix& channel)
{
    const Vector q = channel.transpose() * input;
    double acc = 0.0;
    for (Eigen::Index x = 0; x < channel.rows(); ++x)
    {
        if (input[x] <= 0.0)
            continue;
        for (Eigen::Index y = 0; y < channel.cols(); ++y)
        {
            const double w = channel(x, y);
            if (w > 0.0)
                acc += input[x] * w * std::log(w / q[y]);
        }
    }
    return std::max(0.0, acc);
}

CapacityResult channel_capacity(const Matrix& channel, const SolverOptions& opts)
{
    check_channel(channel);
    const std::vector<bool> all(static_cast<std::size_t>(channel.rows()), true);
    CapacityResult r;
    r.argmax.probs = blahut_arimoto_cost(channel, Vector::Zero(channel.rows()), uniform_on(all), opts);
    r.capacity = mutual_information(r.argmax.probs, channel);
    return r;
}

CapacityResult constrained_capacity(const Matrix& channel, const Vector& e, double d_s, const Vector& b,
                                    double budget, const SolverOptions& opts)
{
    check_channel(channel);
    const auto nx = static_cast<std::size_t>(channel.rows());
    if (e.size() != channel.rows() || b.size() != channel.rows())
        throw ConfigError("cost vectors must have one entry per input symbol");
    if (!(d_s >= e.minCoeff() - kFaceTol))
        throw InfeasibleConstraint("estimation distortion target is below min_x e(x)");
    if (!(budget >= b.minCoeff() - kFaceTol))
        throw InfeasibleConstraint("resource budget is below min_x b(x)");

    std::vector<bool> allowed(nx, true);
    bool e_active = true;
    bool b_active = true;
    for (int pass = 0; pass < 2; ++pass)
    {
        if (min_cost_given_level(e, b, d_s + kFaceTol, allowed) > budget + kFaceTol)
            throw InfeasibleConstraint("no input distribution meets both the distortion and budget constraints");
        e_active = e_active && restrict_to_face(e, d_s, allowed);
        b_active = b_active && restrict_to_face(b, budget, allowed);
    }
    const Vector start = uniform_on(allowed);

    auto solve = [&](double mu, double nu) {
        return blahut_arimoto_cost(channel, mu * e + nu * b, start, opts);
    };
    double mu_final = 0.0;
    auto inner = [&](double nu) {
        if (!e_active)
            return solve(0.0, nu);
        auto [p, mu] = drive_multiplier([&](double m) { return solve(m, nu); }, e, d_s, opts);
        mu_final = mu;
        return p;
    };

    CapacityResult r;
    if (b_active)
    {
        auto [p, nu] = drive_multiplier(inner, b, budget, opts);
        r.argmax.probs = std::move(p);
        r.cost_multiplier = nu;
        // Re-run the inner problem at the final multiplier only for reporting.
        if (e_active && nu > 0.0)
            (void)inner(nu);
    }
    else
    {
        r.argmax.probs = inner(0.0);
    }
    r.estimate_multiplier = mu_final;
    r.capacity = mutual_information(r.argmax.probs, channel);
    return r;
}

CapacityResult constrained_capacity(const FiniteCasModel& model, double d_s, double budget,
                                    const SolverOptions& opts)
{
    validate(model);
    return constrained_capacity(model.comm_law, estimate_costs(model), d_s, model.cost, budget, opts);
}

// ---- rate-distortion ----------------------------------------------------

double min_distortion(const Vector& source, const Matrix& d)
{
    return source.dot(d.rowwise().minCoeff());
}

double zero_rate_distortion(const Vector& source, const Matrix& d)
{
    return (d.transpose() * source).minCoeff();
}

RateDistortionResult rate_distortion_discrete(const Vector& source, const Matrix& d, double d_c,
                                              const SolverOptions& opts)
{
    check_rd_inputs(source, d);
    const double d_min = min_distortion(source, d);
    const double d_max = zero_rate_distortion(source, d);
    const double tol = kFaceTol * std::max(1.0, d_max);
    if (!(d_c >= d_min - tol))
    {
        std::ostringstream os;
        os << "distortion " << d_c << " is below the minimum achievable " << d_min;
        throw UnreachableDistortion(os.str());
    }
    if (d_c >= d_max)
        return to_result(zero_rate_state(source, d), 0.0);
    if (d_c <= d_min + tol)
        return to_result(blahut_rd(source, d, std::numeric_limits<double>::infinity(), opts),
                         std::numeric_limits<double>::infinity());

    // D(slope) decreases in the slope; bracket then bisect.
    double lo = 0.0;
    RdState st_lo = blahut_rd(source, d, lo, opts);
    double hi = 1.0;
    RdState st_hi = blahut_rd(source, d, hi, opts);
    while (st_hi.distortion > d_c)
    {
        lo = hi;
        st_lo = std::move(st_hi);
        hi *= 2.0;
        if (hi > kMaxMultiplier)
            return to_result(blahut_rd(source, d, std::numeric_limits<double>::infinity(), opts),
                             std::numeric_limits<double>::infinity());
        st_hi = blahut_rd(source, d, hi, opts);
    }
    for (int k = 0; k < kMaxBisections; ++k)
    {
        if (d_c - st_hi.distortion < opts.slack_tol)
            break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        RdState st = blahut_rd(source, d, mid, opts);
        if (st.distortion > d_c)
        {
            lo = mid;
            st_lo = std::move(st);
        }
        else
        {
            hi = mid;
            st_hi = std::move(st);
        }
    }
    // Time-share the bracket endpoints to meet d_c exactly; I is convex in
    // the test channel so the mixture's rate is at most the chord.
    if (st_lo.distortion > st_hi.distortion && d_c - st_hi.distortion > 0.0)
    {
        const double theta = (d_c - st_hi.distortion) / (st_lo.distortion - st_hi.distortion);
        RdState mixed;
        mixed.channel = theta * st_lo.channel + (1.0 - theta) * st_hi.channel;
        mixed.rate = channel_rate(source, mixed.channel);
        mixed.distortion = channel_distortion(source, mixed.channel, d);
        if (mixed.distortion <= d_c + tol && mixed.rate <= st_hi.rate)
            return to_result(mixed, hi);
    }
    return to_result(st_hi, hi);
}

RateDistortionResult distortion_rate_discrete(const Vector& source, const Matrix& d, double rate,
                                              const SolverOptions& opts)
{
    check_rd_inputs(source, d);
    if (rate <= 0.0)
        return to_result(zero_rate_state(source, d), 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    RdState lossless = blahut_rd(source, d, inf, opts);
    if (lossless.rate <= rate)
        return to_result(lossless, inf);

    // R(slope) increases with the slope: `lo` keeps R <= rate.
    double lo = 0.0;
    RdState st_lo = zero_rate_state(source, d);
    double hi = 1.0;
    RdState st_hi = blahut_rd(source, d, hi, opts);
    while (st_hi.rate <= rate)
    {
        lo = hi;
        st_lo = std::move(st_hi);
        hi *= 2.0;
        if (hi > kMaxMultiplier)
        {
            st_hi = lossless;
            break;
        }
        st_hi = blahut_rd(source, d, hi, opts);
    }
    for (int k = 0; k < kMaxBisections; ++k)
    {
        if (rate - st_lo.rate < opts.slack_tol)
            break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        RdState st = blahut_rd(source, d, mid, opts);
        if (st.rate <= rate)
        {
            lo = mid;
            st_lo = std::move(st);
        }
        else
        {
            hi = mid;
            st_hi = std::move(st);
        }
    }
    if (st_hi.rate > st_lo.rate && rate > st_lo.rate)
    {
        const double theta = (rate - st_lo.rate) / (st_hi.rate - st_lo.rate);
        RdState mixed;
        mixed.channel = theta * st_hi.channel + (1.0 - theta) * st_lo.channel;
        mixed.rate = channel_rate(source, mixed.channel);
        mixed.distortion = channel_distortion(source, mixed.channel, d);
        if (mixed.rate <= rate && mixed.distortion <= st_lo.distortion)
            return to_result(mixed, lo);
    }
    return to_result(st_lo, lo);
}

// ---- feasibility ---------------------------------------------------------

FeasibilityResult theorem1_feasible(const FiniteCasModel& model, double d_s, double d_c, double budget,
                                    const SolverOptions& opts)
{
    const CapacityResult cap = constrained_capacity(model, d_s, budget, opts);
    FeasibilityResult r;
    r.capacity = cap.capacity;
    r.input = cap.argmax;
    r.estimate_source = estimate_marginal(model, cap.argmax.probs);
    r.rate = rate_distortion_discrete(r.estimate_source, model.reconstruction(), d_c, opts).rate;
    r.margin = r.capacity - r.rate;
    r.feasible = r.margin >= -1e-9;
    return r;
}

TradeoffPoint min_total_distortion(const FiniteCasModel& model, double budget, double grid_step,
                                   const SolverOptions& opts)
{
    validate(model);
    if (!(grid_step > 0.0))
        throw ConfigError("grid step must be positive");
    const Vector e = estimate_costs(model);
    const double lo = e.minCoeff();
    const double hi = e.maxCoeff();
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step - 1e-9));

    TradeoffPoint best;
    best.d_total = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i <= steps; ++i)
    {
        const double level = i == steps ? hi : lo + static_cast<double>(i) * grid_step;
        CapacityResult cap;
        try
        {
            cap = constrained_capacity(model.comm_law, e, level, model.cost, budget, opts);
        }
        catch (const InfeasibleConstraint&)
        {
            continue;
        }
        any = true;
        const Vector source = estimate_marginal(model, cap.argmax.probs);
        const RateDistortionResult dr = distortion_rate_discrete(source, model.reconstruction(), cap.capacity, opts);
        TradeoffPoint pt;
        pt.d_s = cap.argmax.probs.dot(e);
        pt.d_c = dr.distortion;
        pt.d_total = pt.d_s + pt.d_c;
        pt.rate = dr.rate;
        pt.capacity = cap.capacity;
        pt.budget = budget;
        if (pt.d_total < best.d_total)
            best = pt;
    }
    if (!any)
        throw InfeasibleConstraint("no estimation-distortion level is feasible under the budget");
    return best;
}

} // namespace cas::discrete
