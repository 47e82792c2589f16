// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   acceptance          run criteria 1-8
//   acceptance 4 7      run the listed criteria
//
// Exit status is 0 only when every requested criterion passes.

#include "cas/discrete_limits.hpp"
#include "cas/errors.hpp"
#include "cas/gaussian_cas.hpp"
#include "cas/simulator.hpp"
#include "cas/waveform_opt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cas;
using discrete::FiniteCasModel;
using discrete::Matrix;
using discrete::Vector;
using gaussian::CMatrix;
using gaussian::TrmModel;

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass)
            detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

// ---- shared oracles ---------------------------------------------------------

double h_nats(double p)
{
    if (p <= 0.0 || p >= 1.0)
        return 0.0;
    return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

// inverse of h_nats on [0, 1/2]
double h_inverse(double v)
{
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (h_nats(mid) < v ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Matrix hamming(int n)
{
    return Matrix::Ones(n, n) - Matrix::Identity(n, n);
}

Matrix bsc(double eps)
{
    Matrix w(2, 2);
    w << 1 - eps, eps, eps, 1 - eps;
    return w;
}

double mi_oracle(const Vector& p, const Matrix& w)
{
    const Vector q = w.transpose() * p;
    double r = 0.0;
    for (Eigen::Index x = 0; x < w.rows(); ++x)
        for (Eigen::Index y = 0; y < w.cols(); ++y)
            if (p[x] > 0 && w(x, y) > 0)
                r += p[x] * w(x, y) * std::log(w(x, y) / q[y]);
    return r;
}

Vector random_simplex(std::mt19937_64& rng, int n)
{
    std::exponential_distribution<double> e(1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i)
        v[i] = e(rng) + 1e-3;
    return v / v.sum();
}

FiniteCasModel random_model(std::mt19937_64& rng, int ns, int nx, int nz, int ny)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FiniteCasModel m;
    m.state_prior = random_simplex(rng, ns);
    for (int x = 0; x < nx; ++x)
    {
        Matrix q(ns, nz);
        for (int s = 0; s < ns; ++s)
            q.row(s) = random_simplex(rng, nz).transpose();
        m.sensing_law.push_back(q);
    }
    m.comm_law = Matrix(nx, ny);
    for (int x = 0; x < nx; ++x)
        m.comm_law.row(x) = random_simplex(rng, ny).transpose();
    m.distortion = Matrix(ns, ns);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j)
            m.distortion(i, j) = u(rng);
    m.cost = Vector(nx);
    for (int x = 0; x < nx; ++x)
        m.cost[x] = u(rng);
    return m;
}

// D = sum min(lambda_i, xi) at the given rate, by bisection on xi
double waterfill_oracle(const std::vector<double>& lam, double rate)
{
    double total = 0.0, top = 0.0;
    for (double l : lam)
    {
        total += l;
        top = std::max(top, l);
    }
    if (rate <= 0.0 || top <= 0.0)
        return total;
    double lo = 0.0, hi = top;
    for (int i = 0; i < 300; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        double r = 0.0;
        for (double l : lam)
            if (l > mid)
                r += std::log(l / mid);
        (r > rate ? lo : hi) = mid;
    }
    double d = 0.0;
    for (double l : lam)
        d += std::min(l, hi);
    return d;
}

// ---- criterion 1 --------------------------------------------------------------

Outcome criterion1()
{
    Outcome o;
    FiniteCasModel m;
    m.state_prior = Vector::Constant(2, 0.5);
    m.sensing_law = {bsc(0.1), bsc(0.3)};
    m.comm_law = bsc(0.1);
    m.distortion = hamming(2);
    m.cost = Vector::Zero(2);
    const double expected = std::log(2.0) - h_nats(0.1);
    const double c = discrete::constrained_capacity(m, 10.0, 10.0).capacity;
    o.require(std::abs(c - expected) <= 1e-6, "BSC capacity");
    o.detail << "BSC err " << std::abs(c - expected);

    double worst = 0.0;
    for (double p : {0.2, 0.5})
    {
        Vector src(2);
        src << 1 - p, p;
        const double pmin = std::min(p, 1 - p);
        for (int k = 0; k < 20; ++k)
        {
            const double d = pmin * k / 19.0;
            const double r = discrete::rate_distortion_discrete(src, hamming(2), d).rate;
            const double err = std::abs(r - (h_nats(p) - h_nats(d)));
            worst = std::max(worst, err);
            o.require(err <= 1e-6, "R(D) at p=" + std::to_string(p) + " D=" + std::to_string(d));
        }
    }
    o.detail << ", worst R(D) err " << worst;
    return o;
}

// ---- criterion 2 --------------------------------------------------------------

Outcome criterion2()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(2, 3);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k)
    {
        const int ns = size(rng), nx = size(rng), nz = size(rng);
        const FiniteCasModel m = random_model(rng, ns, nx, nz, 2);
        for (int x = 0; x < nx; ++x)
        {
            // every table s~ = f(z) for this x
            int tables = 1;
            for (int z = 0; z < nz; ++z)
                tables *= ns;
            double best = std::numeric_limits<double>::infinity();
            for (int code = 0; code < tables; ++code)
            {
                double risk = 0.0;
                int c = code;
                for (int z = 0; z < nz; ++z, c /= ns)
                    for (int s = 0; s < ns; ++s)
                        risk += m.state_prior[s] * m.sensing_law[x](s, z) * m.distortion(s, c % ns);
                best = std::min(best, risk);
            }
            double mine = 0.0;
            for (int z = 0; z < nz; ++z)
            {
                const auto e = static_cast<Eigen::Index>(discrete::optimal_estimate(m, static_cast<std::size_t>(x), static_cast<std::size_t>(z)));
                for (int s = 0; s < ns; ++s)
                    mine += m.state_prior[s] * m.sensing_law[x](s, z) * m.distortion(s, e);
            }
            const double err = std::abs(mine - best);
            worst = std::max(worst, err);
            o.require(err <= 1e-12, "model " + std::to_string(k) + " input " + std::to_string(x));
            o.require(std::abs(discrete::estimate_cost(m, static_cast<std::size_t>(x)) - mine) <= 1e-12,
                      "estimate_cost consistency");
        }
    }
    o.detail << "50 models, worst gap " << worst;
    return o;
}

// ---- criterion 3 --------------------------------------------------------------

Outcome criterion3()
{
    Outcome o;
    const double tol = 1e-8;
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int checks = 0;
    for (int k = 0; k < 20; ++k)
    {
        const int n = 2 + k % 2;
        const FiniteCasModel m = random_model(rng, n, n + (k % 3 == 0), n, n);
        const Vector e = discrete::estimate_costs(m);
        const double e_lo = e.minCoeff(), e_hi = e.maxCoeff();
        const double b_lo = m.cost.minCoeff(), b_hi = m.cost.maxCoeff();
        auto cap = [&](double d, double b) {
            try
            {
                return discrete::constrained_capacity(m, d, b).capacity;
            }
            catch (const InfeasibleConstraint&)
            {
                return -std::numeric_limits<double>::infinity();
            }
        };
        for (int t = 0; t < 10; ++t)
        {
            const double d1 = e_lo + (e_hi - e_lo) * u(rng), d2 = e_lo + (e_hi - e_lo) * u(rng);
            const double b1 = b_lo + (b_hi - b_lo) * u(rng), b2 = b_lo + (b_hi - b_lo) * u(rng);
            const double ca = cap(std::min(d1, d2), std::min(b1, b2));
            const double cb = cap(std::max(d1, d2), std::max(b1, b2));
            const double cd = cap(std::max(d1, d2), std::min(b1, b2));
            const double ce = cap(std::min(d1, d2), std::max(b1, b2));
            if (std::isfinite(ca))
            {
                o.require(cb >= ca - tol && cd >= ca - tol && ce >= ca - tol, "capacity monotone");
                worst = std::max({worst, ca - cb, ca - cd, ca - ce});
            }
            const double c1 = cap(d1, b1), c2 = cap(d2, b2);
            if (std::isfinite(c1) && std::isfinite(c2))
            {
                const double cm = cap(0.5 * (d1 + d2), 0.5 * (b1 + b2));
                o.require(cm >= 0.5 * (c1 + c2) - tol, "capacity midpoint concave");
                worst = std::max(worst, 0.5 * (c1 + c2) - cm);
            }

            const Vector src = discrete::estimate_marginal(m, random_simplex(rng, static_cast<int>(m.num_inputs())));
            const double lo = discrete::min_distortion(src, m.distortion);
            const double hi = discrete::zero_rate_distortion(src, m.distortion);
            const double x1 = lo + (hi - lo) * u(rng), x2 = lo + (hi - lo) * u(rng);
            const double r1 = discrete::rate_distortion_discrete(src, m.distortion, std::min(x1, x2)).rate;
            const double r2 = discrete::rate_distortion_discrete(src, m.distortion, std::max(x1, x2)).rate;
            const double rm = discrete::rate_distortion_discrete(src, m.distortion, 0.5 * (x1 + x2)).rate;
            o.require(r1 >= r2 - tol, "rate-distortion nonincreasing");
            o.require(rm <= 0.5 * (r1 + r2) + tol, "rate-distortion midpoint convex");
            worst = std::max({worst, r2 - r1, rm - 0.5 * (r1 + r2)});
            checks += 5;
        }
    }
    o.detail << checks << " checks on 20 models, worst violation " << std::max(worst, 0.0);
    return o;
}

// ---- criterion 4 --------------------------------------------------------------

Outcome criterion4()
{
    Outcome o;
    double worst_rel = 0.0, worst_z = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const int n = 1 + static_cast<int>(seed % 4);
        const int ms = 1 + static_cast<int>((seed + 1) % 4);
        const int mc = 1 + static_cast<int>((seed + 2) % 4);
        const TrmModel m = gaussian::random_trm_model({{16, n, ms, mc}, 1.0, 1.0, 1.0, seed});

        std::mt19937_64 rng(seed * 7919);
        std::normal_distribution<double> g(0.0, 1.0);
        CMatrix x(n, 16);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 16; ++j)
                x(i, j) = {g(rng), g(rng)};
        x *= std::sqrt(m.trace_budget() / x.squaredNorm());

        sim::SimOptions so;
        so.trials = 100000;
        so.seed = seed;
        const auto sens = sim::simulate_sensing(m, x, so);
        const double analytic = gaussian::sensing_mse(m, gaussian::GramMatrix::from_waveform(x));
        const double z_s = std::abs(sens.d_s.mean - analytic) / sens.d_s.se;
        const double rel = std::abs(sens.d_s.mean - analytic) / analytic;
        o.require(z_s <= 3.0, "d_s within 3 SE (seed " + std::to_string(seed) + ")");
        o.require(rel <= 0.02, "d_s within 2% (seed " + std::to_string(seed) + ")");

        const double rate = gaussian::channel_mi(m, gaussian::GramMatrix::from_waveform(x));
        so.seed = seed + 100;
        const auto e2e = sim::simulate_end_to_end(m, x, rate, so);
        const double z_x = std::abs(e2e.cross_term.mean) / e2e.cross_term.se;
        const double analytic_dc = gaussian::reverse_waterfill(gaussian::estimate_covariance(m, x).eigenvalues, rate).d_c;
        const double z_c = std::abs(e2e.d_c.mean - analytic_dc) / e2e.d_c.se;
        o.require(z_x <= 3.0, "cross term within 3 SE (seed " + std::to_string(seed) + ")");
        o.require(z_c <= 3.0, "d_c within 3 SE (seed " + std::to_string(seed) + ")");
        worst_rel = std::max(worst_rel, rel);
        worst_z = std::max({worst_z, z_s, z_x, z_c});
    }
    o.detail << "5 models x 1e5 trials, worst |z| " << worst_z << ", worst d_s rel err " << worst_rel;
    return o;
}

// ---- criterion 5 --------------------------------------------------------------

// min sum lambda_i e^{-r_i} over r >= 0, sum r = R, by shrinking grids on
// (r_1 .. r_{k-1}) with r_k eliminated. The problem is convex in r.
double waterfill_brute_force(const std::vector<double>& lam, double rate)
{
    const std::size_t k = lam.size();
    auto objective = [&](const std::vector<double>& r) {
        double used = 0.0, d = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i)
        {
            used += r[i];
            d += lam[i] * std::exp(-r[i]);
        }
        const double last = rate - used;
        if (last < -1e-15)
            return std::numeric_limits<double>::infinity();
        return d + lam[k - 1] * std::exp(-std::max(last, 0.0));
    };
    if (k == 1)
        return lam[0] * std::exp(-rate);
    std::vector<double> centre(k - 1, rate / k);
    double width = rate;
    double best = objective(centre);
    const int pts = 10;
    for (int round = 0; round < 120 && width > 1e-13; ++round)
    {
        std::vector<double> best_r = centre;
        std::vector<int> idx(k - 1, 0);
        for (;;)
        {
            std::vector<double> r(k - 1);
            bool ok = true;
            for (std::size_t i = 0; i + 1 < k; ++i)
            {
                r[i] = centre[i] + width * (2.0 * idx[i] / pts - 1.0);
                ok = ok && r[i] >= 0.0;
            }
            if (ok)
            {
                const double v = objective(r);
                if (v < best)
                {
                    best = v;
                    best_r = r;
                }
            }
            std::size_t d = 0;
            while (d + 1 < k && ++idx[d] > pts)
                idx[d++] = 0;
            if (d + 1 == k)
                break;
        }
        if (best_r == centre)
            width *= 0.5;
        centre = best_r;
    }
    return best;
}

Outcome criterion5()
{
    Outcome o;
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    double worst_rate = 0.0, worst_opt = 0.0;
    for (int t = 0; t < 100; ++t)
    {
        std::vector<double> lam(1 + t % 8);
        for (auto& v : lam)
            v = u(rng) * u(rng);
        if (t % 10 == 0)
            lam.push_back(0.0);
        const double rate = 0.25 * u(rng) * static_cast<double>(lam.size());
        const auto wf = gaussian::reverse_waterfill(lam, rate);
        const double back = gaussian::gaussian_rate(lam, wf.allocations);
        worst_rate = std::max(worst_rate, std::abs(back - rate));
        o.require(std::abs(back - rate) <= 1e-8, "rate round trip");
    }
    for (int t = 0; t < 20; ++t)
    {
        std::vector<double> lam(1 + t % 4);
        for (auto& v : lam)
            v = 0.1 + u(rng);
        const double rate = 0.3 * u(rng);
        const double d = gaussian::reverse_waterfill(lam, rate).d_c;
        const double bf = waterfill_brute_force(lam, rate);
        worst_opt = std::max(worst_opt, std::abs(d - bf));
        o.require(std::abs(d - bf) <= 1e-6, "brute-force optimality");
    }
    o.detail << "worst rate round trip " << worst_rate << ", worst gap to brute force " << worst_opt;
    return o;
}

// ---- criterion 6 --------------------------------------------------------------

struct DiagonalCase
{
    std::vector<double> sigma, gain;
    int T, Ms;
    double power;

    TrmModel model() const
    {
        const int n = static_cast<int>(sigma.size());
        TrmModel m;
        m.dims = {T, n, Ms, n};
        m.sigma_s = CMatrix::Zero(n, n);
        m.h_c = CMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
        {
            m.sigma_s(i, i) = sigma[static_cast<std::size_t>(i)];
            m.h_c(i, i) = std::sqrt(gain[static_cast<std::size_t>(i)]);
        }
        m.noise_s = 1.0;
        m.noise_c = 1.0;
        m.power = power;
        return m;
    }

    double objective(const std::vector<double>& q) const
    {
        double d_s = 0.0, mi = 0.0;
        std::vector<double> lam;
        for (std::size_t i = 0; i < q.size(); ++i)
        {
            const double err = 1.0 / (T * q[i] + 1.0 / sigma[i]);
            d_s += Ms * err;
            lam.insert(lam.end(), static_cast<std::size_t>(Ms), sigma[i] - err);
            mi += std::log1p(T * gain[i] * q[i]);
        }
        return d_s + waterfill_oracle(lam, mi);
    }
};

double golden(const std::function<double(double)>& f, double a, double b)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a), fc = f(c), fd = f(d);
    for (int i = 0; i < 200; ++i)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::min({f(a), f(b), fc, fd});
}

Outcome criterion6()
{
    Outcome o;
    double worst1 = 0.0, worst2 = 0.0;
    const std::vector<DiagonalCase> scalar = {
        {{1.0}, {1.0}, 1, 1, 3.0}, {{1.3}, {0.8}, 4, 3, 0.5}, {{0.7}, {2.5}, 16, 4, 0.05}};
    for (const auto& c : scalar)
    {
        const TrmModel m = c.model();
        const double oracle = golden([&](double q) { return c.objective({q}); }, 0.0, m.trace_budget());
        const double got = waveform::optimize_isac(m).point.d_total;
        const double rel = std::abs(got - oracle) / oracle;
        worst1 = std::max(worst1, rel);
        o.require(rel <= 1e-4, "scalar golden-section oracle");
    }
    const std::vector<DiagonalCase> pairs = {{{1.5, 0.5}, {0.3, 2.0}, 8, 2, 0.4},
                                             {{1.0, 1.0}, {1.0, 0.2}, 4, 1, 1.0},
                                             {{2.0, 0.3}, {0.5, 0.5}, 16, 3, 0.1}};
    for (const auto& c : pairs)
    {
        const TrmModel m = c.model();
        const double budget = m.trace_budget();
        double grid = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 200; ++i)
            for (int j = 0; j < 200; ++j)
            {
                const double q1 = budget * i / 199.0, q2 = budget * j / 199.0;
                if (q1 + q2 <= budget * (1 + 1e-12))
                    grid = std::min(grid, c.objective({q1, q2}));
            }
        const double got = waveform::optimize_isac(m).point.d_total;
        const double rel = std::abs(got - grid) / grid;
        worst2 = std::max(worst2, rel);
        o.require(rel <= 1e-3, "2-D grid oracle");
    }
    o.detail << "worst rel gap: scalar " << worst1 << ", 2-D " << worst2;
    return o;
}

// ---- criterion 7 --------------------------------------------------------------

Outcome criterion7()
{
    Outcome o;
    const TrmModel base = gaussian::random_trm_model({{16, 4, 4, 4}, 1.0, 1.0, 1.0, 1});
    std::vector<double> snr;
    for (int k = 0; k < 9; ++k)
        snr.push_back(-10.0 + 5.0 * k);
    const auto curve = waveform::sweep_snr(base, snr, {waveform::Scheme::Isac, waveform::Scheme::Sw});

    std::vector<double> isac(snr.size()), sw(snr.size());
    for (const auto& e : curve.entries)
    {
        const auto i = static_cast<std::size_t>(std::find(snr.begin(), snr.end(), e.snr_db) - snr.begin());
        o.require(!e.failed, "sweep point failed: " + e.error);
        (e.scheme == waveform::Scheme::Isac ? isac : sw)[i] = e.result.point.d_total;
    }
    // a crossover index k with ISAC <= SW on [0, k) and SW <= ISAC on [k, n),
    // both sides nonempty
    bool found = false;
    for (std::size_t k = 1; k < snr.size() && !found; ++k)
    {
        bool ok = true;
        for (std::size_t i = 0; i < snr.size(); ++i)
            ok = ok && (i < k ? isac[i] <= sw[i] : sw[i] <= isac[i]);
        found = ok;
    }
    o.require(found, "no crossover: ISAC total D <= SW total D must flip to SW <= ISAC within the grid");
    o.detail << "snr/ISAC/SW:";
    for (std::size_t i = 0; i < snr.size(); ++i)
        o.detail << " " << snr[i] << "dB " << isac[i] << "/" << sw[i];
    return o;
}

// ---- criterion 8 --------------------------------------------------------------

Outcome criterion8()
{
    Outcome o;
    FiniteCasModel m;
    m.state_prior = Vector::Constant(2, 0.5);
    m.sensing_law = {bsc(0.1), bsc(0.4)};
    m.comm_law = bsc(0.1);
    m.distortion = hamming(2);
    m.cost = Vector(2);
    m.cost << 0.0, 1.0;
    const double budget = 1.0;

    const TradeoffPoint pt = discrete::min_total_distortion(m, budget, 1e-3);

    // Joint brute force over P_X = (1 - p, p): d_s = E[e(X)], the link carries
    // I(X; Y) at that input, and the estimate (= z here) is Bernoulli(1/2), so
    // D_c solves H(1/2) - H(D_c) = I.
    const Vector e = discrete::estimate_costs(m);
    double brute = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 1000; ++k)
    {
        Vector p(2);
        p << 1.0 - k * 1e-3, k * 1e-3;
        const double d_s = p.dot(e);
        const double rate = mi_oracle(p, m.comm_law);
        const double d_c = rate >= std::log(2.0) ? 0.0 : h_inverse(std::log(2.0) - rate);
        brute = std::min(brute, d_s + d_c);
    }
    const double gap = std::abs(pt.d_total - brute);
    o.require(gap <= 1e-3, "min total distortion vs brute force");
    o.require(std::abs(pt.d_total - pt.d_s - pt.d_c) <= 1e-9, "d_total = d_s + d_c");

    // margins along each axis
    auto margin = [&](double d_s, double d_c, double b) { return discrete::theorem1_feasible(m, d_s, d_c, b).margin; };
    int violations = 0;
    for (int i = 0; i < 12; ++i)
    {
        const double d_s = 0.12 + 0.02 * i;
        double prev = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < 12; ++j)
        {
            const double v = margin(d_s, 0.01 + 0.04 * j, budget);
            violations += v < prev - 1e-9;
            prev = v;
        }
    }
    for (int j = 0; j < 12; ++j)
    {
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 12; ++i)
        {
            const double v = margin(0.12 + 0.02 * i, 0.01 + 0.04 * j, budget);
            violations += v < prev - 1e-9;
            prev = v;
        }
    }
    for (int j = 0; j < 12; ++j)
    {
        double prev = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < 12; ++b)
        {
            const double v = margin(0.4, 0.01 + 0.04 * j, b / 11.0);
            violations += v < prev - 1e-9;
            prev = v;
        }
    }
    o.require(violations == 0, "margin monotone along every axis");
    o.detail << "D* " << pt.d_total << " (d_s " << pt.d_s << ", d_c " << pt.d_c << "), brute force " << brute
             << ", gap " << gap << ", monotonicity violations " << violations;
    return o;
}

struct Criterion
{
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "closed-form oracles", 5, criterion1},
    {2, "estimator optimality", 10, criterion2},
    {3, "monotonicity and convexity", 600, criterion3},
    {4, "analytic vs empirical Gaussian chain", 120, criterion4},
    {5, "reverse water-filling", 30, criterion5},
    {6, "optimizer anchors", 120, criterion6},
    {7, "ISAC/SW crossover over SNR", 600, criterion7},
    {8, "feasibility region coherence", 300, criterion8},
};

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i)
    {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > 8)
        {
            std::fprintf(stderr, "usage: %s [criterion 1-8 ...]\n", argv[0]);
            return 2;
        }
        wanted.push_back(id);
    }
    if (wanted.empty())
        for (int i = 1; i <= 8; ++i)
            wanted.push_back(i);

    int failed = 0;
    for (const auto& c : kCriteria)
    {
        if (std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = c.run();
        }
        catch (const std::exception& e)
        {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s)
        {
            out.pass = false;
            out.detail << "; runtime limit " << c.limit_s << " s exceeded";
        }
        std::printf("criterion %d %-40s %s  (%.2f s)  %s\n", c.id, c.name, out.pass ? "PASS" : "FAIL", secs,
                    out.detail.str().c_str());
        failed += !out.pass;
    }
    return failed == 0 ? 0 : 1;
}
