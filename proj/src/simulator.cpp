#include "cas/simulator.hpp"

#include "cas/errors.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace cas::sim {

using gaussian::Complex;
using gaussian::CVector;

namespace {

constexpr double kModeFloor = 1e-12;

struct Chain
{
    CMatrix prior_root;  // Sigma_s^{1/2}
    CMatrix x;
    CMatrix filter;      // W = Sigma X R_z^{-1}
    double noise_sd = 0.0;  // per real component of the observation noise
    int blocks = 1;

    bool end_to_end = false;
    CMatrix modes;                // eigenvectors of the estimate block covariance, descending
    std::vector<double> gain;     // 1 - D_i / lambda_i, 0 for discarded modes
    std::vector<double> test_sd;  // per real component of the test-channel noise
};

// Running sums for the four per-trial distortions plus per-mode powers.
struct Sums
{
    std::size_t n = 0;
    double s1[4] = {0, 0, 0, 0};
    double s2[4] = {0, 0, 0, 0};
    std::vector<double> m1;
    std::vector<double> m2;

    explicit Sums(std::size_t modes = 0) : m1(modes, 0.0), m2(modes, 0.0) {}

    void add(const TrialRecord& r, const std::vector<double>& mode_power)
    {
        const double v[4] = {r.d_s, r.d_c, r.d_total, r.cross};
        for (int k = 0; k < 4; ++k)
        {
            s1[k] += v[k];
            s2[k] += v[k] * v[k];
        }
        for (std::size_t i = 0; i < mode_power.size(); ++i)
        {
            m1[i] += mode_power[i];
            m2[i] += mode_power[i] * mode_power[i];
        }
        ++n;
    }

    void merge(const Sums& o)
    {
        n += o.n;
        for (int k = 0; k < 4; ++k)
        {
            s1[k] += o.s1[k];
            s2[k] += o.s2[k];
        }
        for (std::size_t i = 0; i < m1.size(); ++i)
        {
            m1[i] += o.m1[i];
            m2[i] += o.m2[i];
        }
    }
};

Estimate summarize(double s1, double s2, std::size_t n)
{
    Estimate e;
    const double nn = static_cast<double>(n);
    e.mean = s1 / nn;
    if (n > 1)
    {
        const double var = std::max(0.0, (s2 - nn * e.mean * e.mean) / (nn - 1.0));
        e.se = std::sqrt(var / nn);
    }
    return e;
}

void run_chunk(const Chain& c, std::size_t count, std::mt19937_64& rng, Sums& sums,
               std::vector<TrialRecord>* keep)
{
    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
    std::normal_distribution<double> std_normal(0.0, 1.0);
    const Eigen::Index n = c.x.rows();
    const Eigen::Index t = c.x.cols();
    const std::size_t nmodes = c.gain.size();
    std::vector<double> mode_power(c.end_to_end ? nmodes : 0);
    CVector g(n), noise(t), u(n);

    for (std::size_t trial = 0; trial < count; ++trial)
    {
        TrialRecord rec;
        std::fill(mode_power.begin(), mode_power.end(), 0.0);
        for (int b = 0; b < c.blocks; ++b)
        {
            for (Eigen::Index i = 0; i < n; ++i)
                g[i] = Complex(unit(rng), unit(rng));
            const CVector s = c.prior_root * g;
            for (Eigen::Index i = 0; i < t; ++i)
                noise[i] = Complex(c.noise_sd * std_normal(rng), c.noise_sd * std_normal(rng));
            const CVector z = c.x.adjoint() * s + noise;
            const CVector est = c.filter * z;

            CVector rec_hat = est;
            if (c.end_to_end)
            {
                u = c.modes.adjoint() * est;
                for (std::size_t i = 0; i < nmodes; ++i)
                {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const Complex w(c.test_sd[i] * std_normal(rng), c.test_sd[i] * std_normal(rng));
                    u[ii] = c.gain[i] > 0.0 ? c.gain[i] * u[ii] + w : Complex(0.0, 0.0);
                    mode_power[i] += std::norm(u[ii]) / c.blocks;
                }
                rec_hat = c.modes * u;
            }

            const CVector e_s = s - est;
            const CVector e_c = est - rec_hat;
            rec.d_s += e_s.squaredNorm();
            rec.d_c += e_c.squaredNorm();
            rec.d_total += (s - rec_hat).squaredNorm();
            rec.cross += e_s.dot(e_c).real();
        }
        sums.add(rec, mode_power);
        if (keep)
            keep->push_back(rec);
    }
}

SimReport simulate(const TrmModel& model, const CMatrix& x, double rate_budget, bool end_to_end,
                   const SimOptions& opts)
{
    gaussian::validate(model);
    if (x.rows() != model.dims.tx || x.cols() < 1)
        throw ConfigError("waveform must have N rows");
    if (opts.trials < 1)
        throw ConfigError("at least one trial is required");
    if (opts.workers < 1)
        throw ConfigError("at least one worker is required");
    if (!(rate_budget >= 0.0))
        throw ConfigError("rate budget must be nonnegative");

    Chain c;
    c.prior_root = gaussian::psd_sqrt(model.sigma_s);
    c.x = x;
    c.filter = gaussian::mmse_filter(model, x);
    c.noise_sd = std::sqrt(0.5 * model.noise_s / model.dims.symbols);
    c.blocks = model.dims.sensing_rx;
    c.end_to_end = end_to_end;

    SimReport rep;
    rep.seed = opts.seed;
    rep.workers = opts.workers;
    rep.rate_budget = end_to_end ? rate_budget : 0.0;
    rep.analytic_d_s = gaussian::sensing_mse(model, gaussian::GramMatrix::from_waveform(x));

    if (end_to_end)
    {
        const CMatrix block = gaussian::estimate_block_covariance(model, x);
        const gaussian::HermitianEigen eig = gaussian::hermitian_eigen(block);
        const Eigen::Index n = eig.values.size();
        c.modes = eig.vectors.rowwise().reverse();
        const gaussian::Spectrum spec = gaussian::block_spectrum(block, c.blocks);
        const gaussian::WaterfillResult wf = gaussian::reverse_waterfill(spec.eigenvalues, rate_budget);
        rep.analytic_d_c = wf.d_c;
        const double top = std::max(0.0, eig.values.maxCoeff());
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double lambda = std::max(0.0, eig.values[n - 1 - i]);
            const double alloc = wf.allocations[static_cast<std::size_t>(i * c.blocks)];
            const bool active = top > 0.0 && lambda > kModeFloor * top && alloc < lambda;
            const double gain = active ? 1.0 - alloc / lambda : 0.0;
            c.gain.push_back(gain);
            c.test_sd.push_back(active ? std::sqrt(0.5 * alloc * gain) : 0.0);
            rep.mode_lambda.push_back(lambda);
            rep.mode_allocation.push_back(active ? alloc : lambda);
        }
    }
    rep.analytic_d_total = rep.analytic_d_s + rep.analytic_d_c;

    const std::size_t nmodes = c.gain.size();
    std::vector<Sums> partial(opts.workers, Sums(nmodes));
    std::vector<std::vector<TrialRecord>> kept(opts.workers);
    auto work = [&](unsigned w) {
        const std::size_t begin = opts.trials * w / opts.workers;
        const std::size_t end = opts.trials * (w + 1) / opts.workers;
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(w)};
        std::mt19937_64 rng(seq);
        run_chunk(c, end - begin, rng, partial[w], opts.keep_trials ? &kept[w] : nullptr);
    };
    if (opts.workers == 1)
    {
        work(0);
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < opts.workers; ++w)
            pool.emplace_back(work, w);
        for (auto& th : pool)
            th.join();
    }

    Sums total(nmodes);
    for (unsigned w = 0; w < opts.workers; ++w)
    {
        total.merge(partial[w]);
        if (opts.keep_trials)
            rep.trials.insert(rep.trials.end(), kept[w].begin(), kept[w].end());
    }
    rep.n_trials = total.n;
    rep.d_s = summarize(total.s1[0], total.s2[0], total.n);
    rep.d_c = summarize(total.s1[1], total.s2[1], total.n);
    rep.d_total = summarize(total.s1[2], total.s2[2], total.n);
    rep.cross_term = summarize(total.s1[3], total.s2[3], total.n);
    for (std::size_t i = 0; i < nmodes; ++i)
        rep.mode_power.push_back(summarize(total.m1[i], total.m2[i], total.n));
    return rep;
}

} // namespace

SimReport simulate_sensing(const TrmModel& model, const CMatrix& x, const SimOptions& opts)
{
    return simulate(model, x, 0.0, false, opts);
}

SimReport simulate_end_to_end(const TrmModel& model, const CMatrix& x, double rate_budget, const SimOptions& opts)
{
    return simulate(model, x, rate_budget, true, opts);
}

} // namespace cas::sim
