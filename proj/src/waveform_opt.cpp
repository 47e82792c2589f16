#include "cas/waveform_opt.hpp"

#include "cas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace cas::waveform {

using gaussian::Complex;
using gaussian::HermitianEigen;
using gaussian::RVector;

namespace {

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

double inner(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace().real(); }

struct Terms
{
    double d_s = 0.0;
    double d_c = 0.0;
    double rate = 0.0;
};

Terms sensing_and_reconstruction(const gaussian::SensingEvaluator& sensing, const CMatrix& q, double mi,
                                 int multiplicity)
{
    const auto st = sensing(q);
    const auto spec = gaussian::block_spectrum(st.estimate_block, multiplicity);
    const auto wf = gaussian::reverse_waterfill(spec.eigenvalues, mi);
    return {st.d_s, wf.d_c, gaussian::gaussian_rate(spec.eigenvalues, wf.allocations)};
}

OptResult make_result(const TrmModel& model, const GramMatrix& q, const Evaluation& ev)
{
    OptResult r;
    r.q_star = q;
    r.trace_used = q.trace();
    r.point.d_s = ev.d_s;
    r.point.d_c = ev.d_c;
    r.point.d_total = ev.d_s + ev.d_c;
    r.point.rate = ev.rate;
    r.point.capacity = ev.mi;
    r.point.budget = model.trace_budget();
    return r;
}

} // namespace

// ---- objective ----------------------------------------------------------

IsacObjective::IsacObjective(const TrmModel& model) : model_(model), sensing_(model)
{
    gaussian::validate(model_);
}

Evaluation IsacObjective::evaluate(const CMatrix& q_in) const
{
    const GramMatrix q(hermitian_part(q_in));
    Evaluation ev;
    ev.mi = gaussian::channel_mi(model_, q);
    const Terms t = sensing_and_reconstruction(sensing_, q.matrix(), ev.mi, model_.dims.sensing_rx);
    ev.d_s = t.d_s;
    ev.d_c = t.d_c;
    ev.rate = t.rate;
    return ev;
}

// ---- ISAC ---------------------------------------------------------------

CMatrix project_gram(const CMatrix& q, double budget)
{
    const HermitianEigen eig = gaussian::hermitian_eigen(q);
    RVector lam = eig.values.cwiseMax(0.0);
    if (lam.sum() > budget)
    {
        // Shift-and-clip onto the capped simplex: sum (lam_i - tau)^+ = budget.
        std::vector<double> sorted(lam.data(), lam.data() + lam.size());
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        double tau = 0.0;
        double prefix = 0.0;
        for (std::size_t k = 0; k < sorted.size(); ++k)
        {
            prefix += sorted[k];
            const double cand = (prefix - budget) / static_cast<double>(k + 1);
            if (k + 1 == sorted.size() || cand >= sorted[k + 1])
            {
                tau = cand;
                break;
            }
        }
        lam = (lam.array() - tau).cwiseMax(0.0);
    }
    return hermitian_part(eig.vectors * lam.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

namespace {

CMatrix fd_gradient(const IsacObjective& f, const CMatrix& q, double h)
{
    const Eigen::Index n = q.rows();
    CMatrix g = CMatrix::Zero(n, n);
    auto central = [&](const CMatrix& dir) {
        const double plus = f(q + h * dir);
        const double minus = f(q - h * dir);
        return (plus - minus) / (2.0 * h);
    };
    for (Eigen::Index i = 0; i < n; ++i)
    {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        g(i, i) = central(e);
        for (Eigen::Index j = i + 1; j < n; ++j)
        {
            CMatrix re = CMatrix::Zero(n, n);
            re(i, j) = 1.0;
            re(j, i) = 1.0;
            CMatrix im = CMatrix::Zero(n, n);
            im(i, j) = Complex(0.0, 1.0);
            im(j, i) = Complex(0.0, -1.0);
            // <G, E> = 2 Re G_ij and 2 Im G_ij for the two directions.
            const Complex gij(central(re) / 2.0, central(im) / 2.0);
            g(i, j) = gij;
            g(j, i) = std::conj(gij);
        }
    }
    return g;
}

void require_finite(double v)
{
    if (!std::isfinite(v))
        throw NonFiniteObjective("objective is not finite; the model is ill-conditioned");
}

} // namespace

OptResult optimize_isac(const TrmModel& model, const IsacOptions& opts)
{
    gaussian::validate(model);
    const int n = model.dims.tx;
    const double budget = model.trace_budget();
    const double scale = budget / n;
    const double h = opts.fd_step * scale;
    const IsacObjective f(model);

    CMatrix q = opts.init ? opts.init->matrix() : CMatrix(scale * CMatrix::Identity(n, n));
    if (q.rows() != n || q.cols() != n)
        throw ConfigError("initial Gram has the wrong dimension");
    q = project_gram(q, budget);
    double fq = f(q);
    require_finite(fq);

    std::deque<double> history{fq};
    CMatrix grad = fd_gradient(f, q, h);
    double step = 0.1 * scale / std::max(grad.norm(), 1e-300);
    std::size_t it = 0;
    bool converged = false;

    for (; it < opts.max_iterations; ++it)
    {
        if (!(grad.norm() > 0.0))
        {
            converged = true;
            break;
        }
        bool accepted = false;
        bool stationary = false;
        CMatrix q_next;
        double f_next = fq;
        double t = step;
        for (int bt = 0; bt < 60; ++bt)
        {
            q_next = project_gram(q - t * grad, budget);
            const CMatrix d = q_next - q;
            if (d.norm() <= 1e-14 * std::max(1.0, budget))
            {
                stationary = true;
                break;
            }
            f_next = f(q_next);
            require_finite(f_next);
            if (f_next <= fq + opts.armijo * inner(grad, d))
            {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        // No descent step left along the projected gradient: stationary.
        if (!accepted || stationary)
        {
            converged = true;
            break;
        }

        const CMatrix s = q_next - q;
        const CMatrix grad_next = fd_gradient(f, q_next, h);
        const CMatrix y = grad_next - grad;
        const double sy = inner(s, y);
        // Barzilai-Borwein trial step for the next iteration.
        step = sy > 0.0 ? inner(s, s) / sy : 2.0 * t;
        step = std::clamp(step, 1e-12 * scale, 1e12 * scale);

        q = q_next;
        fq = f_next;
        grad = grad_next;
        history.push_back(fq);
        if (history.size() > opts.stall_window + 1)
            history.pop_front();
        if (history.size() == opts.stall_window + 1 && history.front() - history.back() < opts.stall_tol)
        {
            converged = true;
            ++it;
            break;
        }
    }

    OptResult r = make_result(model, GramMatrix(q), f.evaluate(q));
    r.iterations = it;
    r.converged = converged;
    return r;
}

// ---- separated waveforms ------------------------------------------------

std::vector<double> water_filling(const std::vector<double>& floors, double total)
{
    std::vector<double> out(floors.size(), 0.0);
    if (!(total > 0.0))
        return out;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < floors.size(); ++i)
        if (std::isfinite(floors[i]))
            order.push_back(i);
    if (order.empty())
        return out;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return floors[a] < floors[b]; });
    double level = 0.0;
    double prefix = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        prefix += floors[order[k]];
        level = (total + prefix) / static_cast<double>(k + 1);
        if (k + 1 == order.size() || level <= floors[order[k + 1]])
            break;
    }
    for (std::size_t i : order)
        out[i] = std::max(0.0, level - floors[i]);
    return out;
}

namespace {

GramMatrix gram_on_basis(const CMatrix& basis, const std::vector<double>& powers)
{
    RVector p = Eigen::Map<const RVector>(powers.data(), static_cast<Eigen::Index>(powers.size()));
    return GramMatrix(hermitian_part(basis * p.cast<Complex>().asDiagonal() * basis.adjoint()));
}

constexpr double kModeTol = 1e-12;

} // namespace

GramMatrix sensing_gram(const TrmModel& model, double trace_power)
{
    // Minimize sum_i 1 / (a p_i + 1/w_i): a p_i = (level - 1/w_i)^+.
    const HermitianEigen eig = gaussian::hermitian_eigen(model.sigma_s);
    const double a = model.dims.symbols / model.noise_s;
    const double top = std::max(eig.values.maxCoeff(), 0.0);
    std::vector<double> floors(static_cast<std::size_t>(eig.values.size()));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        floors[static_cast<std::size_t>(i)] = eig.values[i] > kModeTol * top && top > 0.0
                                                  ? 1.0 / eig.values[i]
                                                  : std::numeric_limits<double>::infinity();
    std::vector<double> p = water_filling(floors, a * std::max(0.0, trace_power));
    for (double& v : p)
        v /= a;
    return gram_on_basis(eig.vectors, p);
}

GramMatrix comm_gram(const TrmModel& model, double trace_power)
{
    // Maximize sum_i log(1 + a g_i p_i): p_i = (level - 1/(a g_i))^+.
    const HermitianEigen eig = gaussian::hermitian_eigen(model.h_c.adjoint() * model.h_c);
    const double a = model.dims.symbols / model.noise_c;
    const double top = std::max(eig.values.maxCoeff(), 0.0);
    std::vector<double> floors(static_cast<std::size_t>(eig.values.size()));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        floors[static_cast<std::size_t>(i)] = eig.values[i] > kModeTol * top && top > 0.0
                                                  ? 1.0 / (a * eig.values[i])
                                                  : std::numeric_limits<double>::infinity();
    return gram_on_basis(eig.vectors, water_filling(floors, std::max(0.0, trace_power)));
}

OptResult evaluate_sw(const TrmModel& model, double rho)
{
    gaussian::validate(model);
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ConfigError("power split must lie in [0, 1]");
    const double budget = model.trace_budget();
    const GramMatrix qs = sensing_gram(model, rho * budget);
    const GramMatrix qc = comm_gram(model, (1.0 - rho) * budget);

    const gaussian::SensingEvaluator sensing(model);
    Evaluation ev;
    ev.mi = gaussian::channel_mi(model, qc);
    const Terms t = sensing_and_reconstruction(sensing, qs.matrix(), ev.mi, model.dims.sensing_rx);
    ev.d_s = t.d_s;
    ev.d_c = t.d_c;
    ev.rate = t.rate;

    OptResult r = make_result(model, qs, ev);
    r.q_comm = qc;
    r.trace_used = qs.trace() + qc.trace();
    r.iterations = 1;
    r.converged = true;
    r.split = rho;
    return r;
}

OptResult optimize_sw(const TrmModel& model, int split_grid)
{
    if (split_grid < 2)
        throw ConfigError("split grid needs at least two points");
    OptResult best;
    for (int k = 0; k < split_grid; ++k)
    {
        const double rho = static_cast<double>(k) / (split_grid - 1);
        OptResult r = evaluate_sw(model, rho);
        if (k == 0 || r.point.d_total < best.point.d_total)
            best = std::move(r);
    }
    best.iterations = static_cast<std::size_t>(split_grid);
    return best;
}

// ---- sweep --------------------------------------------------------------

std::string scheme_name(Scheme s)
{
    return s == Scheme::Isac ? "ISAC" : "SW";
}

TrmModel with_snr(const TrmModel& model, double snr_db)
{
    TrmModel m = model;
    m.power = model.noise_s * std::pow(10.0, snr_db / 10.0);
    return m;
}

SweepCurve sweep_snr(const TrmModel& model_template, const std::vector<double>& snr_db,
                     const std::vector<Scheme>& schemes, const SweepOptions& opts)
{
    if (snr_db.empty())
        throw ConfigError("SNR list is empty");
    if (!std::is_sorted(snr_db.begin(), snr_db.end()))
        throw ConfigError("SNR list must be nondecreasing");
    SweepCurve curve;
    curve.snr_db = snr_db;
    for (double snr : snr_db)
    {
        const TrmModel m = with_snr(model_template, snr);
        std::optional<OptResult> sw;
        auto get_sw = [&]() -> const OptResult& {
            if (!sw)
                sw = optimize_sw(m, opts.split_grid);
            return *sw;
        };
        for (Scheme scheme : schemes)
        {
            SweepEntry entry;
            entry.snr_db = snr;
            entry.scheme = scheme;
            try
            {
                if (scheme == Scheme::Sw)
                {
                    entry.result = get_sw();
                }
                else
                {
                    OptResult best = optimize_isac(m, opts.isac);
                    if (opts.warm_start_from_sw)
                    {
                        const OptResult& s = get_sw();
                        IsacOptions warm = opts.isac;
                        warm.init = GramMatrix(s.q_star.matrix() + s.q_comm->matrix());
                        OptResult alt = optimize_isac(m, warm);
                        alt.iterations += best.iterations;
                        if (alt.point.d_total < best.point.d_total)
                            best = std::move(alt);
                        else
                            best.iterations = alt.iterations;
                    }
                    entry.result = std::move(best);
                }
            }
            catch (const Error& e)
            {
                entry.failed = true;
                entry.error = e.what();
            }
            curve.entries.push_back(std::move(entry));
        }
    }
    return curve;
}

} // namespace cas::waveform
