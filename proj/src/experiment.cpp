#include "cas/experiment.hpp"

#include "cas/errors.hpp"
#include "cas/model_io.hpp"
#include "cas/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace cas::experiment {

namespace fs = std::filesystem;
using io::json;
using io::JsonDocument;
using Ptr = json::json_pointer;

namespace {

const std::vector<std::pair<std::string, Mode>>& mode_table()
{
    static const std::vector<std::pair<std::string, Mode>> t = {
        {"discrete-capacity", Mode::DiscreteCapacity},
        {"discrete-rd", Mode::DiscreteRd},
        {"discrete-tradeoff", Mode::DiscreteTradeoff},
        {"trm-optimize", Mode::TrmOptimize},
        {"trm-sw", Mode::TrmSw},
        {"snr-sweep", Mode::SnrSweep},
        {"simulate", Mode::Simulate},
    };
    return t;
}

bool is_discrete(Mode m)
{
    return m == Mode::DiscreteCapacity || m == Mode::DiscreteRd || m == Mode::DiscreteTradeoff;
}

std::string num(double v)
{
    std::ostringstream ss;
    ss << std::setprecision(8) << v;
    return ss.str();
}

const json* find(const JsonDocument& doc, const Ptr& p)
{
    return doc.root().contains(p) ? &doc.root().at(p) : nullptr;
}

double positive(const JsonDocument& doc, const Ptr& p)
{
    const double v = io::read_number(doc, p);
    if (!(v > 0.0))
        doc.fail(p, "must be positive");
    return v;
}

double nonnegative(const JsonDocument& doc, const Ptr& p)
{
    const double v = io::read_number(doc, p);
    if (!(v >= 0.0))
        doc.fail(p, "must be nonnegative");
    return v;
}

std::uint64_t count(const JsonDocument& doc, const Ptr& p, std::uint64_t min_value)
{
    const json& v = doc.root().at(p);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
    {
        const auto n = v.get<std::uint64_t>();
        if (n >= min_value)
            return n;
    }
    doc.fail(p, "expected an integer >= " + std::to_string(min_value));
}

void expect_object(const JsonDocument& doc, const Ptr& p, const std::set<std::string>& keys)
{
    const json& obj = doc.root().at(p);
    if (!obj.is_object())
        doc.fail(p, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!keys.count(it.key()))
            doc.fail(p / it.key(), "unknown field");
}

std::vector<double> number_list(const JsonDocument& doc, const Ptr& p)
{
    const json& v = doc.root().at(p);
    if (v.is_number())
        return {io::read_number(doc, p)};
    const discrete::Vector xs = io::read_real_vector(doc, p);
    return std::vector<double>(xs.data(), xs.data() + xs.size());
}

void load_model(ExperimentConfig& cfg, const JsonDocument& doc, const fs::path& base_dir)
{
    const Ptr p("/model");
    const json& v = doc.root().at(p);
    if (v.is_string())
    {
        fs::path path = v.get<std::string>();
        if (path.is_relative())
            path = base_dir / path;
        if (is_discrete(cfg.mode))
            cfg.finite = io::load_finite_model(path);
        else
            cfg.trm = io::load_trm_model(path);
    }
    else if (v.is_object())
    {
        if (is_discrete(cfg.mode))
            cfg.finite = io::finite_model_from_json(doc, p);
        else
            cfg.trm = io::trm_model_from_json(doc, p);
    }
    else
    {
        doc.fail(p, "expected a file path or an inline model object");
    }
}

gaussian::RandomModelSpec load_generator(const JsonDocument& doc)
{
    const Ptr p("/generator");
    expect_object(doc, p, {"dims", "power", "noise_s", "noise_c"});
    gaussian::RandomModelSpec g;
    if (find(doc, p / "dims"))
    {
        expect_object(doc, p / "dims", {"T", "N", "M_s", "M_c"});
        auto dim = [&](const char* key, int& out) {
            if (find(doc, p / "dims" / key))
                out = static_cast<int>(count(doc, p / "dims" / key, 1));
        };
        dim("T", g.dims.symbols);
        dim("N", g.dims.tx);
        dim("M_s", g.dims.sensing_rx);
        dim("M_c", g.dims.comm_rx);
        if (g.dims.symbols < g.dims.tx)
            doc.fail(p / "dims", "T must be at least N");
    }
    if (find(doc, p / "power"))
        g.power = positive(doc, p / "power");
    if (find(doc, p / "noise_s"))
        g.noise_s = positive(doc, p / "noise_s");
    if (find(doc, p / "noise_c"))
        g.noise_c = positive(doc, p / "noise_c");
    return g;
}

void load_tolerances(ExperimentConfig& cfg, const JsonDocument& doc)
{
    const Ptr p("/tolerances");
    expect_object(doc, p, {"ba_gap", "max_iterations", "slack", "isac_max_iterations", "isac_stall", "fd_step"});
    if (find(doc, p / "ba_gap"))
        cfg.solver.ba_gap_tol = positive(doc, p / "ba_gap");
    if (find(doc, p / "max_iterations"))
        cfg.solver.max_iterations = count(doc, p / "max_iterations", 1);
    if (find(doc, p / "slack"))
        cfg.solver.slack_tol = positive(doc, p / "slack");
    if (find(doc, p / "isac_max_iterations"))
        cfg.isac.max_iterations = count(doc, p / "isac_max_iterations", 1);
    if (find(doc, p / "isac_stall"))
        cfg.isac.stall_tol = positive(doc, p / "isac_stall");
    if (find(doc, p / "fd_step"))
        cfg.isac.fd_step = positive(doc, p / "fd_step");
}

void load_grid(ExperimentConfig& cfg, const JsonDocument& doc)
{
    const Ptr p("/grid");
    expect_object(doc, p, {"split", "d_s_step"});
    if (find(doc, p / "split"))
        cfg.split_grid = static_cast<int>(count(doc, p / "split", 2));
    if (find(doc, p / "d_s_step"))
        cfg.d_s_step = positive(doc, p / "d_s_step");
}

void require(const JsonDocument& doc, const char* key, const std::string& mode)
{
    if (!find(doc, Ptr(std::string("/") + key)))
        doc.fail(Ptr(), "mode '" + mode + "' requires field '" + key + "'");
}

gaussian::TrmModel resolve_trm(const ExperimentConfig& cfg)
{
    gaussian::TrmModel m;
    if (cfg.trm)
    {
        m = *cfg.trm;
    }
    else
    {
        gaussian::RandomModelSpec g = cfg.generator.value_or(gaussian::RandomModelSpec{});
        g.seed = cfg.seed;
        m = gaussian::random_trm_model(g);
    }
    if (!cfg.snr_db.empty() && cfg.mode != Mode::SnrSweep)
        m = waveform::with_snr(m, cfg.snr_db.front());
    return m;
}

json vector_json(const discrete::Vector& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

json matrix_json(const discrete::Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

struct Writer
{
    const ExperimentConfig& cfg;
    RunOutput& out;

    void put(const std::string& name, const std::string& content)
    {
        const fs::path path = cfg.out_dir / name;
        io::write_atomic(path, content);
        out.files.push_back(path);
    }
    void put(const std::string& name, const json& j) { put(name, j.dump(2) + "\n"); }
};

// ---- modes ----------------------------------------------------------------

void run_capacity(const ExperimentConfig& cfg, RunOutput& out, double unit, const std::string& rate_key)
{
    const auto& model = *cfg.finite;
    const discrete::Vector e = discrete::estimate_costs(model);
    const double d_s = cfg.d_s.value_or(e.maxCoeff());
    const double budget = cfg.budget.value_or(model.cost.maxCoeff());
    const auto res = discrete::constrained_capacity(model, d_s, budget, cfg.solver);
    const discrete::Vector& p = res.argmax.probs;
    json j = {{"d_s", d_s},
              {"budget", budget},
              {"capacity_" + rate_key, res.capacity * unit},
              {"input", vector_json(p)},
              {"estimate_costs", vector_json(e)},
              {"expected_estimate_cost", p.dot(e)},
              {"expected_cost", p.dot(model.cost)},
              {"estimate_multiplier", res.estimate_multiplier},
              {"cost_multiplier", res.cost_multiplier}};
    Writer{cfg, out}.put("capacity.json", j);
    out.summary = {{"d_s", num(d_s)}, {"budget", num(budget)}, {"capacity (" + rate_key + ")", num(res.capacity * unit)}};
}

void run_rd(const ExperimentConfig& cfg, RunOutput& out, double unit, const std::string& rate_key)
{
    discrete::Vector source = cfg.source;
    discrete::Matrix dist = cfg.distortion;
    if (cfg.finite)
    {
        const auto& model = *cfg.finite;
        const double d_s = cfg.d_s.value_or(discrete::estimate_costs(model).maxCoeff());
        const double budget = cfg.budget.value_or(model.cost.maxCoeff());
        const auto cap = discrete::constrained_capacity(model, d_s, budget, cfg.solver);
        source = discrete::estimate_marginal(model, cap.argmax.probs);
        dist = model.reconstruction();
    }
    json points = json::array();
    for (double d_c : cfg.d_c_values)
    {
        const auto r = discrete::rate_distortion_discrete(source, dist, d_c, cfg.solver);
        points.push_back({{"d_c", d_c},
                          {"rate_" + rate_key, r.rate * unit},
                          {"distortion", r.distortion},
                          {"test_channel", matrix_json(r.test_channel)}});
        out.summary.emplace_back("R(" + num(d_c) + ") (" + rate_key + ")", num(r.rate * unit));
    }
    Writer{cfg, out}.put("rd.json", json{{"source", vector_json(source)}, {"points", std::move(points)}});
}

void run_tradeoff(const ExperimentConfig& cfg, RunOutput& out, double unit, const std::string& rate_key)
{
    const auto& model = *cfg.finite;
    const double budget = cfg.budget.value_or(model.cost.maxCoeff());
    const TradeoffPoint pt = discrete::min_total_distortion(model, budget, cfg.d_s_step, cfg.solver);
    json j = {{"budget", budget},
              {"d_s_step", cfg.d_s_step},
              {"d_s", pt.d_s},
              {"d_c", pt.d_c},
              {"d_total", pt.d_total},
              {"rate_" + rate_key, pt.rate * unit},
              {"capacity_" + rate_key, pt.capacity * unit}};
    out.summary = {{"budget", num(budget)},
                   {"d_s", num(pt.d_s)},
                   {"d_c", num(pt.d_c)},
                   {"d_total", num(pt.d_total)},
                   {"capacity (" + rate_key + ")", num(pt.capacity * unit)}};
    if (cfg.d_s && cfg.d_c)
    {
        const auto f = discrete::theorem1_feasible(model, *cfg.d_s, *cfg.d_c, budget, cfg.solver);
        j["check"] = {{"d_s", *cfg.d_s},
                      {"d_c", *cfg.d_c},
                      {"feasible", f.feasible},
                      {"margin_" + rate_key, f.margin * unit},
                      {"capacity_" + rate_key, f.capacity * unit},
                      {"rate_" + rate_key, f.rate * unit}};
        out.summary.emplace_back("feasible(" + num(*cfg.d_s) + ", " + num(*cfg.d_c) + ")", f.feasible ? "yes" : "no");
        out.summary.emplace_back("margin (" + rate_key + ")", num(f.margin * unit));
    }
    Writer{cfg, out}.put("tradeoff.json", j);
}

void summarize_opt(const waveform::OptResult& r, RunOutput& out, double unit, const std::string& rate_key)
{
    out.summary = {{"d_s", num(r.point.d_s)},
                   {"d_c", num(r.point.d_c)},
                   {"d_total", num(r.point.d_total)},
                   {"mi (" + rate_key + ")", num(r.point.capacity * unit)},
                   {"trace used / budget", num(r.trace_used) + " / " + num(r.point.budget)},
                   {"iterations", std::to_string(r.iterations)},
                   {"converged", r.converged ? "yes" : "no"}};
}

void run_sweep(const ExperimentConfig& cfg, RunOutput& out)
{
    waveform::SweepOptions so;
    so.isac = cfg.isac;
    so.split_grid = cfg.split_grid;
    const auto curve = waveform::sweep_snr(resolve_trm(cfg), cfg.snr_db, cfg.schemes, so);
    Writer w{cfg, out};
    w.put("sweep.csv", io::sweep_csv(io::sweep_rows(curve), cfg.bits));
    w.put("sweep.json", io::sweep_json(curve, cfg.bits));
    for (const auto& e : curve.entries)
    {
        const std::string key = num(e.snr_db) + " dB " + waveform::scheme_name(e.scheme);
        if (e.failed)
        {
            out.solver_failure = true;
            out.summary.emplace_back(key, "FAILED: " + e.error);
        }
        else
        {
            out.summary.emplace_back(key, "D = " + num(e.result.point.d_total));
        }
    }
}

void run_simulate(const ExperimentConfig& cfg, RunOutput& out, double unit, const std::string& rate_key)
{
    const gaussian::TrmModel model = resolve_trm(cfg);
    gaussian::GramMatrix q;
    double mi = 0.0;
    switch (cfg.waveform)
    {
    case SimWaveform::Isotropic:
        q = gaussian::GramMatrix::scaled_identity(model.dims.tx, model.trace_budget() / model.dims.tx);
        mi = gaussian::channel_mi(model, q);
        break;
    case SimWaveform::Isac: {
        const auto r = waveform::optimize_isac(model, cfg.isac);
        q = r.q_star;
        mi = r.point.capacity;
        break;
    }
    case SimWaveform::Sw: {
        const auto r = waveform::optimize_sw(model, cfg.split_grid);
        q = r.q_star;
        mi = r.point.capacity;
        break;
    }
    }
    const double rate = cfg.rate_budget.value_or(mi);
    sim::SimOptions so;
    so.trials = cfg.trials;
    so.seed = cfg.seed;
    so.workers = cfg.workers;
    so.keep_trials = cfg.dump_trials;
    const auto rep = sim::simulate_end_to_end(model, gaussian::waveform_from_gram(q, model.dims.symbols), rate, so);

    Writer w{cfg, out};
    json j = io::sim_report_json(rep, cfg.bits);
    j["gram"] = io::complex_matrix_to_json(q.matrix());
    w.put("sim.json", j);
    if (cfg.dump_trials)
        w.put("trials.csv", io::trials_csv(rep));

    auto est = [](const sim::Estimate& e) { return num(e.mean) + " +- " + num(e.se); };
    out.summary = {{"trials", std::to_string(rep.n_trials)},
                   {"rate (" + rate_key + ")", num(rate * unit)},
                   {"d_s empirical", est(rep.d_s)},
                   {"d_s analytic", num(rep.analytic_d_s)},
                   {"d_c empirical", est(rep.d_c)},
                   {"d_c analytic", num(rep.analytic_d_c)},
                   {"d_total empirical", est(rep.d_total)},
                   {"cross term", est(rep.cross_term)}};
}

} // namespace

const std::vector<std::string>& mode_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, m] : mode_table())
            n.push_back(name);
        return n;
    }();
    return names;
}

std::string mode_name(Mode m)
{
    for (const auto& [name, mm] : mode_table())
        if (mm == m)
            return name;
    return "?";
}

Mode parse_mode(const std::string& name)
{
    for (const auto& [n, m] : mode_table())
        if (n == name)
            return m;
    throw ConfigError("unknown mode '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name, const fs::path& base_dir)
{
    const JsonDocument doc(text, source_name);
    expect_object(doc, Ptr(),
                  {"mode", "seed", "model", "generator", "tolerances", "grid", "d_s", "d_c", "budget", "source",
                   "distortion", "d_c_values", "snr_db", "schemes", "trials", "workers", "dump_trials",
                   "waveform", "rate_budget", "out"});
    ExperimentConfig cfg;

    const Ptr mode_ptr("/mode");
    if (!find(doc, mode_ptr) || !doc.root().at(mode_ptr).is_string())
        doc.fail(mode_ptr, "expected one of the mode names");
    const std::string mode = doc.root().at(mode_ptr).get<std::string>();
    try
    {
        cfg.mode = parse_mode(mode);
    }
    catch (const ConfigError& e)
    {
        doc.fail(mode_ptr, e.what());
    }

    if (find(doc, Ptr("/seed")))
        cfg.seed = count(doc, Ptr("/seed"), 0);
    if (find(doc, Ptr("/tolerances")))
        load_tolerances(cfg, doc);
    if (find(doc, Ptr("/grid")))
        load_grid(cfg, doc);
    if (find(doc, Ptr("/model")))
        load_model(cfg, doc, base_dir);
    if (find(doc, Ptr("/generator")))
    {
        if (is_discrete(cfg.mode))
            doc.fail(Ptr("/generator"), "generators apply to TRM modes only");
        if (cfg.trm)
            doc.fail(Ptr("/generator"), "give either a model or a generator, not both");
        cfg.generator = load_generator(doc);
    }

    if (find(doc, Ptr("/d_s")))
        cfg.d_s = nonnegative(doc, Ptr("/d_s"));
    if (find(doc, Ptr("/d_c")))
        cfg.d_c = nonnegative(doc, Ptr("/d_c"));
    if (find(doc, Ptr("/budget")))
        cfg.budget = nonnegative(doc, Ptr("/budget"));
    if (find(doc, Ptr("/source")))
        cfg.source = io::read_real_vector(doc, Ptr("/source"));
    if (find(doc, Ptr("/distortion")))
        cfg.distortion = io::read_real_matrix(doc, Ptr("/distortion"));
    if (find(doc, Ptr("/d_c_values")))
        cfg.d_c_values = number_list(doc, Ptr("/d_c_values"));
    if (find(doc, Ptr("/snr_db")))
    {
        cfg.snr_db = number_list(doc, Ptr("/snr_db"));
        for (std::size_t i = 1; i < cfg.snr_db.size(); ++i)
            if (!(cfg.snr_db[i] > cfg.snr_db[i - 1]))
                doc.fail(Ptr("/snr_db"), "SNR grid must be strictly increasing");
    }
    if (find(doc, Ptr("/schemes")))
    {
        const Ptr p("/schemes");
        const json& v = doc.root().at(p);
        if (!v.is_array() || v.empty())
            doc.fail(p, "expected a nonempty array of \"ISAC\" / \"SW\"");
        cfg.schemes.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (v[i] == "ISAC")
                cfg.schemes.push_back(waveform::Scheme::Isac);
            else if (v[i] == "SW")
                cfg.schemes.push_back(waveform::Scheme::Sw);
            else
                doc.fail(p / i, "expected \"ISAC\" or \"SW\"");
        }
    }
    if (find(doc, Ptr("/trials")))
        cfg.trials = count(doc, Ptr("/trials"), 1);
    if (find(doc, Ptr("/workers")))
        cfg.workers = static_cast<unsigned>(count(doc, Ptr("/workers"), 1));
    if (find(doc, Ptr("/dump_trials")))
    {
        const json& v = doc.root().at(Ptr("/dump_trials"));
        if (!v.is_boolean())
            doc.fail(Ptr("/dump_trials"), "expected true or false");
        cfg.dump_trials = v.get<bool>();
    }
    if (find(doc, Ptr("/waveform")))
    {
        const Ptr p("/waveform");
        const json& v = doc.root().at(p);
        if (v == "isotropic")
            cfg.waveform = SimWaveform::Isotropic;
        else if (v == "isac")
            cfg.waveform = SimWaveform::Isac;
        else if (v == "sw")
            cfg.waveform = SimWaveform::Sw;
        else
            doc.fail(p, "expected \"isotropic\", \"isac\" or \"sw\"");
    }
    if (find(doc, Ptr("/rate_budget")))
        cfg.rate_budget = nonnegative(doc, Ptr("/rate_budget"));
    if (find(doc, Ptr("/out")))
    {
        const json& v = doc.root().at(Ptr("/out"));
        if (!v.is_string() || v.get<std::string>().empty())
            doc.fail(Ptr("/out"), "expected a directory path");
        fs::path out = v.get<std::string>();
        cfg.out_dir = out.is_relative() ? base_dir / out : out;
    }

    // mode-specific requirements
    switch (cfg.mode)
    {
    case Mode::DiscreteCapacity:
    case Mode::DiscreteTradeoff:
        require(doc, "model", mode);
        break;
    case Mode::DiscreteRd:
        if (!cfg.finite)
        {
            require(doc, "source", mode);
            require(doc, "distortion", mode);
            if (cfg.distortion.rows() != cfg.source.size())
                doc.fail(Ptr("/distortion"), "needs one row per source symbol");
            for (Eigen::Index i = 0; i < cfg.source.size(); ++i)
                if (cfg.source[i] < 0.0)
                    doc.fail(Ptr("/source") / static_cast<std::size_t>(i), "must be nonnegative");
            if (std::abs(cfg.source.sum() - 1.0) > 1e-12)
                doc.fail(Ptr("/source"), "probabilities do not sum to 1");
            if ((cfg.distortion.array() < 0.0).any())
                doc.fail(Ptr("/distortion"), "entries must be nonnegative");
        }
        if (cfg.d_c)
            cfg.d_c_values.insert(cfg.d_c_values.begin(), *cfg.d_c);
        if (cfg.d_c_values.empty())
            doc.fail(Ptr(), "mode 'discrete-rd' requires 'd_c' or 'd_c_values'");
        break;
    case Mode::SnrSweep:
        require(doc, "snr_db", mode);
        break;
    default:
        break;
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path)
{
    return parse_config(io::read_text(path), path.string(), path.parent_path());
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.out_dir)
        cfg.out_dir = *o.out_dir;
    if (o.trials)
    {
        if (*o.trials < 1)
            throw ConfigError("--trials must be at least 1");
        cfg.trials = *o.trials;
    }
    if (o.grid)
    {
        if (cfg.mode == Mode::DiscreteTradeoff)
        {
            if (*o.grid < 1)
                throw ConfigError("--grid must be at least 1");
            cfg.d_s_step = 1.0 / *o.grid;
        }
        else
        {
            if (*o.grid < 2)
                throw ConfigError("--grid must be at least 2");
            cfg.split_grid = *o.grid;
        }
    }
    if (o.bits)
        cfg.bits = true;
}

RunOutput run(const ExperimentConfig& cfg)
{
    RunOutput out;
    const double unit = cfg.bits ? 1.0 / std::log(2.0) : 1.0;
    const std::string rate_key = cfg.bits ? "bits" : "nats";
    if (is_discrete(cfg.mode) && cfg.mode != Mode::DiscreteRd && !cfg.finite)
        throw ConfigError("mode '" + mode_name(cfg.mode) + "' needs a finite model");

    switch (cfg.mode)
    {
    case Mode::DiscreteCapacity:
        run_capacity(cfg, out, unit, rate_key);
        break;
    case Mode::DiscreteRd:
        run_rd(cfg, out, unit, rate_key);
        break;
    case Mode::DiscreteTradeoff:
        run_tradeoff(cfg, out, unit, rate_key);
        break;
    case Mode::TrmOptimize: {
        const auto r = waveform::optimize_isac(resolve_trm(cfg), cfg.isac);
        Writer{cfg, out}.put("isac.json", io::opt_result_json(r, cfg.bits));
        summarize_opt(r, out, unit, rate_key);
        break;
    }
    case Mode::TrmSw: {
        const auto r = waveform::optimize_sw(resolve_trm(cfg), cfg.split_grid);
        Writer{cfg, out}.put("sw.json", io::opt_result_json(r, cfg.bits));
        summarize_opt(r, out, unit, rate_key);
        out.summary.emplace_back("sensing fraction", num(r.split));
        break;
    }
    case Mode::SnrSweep:
        if (cfg.snr_db.empty())
            throw ConfigError("snr-sweep needs a nonempty snr_db list");
        run_sweep(cfg, out);
        break;
    case Mode::Simulate:
        run_simulate(cfg, out, unit, rate_key);
        break;
    }
    return out;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return 2;
    if (dynamic_cast<const SolverError*>(&e))
        return 3;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e))
        return 4;
    return 1;
}

void print_summary(const RunOutput& r, std::ostream& out)
{
    std::size_t width = 0;
    for (const auto& [k, v] : r.summary)
        width = std::max(width, k.size());
    for (const auto& [k, v] : r.summary)
        out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
    for (const auto& f : r.files)
        out << "wrote " << f.string() << "\n";
}

int run_file(const fs::path& config, const Overrides& o, std::ostream& out, std::ostream& err)
{
    try
    {
        ExperimentConfig cfg = load_config(config);
        apply_overrides(cfg, o);
        const RunOutput r = run(cfg);
        print_summary(r, out);
        if (r.solver_failure)
        {
            err << "error: one or more sweep points failed\n";
            return 3;
        }
        return 0;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace cas::experiment
