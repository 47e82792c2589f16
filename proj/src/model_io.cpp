#include "cas/model_io.hpp"

#include "cas/errors.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace cas::io {

namespace fs = std::filesystem;
using Ptr = json::json_pointer;

namespace {

constexpr double kProbTol = 1e-12;

// Walks syntactically valid JSON text and records the line where each value
// starts, keyed by its JSON pointer.
class LineScanner
{
public:
    LineScanner(const std::string& s, std::map<std::string, int>& out) : s_(s), out_(out) {}

    void run()
    {
        value(Ptr());
    }

private:
    void ws()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
        {
            if (s_[i_] == '\n')
                ++line_;
            ++i_;
        }
    }

    std::string string_token()
    {
        const std::size_t start = i_++;
        while (i_ < s_.size() && s_[i_] != '"')
            i_ += s_[i_] == '\\' ? 2 : 1;
        ++i_;
        return json::parse(s_.substr(start, i_ - start)).get<std::string>();
    }

    void value(const Ptr& p)
    {
        ws();
        if (i_ >= s_.size())
            return;
        out_[p.to_string()] = line_;
        const char c = s_[i_];
        if (c == '{' || c == '[')
        {
            const bool obj = c == '{';
            ++i_;
            ws();
            if (s_[i_] == (obj ? '}' : ']'))
            {
                ++i_;
                return;
            }
            for (std::size_t k = 0;; ++k)
            {
                ws();
                if (obj)
                {
                    const std::string key = string_token();
                    ws();
                    ++i_;  // ':'
                    value(p / key);
                }
                else
                {
                    value(p / k);
                }
                ws();
                if (s_[i_++] != ',')
                    break;
            }
        }
        else if (c == '"')
        {
            string_token();
        }
        else
        {
            while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}' &&
                   !std::isspace(static_cast<unsigned char>(s_[i_])))
                ++i_;
        }
    }

    const std::string& s_;
    std::map<std::string, int>& out_;
    std::size_t i_ = 0;
    int line_ = 1;
};

// ---- typed readers ----------------------------------------------------------

const json& at_ptr(const JsonDocument& doc, const Ptr& p)
{
    if (!doc.root().contains(p))
        doc.fail(p, "missing required field");
    return doc.root().at(p);
}

void expect_keys(const JsonDocument& doc, const Ptr& p, const std::set<std::string>& allowed)
{
    const json& obj = at_ptr(doc, p);
    if (!obj.is_object())
        doc.fail(p, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            doc.fail(p / it.key(), "unknown field");
}

double read_real(const JsonDocument& doc, const Ptr& p)
{
    const json& v = at_ptr(doc, p);
    if (!v.is_number())
        doc.fail(p, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        doc.fail(p, "must be finite");
    return d;
}

double read_positive(const JsonDocument& doc, const Ptr& p)
{
    const double d = read_real(doc, p);
    if (!(d > 0.0))
        doc.fail(p, "must be positive");
    return d;
}

int read_dim(const JsonDocument& doc, const Ptr& p)
{
    const json& v = at_ptr(doc, p);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1 << 20)
        doc.fail(p, "expected a positive integer");
    return v.get<int>();
}

gaussian::Complex read_complex(const JsonDocument& doc, const Ptr& p)
{
    const json& v = at_ptr(doc, p);
    if (v.is_number())
        return {read_real(doc, p), 0.0};
    if (v.is_array() && v.size() == 2)
        return {read_real(doc, p / 0), read_real(doc, p / 1)};
    doc.fail(p, "expected a number or an [re, im] pair");
}

const json& read_array(const JsonDocument& doc, const Ptr& p, std::size_t expected = 0)
{
    const json& v = at_ptr(doc, p);
    if (!v.is_array() || v.empty())
        doc.fail(p, "expected a nonempty array");
    if (expected && v.size() != expected)
        doc.fail(p, "expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
    return v;
}

discrete::Vector read_vector(const JsonDocument& doc, const Ptr& p, std::size_t expected = 0)
{
    const json& v = read_array(doc, p, expected);
    discrete::Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = read_real(doc, p / i);
    return out;
}

discrete::Matrix read_matrix(const JsonDocument& doc, const Ptr& p, std::size_t rows = 0, std::size_t cols = 0)
{
    const json& v = read_array(doc, p, rows);
    const std::size_t c = cols ? cols : read_array(doc, p / 0).size();
    discrete::Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        const discrete::Vector row = read_vector(doc, p / i, c);
        out.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return out;
}

gaussian::CMatrix read_cmatrix(const JsonDocument& doc, const Ptr& p, std::size_t rows, std::size_t cols)
{
    read_array(doc, p, rows);
    gaussian::CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
    {
        read_array(doc, p / i, cols);
        for (std::size_t j = 0; j < cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = read_complex(doc, p / i / j);
    }
    return out;
}

void check_nonnegative(const JsonDocument& doc, const Ptr& p, const discrete::Matrix& m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) < 0.0)
                doc.fail(p / static_cast<std::size_t>(i) / static_cast<std::size_t>(j), "must be nonnegative");
}

void check_nonnegative(const JsonDocument& doc, const Ptr& p, const discrete::Vector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < 0.0)
            doc.fail(p / static_cast<std::size_t>(i), "must be nonnegative");
}

void check_stochastic_rows(const JsonDocument& doc, const Ptr& p, const discrete::Matrix& m)
{
    check_nonnegative(doc, p, m);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (std::abs(m.row(i).sum() - 1.0) > kProbTol)
            doc.fail(p / static_cast<std::size_t>(i), "row does not sum to 1");
}

void check_distribution(const JsonDocument& doc, const Ptr& p, const discrete::Vector& v)
{
    check_nonnegative(doc, p, v);
    if (std::abs(v.sum() - 1.0) > kProbTol)
        doc.fail(p, "probabilities do not sum to 1");
}

json real_matrix_json(const discrete::Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_vector_json(const discrete::Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

json number_json(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json estimate_json(const sim::Estimate& e)
{
    return {{"mean", number_json(e.mean)}, {"se", number_json(e.se)}};
}

constexpr const char* kHeaderNats = "snr_db,scheme,d_s,d_c,d_total,rate_nats,mi_nats,trace_used,converged";
constexpr const char* kHeaderBits = "snr_db,scheme,d_s,d_c,d_total,rate_bits,mi_bits,trace_used,converged";

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ','))
        out.push_back(cur);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

// ---- JsonDocument -----------------------------------------------------------

JsonDocument::JsonDocument(std::string text, std::string source_name)
    : text_(std::move(text)), source_(std::move(source_name))
{
    try
    {
        root_ = json::parse(text_);
    }
    catch (const json::parse_error& e)
    {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text_.size());
        for (std::size_t i = 0; i < stop; ++i)
        {
            if (text_[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
            {
                ++col;
            }
        }
        throw ConfigError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
    }
    LineScanner(text_, lines_).run();
}

JsonDocument JsonDocument::load(const fs::path& path)
{
    return JsonDocument(read_text(path), path.string());
}

int JsonDocument::line_of(const Ptr& ptr) const
{
    Ptr p = ptr;
    for (;;)
    {
        const auto it = lines_.find(p.to_string());
        if (it != lines_.end())
            return it->second;
        if (p.empty())
            return 1;
        p = p.parent_pointer();
    }
}

void JsonDocument::fail(const Ptr& ptr, const std::string& what) const
{
    const std::string where = ptr.empty() ? std::string("/") : ptr.to_string();
    throw ConfigError(source_ + ":" + std::to_string(line_of(ptr)) + ": " + where + ": " + what);
}

double read_number(const JsonDocument& doc, const Ptr& ptr)
{
    return read_real(doc, ptr);
}

discrete::Vector read_real_vector(const JsonDocument& doc, const Ptr& ptr)
{
    return read_vector(doc, ptr);
}

discrete::Matrix read_real_matrix(const JsonDocument& doc, const Ptr& ptr)
{
    return read_matrix(doc, ptr);
}

// ---- models -----------------------------------------------------------------

discrete::FiniteCasModel finite_model_from_json(const JsonDocument& doc, const Ptr& at)
{
    expect_keys(doc, at, {"state_prior", "sensing_law", "comm_law", "distortion", "cost",
                          "reconstruction_distortion"});
    discrete::FiniteCasModel m;

    m.state_prior = read_vector(doc, at / "state_prior");
    check_distribution(doc, at / "state_prior", m.state_prior);
    const auto ns = static_cast<std::size_t>(m.state_prior.size());

    const json& law = read_array(doc, at / "sensing_law");
    const std::size_t nx = law.size();
    std::size_t nz = 0;
    for (std::size_t x = 0; x < nx; ++x)
    {
        const Ptr p = at / "sensing_law" / x;
        m.sensing_law.push_back(read_matrix(doc, p, ns, nz));
        nz = static_cast<std::size_t>(m.sensing_law.back().cols());
        check_stochastic_rows(doc, p, m.sensing_law.back());
    }

    m.comm_law = read_matrix(doc, at / "comm_law", nx);
    check_stochastic_rows(doc, at / "comm_law", m.comm_law);

    m.distortion = read_matrix(doc, at / "distortion", ns);
    check_nonnegative(doc, at / "distortion", m.distortion);

    m.cost = read_vector(doc, at / "cost", nx);
    check_nonnegative(doc, at / "cost", m.cost);

    if (doc.root().contains(at / "reconstruction_distortion"))
    {
        const Ptr p = at / "reconstruction_distortion";
        const auto ne = static_cast<std::size_t>(m.distortion.cols());
        m.reconstruction_distortion = read_matrix(doc, p, ne);
        check_nonnegative(doc, p, *m.reconstruction_distortion);
    }

    try
    {
        discrete::validate(m);
    }
    catch (const ConfigError& e)
    {
        doc.fail(at, e.what());
    }
    return m;
}

gaussian::TrmModel trm_model_from_json(const JsonDocument& doc, const Ptr& at)
{
    expect_keys(doc, at, {"dims", "sigma_s", "h_c", "noise_s", "noise_c", "power"});
    expect_keys(doc, at / "dims", {"T", "N", "M_s", "M_c"});
    gaussian::TrmModel m;
    m.dims.symbols = read_dim(doc, at / "dims" / "T");
    m.dims.tx = read_dim(doc, at / "dims" / "N");
    m.dims.sensing_rx = read_dim(doc, at / "dims" / "M_s");
    m.dims.comm_rx = read_dim(doc, at / "dims" / "M_c");
    const auto n = static_cast<std::size_t>(m.dims.tx);
    m.sigma_s = read_cmatrix(doc, at / "sigma_s", n, n);
    m.h_c = read_cmatrix(doc, at / "h_c", static_cast<std::size_t>(m.dims.comm_rx), n);
    m.noise_s = read_positive(doc, at / "noise_s");
    m.noise_c = read_positive(doc, at / "noise_c");
    m.power = read_positive(doc, at / "power");
    try
    {
        gaussian::validate(m);
    }
    catch (const ConfigError& e)
    {
        doc.fail(at, e.what());
    }
    return m;
}

discrete::FiniteCasModel load_finite_model(const fs::path& path)
{
    return finite_model_from_json(JsonDocument::load(path));
}

gaussian::TrmModel load_trm_model(const fs::path& path)
{
    return trm_model_from_json(JsonDocument::load(path));
}

json to_json(const discrete::FiniteCasModel& m)
{
    json law = json::array();
    for (const auto& q : m.sensing_law)
        law.push_back(real_matrix_json(q));
    json out = {{"state_prior", real_vector_json(m.state_prior)},
                {"sensing_law", std::move(law)},
                {"comm_law", real_matrix_json(m.comm_law)},
                {"distortion", real_matrix_json(m.distortion)},
                {"cost", real_vector_json(m.cost)}};
    if (m.reconstruction_distortion)
        out["reconstruction_distortion"] = real_matrix_json(*m.reconstruction_distortion);
    return out;
}

json complex_matrix_json(const gaussian::CMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json complex_matrix_to_json(const gaussian::CMatrix& m)
{
    return complex_matrix_json(m);
}

json to_json(const gaussian::TrmModel& m)
{
    return {{"dims", {{"T", m.dims.symbols}, {"N", m.dims.tx}, {"M_s", m.dims.sensing_rx}, {"M_c", m.dims.comm_rx}}},
            {"sigma_s", complex_matrix_json(m.sigma_s)},
            {"h_c", complex_matrix_json(m.h_c)},
            {"noise_s", m.noise_s},
            {"noise_c", m.noise_c},
            {"power", m.power}};
}

// ---- sweep CSV / JSON ---------------------------------------------------------

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw IoError("number formatting failed");
    return std::string(buf, end);
}

std::vector<SweepRow> sweep_rows(const waveform::SweepCurve& curve)
{
    std::vector<SweepRow> rows;
    for (const auto& e : curve.entries)
    {
        SweepRow r;
        r.snr_db = e.snr_db;
        r.scheme = e.scheme;
        r.failed = e.failed;
        if (!e.failed)
        {
            r.d_s = e.result.point.d_s;
            r.d_c = e.result.point.d_c;
            r.d_total = e.result.point.d_total;
            r.rate = e.result.point.rate;
            r.mi = e.result.point.capacity;
            r.trace_used = e.result.trace_used;
            r.converged = e.result.converged;
        }
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool bits)
{
    const double unit = bits ? 1.0 / std::log(2.0) : 1.0;
    std::string out = std::string(bits ? kHeaderBits : kHeaderNats) + "\n";
    for (const auto& r : rows)
    {
        out += format_double(r.snr_db) + "," + waveform::scheme_name(r.scheme) + ",";
        if (r.failed)
        {
            out += ",,,,,,failed\n";
            continue;
        }
        out += format_double(r.d_s) + "," + format_double(r.d_c) + "," + format_double(r.d_total) + "," +
               format_double(r.rate * unit) + "," + format_double(r.mi * unit) + "," +
               format_double(r.trace_used) + "," + (r.converged ? "true" : "false") + "\n";
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("csv: empty input");
    bool bits = false;
    if (line == kHeaderBits)
        bits = true;
    else if (line != kHeaderNats)
        throw ConfigError("csv line 1: unexpected header");
    const double unit = bits ? std::log(2.0) : 1.0;

    std::vector<SweepRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9)
            throw ConfigError("csv line " + std::to_string(lineno) + ": expected 9 fields");
        SweepRow r;
        r.snr_db = parse_double(f[0], lineno);
        if (f[1] == "ISAC")
            r.scheme = waveform::Scheme::Isac;
        else if (f[1] == "SW")
            r.scheme = waveform::Scheme::Sw;
        else
            throw ConfigError("csv line " + std::to_string(lineno) + ": unknown scheme '" + f[1] + "'");
        if (f[8] == "failed")
        {
            r.failed = true;
            rows.push_back(r);
            continue;
        }
        r.d_s = parse_double(f[2], lineno);
        r.d_c = parse_double(f[3], lineno);
        r.d_total = parse_double(f[4], lineno);
        r.rate = parse_double(f[5], lineno) * unit;
        r.mi = parse_double(f[6], lineno) * unit;
        r.trace_used = parse_double(f[7], lineno);
        if (f[8] != "true" && f[8] != "false")
            throw ConfigError("csv line " + std::to_string(lineno) + ": bad converged flag");
        r.converged = f[8] == "true";
        rows.push_back(r);
    }
    return rows;
}

json opt_result_json(const waveform::OptResult& r, bool bits)
{
    const double unit = bits ? 1.0 / std::log(2.0) : 1.0;
    json out = {{"d_s", r.point.d_s},
                {"d_c", r.point.d_c},
                {"d_total", r.point.d_total},
                {bits ? "rate_bits" : "rate_nats", r.point.rate * unit},
                {bits ? "mi_bits" : "mi_nats", r.point.capacity * unit},
                {"trace_budget", r.point.budget},
                {"trace_used", r.trace_used},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"q", complex_matrix_json(r.q_star.matrix())}};
    if (r.q_comm)
    {
        out["q_comm"] = complex_matrix_json(r.q_comm->matrix());
        out["sensing_fraction"] = r.split;
    }
    return out;
}

json sweep_json(const waveform::SweepCurve& curve, bool bits)
{
    json points = json::array();
    for (const auto& e : curve.entries)
    {
        json p = {{"snr_db", e.snr_db}, {"scheme", waveform::scheme_name(e.scheme)}, {"failed", e.failed}};
        if (e.failed)
            p["error"] = e.error;
        else
            p["result"] = opt_result_json(e.result, bits);
        points.push_back(std::move(p));
    }
    return {{"snr_db", curve.snr_db}, {"points", std::move(points)}};
}

json sim_report_json(const sim::SimReport& rep, bool bits)
{
    const double unit = bits ? 1.0 / std::log(2.0) : 1.0;
    json modes = json::array();
    for (std::size_t i = 0; i < rep.mode_lambda.size(); ++i)
        modes.push_back({{"lambda", rep.mode_lambda[i]},
                         {"allocation", rep.mode_allocation[i]},
                         {"expected_power", rep.mode_lambda[i] - rep.mode_allocation[i]},
                         {"power", estimate_json(rep.mode_power[i])}});
    return {{"n_trials", rep.n_trials},
            {"seed", rep.seed},
            {"workers", rep.workers},
            {bits ? "rate_budget_bits" : "rate_budget_nats", rep.rate_budget * unit},
            {"empirical",
             {{"d_s", estimate_json(rep.d_s)},
              {"d_c", estimate_json(rep.d_c)},
              {"d_total", estimate_json(rep.d_total)},
              {"cross_term", estimate_json(rep.cross_term)}}},
            {"analytic",
             {{"d_s", number_json(rep.analytic_d_s)},
              {"d_c", number_json(rep.analytic_d_c)},
              {"d_total", number_json(rep.analytic_d_total)},
              {"cross_term", 0.0}}},
            {"modes", std::move(modes)}};
}

std::string trials_csv(const sim::SimReport& rep)
{
    std::string out = "trial,d_s,d_c,d_total,cross\n";
    for (std::size_t i = 0; i < rep.trials.size(); ++i)
    {
        const auto& t = rep.trials[i];
        out += std::to_string(i) + "," + format_double(t.d_s) + "," + format_double(t.d_c) + "," +
               format_double(t.d_total) + "," + format_double(t.cross) + "\n";
    }
    return out;
}

// ---- files ------------------------------------------------------------------

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
    {
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
        {
            out.close();
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec)
    {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

} // namespace cas::io
