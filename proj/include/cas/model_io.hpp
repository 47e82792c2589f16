#pragma once

// JSON model files, CSV/JSON result writers, and atomic file output.
//
// Model files are strict: unknown keys, wrong shapes and non-normalized laws
// are rejected with "<file>:<line>: <json pointer>: <reason>". Complex entries
// are written either as plain numbers or as [re, im] pairs; matrices are
// arrays of rows.

#include "cas/discrete_limits.hpp"
#include "cas/gaussian_cas.hpp"
#include "cas/simulator.hpp"
#include "cas/waveform_opt.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cas::io {

using nlohmann::json;

// Parsed JSON text that remembers where every value starts.
class JsonDocument
{
public:
    // Throws ConfigError with line and column on malformed JSON.
    JsonDocument(std::string text, std::string source_name);

    static JsonDocument load(const std::filesystem::path& path);

    const json& root() const { return root_; }
    const std::string& source_name() const { return source_; }

    // 1-based line of the value at the pointer, or of its nearest existing
    // ancestor.
    int line_of(const json::json_pointer& ptr) const;

    // ConfigError prefixed with the location of the pointer.
    [[noreturn]] void fail(const json::json_pointer& ptr, const std::string& what) const;

private:
    std::string text_;
    std::string source_;
    json root_;
    std::map<std::string, int> lines_;
};

// Typed field readers that report the field's location on failure.
double read_number(const JsonDocument& doc, const json::json_pointer& ptr);
discrete::Vector read_real_vector(const JsonDocument& doc, const json::json_pointer& ptr);
discrete::Matrix read_real_matrix(const JsonDocument& doc, const json::json_pointer& ptr);

discrete::FiniteCasModel finite_model_from_json(const JsonDocument& doc,
                                                const json::json_pointer& at = json::json_pointer());
gaussian::TrmModel trm_model_from_json(const JsonDocument& doc,
                                       const json::json_pointer& at = json::json_pointer());

discrete::FiniteCasModel load_finite_model(const std::filesystem::path& path);
gaussian::TrmModel load_trm_model(const std::filesystem::path& path);

json to_json(const discrete::FiniteCasModel& model);
json to_json(const gaussian::TrmModel& model);
json complex_matrix_to_json(const gaussian::CMatrix& m);

// ---- sweep CSV -------------------------------------------------------------

// One CSV line of a sweep. Rates are in nats unless the file was written
// with bits.
struct SweepRow
{
    double snr_db = 0.0;
    waveform::Scheme scheme = waveform::Scheme::Isac;
    double d_s = 0.0;
    double d_c = 0.0;
    double d_total = 0.0;
    double rate = 0.0;
    double mi = 0.0;
    double trace_used = 0.0;
    bool converged = false;
    bool failed = false;  // written as converged = "failed" with empty numbers

    bool operator==(const SweepRow&) const = default;
};

std::vector<SweepRow> sweep_rows(const waveform::SweepCurve& curve);

// Header: snr_db,scheme,d_s,d_c,d_total,rate_nats,mi_nats,trace_used,converged
// (rate_bits / mi_bits with bits). Numbers use the shortest round-trip form.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool bits = false);
// Accepts either header; rates come back in nats.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

json sweep_json(const waveform::SweepCurve& curve, bool bits = false);
json opt_result_json(const waveform::OptResult& r, bool bits = false);
json sim_report_json(const sim::SimReport& rep, bool bits = false);
std::string trials_csv(const sim::SimReport& rep);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// ---- files -----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace cas::io
