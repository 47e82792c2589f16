#include "catch.hpp"

#include "cas/errors.hpp"
#include "cas/experiment.hpp"
#include "cas/model_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace cas;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("cas_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter()
    {
        static int c = 0;
        return c;
    }
    fs::path write(const std::string& name, const std::string& text) const
    {
        io::write_atomic(path / name, text);
        return path / name;
    }
};

const char* kFinite = R"({
  "state_prior": [0.5, 0.5],
  "sensing_law": [
    [[0.9, 0.1], [0.1, 0.9]],
    [[0.6, 0.4], [0.4, 0.6]]
  ],
  "comm_law": [[0.9, 0.1], [0.1, 0.9]],
  "distortion": [[0, 1], [1, 0]],
  "cost": [0, 0]
})";

std::string error_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const std::exception& e)
    {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("finite model files")
{
    const io::JsonDocument doc(kFinite, "m.json");
    const auto m = io::finite_model_from_json(doc);
    CHECK(m.num_inputs() == 2);
    CHECK(m.sensing_law[1](0, 1) == 0.4);
    CHECK(discrete::estimate_cost(m, 1) == Approx(0.4));

    // round trip through the writer
    const auto again = io::finite_model_from_json(io::JsonDocument(io::to_json(m).dump(1), "again"));
    CHECK(again.sensing_law[0] == m.sensing_law[0]);
    CHECK(again.comm_law == m.comm_law);
}

TEST_CASE("model errors name the line")
{
    std::string bad = kFinite;
    bad.replace(bad.find("[0.6, 0.4]"), 10, "[0.6, 0.3]");
    CHECK(error_of([&] { io::finite_model_from_json(io::JsonDocument(bad, "m.json")); }) ==
          "m.json:5: /sensing_law/1/0: row does not sum to 1");

    std::string unknown = kFinite;
    unknown.replace(unknown.find("\"cost\""), 6, "\"costs\"");
    CHECK(error_of([&] { io::finite_model_from_json(io::JsonDocument(unknown, "m.json")); }) ==
          "m.json:9: /costs: unknown field");

    std::string neg = kFinite;
    neg.replace(neg.find("[[0, 1], [1, 0]]"), 16, "[[0, 1],\n [-1, 0]]");
    CHECK(error_of([&] { io::finite_model_from_json(io::JsonDocument(neg, "m.json")); }) ==
          "m.json:9: /distortion/1/0: must be nonnegative");

    CHECK(error_of([] { io::JsonDocument("{\n  \"a\": [1,\n  ]\n}", "x.json"); }).rfind("x.json:3:", 0) == 0);
}

TEST_CASE("TRM model files")
{
    const std::string text = R"({
  "dims": {"T": 4, "N": 2, "M_s": 1, "M_c": 1},
  "sigma_s": [[1, [0.2, 0.1]], [[0.2, -0.1], 0.5]],
  "h_c": [[[1, 1], 0.5]],
  "noise_s": 1, "noise_c": 0.5, "power": 2
})";
    const auto m = io::trm_model_from_json(io::JsonDocument(text, "t.json"));
    CHECK(m.sigma_s(0, 1) == gaussian::Complex(0.2, 0.1));
    CHECK(m.h_c(0, 0) == gaussian::Complex(1, 1));
    CHECK(m.noise_c == 0.5);
    const auto again = io::trm_model_from_json(io::JsonDocument(io::to_json(m).dump(), "again"));
    CHECK(again.sigma_s == m.sigma_s);
    CHECK(again.h_c == m.h_c);
    CHECK(again.dims.symbols == 4);

    std::string nonherm = text;
    nonherm.replace(nonherm.find("[0.2, -0.1]"), 11, "[0.3, -0.1]");
    CHECK(error_of([&] { io::trm_model_from_json(io::JsonDocument(nonherm, "t.json")); }) ==
          "t.json:1: /: sigma_s is not Hermitian");
    std::string shape = text;
    shape.replace(shape.find("\"h_c\": [[[1, 1], 0.5]]"), 22, "\"h_c\": [[[1, 1]]]");
    CHECK(error_of([&] { io::trm_model_from_json(io::JsonDocument(shape, "t.json")); }) ==
          "t.json:4: /h_c/0: expected 2 entries, found 1");
}

TEST_CASE("numbers round trip through text")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i)
    {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(10.0) == "10");
}

TEST_CASE("sweep CSV round trip")
{
    const auto base = gaussian::random_trm_model({{16, 4, 4, 4}, 1.0, 1.0, 1.0, 1});
    const auto curve = waveform::sweep_snr(base, {-10.0, 0.0, 4000.0}, {waveform::Scheme::Isac, waveform::Scheme::Sw});
    const auto rows = io::sweep_rows(curve);
    REQUIRE(rows.size() == 6);
    const std::string csv = io::sweep_csv(rows);
    CHECK(csv.rfind("snr_db,scheme,d_s,d_c,d_total,rate_nats,mi_nats,trace_used,converged\n", 0) == 0);
    CHECK(io::parse_sweep_csv(csv) == rows);
    CHECK(rows[4].failed);

    const auto bits = io::parse_sweep_csv(io::sweep_csv(rows, true));
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        CHECK(bits[i].d_total == rows[i].d_total);
        CHECK(bits[i].mi == Approx(rows[i].mi).epsilon(1e-15));
    }
    CHECK_THROWS_AS(io::parse_sweep_csv("a,b\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_sweep_csv(std::string(csv).replace(csv.find("ISAC"), 4, "XX")), ConfigError);
}

TEST_CASE("atomic writes")
{
    TempDir dir;
    const fs::path p = dir.path / "sub" / "file.txt";
    io::write_atomic(p, "one");
    io::write_atomic(p, "two");
    CHECK(io::read_text(p) == "two");
    CHECK(!fs::exists(p.string() + ".tmp"));
    CHECK_THROWS_AS(io::write_atomic(p / "below_a_file", "x"), IoError);
    CHECK_THROWS_AS(io::read_text(dir.path / "missing"), IoError);
}

TEST_CASE("experiment configs")
{
    TempDir dir;
    using experiment::parse_config;
    CHECK(error_of([] { parse_config(R"({"mode": "nope"})", "c.json"); }) ==
          "c.json:1: /mode: unknown mode 'nope'");
    CHECK(error_of([] { parse_config("{\n \"mode\": \"snr-sweep\",\n \"extra\": 1}", "c.json"); }) ==
          "c.json:3: /extra: unknown field");
    CHECK(error_of([] { parse_config(R"({"mode": "snr-sweep"})", "c.json"); }) ==
          "c.json:1: /: mode 'snr-sweep' requires field 'snr_db'");
    CHECK(error_of([] { parse_config("{\"mode\": \"simulate\",\n\"tolerances\": {\"slack\": 0}}", "c.json"); }) ==
          "c.json:2: /tolerances/slack: must be positive");
    CHECK(error_of([] { parse_config(R"({"mode": "snr-sweep", "snr_db": [1, 0]})", "c.json"); }) ==
          "c.json:1: /snr_db: SNR grid must be strictly increasing");

    dir.write("m.json", kFinite);
    const auto cfg = experiment::load_config(dir.write("c.json", R"({"mode": "discrete-tradeoff", "model": "m.json"})"));
    REQUIRE(cfg.finite);
    CHECK(cfg.finite->num_inputs() == 2);
}

TEST_CASE("running experiments")
{
    TempDir dir;
    experiment::Overrides o;
    std::ostringstream out, err;

    SECTION("rate-distortion")
    {
        const auto c = dir.write("rd.json", R"({"mode": "discrete-rd", "source": [0.5, 0.5],
            "distortion": [[0, 1], [1, 0]], "d_c": 0.11})");
        o.out_dir = dir.path / "rd";
        CHECK(experiment::run_file(c, o, out, err) == 0);
        CHECK(out.str().find("R(0.11) (nats)  0.34663") != std::string::npos);
        const auto j = io::json::parse(io::read_text(dir.path / "rd" / "rd.json"));
        CHECK(j["points"][0]["rate_nats"].get<double>() == Approx(0.3466318).margin(1e-6));
    }
    SECTION("one-point sweep writes two rows")
    {
        const auto c = dir.write("s.json", R"({"mode": "snr-sweep", "snr_db": [0],
            "generator": {"dims": {"T": 8, "N": 2, "M_s": 2, "M_c": 2}}})");
        o.out_dir = dir.path / "s";
        CHECK(experiment::run_file(c, o, out, err) == 0);
        const auto rows = io::parse_sweep_csv(io::read_text(dir.path / "s" / "sweep.csv"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].scheme == waveform::Scheme::Isac);
        CHECK(rows[1].scheme == waveform::Scheme::Sw);
    }
    SECTION("simulation is byte-for-byte reproducible")
    {
        const auto c = dir.write("sim.json", R"({"mode": "simulate", "trials": 2000, "dump_trials": true,
            "generator": {"dims": {"T": 8, "N": 2, "M_s": 2, "M_c": 2}}, "seed": 5})");
        o.out_dir = dir.path / "a";
        CHECK(experiment::run_file(c, o, out, err) == 0);
        o.out_dir = dir.path / "b";
        CHECK(experiment::run_file(c, o, out, err) == 0);
        CHECK(io::read_text(dir.path / "a" / "sim.json") == io::read_text(dir.path / "b" / "sim.json"));
        CHECK(io::read_text(dir.path / "a" / "trials.csv") == io::read_text(dir.path / "b" / "trials.csv"));
        o.seed = 6;
        o.out_dir = dir.path / "c";
        CHECK(experiment::run_file(c, o, out, err) == 0);
        CHECK(io::read_text(dir.path / "a" / "sim.json") != io::read_text(dir.path / "c" / "sim.json"));
    }
    SECTION("exit codes")
    {
        dir.write("m.json", kFinite);
        CHECK(experiment::run_file(dir.write("bad.json", "{\"mode\": 3}"), o, out, err) == 2);
        CHECK(experiment::run_file(dir.path / "missing.json", o, out, err) == 4);
        const auto infeasible = dir.write("i.json", R"({"mode": "discrete-capacity", "model": "m.json", "d_s": 0.05})");
        CHECK(experiment::run_file(infeasible, o, out, err) == 3);
        dir.write("blocker", "x");
        o.out_dir = dir.path / "blocker";
        const auto ok = dir.write("ok.json", R"({"mode": "discrete-capacity", "model": "m.json"})");
        CHECK(experiment::run_file(ok, o, out, err) == 4);
        CHECK(err.str().find("error:") != std::string::npos);
    }
}

#ifdef CAS_CLI_PATH
TEST_CASE("command line")
{
    TempDir dir;
    const std::string cli = CAS_CLI_PATH;
    const std::string log = (dir.path / "log.txt").string();
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > " + log + " 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run("--help") == 0);
    const std::string help = io::read_text(log);
    for (const auto& m : experiment::mode_names())
        CHECK(help.find(m) != std::string::npos);

    const auto c = dir.write("rd.json", R"({"mode": "discrete-rd", "source": [0.5, 0.5],
        "distortion": [[0, 1], [1, 0]], "d_c": 0.11})");
    CHECK(run("--config " + c.string() + " --bogus") == 2);
    CHECK(run("--config " + c.string() + " --out " + (dir.path / "o").string() + " --bits") == 0);
    CHECK(io::read_text(log).find("R(0.11) (bits)  0.50") != std::string::npos);
    CHECK(run("--config " + (dir.path / "none.json").string()) == 2);
}
#endif
