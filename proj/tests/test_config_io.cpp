#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qdot/config.hpp"
#include "qdot/io.hpp"

using namespace qdot;
using doctest::Approx;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto p = fs::temp_directory_path() / "qdot_test_config_io";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("preset configurations load and validate") {
    const auto cfg = load_config(config_from_preset("default"));
    CHECK(cfg.geometry.layers.size() == 7);
    CHECK(cfg.geometry.distances.aa_nm == 20.0);
    CHECK(cfg.geometry.distances.ab_nm == Approx(std::sqrt(20.0 * 20.0 + 6.5 * 6.5)));
    CHECK(cfg.solver.n_mesh == 1000);
    CHECK(cfg.bath.debye_temperature_k == 450.0);
    CHECK(cfg.detector.transconductance_s == 1.8e-9);

    const auto packed = load_config(config_from_preset("close-packed"));
    CHECK(packed.geometry.distances.aa_nm == 15.0);

    CHECK_THROWS_AS(config_from_preset("nope"), ConfigError);
}

TEST_CASE("config overlay and validation errors") {
    json j = config_from_preset("default");
    j["scan"]["bias_hi_v"] = -1.0;
    CHECK_THROWS_AS(load_config(j), ConfigError);

    j = config_from_preset("default");
    j["geometry"]["layers"][2]["kind"] = "dot_b";  // two dot_b layers
    CHECK_THROWS_AS(load_config(j), ConfigError);

    j = config_from_preset("default");
    j["bath"] = json{{"preset", "unknown-bath"}};
    CHECK_THROWS_AS(load_config(j), ConfigError);

    j = config_from_preset("default");
    j["config_version"] = 99;
    CHECK_THROWS_AS(load_config(j), ConfigError);

    j = config_from_preset("default");
    j["geometry"]["layers"][0]["thickness_nm"] = "thick";  // wrong type, pointer in message
    try {
        load_config(j);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/geometry/layers/0/thickness_nm") !=
              std::string::npos);
    }
}

TEST_CASE("file overlay merges over the preset") {
    const auto dir = temp_dir();
    const auto path = dir / "overlay.json";
    {
        std::ofstream out(path);
        out << R"({"scan": {"bias_hi_v": 0.3}, "threads": 3})";
    }
    const json eff = effective_config("default", path, /*use_env=*/false);
    const auto cfg = load_config(eff);
    CHECK(cfg.scan.bias_hi_v == 0.3);
    CHECK(cfg.scan.bias_lo_v == 0.0);  // untouched preset value
    CHECK(cfg.threads == 3);
    CHECK_THROWS_AS(effective_config("default", dir / "missing.json"), ConfigError);
}

TEST_CASE("preset sections accept selective field overrides") {
    json j = config_from_preset("default");
    j["bath"]["coupling_ratio"] = 2e-4;  // preset base, one field overridden
    auto cfg = load_config(j);
    CHECK(cfg.bath.coupling_ratio == 2e-4);
    CHECK(cfg.bath.debye_temperature_k == 450.0);

    j = config_from_preset("default");
    j["detector"] = json{{"transconductance_s", 1.8e-9}};  // no preset: all required
    CHECK_THROWS_AS(load_config(j), ConfigError);
}

TEST_CASE("environment overrides any key") {
    ::setenv("QDOT_scan__bias_step_v", "0.002", 1);
    ::setenv("QDOT_output__dir", "elsewhere", 1);
    const json eff = effective_config("default", std::nullopt, /*use_env=*/true);
    ::unsetenv("QDOT_scan__bias_step_v");
    ::unsetenv("QDOT_output__dir");
    const auto cfg = load_config(eff);
    CHECK(cfg.scan.bias_step_v == 0.002);
    CHECK(cfg.output.dir == "elsewhere");
}

TEST_CASE("csv number format: 12 significant digits, dot separator") {
    CHECK(io::format_g12(0.1) == "0.1");
    CHECK(io::format_g12(1.0 / 3.0) == "0.333333333333");
    CHECK(io::format_g12(6.28e-05) == "6.28e-05");
    CHECK(io::format_g12(-1.5e-11) == "-1.5e-11");
}

TEST_CASE("csv writer isolates the timestamp on the first header line") {
    const auto dir = temp_dir();
    const auto path = dir / "t.csv";
    {
        io::CsvWriter csv(path, {"a", "b"});
        csv.row({1.0, 2.0});
    }
    std::ifstream in(path);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    CHECK(l1.rfind("# generated ", 0) == 0);
    CHECK(l2 == "a,b");
    CHECK(l3 == "1,2");
}

TEST_CASE("infinity survives the json round trip") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(io::decode_double(io::encode_double(inf)) == inf);
    CHECK(io::decode_double(io::encode_double(-inf)) == -inf);
    CHECK(io::decode_double(io::encode_double(1.25)) == 1.25);
    CHECK_THROWS(io::decode_double(json("wat")));
}

TEST_CASE("report structures round trip through json") {
    CalibrationResult r;
    r.v_res_v = 0.154705098312;
    r.v_res_equal_population_v = 0.15470353;
    r.delta_e_at_res_ev = 6.53060653713e-05;
    r.ground_energy_at_res_ev = 0.021452998757;
    r.region_a = {0.12, 0.15401};
    r.hatched = {0.15401, 0.1554};
    r.region_b = {0.1554, 0.19};
    r.occupancy = {1.0, 0.0};
    const auto r2 = io::calibration_from_json(io::to_json(r));
    CHECK(r2.v_res_v == r.v_res_v);
    CHECK(r2.delta_e_at_res_ev == r.delta_e_at_res_ev);
    CHECK(r2.hatched.lo_v == r.hatched.lo_v);
    CHECK(r2.occupancy.rho_a == r.occupancy.rho_a);
    CHECK(io::to_json(r2) == io::to_json(r));

    CnotParameters p;
    p.level_energy_ev = 0.0214;
    p.coupling_on = 0.0496;
    p.coupling_off = 0.0497;
    p.detuning_off = 1.336;
    p.bias_on_v = 0.1547;
    p.duration_ps = 31.6;
    p.infidelity_bound = 1.38e-3;
    p.delta_over_c = 26.9;
    CHECK(io::to_json(io::cnot_parameters_from_json(io::to_json(p))) == io::to_json(p));

    DecoherenceReport d;
    d.delta_bare_per_ps = 0.0152;
    d.delta_tilde_per_ps = 0.0;
    d.renormalization_exponent = 1323.39;
    d.omega_c_s = 5.89e13;
    d.gamma_so_bare_s = 2.1e6;
    d.gamma_so_renorm_s = 0.0;
    d.tau_so_bare_s = 4.76e-7;
    d.tau_so_renorm_s = std::numeric_limits<double>::infinity();
    d.alpha_ohmic = 2.82e-7;
    d.ohmic_crossover_s = 8.6e8;
    d.regime = CoherenceRegime::coherent_underdamped;
    d.gate_time_s = 5.2e-12;
    d.ops_per_coherence = 91563.87;
    CHECK(io::to_json(io::decoherence_from_json(io::to_json(d))) == io::to_json(d));

    ReadoutReport m;
    m.delta_v_th_v = 0.03;
    m.delta_i_d_a = -5.4e-11;
    m.tau_ms_s = 1.698e-6;
    m.delta_s = 1.52e10;
    m.damping.regime = DampingRegime::weak_damping;
    CHECK(io::to_json(io::readout_from_json(io::to_json(m))) == io::to_json(m));
    m.damping.regime = DampingRegime::strong_damping;
    m.damping.tau_zeno_s = 1.2e-4;
    CHECK(io::to_json(io::readout_from_json(io::to_json(m))) == io::to_json(m));

    io::GateReport g;
    g.initial = "10";
    g.final_state = "11";
    g.target_flip_probability = 1-1e-16;
    g.infidelity = 1e-16;
    g.delta_over_c = 26.9;
    g.duration_ps = 31.66;
    g.bias_v = 0.1547;
    CHECK(io::to_json(io::gate_report_from_json(io::to_json(g))) == io::to_json(g));
}

TEST_CASE("content hash is stable and collision-separating") {
    const auto a = io::fnv1a64("geometry-a");
    const auto b = io::fnv1a64("geometry-b");
    CHECK(a != b);
    CHECK(a == io::fnv1a64("geometry-a"));
    CHECK(io::hex64(a).size() == 16);
}
