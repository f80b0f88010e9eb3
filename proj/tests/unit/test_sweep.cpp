#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dickestat/errors.hpp"
#include "dickestat/io.hpp"
#include "dickestat/sweep.hpp"

using namespace dickestat;
using namespace dickestat::sweep;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dickestat_test_" + name);
    fs::remove_all(dir);
    return dir;
}

SweepSpec small_scaled() {
    SweepSpec spec;
    spec.mode = Mode::scaled;
    spec.field_ratio = 1.0;
    spec.coupling_ratio = 0.4;
    spec.reference_n_atoms = 5;
    spec.reference_photon_mean = 6;
    spec.photon_grid = {4, 5, 6};
    spec.atom_grid = {5};
    spec.levels = 120;
    spec.threads = 2;
    return spec;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(2.0) == "2");
    CHECK(io::format_half_integer(-21) == "-10.5");
    CHECK(io::format_half_integer(0) == "0");
    CHECK(io::format_half_integer(6) == "3");
    CHECK(io::parse_half_integer(-10.5) == -21);
    CHECK_THROWS_AS(io::parse_half_integer(0.25), ArgumentError);
}

TEST_CASE("column files round trip") {
    const auto dir = scratch("columns");
    io::prepare_output_dir(dir);
    const std::vector<double> v{0.1, 1.0 / 3.0, 2e-300};
    io::write_text(dir / "a.csv", io::column_csv("spacing", v));
    CHECK(io::read_column_csv(dir / "a.csv", "spacing") == v);
    io::write_text(dir / "b.csv", "index,energy,m_label\n0,1.5,0\n1,2.5,1\n");
    CHECK(io::read_column_csv(dir / "b.csv") == std::vector<double>{1.5, 2.5});
    io::write_text(dir / "c.csv", "3\n4\n");
    CHECK(io::read_column_csv(dir / "c.csv") == std::vector<double>{3, 4});
    CHECK_THROWS_AS(io::read_column_csv(dir / "missing.csv"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("unwritable output is rejected") {
    CHECK_THROWS_AS(io::prepare_output_dir("/proc/dickestat_cannot_write_here"), IoError);
    const auto dir = scratch("file_in_the_way");
    fs::create_directories(dir);
    io::write_text(dir / "plain", "x");
    CHECK_THROWS_AS(io::prepare_output_dir(dir / "plain"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("config round trip") {
    SweepSpec spec = small_scaled();
    spec.label_filters = {-1, 1};
    spec.fit_mode = FitMode::windowed;
    spec.window = 2;
    spec.cutoffs = {40, 60, 80};
    const auto j = to_json(spec);
    const auto back = spec_from_json(j);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(io::config_hash(j) == io::config_hash(to_json(back)));
    CHECK(io::config_hash(j).size() == 16);

    auto range = j;
    range["grid"]["photon_mean"] = {{"start", 4}, {"stop", 6}, {"step", 1}};
    CHECK(spec_from_json(range).photon_grid == std::vector<double>{4, 5, 6});

    auto bad = j;
    bad["unknown_key"] = 1;
    CHECK_THROWS_AS(spec_from_json(bad), ConfigError);
}

TEST_CASE("spec validation") {
    SweepSpec spec = small_scaled();
    spec.label_filters = {2};  // m = 1 with five atoms
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.label_filters = {7};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.label_filters = {-5, 3};
    CHECK_NOTHROW(spec.validate());

    spec = small_scaled();
    spec.levels = 50;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_scaled();
    spec.photon_grid = {0.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_scaled();
    spec.photon_grid.clear();
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_scaled();
    spec.cutoffs = {50};
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    SweepSpec direct;
    direct.mode = Mode::direct;
    direct.params = {1.0, 1.0, 0.4, 5, 1};
    direct.levels = 120;
    CHECK_NOTHROW(direct.validate());
}

TEST_CASE("direct mode without a photon grid is a single point") {
    SweepSpec spec;
    spec.mode = Mode::direct;
    spec.params = {1.0, 1.0, 0.4, 5, 1};
    spec.levels = 120;
    const auto r = run_sweep(spec);
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].photon_mean.has_value());
    CHECK(r.rows[0].status == "ok");
    CHECK(r.rows[0].q_hat.has_value());
}

TEST_CASE("one row per grid point, failures included") {
    SweepSpec spec = small_scaled();
    spec.atom_grid = {3, 5};
    spec.label_filters = {};
    spec.cutoffs = {3, 4};  // far too small for 120 levels: every point errors
    const auto r = run_sweep(spec);
    CHECK(r.rows.size() == 6);
    CHECK(r.failed_points == 6);
    for (const auto& row : r.rows) {
        CHECK(row.status != "ok");
        CHECK_FALSE(row.message.empty());
        CHECK_FALSE(row.q_hat.has_value());
    }
    // Grid order: atoms outermost, then photon number.
    CHECK(r.rows[0].n_atoms == 3);
    CHECK(*r.rows[1].photon_mean == 5.0);
    CHECK(r.rows[3].n_atoms == 5);
}

TEST_CASE("reports repeat byte for byte") {
    SweepSpec spec = small_scaled();
    spec.fit_mode = FitMode::pooled;
    const auto a = scratch("repeat_a");
    const auto b = scratch("repeat_b");
    const auto files_a = emit_report(a, spec, run_sweep(spec));
    spec.threads = 1;
    auto spec_b = spec;
    spec_b.threads = 2;
    const auto files_b = emit_report(b, spec_b, run_sweep(spec_b));
    REQUIRE(files_a == files_b);
    CHECK(files_a.size() == 4);
    for (const auto& f : files_a) {
        if (f == "manifest.json") continue;
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    const auto again = scratch("repeat_c");
    emit_report(again, spec_b, run_sweep(spec_b));
    for (const auto& f : files_a) CHECK_MESSAGE(slurp(b / f) == slurp(again / f), f);

    const auto manifest = nlohmann::ordered_json::parse(slurp(b / "manifest.json"));
    CHECK(manifest["config_hash"] == io::config_hash(manifest["config"]));
    CHECK(to_json(spec_from_json(manifest["config"])).dump() == manifest["config"].dump());

    const auto csv = slurp(a / "pooled_histogram.csv");
    CHECK(csv.rfind("bin_center,empirical_density,br_density_at_qhat,wigner,poisson\n", 0) == 0);
    for (const auto& d : {a, b, again}) fs::remove_all(d);
}

TEST_CASE("reference parameter sets") {
    CHECK(table1_sets().size() == 6);
    CHECK(table1_set("II").n_atoms == 1);
    CHECK(table1_set("VI").photon_max == 28);
    CHECK_THROWS_AS(table1_set("VII"), ArgumentError);
    Table1Options o;
    o.photon_step = 4;
    const auto spec = table1_spec(table1_set("I"), o);
    CHECK(spec.photon_grid.front() == 4);
    CHECK(spec.photon_grid.back() == 40);
    CHECK(spec.photon_grid.size() == 10);
    CHECK(spec.fit_mode == FitMode::pooled);
    CHECK(spec.reference_photon_mean == 40);
}

TEST_CASE("shipped example configs parse and validate") {
    const std::filesystem::path dir = DICKESTAT_CONFIG_DIR;
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        const auto j = nlohmann::ordered_json::parse(in);
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(sweep::spec_from_json(j));
        ++seen;
    }
    CHECK(seen >= 3);
}
