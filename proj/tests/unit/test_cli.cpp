#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fieldsim/cli/cli.hpp"
#include "fieldsim/cli/heatmap.hpp"
#include "fieldsim/cli/report.hpp"
#include "fieldsim/cli/sweep.hpp"
#include "fieldsim/errors.hpp"
#include "fieldsim/regression.hpp"

namespace fs = std::filesystem;
using namespace fieldsim;
using namespace fieldsim::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::initializer_list<std::string> args)
{
    std::vector<std::string> owned{"fieldsim"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("fieldsim_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// value of "key: value" in printed output
std::string field(const std::string& text, const std::string& key)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

}  // namespace

TEST_CASE("analytic command")
{
    auto type1 = run({"analytic", "--l1", "8.25", "--l2", "8.25", "--d", "4.5", "--pitch", "50"});
    CHECK(type1.code == 0);
    CHECK(field(type1.out, "interaction") == "Type1");
    CHECK(std::stod(field(type1.out, "probability")) == 0.0);

    auto defaults = run({"analytic"});
    CHECK(defaults.code == 0);
    CHECK(field(defaults.out, "interaction") == "Type2");
    ArmGeometry g{8.25, 8.25};
    double lib = collision_probability_analytic(g, SafetyModel{}, 25.6, CoverMode::FullPatrol).probability;
    CHECK(std::stod(field(defaults.out, "probability")) == doctest::Approx(lib).epsilon(1e-10));

    auto bad = run({"analytic", "--pitch", "0"});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("pitch must be positive") != std::string::npos);
}

TEST_CASE("usage errors and help")
{
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"nope"}).code == kExitUsage);
    CHECK(run({"simulate", "--iters", "abc"}).code == kExitUsage);
    CHECK(run({"simulate", "--distribution", "gaussian"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("simulate is deterministic across runs and workers")
{
    auto dir = scratch("simulate");
    std::vector<std::string> bytes;
    for (const char* w : {"1", "2", "1", "0"}) {
        auto path = (dir / (std::string("w") + w + ".csv")).string();
        auto r = run({"simulate", "--iters", "40", "--seed", "7", "--workers", w, "--out", path});
        REQUIRE(r.code == 0);
        bytes.push_back(slurp(path));
    }
    for (const auto& b : bytes) CHECK(b == bytes[0]);
    CHECK(bytes[0].rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(line_count(bytes[0]) == 2);

    auto other = run({"simulate", "--iters", "40", "--seed", "8", "--out", (dir / "s8.csv").string()});
    REQUIRE(other.code == 0);
    CHECK(slurp(dir / "s8.csv") != bytes[0]);
}

TEST_CASE("simulate Type1 gives zero")
{
    auto r = run({"simulate", "--pitch", "50", "--iters", "30"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(field(r.out, "p_hat")) == 0.0);
}

TEST_CASE("sweep rows, formats and determinism")
{
    auto dir = scratch("sweep");
    auto grid = run({"sweep", "--sampling", "grid", "--grid", "1x2x2", "--method", "analytic"});
    REQUIRE(grid.code == 0);
    CHECK(line_count(grid.out) == 1 + 4);

    auto both = run({"sweep", "--sampling", "grid", "--grid", "1x2x2", "--method", "both", "--iters", "10"});
    REQUIRE(both.code == 0);
    CHECK(line_count(both.out) == 1 + 8);

    auto nd = run({"sweep", "--sampling", "grid", "--grid", "1x1x2", "--method", "analytic", "--format", "ndjson"});
    REQUIRE(nd.code == 0);
    CHECK(line_count(nd.out) == 2);
    CHECK(nd.out.find("\"schema_version\":1") != std::string::npos);
    CHECK(nd.out.find("\"wilson_lower\":null") != std::string::npos);

    std::vector<std::string> bytes;
    for (const char* w : {"1", "3", "1"}) {
        auto path = (dir / (std::string("r") + w + std::to_string(bytes.size()) + ".csv")).string();
        auto r = run({"sweep", "--points", "3", "--seed", "11", "--iters", "15", "--workers", w, "--out", path});
        REQUIRE(r.code == 0);
        bytes.push_back(slurp(path));
    }
    CHECK(bytes[0] == bytes[1]);
    CHECK(bytes[0] == bytes[2]);
    CHECK(line_count(bytes[0]) == 1 + 6);

    auto parsed = rows_from_csv(read_csv_file((dir / "r10.csv").string()));
    REQUIRE(parsed.size() == 6);
    for (const auto& row : parsed) {
        CHECK(row.arm >= 7.25);
        CHECK(row.arm <= 14.5);
        CHECK(row.pitch >= 24.6);
        CHECK(row.pitch <= 35.0);
    }
}

TEST_CASE("config file precedence")
{
    auto dir = scratch("config");
    auto cfg = dir / "run.conf";
    {
        std::ofstream f(cfg);
        f << "# type 1 spacing\npitch=50\ncover=full\n";
    }
    auto from_file = run({"analytic", "--config", cfg.string()});
    REQUIRE(from_file.code == 0);
    CHECK(field(from_file.out, "interaction") == "Type1");

    auto flag_wins = run({"analytic", "--config", cfg.string(), "--pitch", "25.6"});
    REQUIRE(flag_wins.code == 0);
    CHECK(field(flag_wins.out, "interaction") == "Type2");

    auto defaults = run({"analytic"});
    CHECK(field(defaults.out, "probability") == field(flag_wins.out, "probability"));
}

TEST_CASE("validate")
{
    auto dir = scratch("validate");
    auto csv = (dir / "sweep.csv").string();
    REQUIRE(run({"sweep", "--sampling", "grid", "--grid", "1x2x2", "--iters", "20", "--out", csv}).code == 0);
    auto v = run({"validate", "--csv", csv, "--out", (dir / "val.csv").string()});
    REQUIRE(v.code == 0);
    CHECK(field(v.out, "points") == "4");
    CHECK(!field(v.out, "spearman").empty());
    CHECK(v.out.find("normalization:") != std::string::npos);
    CHECK(line_count(slurp(dir / "val.csv")) == 1 + 4);

    auto two = run({"validate", "--sampling", "grid", "--grid", "1x1x2", "--iters", "5"});
    CHECK(two.code == kExitInsufficientData);
}

TEST_CASE("validation of analytic against itself")
{
    SweepSpec spec;
    spec.count = 12;
    spec.seed = 5;
    std::vector<ResultRow> rows;
    for (const auto& p : sweep_points(spec)) rows.push_back(analytic_row(spec, p));
    auto rep = build_validation(rows, rows);
    CHECK(rep.points.size() == 12);
    CHECK(rep.residual_mean == 0.0);
    CHECK(rep.residual_variance == 0.0);
    CHECK(rep.rank_correlation == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ranks and spearman")
{
    std::vector<double> v{3.0, 1.0, 3.0, 2.0};
    auto r = average_ranks(v);
    CHECK(r == std::vector<double>{3.5, 1.0, 3.5, 2.0});

    std::vector<double> a{1, 2, 3, 4, 5};
    std::vector<double> b{10, 20, 30, 40, 50};
    std::vector<double> c{5, 4, 3, 2, 1};
    CHECK(spearman(a, b) == doctest::Approx(1.0));
    CHECK(spearman(a, c) == doctest::Approx(-1.0));
    // monotone transform does not change it
    std::vector<double> e{std::exp(1.0), std::exp(2.0), std::exp(3.0), std::exp(4.0), std::exp(5.0)};
    CHECK(spearman(a, e) == doctest::Approx(1.0));
    std::vector<double> flat{2, 2, 2, 2, 2};
    CHECK_THROWS_AS(spearman(a, flat), ZeroVariance);

    auto n = min_max_normalize(std::vector<double>{2.0, 4.0, 3.0});
    CHECK(n == std::vector<double>{0.0, 1.0, 0.5});
    CHECK(min_max_normalize(flat) == std::vector<double>(5, 0.0));
}

TEST_CASE("fit command")
{
    auto dir = scratch("fit");
    auto csv = dir / "syn.csv";
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ux(7.25, 14.5), uy(1.0, 2.0), uz(24.6, 35.0);
        std::ofstream f(csv);
        f.precision(17);
        f << "arm_length,ratio,pitch,probability\n";
        for (int k = 0; k < 60; ++k) {
            double x = ux(rng), y = uy(rng), z = uz(rng);
            double p = 0.1 + 0.01 * x - 0.02 * y + 0.003 * z + 0.001 * x * x + 0.02 * y * y - 1e-4 * z * z +
                       0.002 * x * y - 3e-4 * x * z + 1e-3 * y * z;
            f << x << ',' << y << ',' << z << ',' << p << '\n';
        }
    }
    auto model = dir / "model.txt";
    auto r = run({"fit", "--csv", csv.string(), "--model", model.string(), "--seed", "1"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(field(r.out, "test_r2")) >= 0.9999);
    auto m = RegressionModel::deserialize(slurp(model));
    CHECK(predict(m, 10.0, 1.5, 30.0) ==
          doctest::Approx(0.1 + 0.1 - 0.03 + 0.09 + 0.1 + 0.045 - 0.09 + 0.03 - 0.09 + 0.045).epsilon(1e-6));

    auto bad = dir / "bad.csv";
    {
        std::ofstream f(bad);
        f << "arm_length,ratio,probability\n1,2,3\n";
    }
    auto missing = run({"fit", "--csv", bad.string()});
    CHECK(missing.code == kExitUsage);
    CHECK(missing.err.find("pitch") != std::string::npos);

    auto ragged = dir / "ragged.csv";
    {
        std::ofstream f(ragged);
        f << "arm_length,ratio,pitch,probability\n1,2\n";
    }
    CHECK(run({"fit", "--csv", ragged.string()}).code == kExitUsage);
    CHECK(run({"fit", "--csv", (dir / "absent.csv").string()}).code == kExitUsage);

    auto few = dir / "few.csv";
    {
        std::ofstream f(few);
        f << "arm_length,ratio,pitch,probability\n";
        for (int k = 0; k < 5; ++k) f << 8 + k << ",1.5,30," << 0.01 * k << '\n';
    }
    CHECK(run({"fit", "--csv", few.string()}).code == kExitInsufficientData);
}

TEST_CASE("heatmaps")
{
    auto dir = scratch("heatmaps");
    auto csv = (dir / "g.csv").string();
    REQUIRE(run({"sweep", "--sampling", "grid", "--grid", "2x2x3", "--method", "analytic", "--out", csv,
                 "--heatmaps", (dir / "maps").string()})
                .code == 0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir / "maps")) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    REQUIRE(names.size() == 4);
    CHECK(names[0] == "heatmap_analytic_arm14.5.csv");
    CHECK(names[1] == "heatmap_analytic_arm14.5.png");
    CHECK(names[3] == "heatmap_analytic_arm7.25.png");

    auto png = slurp(dir / "maps" / names[1]);
    REQUIRE(png.size() > 24);
    CHECK(png.substr(1, 3) == "PNG");
    auto be32 = [&](std::size_t at) {
        unsigned v = 0;
        for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(png[at + i]);
        return v;
    };
    CHECK(be32(16) == 2 * kHeatmapCellPixels);
    CHECK(be32(20) == 3 * kHeatmapCellPixels);

    // rendering again from the parsed CSV gives the same bytes
    auto rows = rows_from_csv(read_csv_file(csv));
    write_heatmaps(rows, dir / "again");
    for (const auto& n : names) CHECK(slurp(dir / "again" / n) == slurp(dir / "maps" / n));
}

TEST_CASE("bench with two positioners")
{
    auto r = run({"bench", "--count", "2", "--repeats", "1"});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "identical_across_workers") == "yes");
    CHECK(std::stod(field(r.out, "naive_vs_batch_max_abs_diff")) <= 1e-9);
    CHECK(run({"bench", "--count", "1"}).code == kExitUsage);
}

TEST_CASE("interrupt before a sweep")
{
    request_interrupt();
    auto r = run({"sweep", "--points", "2", "--iters", "200"});
    reset_interrupt();
    CHECK(r.code == kExitInterrupted);
    CHECK(r.out.rfind(kCsvHeader, 0) == 0);
}
