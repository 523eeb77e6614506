#include "fieldsim/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fieldsim/analytic.hpp"
#include "fieldsim/batch.hpp"
#include "fieldsim/cli/heatmap.hpp"
#include "fieldsim/cli/report.hpp"
#include "fieldsim/cli/sweep.hpp"
#include "fieldsim/errors.hpp"
#include "fieldsim/montecarlo.hpp"
#include "fieldsim/regression.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim::cli {

namespace {

std::atomic<bool> g_interrupt{false};

// Raised for too few points / samples; maps to exit code 3.
class InsufficientData : public Error {
public:
    using Error::Error;
};

struct Options {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    int workers = 0;

    double l1 = 8.25;
    std::optional<double> l2;
    double ratio = 1.0;
    double d = 4.5;
    double threshold = 4.5;
    double delta_theta = 0.0;
    double pitch = 25.6;
    int rings = 2;
    std::string cover = "full";

    std::size_t targets = 20000;
    std::optional<double> region;
    std::size_t iters = 6000;
    double z = 1.96;
    std::string distribution = "uniform";
    std::string final_target = "random";
    std::string elbow = "right";
    std::string kernel = "exact";
    bool kernel_given = false;
    int samples = kDefaultSamples;
    std::optional<double> half_width;
    std::optional<std::string> cross_check;

    std::string sampling = "random";
    std::size_t points = 80;
    std::string grid = "1x1x1";
    std::string arm_range = "7.25:14.5";
    std::string ratio_range = "1:2";
    std::string pitch_range = "24.6:35";
    std::string method = "both";
    std::string heatmaps;

    std::string csv;
    double lambda = 1e-6;
    double train_fraction = 0.75;
    std::optional<std::uint64_t> split_seed;
    std::string model;
    std::string fit_method = "mc";

    std::size_t count = 4000;
    std::size_t naive_pairs = 200000;
    int repeats = 3;
};

Range parse_range(const std::string& text, const char* name)
{
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const double v = std::stod(text);
            return {v, v};
        }
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InvalidParameter(std::string(name) + " range must look like min:max, got '" + text + "'");
    }
}

std::array<std::size_t, 3> parse_grid(const std::string& text)
{
    std::array<std::size_t, 3> steps{};
    std::istringstream in(text);
    std::string part;
    std::size_t k = 0;
    while (std::getline(in, part, 'x')) {
        if (k == 3 || part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
            throw InvalidParameter("grid must look like AxRxP (steps along arm, ratio, pitch), got '" + text + "'");
        }
        steps[k++] = std::stoul(part);
    }
    if (k != 3) {
        throw InvalidParameter("grid must look like AxRxP (steps along arm, ratio, pitch), got '" + text + "'");
    }
    return steps;
}

DistanceKernel make_kernel(const std::string& name, int samples)
{
    if (name == "exact") {
        return DistanceKernel::exact();
    }
    if (name == "discrete") {
        if (samples < 2) {
            throw InvalidSampleCount("sample count must be at least 2");
        }
        return DistanceKernel::discrete(samples);
    }
    throw InvalidParameter("unknown kernel '" + name + "' (expected exact or discrete)");
}

CoverMode make_cover(const std::string& name)
{
    if (name == "full") {
        return CoverMode::FullPatrol;
    }
    if (name == "ring") {
        return CoverMode::ThinRing;
    }
    throw InvalidParameter("unknown cover mode '" + name + "' (expected full or ring)");
}

Elbow make_elbow(const std::string& name)
{
    if (name == "right") {
        return Elbow::Right;
    }
    if (name == "left") {
        return Elbow::Left;
    }
    throw InvalidParameter("unknown elbow '" + name + "' (expected right or left)");
}

ArmGeometry make_geometry(const Options& o)
{
    return o.l2 ? ArmGeometry(o.l1, *o.l2) : ArmGeometry::from_ratio(o.l1, o.ratio);
}

SafetyModel make_safety(const Options& o)
{
    const SafetyModel s{o.d, o.delta_theta, o.threshold};
    s.validate();
    return s;
}

SimConfig make_sim_config(const Options& o)
{
    SimConfig c;
    c.pitch = o.pitch;
    c.rings = o.rings;
    c.geom = make_geometry(o);
    c.safety = make_safety(o);
    c.iterations_max = o.iters;
    c.z = o.z;
    c.target_count = o.targets;
    c.distribution = parse_distribution(o.distribution);
    c.root_seed = o.seed;
    c.elbow = make_elbow(o.elbow);
    c.final_target = parse_final_target_rule(o.final_target);
    c.kernel = make_kernel(o.kernel, o.samples);
    c.workers = o.workers;
    c.target_half_width = o.half_width;
    if (o.cross_check) {
        c.cross_check = make_kernel(*o.cross_check, o.samples);
    }
    c.region_radius = o.region ? *o.region : default_region_radius(c);
    c.validate();
    return c;
}

SweepSpec make_sweep(const Options& o)
{
    SweepSpec s;
    s.arm = parse_range(o.arm_range, "arm length");
    s.ratio = parse_range(o.ratio_range, "ratio");
    s.pitch = parse_range(o.pitch_range, "pitch");
    if (o.sampling == "grid") {
        s.sampling = Sampling::Grid;
        s.grid = parse_grid(o.grid);
    } else if (o.sampling == "random") {
        s.sampling = Sampling::RandomUniform;
        s.count = o.points;
    } else {
        throw InvalidParameter("unknown sampling '" + o.sampling + "' (expected random or grid)");
    }
    s.seed = o.seed;
    s.cover = make_cover(o.cover);
    s.region_radius = o.region;

    SimConfig mc;
    mc.rings = o.rings;
    mc.safety = make_safety(o);
    mc.iterations_max = o.iters;
    mc.z = o.z;
    mc.target_count = o.targets;
    mc.distribution = parse_distribution(o.distribution);
    mc.elbow = make_elbow(o.elbow);
    mc.final_target = parse_final_target_rule(o.final_target);
    mc.kernel = make_kernel(o.kernel, o.samples);
    mc.workers = o.workers;
    mc.target_half_width = o.half_width;
    mc.validate();
    s.mc = mc;
    s.validate();
    return s;
}

std::unique_ptr<RowWriter> open_writer(const Options& o, std::ostream& fallback)
{
    const Format format = parse_format(o.format);
    if (o.out.empty()) {
        return std::make_unique<RowWriter>(fallback, format);
    }
    return RowWriter::open(o.out, format);
}

void print_kv(std::ostream& out, const char* key, const std::string& value) { out << key << ": " << value << '\n'; }
void print_kv(std::ostream& out, const char* key, double value) { print_kv(out, key, format_number(value)); }
void print_kv(std::ostream& out, const char* key, std::size_t value) { print_kv(out, key, std::to_string(value)); }

int cmd_analytic(const Options& o, std::ostream& out)
{
    const ArmGeometry geom = make_geometry(o);
    const SafetyModel safety = make_safety(o);
    const CoverMode mode = make_cover(o.cover);
    const AnalyticResult r = collision_probability_analytic(geom, safety, o.pitch, mode);

    print_kv(out, "interaction", to_string(r.interaction));
    print_kv(out, "cover_mode", to_string(mode));
    print_kv(out, "probability", r.probability);
    print_kv(out, "probability_clamped", r.probability_clamped);
    print_kv(out, "s_cover_mm2", r.areas.s_cover);
    print_kv(out, "r_inner_mm", r.areas.r_inner);
    print_kv(out, "r_outer_mm", r.areas.r_outer);
    for (const ClassTerm& t : r.areas.classes) {
        out << "class distance_mm=" << format_number(t.distance) << " multiplicity=" << t.multiplicity
            << " s_conflict_mm2=" << format_number(t.s_conflict) << " s_collision_mm2=" << format_number(t.s_collision)
            << " contribution=" << format_number(t.contribution) << '\n';
    }
    if (!o.out.empty()) {
        ResultRow row;
        row.arm = geom.l1();
        row.ratio = geom.ratio();
        row.pitch = o.pitch;
        row.method = Method::Analytic;
        row.probability = r.probability;
        row.seed = o.seed;
        RowWriter::open(o.out, parse_format(o.format))->write(row);
    }
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err)
{
    SimConfig config = make_sim_config(o);
    if (const auto warning = region_warning(config)) {
        err << "warning: " << *warning << '\n';
    }
    config.cancel = &g_interrupt;
    const CollisionStats s = run_simulation(config);

    print_kv(out, "positioners", config.array().size());
    print_kv(out, "region_radius_mm", config.region_radius);
    print_kv(out, "final_target", to_string(config.final_target));
    print_kv(out, "kernel", to_string(config.kernel));
    print_kv(out, "iterations", s.iterations);
    print_kv(out, "p_hat", s.p_hat);
    print_kv(out, "wilson_lower", s.wilson_lower);
    print_kv(out, "wilson_upper", s.wilson_upper);
    print_kv(out, "reported", s.reported);
    print_kv(out, "colliding_positioners", s.colliding_positioner_count);
    print_kv(out, "assigned_positioners", s.assigned_positioner_count);
    print_kv(out, "colliding_pairs", s.colliding_pair_count);
    print_kv(out, "candidate_pairs", s.candidate_pair_count);
    print_kv(out, "pair_proportion", s.pair_proportion);
    if (config.cross_check) {
        print_kv(out, "cross_check_kernel", to_string(*config.cross_check));
        print_kv(out, "cross_check_p_hat", s.cross_check_p_hat);
        print_kv(out, "cross_check_pairs", s.cross_check_pairs);
        print_kv(out, "cross_check_mismatches", s.cross_check_mismatches);
    }
    if (g_interrupt.load()) {
        err << "interrupted after " << s.iterations << " iterations\n";
        return kExitInterrupted;
    }
    if (!o.out.empty()) {
        ResultRow row;
        row.arm = config.geom.l1();
        row.ratio = config.geom.ratio();
        row.pitch = config.pitch;
        row.method = Method::MonteCarlo;
        row.probability = s.reported;
        row.wilson_lower = s.wilson_lower;
        row.wilson_upper = s.wilson_upper;
        row.seed = o.seed;
        RowWriter::open(o.out, parse_format(o.format))->write(row);
    }
    return kExitOk;
}

// Runs the sweep, streaming rows to `writer` when given. Returns false when interrupted.
bool run_sweep(const SweepSpec& spec, bool analytic, bool mc, RowWriter* writer, std::vector<ResultRow>& rows,
               std::ostream& err)
{
    const std::vector<SweepPoint> points = sweep_points(spec);
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (analytic) {
            rows.push_back(analytic_row(spec, points[k]));
            if (writer != nullptr) {
                writer->write(rows.back());
            }
        }
        if (mc) {
            const auto row = mc_row(spec, points[k], &g_interrupt);
            if (!row) {
                err << "interrupted at point " << k + 1 << " of " << points.size() << "; partial output kept\n";
                return false;
            }
            rows.push_back(*row);
            if (writer != nullptr) {
                writer->write(rows.back());
            }
        }
        if (g_interrupt.load()) {
            err << "interrupted after point " << k + 1 << " of " << points.size() << "; partial output kept\n";
            return false;
        }
    }
    return true;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
    const SweepSpec spec = make_sweep(o);
    bool analytic = o.method == "both" || o.method == "analytic";
    bool mc = o.method == "both" || o.method == "mc";
    if (!analytic && !mc) {
        throw InvalidParameter("unknown method '" + o.method + "' (expected analytic, mc or both)");
    }
    std::vector<ResultRow> rows;
    const auto writer = open_writer(o, out);
    if (!run_sweep(spec, analytic, mc, writer.get(), rows, err)) {
        return kExitInterrupted;
    }
    if (!o.heatmaps.empty()) {
        // render what the CSV holds so the images can be rebuilt from it
        for (auto& row : rows) {
            row.arm = std::stod(format_number(row.arm));
            row.ratio = std::stod(format_number(row.ratio));
            row.pitch = std::stod(format_number(row.pitch));
            row.probability = std::stod(format_number(row.probability));
        }
        for (const auto& path : write_heatmaps(rows, o.heatmaps)) {
            err << "wrote " << path.string() << '\n';
        }
    }
    return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err)
{
    std::vector<ResultRow> rows;
    std::string source;
    CoverMode mode = make_cover(o.cover);
    if (!o.csv.empty()) {
        rows = rows_from_csv(read_csv_file(o.csv));
        source = o.csv;
    } else {
        const SweepSpec spec = make_sweep(o);
        if (!run_sweep(spec, true, true, nullptr, rows, err)) {
            return kExitInterrupted;
        }
        source = "fresh sweep";
    }
    std::vector<ResultRow> mc;
    std::vector<ResultRow> analytic;
    for (const ResultRow& r : rows) {
        (r.method == Method::MonteCarlo ? mc : analytic).push_back(r);
    }
    if (mc.size() < kMinValidationPoints || analytic.size() < kMinValidationPoints) {
        throw InsufficientData("validation needs at least " + std::to_string(kMinValidationPoints)
                               + " points with both methods, got " + std::to_string(std::min(mc.size(), analytic.size())));
    }
    ValidationReport report;
    try {
        report = build_validation(mc, analytic);
    } catch (const ZeroVariance& e) {
        throw InsufficientData(e.what());
    }

    out << "normalization: min-max over the " << report.points.size() << " points of this sweep (" << source << ")\n";
    if (o.csv.empty()) {
        print_kv(out, "cover_mode", to_string(mode));
    }
    print_kv(out, "points", report.points.size());
    print_kv(out, "residual_mean", report.residual_mean);
    print_kv(out, "residual_variance", report.residual_variance);
    print_kv(out, "spearman", report.rank_correlation);
    if (!o.out.empty()) {
        std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw InvalidParameter("cannot open '" + o.out + "' for writing");
        }
        write_validation_csv(file, report);
    }
    return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out)
{
    if (o.csv.empty()) {
        throw InvalidParameter("fit needs --csv");
    }
    const CsvTable table = read_csv_file(o.csv);
    auto need = [&](std::initializer_list<const char*> names) {
        const int c = table.column(names);
        if (c < 0) {
            throw InvalidParameter(std::string("missing column '") + *names.begin() + "'");
        }
        return static_cast<std::size_t>(c);
    };
    const std::size_t cx = need({"arm_length", "arm_length_mm"});
    const std::size_t cy = need({"ratio"});
    const std::size_t cz = need({"pitch", "pitch_mm"});
    const std::size_t cf = need({"probability"});
    const int cm = table.column({"method"});
    auto number = [&](const std::string& text, std::size_t col) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw InvalidParameter("column '" + table.header[col] + "': '" + text + "' is not a number");
        }
        return v;
    };

    std::vector<RegressionSample> samples;
    for (const auto& cells : table.rows) {
        if (cm >= 0 && cells[static_cast<std::size_t>(cm)] != o.fit_method) {
            continue;
        }
        samples.push_back({number(cells[cx], cx), number(cells[cy], cy), number(cells[cz], cz), number(cells[cf], cf)});
    }
    const std::uint64_t split_seed = o.split_seed ? *o.split_seed : o.seed;
    const Split split = train_test_split(samples, o.train_fraction, split_seed);
    if (split.train.size() < kBasisSize || split.test.size() < 2) {
        throw InsufficientData("fit needs at least " + std::to_string(kBasisSize) + " training and 2 test rows, got "
                               + std::to_string(split.train.size()) + " and " + std::to_string(split.test.size()));
    }
    const RegressionModel model = fit_ridge(split.train, o.lambda);
    double train_r2 = 0.0;
    double test_r2 = 0.0;
    try {
        train_r2 = r_squared(model, split.train);
        test_r2 = r_squared(model, split.test);
    } catch (const ZeroVariance& e) {
        throw InsufficientData(e.what());
    }
    print_kv(out, "samples", samples.size());
    print_kv(out, "train", split.train.size());
    print_kv(out, "test", split.test.size());
    print_kv(out, "lambda", o.lambda);
    print_kv(out, "train_r2", train_r2);
    print_kv(out, "test_r2", test_r2);
    out << "coefficients:";
    for (const double c : model.coefficients) {
        out << ' ' << format_number(c);
    }
    out << '\n';
    const std::string path = !o.model.empty() ? o.model : o.out;
    if (!path.empty()) {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw InvalidParameter("cannot open '" + path + "' for writing");
        }
        file << model.serialize();
    }
    return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out)
{
    if (o.count < 2) {
        throw InvalidParameter("bench needs at least 2 positioners");
    }
    const ArmGeometry geom = make_geometry(o);
    const SafetyModel safety = make_safety(o);
    // discretized kernel unless --kernel says otherwise
    const DistanceKernel kernel = make_kernel(o.kernel_given ? o.kernel : "discrete", o.samples);
    const HexArray array = build_hex_array(o.pitch, rings_for_count(o.count), geom, safety);
    const std::vector<Vec2> centers(array.centers().begin(),
                                    array.centers().begin() + static_cast<std::ptrdiff_t>(o.count));

    Rng rng(o.seed);
    std::vector<Segment> segments;
    SegmentBatch batch;
    for (const Vec2 c : centers) {
        const Pose pose{2 * std::numbers::pi * uniform01(rng), 2 * std::numbers::pi * uniform01(rng)};
        segments.push_back(eccentric_arm_segment(geom, c, pose));
        batch.push_back(segments.back());
    }
    for (const NeighborPair& p : neighbor_pairs(centers, 1.01 * o.pitch).pairs) {
        batch.pairs.emplace_back(static_cast<std::uint32_t>(p.i), static_cast<std::uint32_t>(p.j));
    }

    std::vector<int> worker_counts{1};
    if (resolve_workers(o.workers) != 1) {
        worker_counts.push_back(resolve_workers(o.workers));
    }
    print_kv(out, "positioners", centers.size());
    print_kv(out, "first_shell_pairs", batch.pairs.size());
    print_kv(out, "kernel", to_string(kernel));
    out << "workers seconds\n";
    DistanceReport reference;
    bool identical = true;
    double best_time = INFINITY;
    for (const int w : worker_counts) {
        double best = INFINITY;
        for (int rep = 0; rep < std::max(1, o.repeats); ++rep) {
            DistanceReport r = batch_pair_distances(batch, kernel, safety.threshold, w);
            best = std::min(best, r.elapsed_seconds);
            if (reference.distance.empty() && !r.distance.empty()) {
                reference = std::move(r);
            } else {
                identical = identical && r.distance == reference.distance && r.collides == reference.collides;
            }
        }
        out << w << ' ' << format_number(best) << '\n';
        best_time = std::min(best_time, best);
    }
    print_kv(out, "identical_across_workers", std::string(identical ? "yes" : "no"));
    print_kv(out, "collisions", reference.collision_count());

    const int naive_samples = kernel.kind == DistanceKernel::Kind::Discrete ? kernel.samples : kDefaultSamples;
    const std::size_t all_pairs = o.count * (o.count - 1) / 2;
    const std::size_t limit = o.naive_pairs == 0 ? 0 : std::min(o.naive_pairs, all_pairs);
    const DistanceReport naive = naive_all_pairs(segments, naive_samples, safety.threshold, limit);
    const double naive_full =
        naive.elapsed_seconds * static_cast<double>(all_pairs) / static_cast<double>(naive.pairs_evaluated);

    // The naive loop visits (0,1), (0,2), ... so its k-th result belongs to the k-th i<j pair.
    double max_diff = 0.0;
    std::size_t compared = 0;
    for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
        const std::size_t i = batch.pairs[k].first;
        const std::size_t j = batch.pairs[k].second;
        const std::size_t index = i * o.count - i * (i + 1) / 2 + (j - i - 1);
        if (index < naive.pairs_evaluated) {
            max_diff = std::max(max_diff, std::abs(naive.distance[index] - reference.distance[k]));
            ++compared;
        }
    }
    print_kv(out, "naive_pairs_evaluated", naive.pairs_evaluated);
    print_kv(out, "naive_pairs_total", all_pairs);
    print_kv(out, "naive_seconds_measured", naive.elapsed_seconds);
    print_kv(out, "naive_seconds_full", naive_full);
    print_kv(out, "naive_full_is", std::string(naive.pairs_evaluated == all_pairs ? "measured" : "extrapolated"));
    print_kv(out, "naive_vs_batch_pairs_compared", compared);
    print_kv(out, "naive_vs_batch_max_abs_diff", max_diff);
    print_kv(out, "speedup", best_time > 0.0 ? naive_full / best_time : INFINITY);
    return kExitOk;
}

}  // namespace

void request_interrupt() { g_interrupt.store(true); }
void reset_interrupt() { g_interrupt.store(false); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Collision probability of theta-phi fiber positioner arrays: analytic model, Monte Carlo, "
                 "sweeps, validation, surrogate fit and batch benchmark.",
                 "fieldsim"};
    app.set_config("--config", "", "flat key=value file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--seed", o.seed, "root seed")->group("Global");
    app.add_option("--out", o.out, "output file")->group("Global");
    app.add_option("--format", o.format, "csv or ndjson")->check(CLI::IsMember({"csv", "ndjson"}))->group("Global");
    app.add_option("--workers", o.workers, "worker threads, 0 = all")->group("Global");

    app.add_option("--l1,--arm", o.l1, "central arm length l1, mm")->group("Geometry");
    app.add_option("--l2", o.l2, "eccentric arm length l2, mm (overrides --ratio)")->group("Geometry");
    app.add_option("--ratio", o.ratio, "arm ratio l2/l1")->group("Geometry");
    app.add_option("--d", o.d, "safety radius d, mm")->group("Geometry");
    app.add_option("--threshold", o.threshold, "pairwise collision threshold, mm")->group("Geometry");
    app.add_option("--delta-theta", o.delta_theta, "per-step rotation bound, rad")->group("Geometry");
    app.add_option("--pitch", o.pitch, "center spacing, mm")->group("Geometry");
    app.add_option("--rings", o.rings, "hexagon rings around the central positioner")->group("Geometry");
    app.add_option("--cover", o.cover, "analytic cover area: full or ring")->group("Geometry");

    app.add_option("--targets", o.targets, "targets per iteration")->group("Monte Carlo");
    app.add_option("--region", o.region, "target disk radius, mm (default 1.5 x array circumradius)")
        ->group("Monte Carlo");
    app.add_option("--iters", o.iters, "iterations")->group("Monte Carlo");
    app.add_option("--z", o.z, "Wilson z")->group("Monte Carlo");
    app.add_option("--distribution", o.distribution, "uniform, poisson or poisson-disk")->group("Monte Carlo");
    app.add_option("--final-target", o.final_target, "random or nearest")->group("Monte Carlo");
    app.add_option("--elbow", o.elbow, "right or left")->group("Monte Carlo");
    auto* kernel_opt = app.add_option("--kernel", o.kernel, "exact or discrete (bench defaults to discrete)")
                           ->group("Monte Carlo");
    app.add_option("--samples", o.samples, "segments per arm for the discrete kernel")->group("Monte Carlo");
    app.add_option("--half-width", o.half_width, "stop once the Wilson half-width reaches this")
        ->group("Monte Carlo");
    app.add_option("--cross-check", o.cross_check, "second kernel evaluated on the same scenes")
        ->group("Monte Carlo");

    app.add_option("--sampling", o.sampling, "random or grid")->group("Sweep");
    app.add_option("--points", o.points, "random points")->group("Sweep");
    app.add_option("--grid", o.grid, "grid steps AxRxP")->group("Sweep");
    app.add_option("--arm-range", o.arm_range, "min:max, mm")->group("Sweep");
    app.add_option("--ratio-range", o.ratio_range, "min:max")->group("Sweep");
    app.add_option("--pitch-range", o.pitch_range, "min:max, mm")->group("Sweep");
    app.add_option("--method", o.method, "analytic, mc or both")->group("Sweep");
    app.add_option("--heatmaps", o.heatmaps, "directory for heatmap PNG + grid CSV")->group("Sweep");

    app.add_option("--csv", o.csv, "input CSV (fit, validate)")->group("Fit");
    app.add_option("--lambda", o.lambda, "ridge penalty")->group("Fit");
    app.add_option("--train-fraction", o.train_fraction, "train share of the split")->group("Fit");
    app.add_option("--split-seed", o.split_seed, "split seed (default --seed)")->group("Fit");
    app.add_option("--model", o.model, "model output file (default --out)")->group("Fit");
    app.add_option("--fit-method", o.fit_method, "rows of this method are fitted")->group("Fit");

    app.add_option("--count", o.count, "positioners")->group("Bench");
    app.add_option("--naive-pairs", o.naive_pairs, "naive pairs to time before extrapolating, 0 = all")
        ->group("Bench");
    app.add_option("--repeats", o.repeats, "timed repetitions, best kept")->group("Bench");

    auto* analytic = app.add_subcommand("analytic", "closed-form collision probability");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo collision probability");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV (and heatmaps)");
    auto* validate = app.add_subcommand("validate", "normalized analytic vs Monte Carlo comparison");
    auto* fit = app.add_subcommand("fit", "ridge fit of the quadratic surrogate");
    auto* bench = app.add_subcommand("bench", "batch distance kernel vs naive reference");

    try {
        std::vector<std::string> args;
        for (int k = argc - 1; k >= 1; --k) {
            args.emplace_back(argv[k]);
        }
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "fieldsim: " << e.what() << '\n';
        if (argc <= 1) {
            err << app.help();
        }
        return kExitUsage;
    }

    o.kernel_given = kernel_opt->count() > 0;
    try {
        if (analytic->parsed()) {
            return cmd_analytic(o, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(o, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(o, out, err);
        }
        if (validate->parsed()) {
            return cmd_validate(o, out, err);
        }
        if (fit->parsed()) {
            return cmd_fit(o, out);
        }
        if (bench->parsed()) {
            return cmd_bench(o, out);
        }
    } catch (const InsufficientData& e) {
        err << "fieldsim: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const Error& e) {
        err << "fieldsim: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "fieldsim: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace fieldsim::cli
