#include "rpl/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "rpl/dimension.hpp"
#include "rpl/fractal.hpp"
#include "rpl/io.hpp"
#include "rpl/log.hpp"
#include "rpl/multiplicity.hpp"
#include "rpl/parallel.hpp"
#include "rpl/tangency.hpp"
#include "rpl/verify.hpp"

namespace rpl {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 -> hardware
    std::string out = ".";
    bool svg = false;

    unsigned effective_threads() const {
        return threads == 0 ? hardware_threads() : threads;
    }
    std::string path(const std::string& name) const {
        return (fs::path(out) / name).string();
    }
};

void ensure_out_dir(const CommonOptions& common) {
    std::error_code ec;
    fs::create_directories(common.out, ec);
    if (ec) throw IoError("cannot create output directory: " + common.out);
}

DiscreteMeasure load_measure_checked(const std::string& path) {
    DiscreteMeasure mu = load_measure_csv(path);
    const std::string meta_path = metadata_path_for(path);
    if (fs::exists(meta_path)) {
        const MeasureMetadata meta = load_measure_metadata(meta_path);
        mu.generation_scale = meta.generation_scale;
        mu.seed = meta.seed;
    } else {
        log_line(LogLevel::warn, "no metadata next to " + path +
                                     "; generation scale defaults to 0");
    }
    mu.validate();
    log_line(LogLevel::info, "loaded " + std::to_string(mu.size()) +
                                 " support points from " + path);
    return mu;
}

std::optional<double> nominal_dimension_for(const std::string& measure_path) {
    const std::string meta_path = metadata_path_for(measure_path);
    if (!fs::exists(meta_path)) return std::nullopt;
    return load_measure_metadata(meta_path).nominal_dimension;
}

// ---- generate ----------------------------------------------------------

struct GenerateOptions {
    std::string kind = "cantor";
    double sx = 0.5, sy = 0.5, sr = 0.5;
    int depth = 4;
    std::vector<std::string> maps;
    bool per_axis = false;
    int points_per_axis = 512;
};

IfsSpec parse_ifs(const GenerateOptions& opt) {
    IfsSpec spec;
    spec.depth = opt.depth;
    spec.per_axis = opt.per_axis;
    for (const std::string& text : opt.maps) {
        IfsMap map;
        double v[4];
        const char* p = text.c_str();
        for (int k = 0; k < 4; ++k) {
            char* end = nullptr;
            v[k] = std::strtod(p, &end);
            if (end == p || (k < 3 && *end != ','))
                throw ValidationError("generate: map must be 'ratio,tx,ty,tr', got '" +
                                      text + "'");
            p = end + (k < 3 ? 1 : 0);
        }
        map.ratio = v[0];
        map.translation = {v[1], v[2], v[3]};
        spec.maps.push_back(map);
    }
    return spec;
}

int cmd_generate(const CommonOptions& common, const GenerateOptions& opt) {
    ensure_out_dir(common);
    DiscreteMeasure mu;
    MeasureMetadata meta;
    meta.seed = common.seed;
    if (opt.kind == "cantor") {
        mu = generate_cantor_product(opt.sx, opt.sy, opt.sr, opt.depth, common.seed);
        meta.spec = {{"kind", "cantor"}, {"sx", opt.sx},     {"sy", opt.sy},
                     {"sr", opt.sr},     {"depth", opt.depth}};
        meta.nominal_dimension = opt.sx + opt.sy + opt.sr;
    } else if (opt.kind == "ifs") {
        const IfsSpec spec = parse_ifs(opt);
        mu = generate_ifs(spec, common.seed);
        nlohmann::json maps = nlohmann::json::array();
        for (const IfsMap& m : spec.maps)
            maps.push_back({{"ratio", m.ratio},
                            {"translation", {m.translation.x, m.translation.y,
                                             m.translation.z}}});
        meta.spec = {{"kind", "ifs"},
                     {"maps", maps},
                     {"depth", spec.depth},
                     {"per_axis", spec.per_axis}};
        bool uniform = true;
        for (const IfsMap& m : spec.maps)
            if (m.ratio != spec.maps.front().ratio) uniform = false;
        if (uniform) {
            const double per_axis_dim = std::log(static_cast<double>(spec.maps.size())) /
                                        std::log(1.0 / spec.maps.front().ratio);
            meta.nominal_dimension =
                spec.per_axis ? 3.0 * per_axis_dim : per_axis_dim;
        }
    } else if (opt.kind == "plane") {
        mu = generate_plane_slice(opt.points_per_axis, common.seed);
        meta.spec = {{"kind", "plane"}, {"points_per_axis", opt.points_per_axis}};
        meta.nominal_dimension = 2.0;
    } else {
        throw ValidationError("generate: kind must be cantor, ifs, or plane");
    }
    meta.generation_scale = mu.generation_scale;

    const std::string csv_path = common.path("measure.csv");
    save_measure_csv(mu, csv_path);
    save_measure_metadata(meta, metadata_path_for(csv_path));
    std::printf("wrote %s (%zu points, generation scale %s)\n", csv_path.c_str(),
                mu.size(), format_double(mu.generation_scale).c_str());
    return kExitOk;
}

// ---- sweep --------------------------------------------------------------

struct SweepOptions {
    std::string measure;
    double t = 1.0 / std::sqrt(2.0);
    long theta_count = 256;
    double scale_min = 1.0 / 256.0;
    double scale_max = 1.0 / 8.0;
    double s_nominal = -1.0;  // <0 -> from metadata
};

int cmd_sweep(const CommonOptions& common, const SweepOptions& opt) {
    ensure_out_dir(common);
    const DiscreteMeasure mu = load_measure_checked(opt.measure);
    double s_nominal = opt.s_nominal;
    if (s_nominal < 0.0) {
        const auto nominal = nominal_dimension_for(opt.measure);
        if (!nominal)
            throw ValidationError(
                "sweep: s-nominal not given and not present in measure metadata");
        s_nominal = *nominal;
    }
    log_line(LogLevel::info, "sweep: " + std::to_string(opt.theta_count) +
                                 " angles on " + std::to_string(common.effective_threads()) +
                                 " workers");
    const SweepReport report =
        sweep(mu, PlaneHeight(opt.t), opt.theta_count, opt.scale_min, opt.scale_max,
              s_nominal, common.effective_threads());
    save_sweep_csv(report, common.path("sweep.csv"));
    save_sweep_json(report, common.path("sweep.json"));
    if (common.svg) save_sweep_svg(report, common.path("sweep.svg"));
    std::printf("sweep: %zu angles, median dim %s, bounds tangency=%s restriction=%s "
                "potential=%s\n",
                report.dims.size(), format_double(report.median()).c_str(),
                format_double(report.bounds.tangency).c_str(),
                format_double(report.bounds.restriction).c_str(),
                format_double(report.bounds.potential).c_str());
    return kExitOk;
}

// ---- multiplicity -------------------------------------------------------

struct MultiplicityOptions {
    std::string measure;
    double t = 1.0 / std::sqrt(2.0);
    double s = -1.0;
    double kappa = 0.05;
    double eta = 0.02;
    std::vector<double> deltas;
    long theta_samples = 0;
    bool per_point_csv = false;
};

int cmd_multiplicity(const CommonOptions& common, const MultiplicityOptions& opt) {
    ensure_out_dir(common);
    const DiscreteMeasure mu = load_measure_checked(opt.measure);
    double s = opt.s;
    if (s < 0.0) {
        const auto nominal = nominal_dimension_for(opt.measure);
        if (!nominal)
            throw ValidationError(
                "multiplicity: s not given and not present in measure metadata");
        s = *nominal;
    }
    std::vector<double> deltas = opt.deltas;
    if (deltas.empty()) deltas = {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0};

    std::vector<HighMultiplicityReport> reports;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        const double delta = deltas[di];
        ExperimentConfig config;
        config.s = s;
        config.kappa = opt.kappa;
        config.eta = opt.eta;
        config.delta = delta;
        config.theta_samples = opt.theta_samples;
        config.t_bands = ExperimentConfig::dyadic_bands(delta);

        const double cell = std::max(2.0 * delta, mu.generation_scale);
        const SpatialIndex index(mu, cell);
        log_line(LogLevel::debug, "index: " + std::to_string(index.occupied_cells()) +
                                      " occupied cells at size " + format_double(cell));
        const HighMultiplicityReport report =
            high_multiplicity_scan(index, PlaneHeight(opt.t), config,
                                   common.effective_threads());
        std::printf("delta %s: Z_mass %s (threshold mass %s, theta samples %ld)\n",
                    format_double(delta).c_str(), format_double(report.z_mass).c_str(),
                    format_double(report.threshold_mass).c_str(),
                    config.effective_theta_samples());

        // covering diagnostic: the banded masses plus the short-range ball
        // dominate the plain tube mass at a sample point
        const Point3& z0 = mu.points.front();
        const Angle theta0(0.0);
        const double plain = tube_mass(index, PlaneHeight(opt.t), theta0, z0, delta);
        const double eta3 = std::pow(delta, 1.0 - 3.0 * opt.eta);
        double band_lo = 1.0;
        while (band_lo * 0.5 >= eta3) band_lo *= 0.5;
        double lhs = 0.0;
        for (double tau : config.t_bands)
            if (tau >= band_lo)
                lhs += tube_mass_restricted(index, PlaneHeight(opt.t), theta0, z0, delta,
                                            DistanceBand::annulus(tau));
        double ball_mass = 0.0;
        for (std::size_t i : index.ball(z0.vec3(), 2.0 * band_lo))
            ball_mass += index.weights()[i];
        lhs += ball_mass;
        std::printf("  covering check at sample point: banded %s >= plain %s %s\n",
                    format_double(lhs).c_str(), format_double(plain).c_str(),
                    lhs >= plain - 1e-12 ? "(ok)" : "(VIOLATED)");
        if (lhs < plain - 1e-12) return kExitInvariant;

        if (opt.per_point_csv)
            save_multiplicity_points_csv(
                index, report,
                common.path("multiplicity_points_" + std::to_string(di) + ".csv"));
        reports.push_back(report);
    }
    save_multiplicity_json(reports, common.path("multiplicity.json"));
    return kExitOk;
}

// ---- tangency -----------------------------------------------------------

struct TangencyOptions {
    std::string measure;
    double delta = 1.0 / 64.0;
    std::vector<double> taus;  // empty -> full dyadic ladder [delta, 1]
};

int cmd_tangency(const CommonOptions& common, const TangencyOptions& opt) {
    ensure_out_dir(common);
    const DiscreteMeasure mu = load_measure_checked(opt.measure);
    std::vector<double> taus = opt.taus;
    if (taus.empty()) taus = ExperimentConfig::dyadic_bands(opt.delta);

    const double cell = std::max(2.0 * opt.delta, mu.generation_scale);
    const SpatialIndex index(mu, cell);
    std::vector<TangencyCount> counts;
    for (double tau : taus)
        counts.push_back(
            count_tangent_pairs(index, opt.delta, tau, common.effective_threads()));
    save_tangency_csv(counts, common.path("tangency.csv"));

    // band partition: dyadic bands plus sub-delta pairs tile all pairs with
    // Delta <= 2*delta (only checkable when the full ladder was requested)
    std::uint64_t banded = 0;
    for (const TangencyCount& c : counts) {
        std::printf("tau %s: %llu pairs, mass %s\n", format_double(c.tau).c_str(),
                    static_cast<unsigned long long>(c.pair_count),
                    format_double(c.weighted_mass).c_str());
        banded += c.pair_count;
    }
    if (opt.taus.empty() && mu.size() <= 20000) {
        std::uint64_t close_pairs = 0, all_pairs = 0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            for (std::size_t j = i + 1; j < mu.size(); ++j) {
                if (tangency_level(mu.points[i], mu.points[j]) > 2.0 * opt.delta)
                    continue;
                ++all_pairs;
                if ((mu.points[i].vec3() - mu.points[j].vec3()).norm() < opt.delta)
                    ++close_pairs;
            }
        const bool ok = banded + close_pairs == all_pairs;
        std::printf("band partition: %llu banded + %llu sub-delta = %llu vs %llu total %s\n",
                    static_cast<unsigned long long>(banded),
                    static_cast<unsigned long long>(close_pairs),
                    static_cast<unsigned long long>(banded + close_pairs),
                    static_cast<unsigned long long>(all_pairs), ok ? "(ok)" : "(VIOLATED)");
        if (!ok) return kExitInvariant;
    }
    return kExitOk;
}

// ---- probe3 -------------------------------------------------------------

struct ProbeOptions {
    std::vector<std::string> anchors;
    double delta = 1.0 / 128.0;
    double tau = 0.125;
    double eta = 0.1;
    double grid_step = 0.0;  // 0 -> delta/4
};

Point3 parse_point(const std::string& text) {
    double v[3];
    const char* p = text.c_str();
    for (int k = 0; k < 3; ++k) {
        char* end = nullptr;
        v[k] = std::strtod(p, &end);
        if (end == p || (k < 2 && *end != ','))
            throw ValidationError("probe3: anchor must be 'x1,x2,r', got '" + text + "'");
        p = end + (k < 2 ? 1 : 0);
    }
    return Point3{Vec2{v[0], v[1]}, v[2]};
}

int cmd_probe3(const CommonOptions& common, const ProbeOptions& opt) {
    ensure_out_dir(common);
    if (opt.anchors.size() != 3)
        throw ValidationError("probe3: exactly three --anchor values required");
    const double step = opt.grid_step > 0.0 ? opt.grid_step : opt.delta / 4.0;
    const ThreeCirclesProbe probe = three_circles_probe(
        parse_point(opt.anchors[0]), parse_point(opt.anchors[1]),
        parse_point(opt.anchors[2]), opt.delta, opt.tau, opt.eta, step,
        common.effective_threads());
    save_probe_json(probe, common.path("probe3.json"));
    std::printf("probe3: %zu hits covered by %zu balls of diameter %s\n",
                probe.hits.size(), probe.cover.size(),
                format_double(8.0 * std::pow(opt.delta, 1.0 - 2.0 * opt.eta)).c_str());
    return kExitOk;
}

// ---- bounds -------------------------------------------------------------

struct BoundsOptions {
    double s = -1.0;  // <0 -> grid
    double s_min = 0.0;
    double s_max = 3.0;
    long s_count = 601;
};

int cmd_bounds(const CommonOptions& common, const BoundsOptions& opt) {
    ensure_out_dir(common);
    if (opt.s >= 0.0) {
        const BoundCurves b = theoretical_bounds(opt.s);
        std::printf("s=%s tangency=%s restriction=%s potential=%s\n",
                    format_double(opt.s).c_str(), format_double(b.tangency).c_str(),
                    format_double(b.restriction).c_str(),
                    format_double(b.potential).c_str());
        return kExitOk;
    }
    if (opt.s_count < 2) throw ValidationError("bounds: s-count must be >= 2");
    std::string csv = "s,tangency,restriction,potential\n";
    for (long i = 0; i < opt.s_count; ++i) {
        const double s = opt.s_min + (opt.s_max - opt.s_min) * static_cast<double>(i) /
                                         static_cast<double>(opt.s_count - 1);
        const BoundCurves b = theoretical_bounds(s);
        csv += format_double(s);
        csv += ',';
        csv += format_double(b.tangency);
        csv += ',';
        csv += format_double(b.restriction);
        csv += ',';
        csv += format_double(b.potential);
        csv += '\n';
    }
    write_text_file(common.path("bounds.csv"), csv);
    nlohmann::json j;
    j["curves"] = {"tangency: min{s, 1 + s/3}",
                   "restriction: 3s/4 on [1,2], min{s - 1/2, 2} on [2,3]",
                   "potential: min{s, 1}"};
    j["restriction_below_1"] = "trivial floor min{s, 1}, not part of the restriction estimate";
    write_text_file(common.path("bounds.json"), j.dump(2) + "\n");
    std::printf("wrote %s (%ld rows)\n", common.path("bounds.csv").c_str(), opt.s_count);
    return kExitOk;
}

// ---- verify -------------------------------------------------------------

struct VerifyCmdOptions {
    long samples = 100000;
    long pairs = 10000;
    bool inject_fault = false;
};

int cmd_verify(const CommonOptions& common, const VerifyCmdOptions& opt) {
    VerifyOptions options;
    options.conjugation_samples = opt.samples;
    options.implication_samples = opt.samples;
    options.window_pairs = opt.pairs;
    options.seed = common.seed == 0 ? 1 : common.seed;
    options.inject_fault = opt.inject_fault;
    const VerifyResult result = run_verify(options);
    for (const VerifyCheck& check : result.checks)
        std::printf("%-22s %s  %s\n", check.name.c_str(),
                    check.pass ? "PASS" : "FAIL", check.detail.c_str());
    return result.all_pass ? kExitOk : kExitInvariant;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"restricted projection laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file (sections per command)");

    CommonOptions common;
    app.add_option("--seed", common.seed, "seed for any stochastic step")
        ->capture_default_str();
    app.add_option("--threads", common.threads,
                   "worker count (0 = available parallelism)")
        ->capture_default_str();
    app.add_option("--out", common.out, "output directory")->capture_default_str();
    app.add_flag("--svg", common.svg, "also write an SVG overlay plot where supported");

    GenerateOptions gen;
    CLI::App* generate = app.add_subcommand("generate", "construct a measure file");
    generate->add_option("--kind", gen.kind, "cantor | ifs | plane")
        ->capture_default_str();
    generate->add_option("--sx", gen.sx, "cantor factor exponent")->capture_default_str();
    generate->add_option("--sy", gen.sy, "cantor factor exponent")->capture_default_str();
    generate->add_option("--sr", gen.sr, "cantor factor exponent")->capture_default_str();
    generate->add_option("--depth", gen.depth, "construction depth")->capture_default_str();
    generate->add_option("--map", gen.maps, "ifs map 'ratio,tx,ty,tr' (repeatable)");
    generate->add_flag("--per-axis", gen.per_axis, "run ifs maps per axis (product cloud)");
    generate->add_option("--points-per-axis", gen.points_per_axis,
                         "plane slice lattice size")
        ->capture_default_str();

    SweepOptions swp;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "per-angle projected box dimensions");
    sweep_cmd->add_option("--measure", swp.measure, "measure CSV path")->required();
    sweep_cmd->add_option("--t", swp.t, "plane height")->capture_default_str();
    sweep_cmd->add_option("--theta-count", swp.theta_count, "angles on the grid")
        ->capture_default_str();
    sweep_cmd->add_option("--scale-min", swp.scale_min, "finest dyadic scale")
        ->capture_default_str();
    sweep_cmd->add_option("--scale-max", swp.scale_max, "coarsest dyadic scale")
        ->capture_default_str();
    sweep_cmd->add_option("--s-nominal", swp.s_nominal,
                          "nominal set dimension (default: measure metadata)");

    MultiplicityOptions mult;
    CLI::App* mult_cmd =
        app.add_subcommand("multiplicity", "high-multiplicity mass experiment");
    mult_cmd->add_option("--measure", mult.measure, "measure CSV path")->required();
    mult_cmd->add_option("--t", mult.t, "plane height")->capture_default_str();
    mult_cmd->add_option("--s", mult.s, "Frostman exponent (default: metadata)");
    mult_cmd->add_option("--kappa", mult.kappa, "surplus exponent")->capture_default_str();
    mult_cmd->add_option("--eta", mult.eta, "smallness exponent")->capture_default_str();
    mult_cmd->add_option("--delta", mult.deltas, "scale (repeatable)");
    mult_cmd->add_option("--theta-samples", mult.theta_samples,
                         "angle samples (0 = ceil(64/delta))")
        ->capture_default_str();
    mult_cmd->add_flag("--per-point-csv", mult.per_point_csv, "write per-point h tables");

    TangencyOptions tan;
    CLI::App* tan_cmd = app.add_subcommand("tangency", "banded tangent pair counts");
    tan_cmd->add_option("--measure", tan.measure, "measure CSV path")->required();
    tan_cmd->add_option("--delta", tan.delta, "tangency scale")->capture_default_str();
    tan_cmd->add_option("--tau", tan.taus, "distance band start (repeatable, dyadic)");

    ProbeOptions prb;
    CLI::App* prb_cmd = app.add_subcommand("probe3", "three-circles covering probe");
    prb_cmd->add_option("--anchor", prb.anchors, "anchor 'x1,x2,r' (exactly three)");
    prb_cmd->add_option("--delta", prb.delta, "tangency scale")->capture_default_str();
    prb_cmd->add_option("--tau", prb.tau, "anchor distance floor")->capture_default_str();
    prb_cmd->add_option("--eta", prb.eta, "direction separation exponent")
        ->capture_default_str();
    prb_cmd->add_option("--grid-step", prb.grid_step, "grid step (0 = delta/4)")
        ->capture_default_str();

    BoundsOptions bnd;
    CLI::App* bnd_cmd = app.add_subcommand("bounds", "theoretical bound curves");
    bnd_cmd->add_option("--s", bnd.s, "evaluate at a single dimension");
    bnd_cmd->add_option("--s-min", bnd.s_min, "grid start")->capture_default_str();
    bnd_cmd->add_option("--s-max", bnd.s_max, "grid end")->capture_default_str();
    bnd_cmd->add_option("--s-count", bnd.s_count, "grid size")->capture_default_str();

    VerifyCmdOptions ver;
    CLI::App* ver_cmd = app.add_subcommand("verify", "geometry invariant suite");
    ver_cmd->add_option("--samples", ver.samples, "samples per invariant")
        ->capture_default_str();
    ver_cmd->add_option("--pairs", ver.pairs, "pairs for the window calibration")
        ->capture_default_str();
    ver_cmd->add_flag("--inject-fault", ver.inject_fault,
                      "flip a basis sign to exercise the failure path");

    for (CLI::App* sub :
         {generate, sweep_cmd, mult_cmd, tan_cmd, prb_cmd, bnd_cmd, ver_cmd})
        sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("rpl");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(common, gen);
        if (sweep_cmd->parsed()) return cmd_sweep(common, swp);
        if (mult_cmd->parsed()) return cmd_multiplicity(common, mult);
        if (tan_cmd->parsed()) return cmd_tangency(common, tan);
        if (prb_cmd->parsed()) return cmd_probe3(common, prb);
        if (bnd_cmd->parsed()) return cmd_bounds(common, bnd);
        if (ver_cmd->parsed()) return cmd_verify(common, ver);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const DegenerateConfiguration& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvariant;
    }
    return kExitConfig;
}

int run_command(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

} // namespace rpl
