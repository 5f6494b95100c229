#include "rpl/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rpl {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

void save_measure_csv(const DiscreteMeasure& mu, const std::string& path) {
    std::string out = "x1,x2,r,w\n";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        out += format_double(mu.points[i].x.x);
        out += ',';
        out += format_double(mu.points[i].x.y);
        out += ',';
        out += format_double(mu.points[i].r);
        out += ',';
        out += format_double(mu.weights[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

DiscreteMeasure load_measure_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x1,x2,r,w")
        throw IoError("measure csv: bad header in " + path);
    DiscreteMeasure mu;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[4];
        const char* p = line.c_str();
        for (int k = 0; k < 4; ++k) {
            char* end = nullptr;
            v[k] = std::strtod(p, &end);
            if (end == p) throw IoError("measure csv: bad row in " + path);
            p = end;
            if (k < 3) {
                if (*p != ',') throw IoError("measure csv: bad row in " + path);
                ++p;
            }
        }
        mu.points.emplace_back(Vec2{v[0], v[1]}, v[2]);
        mu.weights.push_back(v[3]);
    }
    return mu;
}

std::string metadata_path_for(const std::string& measure_path) {
    const auto dot = measure_path.rfind(".csv");
    if (dot != std::string::npos && dot == measure_path.size() - 4)
        return measure_path.substr(0, dot) + ".meta.json";
    return measure_path + ".meta.json";
}

void save_measure_metadata(const MeasureMetadata& meta, const std::string& path) {
    json j;
    j["seed"] = meta.seed;
    j["spec"] = meta.spec;
    j["generation_scale"] = meta.generation_scale;
    if (meta.nominal_dimension)
        j["nominal_dimension"] = *meta.nominal_dimension;
    else
        j["nominal_dimension"] = nullptr;
    write_text_file(path, j.dump(2) + "\n");
}

MeasureMetadata load_measure_metadata(const std::string& path) {
    MeasureMetadata meta;
    try {
        const json j = json::parse(read_text_file(path));
        meta.seed = j.at("seed").get<std::uint64_t>();
        meta.spec = j.at("spec");
        meta.generation_scale = j.at("generation_scale").get<double>();
        if (j.contains("nominal_dimension") && !j["nominal_dimension"].is_null())
            meta.nominal_dimension = j["nominal_dimension"].get<double>();
    } catch (const json::exception& e) {
        throw IoError("metadata error in " + path + ": " + e.what());
    }
    return meta;
}

void save_sweep_csv(const SweepReport& report, const std::string& path) {
    std::string out = "theta,dim\n";
    for (std::size_t i = 0; i < report.thetas.size(); ++i) {
        out += format_double(report.thetas[i]);
        out += ',';
        out += format_double(report.dims[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

json sweep_summary_json(const SweepReport& report) {
    json j;
    j["t"] = report.t;
    j["theta_count"] = report.thetas.size();
    j["scale_min"] = report.scale_min;
    j["scale_max"] = report.scale_max;
    j["s_nominal"] = report.s_nominal;
    j["bounds"] = {{"tangency", report.bounds.tangency},
                   {"restriction", report.bounds.restriction},
                   {"potential", report.bounds.potential}};
    j["percentiles"] = {{"p05", report.percentiles.p05}, {"p10", report.percentiles.p10},
                        {"p25", report.percentiles.p25}, {"p50", report.percentiles.p50},
                        {"p75", report.percentiles.p75}, {"p90", report.percentiles.p90},
                        {"p95", report.percentiles.p95}};
    return j;
}

void save_sweep_json(const SweepReport& report, const std::string& path) {
    write_text_file(path, sweep_summary_json(report).dump(2) + "\n");
}

namespace {

double svg_x(double theta, double width) { return 60.0 + theta / kTwoPi * (width - 90.0); }
double svg_y(double dim, double height) {
    return (height - 40.0) - dim / 2.0 * (height - 70.0);
}

void svg_hline(std::string& out, double value, const char* color, const char* label,
               double width, double height) {
    const double y = svg_y(value, height);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1='60' y1='%.2f' x2='%.2f' y2='%.2f' stroke='%s' "
                  "stroke-dasharray='6,4'/>\n"
                  "<text x='%.2f' y='%.2f' font-size='11' fill='%s'>%s</text>\n",
                  y, width - 30.0, y, color, width - 28.0, y + 4.0, color, label);
    out += buf;
}

} // namespace

void save_sweep_svg(const SweepReport& report, const std::string& path) {
    const double width = 880.0, height = 420.0;
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns='http://www.w3.org/2000/svg' width='%g' height='%g' "
                  "viewBox='0 0 %g %g'>\n",
                  width, height, width, height);
    out += buf;
    out += "<rect width='100%' height='100%' fill='white'/>\n";
    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1='60' y1='30' x2='60' y2='%.2f' stroke='black'/>\n"
                  "<line x1='60' y1='%.2f' x2='%.2f' y2='%.2f' stroke='black'/>\n",
                  height - 40.0, height - 40.0, width - 30.0, height - 40.0);
    out += buf;
    for (int k = 0; k <= 4; ++k) {
        const double dim = 0.5 * k;
        std::snprintf(buf, sizeof(buf),
                      "<text x='28' y='%.2f' font-size='11'>%.1f</text>\n",
                      svg_y(dim, height) + 4.0, dim);
        out += buf;
    }
    const char* xlabels[5] = {"0", "pi/2", "pi", "3pi/2", "2pi"};
    for (int k = 0; k <= 4; ++k) {
        std::snprintf(buf, sizeof(buf),
                      "<text x='%.2f' y='%.2f' font-size='11'>%s</text>\n",
                      svg_x(kTwoPi * k / 4.0, width) - 8.0, height - 22.0, xlabels[k]);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x='60' y='20' font-size='12'>projected dimension vs angle "
                  "(s_nominal=%.4g, t=%.6g)</text>\n",
                  report.s_nominal, report.t);
    out += buf;

    svg_hline(out, report.bounds.tangency, "#c02020", "tangency", width, height);
    svg_hline(out, report.bounds.restriction, "#2060c0", "restriction", width, height);
    svg_hline(out, report.bounds.potential, "#208040", "potential", width, height);

    out += "<polyline fill='none' stroke='black' stroke-width='1' points='";
    for (std::size_t i = 0; i < report.thetas.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", svg_x(report.thetas[i], width),
                      svg_y(report.dims[i], height));
        out += buf;
    }
    out += "'/>\n</svg>\n";
    write_text_file(path, out);
}

json multiplicity_report_json(const HighMultiplicityReport& report) {
    json cfg;
    cfg["s"] = report.config.s;
    cfg["kappa"] = report.config.kappa;
    cfg["eta"] = report.config.eta;
    cfg["delta"] = report.config.delta;
    cfg["theta_samples"] = report.config.effective_theta_samples();
    cfg["t_bands"] = report.config.t_bands;

    // 64 equal bins over [0, 1]; h = 1 lands in the last bin
    std::vector<std::uint64_t> histogram(64, 0);
    for (double h : report.h) {
        auto bin = static_cast<std::size_t>(h * 64.0);
        if (bin >= 64) bin = 63;
        ++histogram[bin];
    }

    json j;
    j["config"] = cfg;
    j["Z_mass"] = report.z_mass;
    j["threshold_mass"] = report.threshold_mass;
    j["threshold_fraction"] = report.threshold_fraction;
    j["histogram"] = {{"bins", 64}, {"counts", histogram}};
    return j;
}

void save_multiplicity_json(const std::vector<HighMultiplicityReport>& reports,
                            const std::string& path) {
    json j = json::array();
    for (const auto& r : reports) j.push_back(multiplicity_report_json(r));
    write_text_file(path, j.dump(2) + "\n");
}

void save_multiplicity_points_csv(const SpatialIndex& index,
                                  const HighMultiplicityReport& report,
                                  const std::string& path) {
    std::string out = "x1,x2,r,w,h\n";
    for (std::size_t i = 0; i < index.size(); ++i) {
        const Point3& p = index.points()[i];
        out += format_double(p.x.x);
        out += ',';
        out += format_double(p.x.y);
        out += ',';
        out += format_double(p.r);
        out += ',';
        out += format_double(index.weights()[i]);
        out += ',';
        out += format_double(report.h[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void save_tangency_csv(const std::vector<TangencyCount>& counts,
                       const std::string& path) {
    std::string out = "delta,tau,pairs,mass\n";
    for (const TangencyCount& c : counts) {
        out += format_double(c.delta);
        out += ',';
        out += format_double(c.tau);
        out += ',';
        out += std::to_string(c.pair_count);
        out += ',';
        out += format_double(c.weighted_mass);
        out += '\n';
    }
    write_text_file(path, out);
}

json probe_json(const ThreeCirclesProbe& probe) {
    json j;
    j["anchors"] = json::array();
    for (const Point3& a : probe.anchors)
        j["anchors"].push_back({a.x.x, a.x.y, a.r});
    j["delta"] = probe.delta;
    j["tau"] = probe.tau;
    j["eta"] = probe.eta;
    j["grid_step"] = probe.grid_step;
    j["hit_count"] = probe.hits.size();
    j["cover"] = json::array();
    for (const CoverBall& ball : probe.cover)
        j["cover"].push_back({{"center", {ball.center.x.x, ball.center.x.y, ball.center.r}},
                              {"diameter", ball.diameter}});
    return j;
}

void save_probe_json(const ThreeCirclesProbe& probe, const std::string& path) {
    write_text_file(path, probe_json(probe).dump(2) + "\n");
}

} // namespace rpl
