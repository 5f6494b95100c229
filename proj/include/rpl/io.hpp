#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpl/dimension.hpp"
#include "rpl/fractal.hpp"
#include "rpl/multiplicity.hpp"
#include "rpl/tangency.hpp"

namespace rpl {

// All floating-point output is serialized with 17 significant digits so files
// round-trip to the exact doubles.
std::string format_double(double x);

struct MeasureMetadata {
    std::uint64_t seed = 0;
    nlohmann::json spec;  // generator record: {"kind": ..., parameters...}
    double generation_scale = 0.0;
    std::optional<double> nominal_dimension;
};

// CSV with header x1,x2,r,w plus a sidecar JSON metadata record.
void save_measure_csv(const DiscreteMeasure& mu, const std::string& path);
DiscreteMeasure load_measure_csv(const std::string& path);
void save_measure_metadata(const MeasureMetadata& meta, const std::string& path);
MeasureMetadata load_measure_metadata(const std::string& path);
// sidecar path convention: foo.csv -> foo.meta.json
std::string metadata_path_for(const std::string& measure_path);

// SweepReport: CSV theta,dim plus a JSON summary.
void save_sweep_csv(const SweepReport& report, const std::string& path);
nlohmann::json sweep_summary_json(const SweepReport& report);
void save_sweep_json(const SweepReport& report, const std::string& path);
void save_sweep_svg(const SweepReport& report, const std::string& path);

// HighMultiplicityReport: JSON {config, Z_mass, 64-bin histogram of h};
// optional per-point CSV x1,x2,r,w,h.
nlohmann::json multiplicity_report_json(const HighMultiplicityReport& report);
void save_multiplicity_json(const std::vector<HighMultiplicityReport>& reports,
                            const std::string& path);
void save_multiplicity_points_csv(const SpatialIndex& index,
                                  const HighMultiplicityReport& report,
                                  const std::string& path);

// TangencyCount table: CSV delta,tau,pairs,mass.
void save_tangency_csv(const std::vector<TangencyCount>& counts,
                       const std::string& path);

// Probe output: JSON cover list.
nlohmann::json probe_json(const ThreeCirclesProbe& probe);
void save_probe_json(const ThreeCirclesProbe& probe, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace rpl
