#pragma once

#include <utility>

#include "mcsguard/task.hpp"

namespace mcsguard {

/// Great-circle distance in meters on a spherical Earth.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

/// Fixed-size geographic grid over a bounding box. Rows run south to
/// north, columns west to east; cell edges are `cell_m` meters long
/// (latitude scaled at the box mid-latitude).
struct GridSpec {
    long rows = 1;
    long cols = 1;
    double lat_min = 0.0;
    double lon_min = 0.0;
    double m_per_deg_lat = 0.0;
    double m_per_deg_lon = 0.0;
    double cell_m = 0.0;
};

GridSpec make_grid_spec(const BoundingBox& box, double cell_m);

/// Row-major index of the grid cell containing the point. Points on the
/// far edges fall into the last row/column. Throws DomainError for
/// coordinates outside the box.
std::int64_t assign_grid(double latitude, double longitude, const GridSpec& grid);
std::int64_t assign_grid(double latitude, double longitude, const GenerationConfig& config);

/// 1 iff hour lies in the busy 7am-11am window (both ends inclusive).
int compute_on_peak(int hour);

/// Draw one legitimate task: hour 0-5 w.p. 0.08 else 6-23, duration
/// uniform over {10..60}, battery uniform 1-10, location uniform in the
/// bounding box.
TaskRecord sample_legitimate_task(Rng& rng, const GenerationConfig& config);

/// Draw one fake task: hour 7-11 w.p. 0.80 else 12-17, duration in
/// {40,50,60} w.p. 0.70 else {10,20,30}, battery 7-10 w.p. 0.80 else
/// 1-6, location uniform inside a uniformly chosen attack zone.
TaskRecord sample_fake_task(Rng& rng, const GenerationConfig& config);

/// Full campaign: round(total_tasks * fake_fraction) fake tasks, the
/// rest legitimate, sorted by (day, hour, minute) with ids 1..n assigned
/// in chronological order. Coordinates are quantized to 6 decimal places
/// so a written CSV reproduces the in-memory dataset exactly.
/// Deterministic for a fixed rng_seed.
Dataset generate_campaign(const GenerationConfig& config);

/// First floor(n * train_fraction) records and the remainder. The input
/// must be non-empty and chronologically sorted; no shuffling happens.
std::pair<Dataset, Dataset> split_temporal(const Dataset& dataset, double train_fraction);

}  // namespace mcsguard
