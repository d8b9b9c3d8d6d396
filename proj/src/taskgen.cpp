#include "mcsguard/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "mcsguard/errors.hpp"

namespace mcsguard {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMetersPerDegLat = kEarthRadiusM * kPi / 180.0;
constexpr double kCoordStep = 1e-6; // CSV precision: 6 decimal places

double deg2rad(double deg) { return deg * kPi / 180.0; }

double meters_per_deg_lon(double at_latitude) {
    return kMetersPerDegLat * std::cos(deg2rad(at_latitude));
}

int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return uniform_real(rng, 0.0, 1.0) < p; }

/// Round to 6 decimals and nudge back inside [lo, hi] when rounding
/// crossed a bound. The nudge is one coordinate step, so the result
/// still prints exactly.
double quantize_into(double value, double lo, double hi) {
    double q = std::round(value * 1e6) / 1e6;
    if (q < lo) q += kCoordStep;
    if (q > hi) q -= kCoordStep;
    return q;
}

std::tuple<int, int, int> chrono_key(const TaskRecord& r) {
    return {r.day, r.hour, r.minute};
}

}  // namespace

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = deg2rad(lat1);
    const double phi2 = deg2rad(lat2);
    const double dphi = deg2rad(lat2 - lat1);
    const double dlambda = deg2rad(lon2 - lon1);
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

BoundingBox square_bounding_box(double center_lat, double center_lon, double side_m) {
    const double half = side_m / 2.0;
    const double dlat = half / kMetersPerDegLat;
    const double dlon = half / meters_per_deg_lon(center_lat);
    return {center_lat - dlat, center_lat + dlat, center_lon - dlon, center_lon + dlon};
}

GenerationConfig default_generation_config() {
    GenerationConfig config;
    const double center_lat = 48.4758;
    const double center_lon = -81.3305;
    config.bounding_box = square_bounding_box(center_lat, center_lon, 10'000.0);
    const double mlon = meters_per_deg_lon(center_lat);
    // Three fixed zones; offsets in meters north/east of the box center.
    const double offsets[3][2] = {{2000.0, 2500.0}, {-2800.0, -1500.0}, {500.0, -3200.0}};
    for (const auto& [north, east] : offsets) {
        config.attack_zones.push_back(
            {center_lat + north / kMetersPerDegLat, center_lon + east / mlon, 200.0});
    }
    return config;
}

void validate(const GenerationConfig& config) {
    if (config.total_tasks <= 0) throw ConfigError("total_tasks must be positive");
    if (!(config.fake_fraction > 0.0 && config.fake_fraction < 1.0))
        throw ConfigError("fake_fraction must lie strictly between 0 and 1");
    if (config.num_days < 1) throw ConfigError("num_days must be at least 1");
    const BoundingBox& box = config.bounding_box;
    if (!(box.lat_max - box.lat_min > 1e-5) || !(box.lon_max - box.lon_min > 1e-5))
        throw ConfigError("bounding box is degenerate");
    if (config.grid_cell_m <= 0.0) throw ConfigError("grid_cell_m must be positive");
    if (config.attack_zones.empty())
        throw ConfigError("fake_fraction > 0 requires at least one attack zone");
    for (std::size_t i = 0; i < config.attack_zones.size(); ++i) {
        const AttackZone& zone = config.attack_zones[i];
        if (zone.radius_m <= 0.0)
            throw ConfigError("attack zone " + std::to_string(i) + " has non-positive radius");
        // Whole disk (plus one quantization step of slack) must fit in the box.
        const double margin_lat = (zone.radius_m + 1.0) / kMetersPerDegLat;
        const double margin_lon = (zone.radius_m + 1.0) / meters_per_deg_lon(zone.center_lat);
        if (zone.center_lat - margin_lat < box.lat_min || zone.center_lat + margin_lat > box.lat_max ||
            zone.center_lon - margin_lon < box.lon_min || zone.center_lon + margin_lon > box.lon_max)
            throw ConfigError("attack zone " + std::to_string(i) + " extends outside the bounding box");
    }
}

GridSpec make_grid_spec(const BoundingBox& box, double cell_m) {
    if (cell_m <= 0.0) throw DomainError("grid cell size must be positive");
    GridSpec grid;
    grid.lat_min = box.lat_min;
    grid.lon_min = box.lon_min;
    grid.cell_m = cell_m;
    grid.m_per_deg_lat = kMetersPerDegLat;
    grid.m_per_deg_lon = meters_per_deg_lon((box.lat_min + box.lat_max) / 2.0);
    const double height_m = (box.lat_max - box.lat_min) * grid.m_per_deg_lat;
    const double width_m = (box.lon_max - box.lon_min) * grid.m_per_deg_lon;
    // Small slack keeps an exact multiple of cell_m from gaining a sliver row.
    grid.rows = std::max(1L, static_cast<long>(std::ceil(height_m / cell_m - 1e-9)));
    grid.cols = std::max(1L, static_cast<long>(std::ceil(width_m / cell_m - 1e-9)));
    return grid;
}

std::int64_t assign_grid(double latitude, double longitude, const GridSpec& grid) {
    long row = static_cast<long>(std::floor((latitude - grid.lat_min) * grid.m_per_deg_lat / grid.cell_m));
    long col = static_cast<long>(std::floor((longitude - grid.lon_min) * grid.m_per_deg_lon / grid.cell_m));
    row = std::clamp(row, 0L, grid.rows - 1);
    col = std::clamp(col, 0L, grid.cols - 1);
    return static_cast<std::int64_t>(row) * grid.cols + col;
}

std::int64_t assign_grid(double latitude, double longitude, const GenerationConfig& config) {
    if (!config.bounding_box.contains(latitude, longitude))
        throw DomainError("coordinates outside the bounding box");
    return assign_grid(latitude, longitude, make_grid_spec(config.bounding_box, config.grid_cell_m));
}

int compute_on_peak(int hour) { return (hour >= 7 && hour <= 11) ? 1 : 0; }

TaskRecord sample_legitimate_task(Rng& rng, const GenerationConfig& config) {
    const BoundingBox& box = config.bounding_box;
    TaskRecord rec;
    rec.day = uniform_int(rng, 1, config.num_days);
    rec.hour = chance(rng, 0.08) ? uniform_int(rng, 0, 5) : uniform_int(rng, 6, 23);
    rec.minute = uniform_int(rng, 0, 59);
    rec.duration_min = 10 * uniform_int(rng, 1, 6);
    rec.battery_pct = uniform_int(rng, 1, 10);
    rec.latitude = quantize_into(uniform_real(rng, box.lat_min, box.lat_max), box.lat_min, box.lat_max);
    rec.longitude = quantize_into(uniform_real(rng, box.lon_min, box.lon_max), box.lon_min, box.lon_max);
    rec.coverage_m = 50 * uniform_int(rng, 1, 4);
    rec.grid_number = assign_grid(rec.latitude, rec.longitude, config);
    rec.on_peak = compute_on_peak(rec.hour);
    rec.legitimacy = 1;
    return rec;
}

TaskRecord sample_fake_task(Rng& rng, const GenerationConfig& config) {
    if (config.attack_zones.empty()) throw ConfigError("sample_fake_task requires an attack zone");
    const BoundingBox& box = config.bounding_box;
    TaskRecord rec;
    rec.day = uniform_int(rng, 1, config.num_days);
    rec.hour = chance(rng, 0.80) ? uniform_int(rng, 7, 11) : uniform_int(rng, 12, 17);
    rec.minute = uniform_int(rng, 0, 59);
    rec.duration_min = chance(rng, 0.70) ? 10 * uniform_int(rng, 4, 6) : 10 * uniform_int(rng, 1, 3);
    rec.battery_pct = chance(rng, 0.80) ? uniform_int(rng, 7, 10) : uniform_int(rng, 1, 6);
    const AttackZone& zone =
        config.attack_zones[uniform_int(rng, 0, static_cast<int>(config.attack_zones.size()) - 1)];
    const double mlon = meters_per_deg_lon(zone.center_lat);
    // Uniform in the disk; resample on the rare quantization/spherical
    // overshoot so the radius bound holds exactly.
    do {
        const double r = zone.radius_m * std::sqrt(uniform_real(rng, 0.0, 1.0));
        const double theta = uniform_real(rng, 0.0, 2.0 * kPi);
        const double lat = zone.center_lat + r * std::cos(theta) / kMetersPerDegLat;
        const double lon = zone.center_lon + r * std::sin(theta) / mlon;
        rec.latitude = quantize_into(lat, box.lat_min, box.lat_max);
        rec.longitude = quantize_into(lon, box.lon_min, box.lon_max);
    } while (haversine_m(zone.center_lat, zone.center_lon, rec.latitude, rec.longitude) > zone.radius_m);
    rec.coverage_m = 50 * uniform_int(rng, 1, 4);
    rec.grid_number = assign_grid(rec.latitude, rec.longitude, config);
    rec.on_peak = compute_on_peak(rec.hour);
    rec.legitimacy = 0;
    return rec;
}

Dataset generate_campaign(const GenerationConfig& config) {
    validate(config);
    const std::int64_t n_fake = std::llround(static_cast<double>(config.total_tasks) * config.fake_fraction);
    const std::int64_t n_legit = config.total_tasks - n_fake;

    Rng rng(config.rng_seed);
    Dataset dataset;
    dataset.origin = DatasetOrigin::generated;
    dataset.records.reserve(static_cast<std::size_t>(config.total_tasks));
    for (std::int64_t i = 0; i < n_fake; ++i) dataset.records.push_back(sample_fake_task(rng, config));
    for (std::int64_t i = 0; i < n_legit; ++i)
        dataset.records.push_back(sample_legitimate_task(rng, config));

    std::stable_sort(dataset.records.begin(), dataset.records.end(),
                     [](const TaskRecord& a, const TaskRecord& b) { return chrono_key(a) < chrono_key(b); });
    std::int64_t next_id = 1;
    for (TaskRecord& rec : dataset.records) rec.id = next_id++;
    return dataset;
}

std::pair<Dataset, Dataset> split_temporal(const Dataset& dataset, double train_fraction) {
    if (dataset.empty()) throw DomainError("cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DomainError("train_fraction must lie strictly between 0 and 1");
    if (!std::is_sorted(dataset.records.begin(), dataset.records.end(),
                        [](const TaskRecord& a, const TaskRecord& b) { return chrono_key(a) < chrono_key(b); }))
        throw DomainError("dataset must be chronologically sorted");

    const std::size_t n = dataset.size();
    const auto n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    Dataset train{{dataset.records.begin(), dataset.records.begin() + static_cast<std::ptrdiff_t>(n_train)},
                  dataset.origin};
    Dataset test{{dataset.records.begin() + static_cast<std::ptrdiff_t>(n_train), dataset.records.end()},
                 dataset.origin};
    return {std::move(train), std::move(test)};
}

}  // namespace mcsguard
