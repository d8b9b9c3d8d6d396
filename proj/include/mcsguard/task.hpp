#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mcsguard {

using Rng = std::mt19937_64;

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// One submitted crowdsensing task. `legitimacy` is 1 for legitimate
/// tasks and 0 for fake ones; it is the label, everything else except
/// `id` and `day` is a candidate feature.
struct TaskRecord {
    std::int64_t id = 0;
    int day = 1;           // campaign day, 1-based
    int hour = 0;          // 0..23
    int minute = 0;        // 0..59
    int duration_min = 10; // one of {10,20,30,40,50,60}
    int battery_pct = 1;   // required battery share, 1..10
    double latitude = 0.0;
    double longitude = 0.0;
    std::int64_t grid_number = 0; // row-major cell index, see assign_grid
    int on_peak = 0;              // 1 iff hour in [7,11]
    int coverage_m = 50;          // sensing radius, one of {50,100,150,200}
    int legitimacy = 1;

    bool operator==(const TaskRecord&) const = default;
};

struct BoundingBox {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

/// Circular fake-task submission zone.
struct AttackZone {
    double center_lat = 0.0;
    double center_lon = 0.0;
    double radius_m = 200.0;
};

struct GenerationConfig {
    std::int64_t total_tasks = 14306;
    double fake_fraction = 1779.0 / 14306.0;
    int num_days = 6;
    BoundingBox bounding_box; // default: ~10 km square, see default_generation_config()
    double grid_cell_m = 1000.0;
    std::vector<AttackZone> attack_zones;
    std::uint64_t rng_seed = 1;
};

/// Square box of side `side_m` meters centered on (lat, lon).
BoundingBox square_bounding_box(double center_lat, double center_lon, double side_m);

/// Defaults: 14306 tasks over 6 days in a ~10 km square around Timmins,
/// ON (48.4758, -81.3305), three 200 m attack zones, 1 km grid cells.
GenerationConfig default_generation_config();

/// Throws ConfigError when any invariant is violated (non-positive task
/// count, degenerate box, fake_fraction outside (0,1), missing or
/// out-of-box attack zones, ...).
void validate(const GenerationConfig& config);

enum class DatasetOrigin { generated, loaded };

/// Chronologically ordered campaign; record ids are unique.
struct Dataset {
    std::vector<TaskRecord> records;
    DatasetOrigin origin = DatasetOrigin::generated;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

}  // namespace mcsguard
