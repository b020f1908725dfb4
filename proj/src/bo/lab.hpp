#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "grid.hpp"
#include "monitors.hpp"

namespace bo {

// Deterministic normal/uniform source (Box-Muller over mt19937_64), so
// runs reproduce bit-exactly for a fixed seed on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();  // (0, 1]
    double normal();

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Flat key = value configuration. Every tunable in the experiment layer has
// an entry in the default table; unknown keys are rejected at parse time.
class ExperimentConfig {
  public:
    // defaults for the given experiment tag
    static ExperimentConfig defaults(const std::string& experiment);
    static const std::map<std::string, std::string>& default_table();

    void load_file(const std::filesystem::path& p);
    void set(const std::string& key, const std::string& value);  // rejects unknown keys

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;  // comma separated

    const std::map<std::string, std::string>& entries() const { return values_; }
    const std::set<std::string>& touched() const { return touched_; }

  private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> touched_;
};

StepperConfig stepper_from_config(const ExperimentConfig& cfg);
Grid grid_from_config(const ExperimentConfig& cfg);

// band-limited, enveloped, H^{1/2}-normalized perturbation per config
Field make_perturbation(const ExperimentConfig& cfg, const Grid& g, std::uint64_t seed);

// field file: 32-byte text header ("BOF1", n, length) + n little-endian
// float64 samples; round-trips bit-exactly
void serialize_field(const Field& f, const std::filesystem::path& p);
Field deserialize_field(const std::filesystem::path& p);

// one JSON record {"t": ..., "label": ..., "value": ...} per line, plus a
// CSV mirror alongside
void emit_metrics(const std::vector<MonitorSeries>& series, const std::filesystem::path& path);

// pairwise monotonicity records: {"label", "t1", "t2", "lhs", "rhs",
// "margin", "params": {x0, lambda, A}}; appends one line per pair
void emit_pair_report(const MonotonicityReport& rep, const std::string& label,
                      const std::filesystem::path& path, bool append);

struct RunManifest {
    std::string experiment;
    std::string outcome;  // ok | tube_exit | blowup
    std::map<std::string, std::string> config;
    std::string code_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum
    std::map<std::string, double> summary;

    void write(const std::filesystem::path& dir) const;  // atomic manifest.json
};

RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

std::uint64_t fnv1a64_file(const std::filesystem::path& p);

}  // namespace bo
