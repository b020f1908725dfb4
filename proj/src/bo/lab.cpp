#include "lab.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "linops.hpp"
#include "modulation.hpp"
#include "spectral.hpp"

namespace bo {

namespace fsys = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- Rng ----

double Rng::uniform() {
    // 53 uniform bits mapped into (0, 1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

// ------------------------------------------------------------- config ----

const std::map<std::string, std::string>& ExperimentConfig::default_table() {
    static const std::map<std::string, std::string> table = {
        {"experiment", "soliton_translate"},
        {"grid.n", "4096"},
        {"grid.length", "400"},
        {"stepper.dt", "0.001"},
        {"stepper.scheme", "etd_rk4"},
        {"stepper.dealias", "true"},
        {"stepper.frame_speed", "0"},
        {"horizon", "10"},
        {"cadence", "0.25"},
        {"seed", "1"},
        {"perturbation.kind", "none"},
        {"perturbation.amplitude", "0.01"},
        {"perturbation.kmin", "0.5"},
        {"perturbation.kmax", "1.5"},
        {"perturbation.center", "0"},
        {"perturbation.envelope_width", "15"},
        {"perturbation.orthogonalize", "false"},
        {"soliton.c", "1"},
        {"soliton.x0", "0"},
        {"weight.A", "20"},
        {"weight.lambda", "0.5"},
        {"weight.x0_list", "5,10,20"},
        {"cplus.A", "5"},
        {"multisoliton.min_gap", "20"},
        {"monotonicity.stride", "4"},
        {"spectrum.n_lowest", "6"},
        {"traversal.eps_list", "0.01,0.1"},
        {"identity.n", "262144"},
        {"identity.length", "20000"},
        {"hilbert_lock.n", "6291456"},
        {"hilbert_lock.length", "1200000"},
        {"kernel.n", "32768"},
        {"kernel.length", "4000"},
        {"kernel.quad_points", "512"},
    };
    return table;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.values_ = default_table();
    cfg.values_["experiment"] = experiment;
    if (experiment == "stability" || experiment == "asymptotic" ||
        experiment == "monotonicity_sweep") {
        cfg.values_["horizon"] = "50";
        cfg.values_["perturbation.kind"] = "random_bandlimited";
    } else if (experiment == "multisoliton") {
        cfg.values_["grid.n"] = "8192";
        cfg.values_["grid.length"] = "800";
        cfg.values_["horizon"] = "40";
        cfg.values_["cadence"] = "0.5";
        cfg.values_["soliton.c"] = "1,2";
        cfg.values_["soliton.x0"] = "-80,20";
        cfg.values_["perturbation.kind"] = "random_bandlimited";
        cfg.values_["perturbation.kmin"] = "0.8";
        cfg.values_["perturbation.kmax"] = "1.4";
        cfg.values_["perturbation.center"] = "35";
        cfg.values_["perturbation.envelope_width"] = "10";
    } else if (experiment == "spectrum") {
        cfg.values_["grid.n"] = "2048";
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (default_table().find(key) == default_table().end())
        throw std::invalid_argument("config: unknown key '" + key + "'");
    values_[key] = value;
}

void ExperimentConfig::load_file(const fsys::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("config: cannot open " + p.string());
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) set(key, value);
    }
}

std::string ExperimentConfig::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("config: missing key '" + key + "'");
    touched_.insert(key);
    return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
    return std::stod(get_string(key));
}

std::int64_t ExperimentConfig::get_int(const std::string& key) const {
    return std::stoll(get_string(key));
}

bool ExperimentConfig::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "'");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

StepperConfig stepper_from_config(const ExperimentConfig& cfg) {
    StepperConfig sc;
    sc.dt = cfg.get_double("stepper.dt");
    const std::string scheme = cfg.get_string("stepper.scheme");
    if (scheme == "etd_rk4")
        sc.scheme = Scheme::etd_rk4;
    else if (scheme == "if_rk4")
        sc.scheme = Scheme::if_rk4;
    else
        throw std::invalid_argument("config: unknown scheme " + scheme);
    sc.dealias = cfg.get_bool("stepper.dealias");
    sc.frame_speed = cfg.get_double("stepper.frame_speed");
    return sc;
}

Grid grid_from_config(const ExperimentConfig& cfg) {
    return make_grid(cfg.get_int("grid.n"), cfg.get_double("grid.length"));
}

// ------------------------------------------------------- perturbation ----

namespace {

Field band_project(const Field& f, double kmin, double kmax) {
    Spectrum s = to_spectrum(f);
    for (std::int64_t j = 0; j < f.grid.num_modes(); ++j) {
        const double k = f.grid.wavenumber(j);
        if (k < kmin || k > kmax) s.c[static_cast<std::size_t>(j)] = 0.0;
    }
    return to_field(s);
}

}  // namespace

Field make_perturbation(const ExperimentConfig& cfg, const Grid& g, std::uint64_t seed) {
    const std::string kind = cfg.get_string("perturbation.kind");
    const double alpha = cfg.get_double("perturbation.amplitude");
    const double center = cfg.get_double("perturbation.center");
    const double width = cfg.get_double("perturbation.envelope_width");
    if (kind == "none" || alpha == 0.0) return zeros(g);

    Field p(g);
    if (kind == "even_bump") {
        p = sample(g, [&](double x) {
            const double t = (x - center) / width;
            return std::exp(-t * t);
        });
    } else if (kind == "odd_bump") {
        p = sample(g, [&](double x) {
            const double t = (x - center) / width;
            return t * std::exp(-t * t);
        });
    } else if (kind == "random_bandlimited") {
        const double kmin = cfg.get_double("perturbation.kmin");
        const double kmax = cfg.get_double("perturbation.kmax");
        Rng rng(seed);
        Spectrum s(g);
        for (std::int64_t j = 1; j + 1 < g.num_modes(); ++j) {
            const double k = g.wavenumber(j);
            if (k < kmin || k > kmax) continue;
            s.c[static_cast<std::size_t>(j)] = {rng.normal(), rng.normal()};
        }
        p = to_field(s);
        Field env = sample(g, [&](double x) {
            const double t = (x - center) / width;
            return std::exp(-t * t);
        });
        // localize, then restore the band (twice: envelope re-broadens it)
        p = band_project(p * env, kmin, kmax);
        p = band_project(p * env, kmin, kmax);
    } else {
        throw std::invalid_argument("config: unknown perturbation kind " + kind);
    }

    if (cfg.get_bool("perturbation.orthogonalize")) {
        const double c0 = cfg.get_list("soliton.c").at(0);
        const double x0 = cfg.get_list("soliton.x0").at(0);
        Field qp = soliton_derivative(SolitonParams{c0, x0}, g);
        p = p - (inner(p, qp) / inner(qp, qp)) * qp;
    }
    const double nrm = sobolev_norm(p, 0.5);
    if (nrm == 0.0) throw std::runtime_error("perturbation: empty band");
    return (alpha / nrm) * p;
}

// ------------------------------------------------------- serialization ----

void serialize_field(const Field& f, const fsys::path& p) {
    static_assert(std::endian::native == std::endian::little,
                  "field files are little-endian");
    char header[33];
    std::memset(header, ' ', sizeof(header));
    const int written = std::snprintf(header, sizeof(header), "BOF1 %lld %.12g",
                                      static_cast<long long>(f.grid.n), f.grid.length);
    if (written < 0 || written >= 31) throw std::runtime_error("serialize_field: header overflow");
    header[written] = ' ';  // undo snprintf's terminator, pad with blanks
    header[31] = '\n';
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("serialize_field: cannot open " + p.string());
    out.write(header, 32);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("serialize_field: write failed");
}

Field deserialize_field(const fsys::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("deserialize_field: cannot open " + p.string());
    char header[33] = {};
    in.read(header, 32);
    if (!in || std::strncmp(header, "BOF1 ", 5) != 0)
        throw std::runtime_error("deserialize_field: bad header");
    long long n = 0;
    double length = 0.0;
    if (std::sscanf(header + 5, "%lld %lg", &n, &length) != 2)
        throw std::runtime_error("deserialize_field: unparsable header");
    Field f(make_grid(n, length));
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("deserialize_field: truncated payload");
    return f;
}

std::uint64_t fnv1a64_file(const fsys::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_iso() {
    const auto now = std::chrono::system_clock::now();
    const auto tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    return buf;
}

}  // namespace

void emit_metrics(const std::vector<MonitorSeries>& series, const fsys::path& path) {
    std::ofstream jl(path, std::ios::trunc);
    fsys::path csv_path = path;
    csv_path.replace_extension(".csv");
    std::ofstream csv(csv_path, std::ios::trunc);
    csv << "t,label,value\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            json rec = {{"t", s.times[i]}, {"label", s.label}, {"value", s.values[i]}};
            jl << rec.dump() << "\n";
            csv << fmt_double(s.times[i]) << "," << s.label << "," << fmt_double(s.values[i])
                << "\n";
        }
    }
}

void emit_pair_report(const MonotonicityReport& rep, const std::string& label,
                      const fsys::path& path, bool append) {
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    for (const auto& p : rep.pairs) {
        json rec = {{"label", label},
                    {"t1", p.t1},
                    {"t2", p.t2},
                    {"lhs", p.lhs},
                    {"rhs", p.rhs},
                    {"margin", p.rhs - p.lhs},
                    {"params", {{"x0", rep.x0}, {"lambda", rep.lambda}, {"A", rep.weight.A}}}};
        out << rec.dump() << "\n";
    }
}

void RunManifest::write(const fsys::path& dir) const {
    json j;
    j["experiment"] = experiment;
    j["outcome"] = outcome;
    j["code_version"] = code_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["config"] = config;
    json outs = json::array();
    for (const auto& [path, sum] : outputs) outs.push_back({{"path", path}, {"checksum", sum}});
    j["outputs"] = outs;
    j["summary"] = summary;

    const fsys::path tmp = dir / "manifest.json.tmp";
    const fsys::path fin = dir / "manifest.json";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump(2) << "\n";
    }
    fsys::rename(tmp, fin);
}

// ------------------------------------------------------- experiments ----

namespace {

void attach_output(RunManifest& man, const fsys::path& dir, const fsys::path& rel) {
    if (!fsys::exists(dir / rel)) return;
    char sum[20];
    std::snprintf(sum, sizeof(sum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(dir / rel)));
    man.outputs.emplace_back(rel.string(), sum);
}

struct StabilityData {
    Trajectory traj;
    std::vector<double> rho;
    std::vector<Field> eta;
    std::vector<double> eta_l2;
    double c_fit = 1.0;
    bool tube_exit = false;
};

StabilityData run_stability_pipeline(const ExperimentConfig& cfg) {
    const Grid g = grid_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    const double T = cfg.get_double("horizon");
    const double cadence = cfg.get_double("cadence");
    const double c0 = cfg.get_list("soliton.c").at(0);
    const double x0 = cfg.get_list("soliton.x0").at(0);
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));

    Field u0 = soliton(SolitonParams{c0, x0}, g) + make_perturbation(cfg, g, seed);

    StabilityData data;
    data.traj = run(u0, T, sc, cadence);

    // scale fitted once at t = 0; translation fitted at every sample
    double pred = x0;
    try {
        ModulationState init =
            fit_scale_translation(u0, inner(u0, u0) / closed_form_integrals().int_Q2, x0);
        data.c_fit = init.c;
        pred = init.rho;
    } catch (const modulation_error&) {
        data.tube_exit = true;
        data.traj.times.clear();
        data.traj.snapshots.clear();
        data.traj.invariant_series.clear();
        return data;
    }
    for (std::size_t i = 0; i < data.traj.times.size(); ++i) {
        try {
            ModulationState st = fit_translation(data.traj.snapshots[i], data.c_fit, pred);
            data.rho.push_back(st.rho);
            data.eta_l2.push_back(l2_norm(st.eta));
            data.eta.push_back(std::move(st.eta));
            pred = data.rho.back() + (data.c_fit - sc.frame_speed) * cadence;
            data.traj.modulation_series.push_back(
                {data.rho.back(), data.c_fit, data.eta_l2.back()});
        } catch (const modulation_error&) {
            data.tube_exit = true;
            data.traj.times.resize(i);
            data.traj.snapshots.resize(i);
            data.traj.invariant_series.resize(i);
            break;
        }
    }
    return data;
}

void experiment_soliton_translate(const ExperimentConfig& cfg, const fsys::path& dir,
                                  RunManifest& man) {
    const Grid g = grid_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    const double T = cfg.get_double("horizon");
    const double cadence = cfg.get_double("cadence");
    const double c0 = cfg.get_list("soliton.c").at(0);
    const double x0 = cfg.get_list("soliton.x0").at(0);

    Field u0 = soliton(SolitonParams{c0, x0}, g);
    Trajectory traj = run(u0, T, sc, cadence);
    man.outcome = traj.aborted ? "blowup" : "ok";

    const double travel = (c0 - sc.frame_speed) * traj.horizon();
    Field ref = translate(u0, -travel);
    const double err = l2_norm(traj.snapshots.back() - ref) / l2_norm(u0);
    const auto [m0, e0] = traj.invariant_series.front();
    const auto [m1, e1] = traj.invariant_series.back();

    man.summary["travel_rel_l2_error"] = err;
    man.summary["mass_drift_rel"] = std::abs(m1 - m0) / m0;
    man.summary["energy_drift_abs"] = std::abs(e1 - e0);

    std::vector<MonitorSeries> series(2);
    series[0].label = "mass";
    series[1].label = "energy";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        series[0].times.push_back(traj.times[i]);
        series[0].values.push_back(traj.invariant_series[i].first);
        series[1].times.push_back(traj.times[i]);
        series[1].values.push_back(traj.invariant_series[i].second);
    }
    emit_metrics(series, dir / "metrics.jsonl");
    serialize_field(traj.snapshots.back(), dir / "fields" / "final.bof");
    attach_output(man, dir, "metrics.jsonl");
    attach_output(man, dir, "metrics.csv");
    attach_output(man, dir, fsys::path("fields") / "final.bof");
}

void experiment_stability(const ExperimentConfig& cfg, const fsys::path& dir, RunManifest& man) {
    StabilityData data = run_stability_pipeline(cfg);
    const double lambda = cfg.get_double("weight.lambda");
    const WeightParams w{cfg.get_double("weight.A"), 0.0};
    const auto stride = static_cast<std::size_t>(cfg.get_int("monotonicity.stride"));

    man.outcome = data.traj.aborted ? "blowup" : (data.tube_exit ? "tube_exit" : "ok");

    std::vector<MonitorSeries> series;
    MonitorSeries locd{"localized_distance", {}, {}, 0.0};
    MonitorSeries tube{"tube_distance_hhalf", {}, {}, 0.0};
    MonitorSeries rho_s{"rho", {}, {}, 0.0};
    for (std::size_t i = 0; i < data.rho.size(); ++i) {
        const double t = data.traj.times[i];
        locd.times.push_back(t);
        locd.values.push_back(
            localized_distance(data.traj.snapshots[i], data.c_fit, data.rho[i], t));
        tube.times.push_back(t);
        tube.values.push_back(sobolev_norm(data.eta[i], 0.5));
        rho_s.times.push_back(t);
        rho_s.values.push_back(data.rho[i]);
    }
    series.push_back(locd);
    series.push_back(tube);
    series.push_back(rho_s);
    series.push_back(kato_residual(data.traj, WeightParams{w.A, 30.0}));
    series.push_back(left_region_mass_gap(data.traj, data.rho, w));

    if (!data.rho.empty()) {
        double peak = 0.0;
        for (double v : locd.values) peak = std::max(peak, v);
        man.summary["locdist_peak"] = peak;
        man.summary["locdist_final"] = locd.values.back();
        man.summary["locdist_ratio"] = peak > 0.0 ? locd.values.back() / peak : 0.0;
        double tube_sup = 0.0;
        for (double v : tube.values) tube_sup = std::max(tube_sup, v);
        man.summary["tube_sup_hhalf"] = tube_sup;
        man.summary["c_fit0"] = data.c_fit;
        man.summary["c_plus"] = estimate_c_plus(data.traj, cfg.get_double("cplus.A"));
        double kato_max = 0.0;
        for (double v : series[3].values) kato_max = std::max(kato_max, v);
        man.summary["kato_max"] = kato_max;

        bool first = true;
        for (double x0 : cfg.get_list("weight.x0_list")) {
            auto right = monotonicity_right(data.traj, data.rho, x0, lambda, w, stride);
            auto left = monotonicity_left(data.traj, data.rho, x0, lambda, w, stride);
            man.summary["c_meas_right_x0_" + std::to_string(static_cast<int>(x0))] = right.c_meas;
            man.summary["c_meas_left_x0_" + std::to_string(static_cast<int>(x0))] = left.c_meas;
            emit_pair_report(right, "monotonicity_right", dir / "monotonicity.jsonl", !first);
            emit_pair_report(left, "monotonicity_left", dir / "monotonicity.jsonl", true);
            first = false;
        }
        attach_output(man, dir, "monotonicity.jsonl");
    }
    emit_metrics(series, dir / "metrics.jsonl");
    if (!data.traj.snapshots.empty())
        serialize_field(data.traj.snapshots.back(), dir / "fields" / "final.bof");
    attach_output(man, dir, "metrics.jsonl");
    attach_output(man, dir, "metrics.csv");
    if (!data.traj.snapshots.empty()) attach_output(man, dir, fsys::path("fields") / "final.bof");
}

void experiment_multisoliton(const ExperimentConfig& cfg, const fsys::path& dir,
                             RunManifest& man) {
    const Grid g = grid_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    const double T = cfg.get_double("horizon");
    const double cadence = cfg.get_double("cadence");
    const double min_gap = cfg.get_double("multisoliton.min_gap");
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    const auto cs = cfg.get_list("soliton.c");
    const auto xs = cfg.get_list("soliton.x0");
    if (cs.size() != xs.size() || cs.empty())
        throw std::invalid_argument("multisoliton: soliton.c and soliton.x0 lengths differ");

    std::vector<SolitonParams> params;
    for (std::size_t j = 0; j < cs.size(); ++j) params.push_back({cs[j], xs[j]});
    Field u0 = multisoliton_sum(params, g, min_gap) + make_perturbation(cfg, g, seed);

    Trajectory traj = run(u0, T, sc, cadence);
    man.outcome = traj.aborted ? "blowup" : "ok";

    std::vector<std::vector<ModulationState>> fits;
    std::vector<SolitonParams> guess = params;
    bool decomposed = true;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        try {
            auto st = multisoliton_decompose(traj.snapshots[i], guess, min_gap);
            for (std::size_t j = 0; j < st.size(); ++j)
                guess[j] = {st[j].c, st[j].rho + st[j].c * cadence};
            fits.push_back(std::move(st));
        } catch (const modulation_error&) {
            decomposed = false;
            man.outcome = "tube_exit";
            break;
        }
    }

    std::vector<MonitorSeries> series;
    man.summary["decomposition_ok"] = decomposed ? 1.0 : 0.0;
    if (!fits.empty()) {
        const std::size_t nsol = params.size();
        for (std::size_t j = 0; j < nsol; ++j) {
            MonitorSeries cs_j{"c_" + std::to_string(j + 1), {}, {}, 0.0};
            MonitorSeries rho_j{"rho_" + std::to_string(j + 1), {}, {}, 0.0};
            for (std::size_t i = 0; i < fits.size(); ++i) {
                cs_j.times.push_back(traj.times[i]);
                cs_j.values.push_back(fits[i][j].c);
                rho_j.times.push_back(traj.times[i]);
                rho_j.values.push_back(fits[i][j].rho);
            }
            series.push_back(cs_j);
            series.push_back(rho_j);
            double dev = 0.0;
            for (std::size_t i = 0; i < fits.size(); ++i)
                dev = std::max(dev, std::abs(fits[i][j].c - fits[0][j].c));
            man.summary["c_dev_" + std::to_string(j + 1)] = dev;
        }
        // localized distance to the fitted sum on x > 0.1 c1 t
        MonitorSeries locd{"localized_distance_sum", {}, {}, 0.0};
        const double c1 = cs.front();
        for (std::size_t i = 0; i < fits.size(); ++i) {
            const double t = traj.times[i];
            const Grid& gg = traj.snapshots[i].grid;
            double acc = 0.0;
            for (std::int64_t jn = 0; jn < gg.n; ++jn) {
                const double x = gg.node(jn);
                if (x <= 0.1 * c1 * t) continue;
                double d = traj.snapshots[i].values[static_cast<std::size_t>(jn)];
                for (const auto& stj : fits[i]) d -= soliton_value(stj.c, x - stj.rho);
                acc += d * d;
            }
            locd.times.push_back(t);
            locd.values.push_back(std::sqrt(acc * gg.spacing()));
        }
        series.push_back(locd);
        double peak = 0.0;
        for (double v : locd.values) peak = std::max(peak, v);
        man.summary["locdist_peak"] = peak;
        man.summary["locdist_final"] = locd.values.back();
        man.summary["locdist_ratio"] = peak > 0.0 ? locd.values.back() / peak : 0.0;

        if (fits.size() >= 2 && nsol >= 2) {
            double min_sep_rate = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < fits.size(); ++i) {
                const double dt = traj.times[i] - traj.times[i - 1];
                const double r2 = (fits[i][nsol - 1].rho - fits[i - 1][nsol - 1].rho) / dt;
                const double r1 = (fits[i][0].rho - fits[i - 1][0].rho) / dt;
                min_sep_rate = std::min(min_sep_rate, r2 - r1);
            }
            man.summary["min_rho_rate_gap"] = min_sep_rate;
        }
    }
    emit_metrics(series, dir / "metrics.jsonl");
    if (!traj.snapshots.empty())
        serialize_field(traj.snapshots.back(), dir / "fields" / "final.bof");
    attach_output(man, dir, "metrics.jsonl");
    attach_output(man, dir, "metrics.csv");
    if (!traj.snapshots.empty()) attach_output(man, dir, fsys::path("fields") / "final.bof");
}

void experiment_spectrum(const ExperimentConfig& cfg, const fsys::path& dir, RunManifest& man) {
    const Grid g = grid_from_config(cfg);
    const auto n_lowest = static_cast<int>(cfg.get_int("spectrum.n_lowest"));

    OperatorMatrix lmat = assemble(OperatorKind::L, g);
    SpectrumReport rep = spectrum(lmat, n_lowest);
    std::vector<std::pair<std::string, Field>> named = {
        {"f0", profile_f0(g)}, {"Qprime", soliton_derivative(SolitonParams{1.0, 0.0}, g)},
        {"f1", profile_f1(g)}};
    const std::string text = spectrum_report_text(rep, named);

    Field q = soliton(SolitonParams{1.0, 0.0}, g);
    Field qp = soliton_derivative(SolitonParams{1.0, 0.0}, g);
    auto weinstein = constrained_rayleigh_min(lmat, {q, qp}, Metric::L2);
    OperatorMatrix lt = assemble(OperatorKind::Ltilde, g);
    auto dual = constrained_rayleigh_min(lt, {profile_S(g)}, Metric::Hhalf);

    std::ofstream rep_out(dir / "spectrum.txt", std::ios::trunc);
    rep_out << text << "\nconstrained L | {Q, Q'} (L2):\n"
            << spectrum_report_text(weinstein, {}) << "\nconstrained Ltilde | {(xQ)'} (H1/2):\n"
            << spectrum_report_text(dual, {});
    for (double eps : cfg.get_list("traversal.eps_list")) {
        auto trav = traversal_check(eps, g, g);
        rep_out << "\ntraversal eps=" << eps << ": ||L T_eps - S_eps|| = " << trav.residual_LTeps
                << ", (S_eps, T_eps) = " << trav.ip_S_T_eps << " (predicted " << trav.ip_predicted
                << "), constrained min = " << trav.constrained_min << "\n";
    }
    rep_out.close();

    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
        man.summary["lambda_" + std::to_string(i)] = rep.eigenvalues[i];
    man.summary["weinstein_min"] = weinstein.rayleigh_min;
    man.summary["dual_hhalf_min"] = dual.rayleigh_min;
    man.outcome = "ok";
    attach_output(man, dir, "spectrum.txt");
}

void experiment_monotonicity_sweep(const ExperimentConfig& cfg, const fsys::path& dir,
                                   RunManifest& man) {
    StabilityData data = run_stability_pipeline(cfg);
    man.outcome = data.traj.aborted ? "blowup" : (data.tube_exit ? "tube_exit" : "ok");
    const double lambda = cfg.get_double("weight.lambda");
    const WeightParams w{cfg.get_double("weight.A"), 0.0};
    const auto stride = static_cast<std::size_t>(cfg.get_int("monotonicity.stride"));

    std::vector<MonitorSeries> series;
    MonitorSeries surface{"c_meas_surface_right", {}, {}, 0.0};
    MonitorSeries surface_l{"c_meas_surface_left", {}, {}, 0.0};
    bool first = true;
    for (double x0 : cfg.get_list("weight.x0_list")) {
        auto right = monotonicity_right(data.traj, data.rho, x0, lambda, w, stride);
        auto left = monotonicity_left(data.traj, data.rho, x0, lambda, w, stride);
        surface.times.push_back(x0);
        surface.values.push_back(right.c_meas);
        surface_l.times.push_back(x0);
        surface_l.values.push_back(left.c_meas);
        man.summary["c_meas_right_x0_" + std::to_string(static_cast<int>(x0))] = right.c_meas;
        man.summary["c_meas_left_x0_" + std::to_string(static_cast<int>(x0))] = left.c_meas;
        emit_pair_report(right, "monotonicity_right", dir / "monotonicity.jsonl", !first);
        emit_pair_report(left, "monotonicity_left", dir / "monotonicity.jsonl", true);
        first = false;
    }
    series.push_back(surface);
    series.push_back(surface_l);
    emit_metrics(series, dir / "metrics.jsonl");
    attach_output(man, dir, "metrics.jsonl");
    attach_output(man, dir, "metrics.csv");
    attach_output(man, dir, "monotonicity.jsonl");
}

void experiment_identity_suite(const ExperimentConfig& cfg, const fsys::path& dir,
                               RunManifest& man) {
    const Grid big = make_grid(cfg.get_int("identity.n"), cfg.get_double("identity.length"));

    man.summary["closed_form_worst"] = verify_closed_form_integrals(big);

    Field q = soliton(SolitonParams{1.0, 0.0}, big);
    Field s = profile_S(big);
    Field t = profile_T(big);
    man.summary["soliton_residual"] = l2_norm(hilbert(derivative(q)) - (q - 0.5 * (q * q)));
    man.summary["LQp_residual"] = l2_norm(apply_L(derivative(q)));
    man.summary["LS_residual"] = l2_norm(apply_L(s) + q);
    man.summary["LT_residual"] = l2_norm(apply_L(t) - s);
    man.summary["LQ_residual"] = l2_norm(apply_L(q) + 0.5 * (q * q));

    const double q2 = inner(q, q), s2 = inner(s, s);
    man.summary["ip_SQ_err"] = std::abs(inner(s, q) - 0.5 * q2);
    man.summary["ip_ST_err"] = std::abs(inner(s, t));
    man.summary["ip_TQ_err"] = std::abs(inner(t, q) + s2);

    // Hilbert convention lock on its own very wide grid
    {
        const Grid lock =
            make_grid(cfg.get_int("hilbert_lock.n"), cfg.get_double("hilbert_lock.length"));
        Field f = sample(lock, [](double x) { return 1.0 / (1.0 + x * x); });
        Field hf = hilbert(f);
        double worst = 0.0;
        for (std::int64_t j = 0; j < lock.n; ++j) {
            const double x = lock.node(j);
            if (std::abs(x) > 0.25 * lock.length) continue;
            worst = std::max(worst, std::abs(hf.values[static_cast<std::size_t>(j)] +
                                             x / (1.0 + x * x)));
        }
        man.summary["hilbert_lock_max_err"] = worst;
    }

    {
        const Grid kg = make_grid(cfg.get_int("kernel.n"), cfg.get_double("kernel.length"));
        man.summary["kernel_rel_err_max"] = kernel_conformance_max_rel_err(
            10.0, kg, static_cast<int>(cfg.get_int("kernel.quad_points")));
    }
    man.outcome = "ok";

    std::ofstream out(dir / "identities.txt", std::ios::trunc);
    for (const auto& [k, v] : man.summary) out << k << " = " << fmt_double(v) << "\n";
    out.close();
    attach_output(man, dir, "identities.txt");
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const fsys::path& out_dir) {
    RunManifest man;
    man.experiment = cfg.get_string("experiment");
    man.code_version = "0.1.0";
    man.started_at = now_iso();
    man.config = cfg.entries();
    man.outcome = "ok";

    fsys::create_directories(out_dir / "fields");

    if (man.experiment == "soliton_translate")
        experiment_soliton_translate(cfg, out_dir, man);
    else if (man.experiment == "stability" || man.experiment == "asymptotic")
        experiment_stability(cfg, out_dir, man);
    else if (man.experiment == "multisoliton")
        experiment_multisoliton(cfg, out_dir, man);
    else if (man.experiment == "spectrum")
        experiment_spectrum(cfg, out_dir, man);
    else if (man.experiment == "monotonicity_sweep")
        experiment_monotonicity_sweep(cfg, out_dir, man);
    else if (man.experiment == "identity_suite")
        experiment_identity_suite(cfg, out_dir, man);
    else
        throw std::invalid_argument("run_experiment: unknown experiment " + man.experiment);

    man.finished_at = now_iso();
    man.write(out_dir);
    return man;
}

}  // namespace bo
