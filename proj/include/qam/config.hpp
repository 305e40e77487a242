// config.hpp — Strict JSON run configuration: parse, validate, serialize

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dissipation.hpp"

namespace qam {

/// Schema violation; `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + message),
          pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

inline constexpr int kSchemaVersion = 1;

enum class MachineType { three_level, three_qubit, three_oscillator, engine, clock };
enum class RunMode { steady, sweep, transient, engine_walk, clock };
enum class ClockScan { fixed_power, fixed_resolution, fixed_accuracy, d_sweep };

struct MachineConfig {
    MachineType type = MachineType::three_qubit;
    double omega_c = 0.5;
    double omega_h = 1.5;
    double g = 0.0;
    long d = 2;
    long n_max = 3;
    bool operator==(const MachineConfig&) const = default;
};

struct BathConfig {
    char label = 'c';
    double temperature = 1.0;
    double kappa = 1e-3;
    int dimensionality = 1;
    std::optional<double> omega_ref; // absent: the machine's omega_h at each point
    bool operator==(const BathConfig&) const = default;

    BathSpec spec(double omega_h) const {
        return BathSpec{label, temperature, kappa, dimensionality, omega_ref.value_or(omega_h)};
    }
};

struct SweepConfig {
    std::string variable = "omega_c"; // omega_c | omega_w
    std::string hold = "omega_w";     // omega_w | omega_h
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<long> count;
    std::vector<double> values;
    bool operator==(const SweepConfig&) const = default;

    /// Explicit values if given, else count points evenly spaced on [start, stop].
    std::vector<double> grid() const {
        if (!values.empty()) return values;
        std::vector<double> out;
        const long n = *count;
        for (long i = 0; i < n; ++i)
            out.push_back(n == 1 ? *start : *start + (*stop - *start) * static_cast<double>(i) / static_cast<double>(n - 1));
        return out;
    }
};

struct TimeGridConfig {
    double t_final = 1.0;
    long steps = 100;
    bool operator==(const TimeGridConfig&) const = default;

    std::vector<double> grid() const {
        std::vector<double> out;
        for (long i = 0; i <= steps; ++i) out.push_back(t_final * static_cast<double>(i) / static_cast<double>(steps));
        return out;
    }
};

struct ClockConfig {
    ClockScan scan = ClockScan::fixed_power;
    double target = 0.3;              // power, resolution or accuracy, by scan
    std::vector<long> d_values;       // fixed_power, fixed_accuracy, d_sweep
    std::vector<double> omega_c_values; // fixed_resolution
    long d = 20;                      // fixed_resolution
    double decay_rate = 0.0;          // 0: instantaneous reset
    std::optional<double> rate_ratio; // d_sweep: up/down fixed directly instead of via omega_c
    bool operator==(const ClockConfig&) const = default;
};

struct MonteCarloConfig {
    long paths = 20000;
    long ticks = 4000;
    double window = 30.0;          // cycles either side of N for the ergotropy-rate estimate
    std::vector<double> points;    // omega_w values checked by Monte Carlo (engine)
    bool enabled = true;
    bool operator==(const MonteCarloConfig&) const = default;
};

struct RunSettings {
    RunMode mode = RunMode::steady;
    std::optional<SweepConfig> sweep;
    std::optional<TimeGridConfig> time;
    std::vector<double> coherence{0.0};
    std::vector<double> cycles;
    double gamma_eff = 1.0;
    std::optional<ClockConfig> clock;
    MonteCarloConfig monte_carlo;
    bool operator==(const RunSettings&) const = default;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    MachineConfig machine;
    std::vector<BathConfig> baths;
    DissipationModel dissipation = DissipationModel::local;
    RunSettings run;
    std::uint64_t seed = 1;
    std::string output;
    bool operator==(const RunConfig&) const = default;

    const BathConfig& bath(char label) const {
        for (const auto& b : baths)
            if (b.label == label) return b;
        throw ConfigError("/baths", std::string("no bath labelled '") + label + "'");
    }

    bool has_bath(char label) const {
        for (const auto& b : baths)
            if (b.label == label) return true;
        return false;
    }
};

// ---------------------------------------------------------------------------
// enum names

inline const char* to_string(MachineType t) {
    switch (t) {
    case MachineType::three_level: return "three_level";
    case MachineType::three_qubit: return "three_qubit";
    case MachineType::three_oscillator: return "three_oscillator";
    case MachineType::engine: return "engine";
    case MachineType::clock: return "clock";
    }
    return "?";
}

inline const char* to_string(RunMode m) {
    switch (m) {
    case RunMode::steady: return "steady";
    case RunMode::sweep: return "sweep";
    case RunMode::transient: return "transient";
    case RunMode::engine_walk: return "engine_walk";
    case RunMode::clock: return "clock";
    }
    return "?";
}

inline const char* to_string(ClockScan s) {
    switch (s) {
    case ClockScan::fixed_power: return "fixed_power";
    case ClockScan::fixed_resolution: return "fixed_resolution";
    case ClockScan::fixed_accuracy: return "fixed_accuracy";
    case ClockScan::d_sweep: return "d_sweep";
    }
    return "?";
}

namespace detail {

using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
        if (!j_.is_object()) throw ConfigError(ptr_, "expected an object");
    }

    std::string at(const std::string& key) const { return ptr_ + "/" + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(at(key), "required key is missing");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(at(key), "expected a finite number");
        return x;
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    long integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v.get<long>();
    }

    long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    template <class Enum, std::size_t N>
    Enum choice(const std::string& key, const std::array<Enum, N>& options) {
        const std::string s = string(key);
        for (Enum e : options)
            if (s == to_string(e)) return e;
        std::string allowed;
        for (Enum e : options) allowed += std::string(allowed.empty() ? "" : ", ") + to_string(e);
        throw ConfigError(at(key), "unknown value '" + s + "' (allowed: " + allowed + ")");
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
                throw ConfigError(at(key) + "/" + std::to_string(i), "expected a finite number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<long> integers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of integers");
        std::vector<long> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected an integer");
            out.push_back(v[i].get<long>());
        }
        return out;
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(at(key), "unknown key");
    }

private:
    const json& j_;
    std::string ptr_;
    std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& pointer, const std::string& message) {
    if (!ok) throw ConfigError(pointer, message);
}

inline MachineConfig parse_machine(const json& j) {
    ObjectReader r(j, "/machine");
    MachineConfig m;
    m.type = r.choice("type", std::array{MachineType::three_level, MachineType::three_qubit,
                                         MachineType::three_oscillator, MachineType::engine, MachineType::clock});
    m.omega_c = r.number("omega_c");
    m.omega_h = r.number("omega_h");
    m.g = r.number("g", 0.0);
    m.d = r.integer("d", 2);
    m.n_max = r.integer("n_max", 3);
    require(m.omega_c > 0.0, r.at("omega_c"), "must be positive");
    require(m.omega_h > m.omega_c, r.at("omega_h"), "must exceed omega_c");
    require(m.g >= 0.0, r.at("g"), "must be non-negative");
    require(m.d >= 2, r.at("d"), "must be at least 2");
    require(m.type != MachineType::clock || m.d >= 3, r.at("d"), "a clock needs at least 3 levels");
    require(m.n_max >= 1, r.at("n_max"), "must be at least 1");
    r.finish();
    return m;
}

inline BathConfig parse_bath(const json& j, const std::string& ptr) {
    ObjectReader r(j, ptr);
    BathConfig b;
    const std::string label = r.string("label");
    require(label == "c" || label == "h" || label == "w", r.at("label"), "must be one of c, h, w");
    b.label = label[0];
    b.temperature = r.number("T");
    b.kappa = r.number("kappa", 1e-3);
    b.dimensionality = static_cast<int>(r.integer("D", 1));
    b.omega_ref = r.optional_number("omega_ref");
    require(b.temperature > 0.0, r.at("T"), "must be positive");
    require(b.kappa > 0.0, r.at("kappa"), "must be positive");
    require(b.dimensionality >= 1 && b.dimensionality <= 3, r.at("D"), "must be 1, 2 or 3");
    require(!b.omega_ref || *b.omega_ref > 0.0, r.at("omega_ref"), "must be positive");
    r.finish();
    return b;
}

inline SweepConfig parse_sweep(const json& j) {
    ObjectReader r(j, "/run/sweep");
    SweepConfig s;
    s.variable = r.string("variable", "omega_c");
    s.hold = r.string("hold", "omega_w");
    require(s.variable == "omega_c" || s.variable == "omega_w", r.at("variable"), "must be omega_c or omega_w");
    require(s.hold == "omega_w" || s.hold == "omega_h", r.at("hold"), "must be omega_w or omega_h");
    require(s.variable != s.hold, r.at("hold"), "cannot hold the swept variable");
    if (r.has("values")) {
        s.values = r.numbers("values");
        require(!s.values.empty(), r.at("values"), "must not be empty");
        require(!r.has("start") && !r.has("stop") && !r.has("count"), r.at("values"),
                "give either values or start/stop/count");
    } else {
        s.start = r.number("start");
        s.stop = r.number("stop");
        s.count = r.integer("count");
        require(*s.count >= 1, r.at("count"), "must be at least 1");
    }
    r.finish();
    return s;
}

inline TimeGridConfig parse_time(const json& j) {
    ObjectReader r(j, "/run/time");
    TimeGridConfig t;
    t.t_final = r.number("t_final");
    t.steps = r.integer("steps");
    require(t.t_final > 0.0, r.at("t_final"), "must be positive");
    require(t.steps >= 1, r.at("steps"), "must be at least 1");
    r.finish();
    return t;
}

inline ClockConfig parse_clock(const json& j) {
    ObjectReader r(j, "/run/clock");
    ClockConfig c;
    c.scan = r.choice("scan", std::array{ClockScan::fixed_power, ClockScan::fixed_resolution, ClockScan::fixed_accuracy,
                                         ClockScan::d_sweep});
    c.target = r.number("target", 0.0);
    if (r.has("d_values")) c.d_values = r.integers("d_values");
    if (r.has("omega_c_values")) c.omega_c_values = r.numbers("omega_c_values");
    c.d = r.integer("d", 20);
    c.decay_rate = r.number("decay_rate", 0.0);
    c.rate_ratio = r.optional_number("rate_ratio");
    require(c.decay_rate >= 0.0, r.at("decay_rate"), "must be non-negative");
    require(c.d >= 3, r.at("d"), "must be at least 3");
    for (std::size_t i = 0; i < c.d_values.size(); ++i)
        require(c.d_values[i] >= 3, r.at("d_values") + "/" + std::to_string(i), "must be at least 3");
    if (c.scan == ClockScan::fixed_resolution) {
        require(!c.omega_c_values.empty(), r.at("omega_c_values"), "required for fixed_resolution");
        require(c.target > 0.0, r.at("target"), "must be positive");
    } else {
        require(!c.d_values.empty(), r.at("d_values"), "required for this scan");
    }
    if (c.scan == ClockScan::fixed_power || c.scan == ClockScan::fixed_accuracy)
        require(c.target > 0.0, r.at("target"), "must be positive");
    require(!c.rate_ratio || *c.rate_ratio > 1.0, r.at("rate_ratio"), "must exceed 1");
    r.finish();
    return c;
}

inline MonteCarloConfig parse_monte_carlo(const json& j) {
    ObjectReader r(j, "/run/monte_carlo");
    MonteCarloConfig m;
    m.paths = r.integer("paths", m.paths);
    m.ticks = r.integer("ticks", m.ticks);
    m.window = r.number("window", m.window);
    if (r.has("points")) m.points = r.numbers("points");
    m.enabled = r.boolean("enabled", true);
    require(m.paths >= 1, r.at("paths"), "must be positive");
    require(m.ticks >= 2, r.at("ticks"), "must be at least 2");
    require(m.window > 0.0, r.at("window"), "must be positive");
    r.finish();
    return m;
}

inline RunSettings parse_run(const json& j) {
    ObjectReader r(j, "/run");
    RunSettings s;
    s.mode = r.choice("mode", std::array{RunMode::steady, RunMode::sweep, RunMode::transient, RunMode::engine_walk,
                                         RunMode::clock});
    if (r.has("sweep")) s.sweep = parse_sweep(r.raw("sweep"));
    if (r.has("time")) s.time = parse_time(r.raw("time"));
    if (r.has("coherence")) {
        s.coherence = r.numbers("coherence");
        require(!s.coherence.empty(), r.at("coherence"), "must not be empty");
        for (std::size_t i = 0; i < s.coherence.size(); ++i)
            require(s.coherence[i] >= 0.0, r.at("coherence") + "/" + std::to_string(i), "must be non-negative");
    }
    if (r.has("cycles")) {
        s.cycles = r.numbers("cycles");
        for (std::size_t i = 0; i < s.cycles.size(); ++i)
            require(s.cycles[i] >= 1.0, r.at("cycles") + "/" + std::to_string(i), "must be at least 1");
    }
    s.gamma_eff = r.number("gamma_eff", 1.0);
    require(s.gamma_eff > 0.0, r.at("gamma_eff"), "must be positive");
    if (r.has("clock")) s.clock = parse_clock(r.raw("clock"));
    if (r.has("monte_carlo")) s.monte_carlo = parse_monte_carlo(r.raw("monte_carlo"));

    switch (s.mode) {
    case RunMode::sweep:
    case RunMode::engine_walk: require(s.sweep.has_value(), r.at("sweep"), "required for this mode"); break;
    case RunMode::transient: require(s.time.has_value(), r.at("time"), "required for this mode"); break;
    case RunMode::clock: require(s.clock.has_value(), r.at("clock"), "required for this mode"); break;
    case RunMode::steady: break;
    }
    if (s.mode == RunMode::engine_walk) require(!s.cycles.empty(), r.at("cycles"), "required for engine_walk");
    r.finish();
    return s;
}

inline void cross_validate(const RunConfig& c) {
    std::set<char> labels;
    for (std::size_t i = 0; i < c.baths.size(); ++i) {
        const std::string ptr = "/baths/" + std::to_string(i) + "/label";
        require(labels.insert(c.baths[i].label).second, ptr, "duplicate bath label");
    }
    const bool needs_three = c.machine.type == MachineType::three_level || c.machine.type == MachineType::three_qubit ||
                             c.machine.type == MachineType::three_oscillator;
    const bool walk_like = c.run.mode == RunMode::engine_walk || c.run.mode == RunMode::clock;
    if (walk_like) {
        require(c.has_bath('c'), "/baths", "bath 'c' is required");
        require(c.has_bath('h'), "/baths", "bath 'h' is required");
    } else {
        require(!c.baths.empty(), "/baths", "at least one bath is required");
    }
    if (c.run.mode == RunMode::sweep || c.run.mode == RunMode::transient) {
        require(needs_three, "/machine/type", "fridge sweeps and transients need a three-body or three-level fridge");
        for (char l : {'c', 'h', 'w'})
            require(c.has_bath(l), "/baths", std::string("bath '") + l + "' is required for this mode");
    }
    if (c.run.mode == RunMode::sweep) {
        const auto& s = *c.run.sweep;
        require(s.variable == "omega_c", "/run/sweep/variable", "fridge sweeps vary omega_c");
    }
    if (c.run.mode == RunMode::transient)
        require(c.machine.type == MachineType::three_qubit, "/machine/type", "transients use the three_qubit machine");
    if (c.run.mode == RunMode::engine_walk) {
        require(c.machine.type == MachineType::engine, "/machine/type", "engine_walk needs an engine machine");
        const auto& s = *c.run.sweep;
        require(s.variable == "omega_w" && s.hold == "omega_h", "/run/sweep", "engine sweeps vary omega_w holding omega_h");
    }
    if (c.run.mode == RunMode::clock)
        require(c.machine.type == MachineType::clock, "/machine/type", "clock mode needs a clock machine");
}

} // namespace detail

/// Parses and validates a configuration; throws ConfigError.
inline RunConfig parse_config(const nlohmann::json& j) {
    detail::ObjectReader r(j, "");
    RunConfig c;
    const long version = r.integer("schema_version");
    detail::require(version == kSchemaVersion, "/schema_version",
                    "unsupported schema version " + std::to_string(version));
    c.machine = detail::parse_machine(r.raw("machine"));
    const auto& baths = r.raw("baths");
    detail::require(baths.is_array(), "/baths", "expected an array");
    for (std::size_t i = 0; i < baths.size(); ++i)
        c.baths.push_back(detail::parse_bath(baths[i], "/baths/" + std::to_string(i)));
    {
        detail::ObjectReader d(r.raw("dissipation"), "/dissipation");
        c.dissipation = d.choice("model", std::array{DissipationModel::local, DissipationModel::global});
        d.finish();
    }
    c.run = detail::parse_run(r.raw("run"));
    c.seed = r.unsigned_integer("seed", 1);
    c.output = r.string("output", "");
    r.finish();
    detail::cross_validate(c);
    return c;
}

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // the library reports "line L, column C" in its message
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    json j;
    j["schema_version"] = c.schema_version;
    j["machine"] = {{"type", to_string(c.machine.type)}, {"omega_c", c.machine.omega_c}, {"omega_h", c.machine.omega_h},
                    {"g", c.machine.g},                  {"d", c.machine.d},             {"n_max", c.machine.n_max}};
    j["baths"] = json::array();
    for (const auto& b : c.baths) {
        json jb = {{"label", std::string(1, b.label)}, {"T", b.temperature}, {"kappa", b.kappa}, {"D", b.dimensionality}};
        if (b.omega_ref) jb["omega_ref"] = *b.omega_ref;
        j["baths"].push_back(jb);
    }
    j["dissipation"] = {{"model", to_string(c.dissipation)}};
    json run;
    run["mode"] = to_string(c.run.mode);
    if (c.run.sweep) {
        const auto& s = *c.run.sweep;
        json js = {{"variable", s.variable}, {"hold", s.hold}};
        if (!s.values.empty())
            js["values"] = s.values;
        else {
            js["start"] = *s.start;
            js["stop"] = *s.stop;
            js["count"] = *s.count;
        }
        run["sweep"] = js;
    }
    if (c.run.time) run["time"] = {{"t_final", c.run.time->t_final}, {"steps", c.run.time->steps}};
    run["coherence"] = c.run.coherence;
    if (!c.run.cycles.empty()) run["cycles"] = c.run.cycles;
    run["gamma_eff"] = c.run.gamma_eff;
    if (c.run.clock) {
        const auto& k = *c.run.clock;
        json jc = {{"scan", to_string(k.scan)}, {"target", k.target}, {"d", k.d}, {"decay_rate", k.decay_rate}};
        if (!k.d_values.empty()) jc["d_values"] = k.d_values;
        if (!k.omega_c_values.empty()) jc["omega_c_values"] = k.omega_c_values;
        if (k.rate_ratio) jc["rate_ratio"] = *k.rate_ratio;
        run["clock"] = jc;
    }
    const auto& m = c.run.monte_carlo;
    run["monte_carlo"] = {{"paths", m.paths}, {"ticks", m.ticks}, {"window", m.window}, {"enabled", m.enabled}};
    if (!m.points.empty()) run["monte_carlo"]["points"] = m.points;
    j["run"] = run;
    j["seed"] = c.seed;
    j["output"] = c.output;
    return j;
}

/// Canonical compact text (sorted keys); parse(serialize(c)) == c.
inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(); }

/// FNV-1a of the canonical serialization.
inline std::uint64_t config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace qam
