#include "gsim/config.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gsim {

namespace {

struct Entry {
    std::string value;
    std::string unit;  // empty if none
    int line = 0;
    bool used = false;
};

using SectionMap = std::map<std::string, std::map<std::string, Entry>>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

enum class Dim { Length, Time, Rate, Number, Integer };

double unit_factor(Dim dim, const std::string& unit, int line) {
    switch (dim) {
        case Dim::Length:
            if (unit == "nm") return 1e-9;
            if (unit == "um" || unit == "µm") return 1e-6;
            if (unit == "mm") return 1e-3;
            if (unit == "cm") return 1e-2;
            if (unit == "m") return 1.0;
            throw ConfigError(line, "expected a length unit (nm/um/mm/cm/m), got '" + unit + "'");
        case Dim::Time:
            if (unit == "ps") return 1e-12;
            if (unit == "ns") return 1e-9;
            if (unit == "us" || unit == "µs") return 1e-6;
            if (unit == "ms") return 1e-3;
            if (unit == "s") return 1.0;
            throw ConfigError(line, "expected a time unit (ps/ns/us/ms/s), got '" + unit + "'");
        case Dim::Rate:
            if (unit == "Hz") return 1.0;
            if (unit == "kHz") return 1e3;
            if (unit == "MHz") return 1e6;
            throw ConfigError(line, "expected a rate unit (Hz/kHz/MHz), got '" + unit + "'");
        default:
            if (!unit.empty())
                throw ConfigError(line, "dimensionless key must not carry a unit, got '" + unit + "'");
            return 1.0;
    }
}

class Extractor {
  public:
    explicit Extractor(SectionMap& sections) : sections_(sections) {}

    std::optional<double> quantity(const std::string& sec, const std::string& key, Dim dim) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        if ((dim == Dim::Length || dim == Dim::Time || dim == Dim::Rate) && e->unit.empty())
            throw ConfigError(e->line, "key '" + key + "' requires an explicit unit");
        double v;
        try {
            std::size_t pos = 0;
            v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError(e->line, "malformed numeric value '" + e->value + "' for key '" + key + "'");
        }
        return v * unit_factor(dim, e->unit, e->line);
    }

    void take(const std::string& sec, const std::string& key, Dim dim, double& out) {
        if (auto v = quantity(sec, key, dim)) out = *v;
    }
    void take(const std::string& sec, const std::string& key, Dim dim,
              std::optional<double>& out) {
        if (auto v = quantity(sec, key, dim)) out = *v;
    }
    void take_int(const std::string& sec, const std::string& key, int& out) {
        Entry* e = find(sec, key);
        if (!e) return;
        try {
            std::size_t pos = 0;
            const long v = std::stol(e->value, &pos);
            if (pos != e->value.size() || !e->unit.empty()) throw std::invalid_argument("");
            out = static_cast<int>(v);
        } catch (...) {
            throw ConfigError(e->line, "malformed integer value for key '" + key + "'");
        }
    }
    void take_u64(const std::string& sec, const std::string& key, std::uint64_t& out) {
        Entry* e = find(sec, key);
        if (!e) return;
        try {
            std::size_t pos = 0;
            out = std::stoull(e->value, &pos);
            if (pos != e->value.size() || !e->unit.empty()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError(e->line, "malformed integer value for key '" + key + "'");
        }
    }
    Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections_.find(sec);
        if (s == sections_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }
    void reject_unused() const {
        for (const auto& [sec, keys] : sections_) {
            for (const auto& [key, e] : keys) {
                if (!e.used)
                    throw ConfigError(e.line, "unknown key '" + key + "' in section [" + sec + "]");
            }
        }
    }

  private:
    SectionMap& sections_;
};

void require(const std::optional<double>& v, const std::string& name) {
    if (!v) throw ConfigError(0, "missing required key '" + name + "'");
}

}  // namespace

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Hbt: return "hbt";
        case Scenario::Ghost: return "ghost";
        case Scenario::CheckLens: return "check-lens";
        case Scenario::IdealCurve: return "ideal-curve";
        case Scenario::Selftest: return "selftest";
    }
    return "?";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    if (name == "hbt") return Scenario::Hbt;
    if (name == "ghost") return Scenario::Ghost;
    if (name == "check-lens") return Scenario::CheckLens;
    if (name == "ideal-curve") return Scenario::IdealCurve;
    if (name == "selftest") return Scenario::Selftest;
    return std::nullopt;
}

std::vector<double> RunConfig::scan_position_list() const {
    if (!scan_start || !scan_stop || !scan_step)
        throw std::invalid_argument("scan positions require scan.start, scan.stop, scan.step");
    if (!(*scan_step > 0.0) || !(*scan_stop > *scan_start))
        throw std::invalid_argument("scan range must be increasing with a positive step");
    std::vector<double> out;
    const double eps = *scan_step * 1e-9;
    for (double x = *scan_start; x <= *scan_stop + eps; x += *scan_step) out.push_back(x);
    return out;
}

RunConfig parse_config(const std::string& text, std::optional<Scenario> expected_scenario) {
    SectionMap sections;
    std::string current;
    int line_no = 0;
    std::istringstream is(text);
    std::string raw;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) throw ConfigError(line_no, "empty section name");
            sections.try_emplace(current);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        if (current.empty()) throw ConfigError(line_no, "key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        std::string rhs = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (rhs.empty()) throw ConfigError(line_no, "empty value for key '" + key + "'");

        Entry e;
        e.line = line_no;
        const auto sp = rhs.find_first_of(" \t");
        if (sp == std::string::npos) {
            e.value = rhs;
        } else {
            e.value = rhs.substr(0, sp);
            e.unit = trim(rhs.substr(sp + 1));
            if (e.unit.find_first_of(" \t") != std::string::npos)
                throw ConfigError(line_no, "trailing text after unit for key '" + key + "'");
        }
        auto [it, inserted] = sections[current].emplace(key, e);
        if (!inserted)
            throw ConfigError(line_no, "duplicate key '" + key + "' in section [" + current +
                                           "] (first at line " + std::to_string(it->second.line) + ")");
    }

    RunConfig cfg;
    Extractor ex(sections);

    if (Entry* e = ex.find("run", "scenario")) {
        auto s = scenario_from_name(e->value);
        if (!s) throw ConfigError(e->line, "unknown scenario '" + e->value + "'");
        if (expected_scenario && *expected_scenario != *s)
            throw ConfigError(e->line, "config scenario '" + e->value +
                                           "' does not match the requested subcommand");
        cfg.scenario = *s;
    }
    if (expected_scenario) cfg.scenario = *expected_scenario;
    ex.take_u64("run", "seed", cfg.seed);
    ex.take_int("run", "threads", cfg.threads);

    ex.take_int("grid", "n_points", cfg.grid_points);
    ex.take("grid", "pitch", Dim::Length, cfg.grid_pitch);

    ex.take("source", "diameter", Dim::Length, cfg.source_diameter);
    ex.take("source", "wavelength", Dim::Length, cfg.wavelength);
    ex.take("source", "coherence_time", Dim::Time, cfg.coherence_time);
    ex.take("source", "mean_rate", Dim::Rate, cfg.mean_rate);

    ex.take("detector1", "center", Dim::Length, cfg.det1_center);
    ex.take("detector1", "aperture", Dim::Length, cfg.det1_aperture);
    ex.take("detector1", "efficiency", Dim::Number, cfg.det1_efficiency);
    ex.take("detector1", "jitter_fwhm", Dim::Time, cfg.det1_jitter_fwhm);
    ex.take("detector2", "center", Dim::Length, cfg.det2_center);
    ex.take("detector2", "aperture", Dim::Length, cfg.det2_aperture);
    ex.take("detector2", "efficiency", Dim::Number, cfg.det2_efficiency);
    ex.take("detector2", "jitter_fwhm", Dim::Time, cfg.det2_jitter_fwhm);

    ex.take("tac", "min", Dim::Time, cfg.tac_min);
    ex.take("tac", "max", Dim::Time, cfg.tac_max);
    ex.take("tac", "bin", Dim::Time, cfg.tac_bin);

    ex.take("hbt", "duration", Dim::Time, cfg.hbt_duration);
    ex.take("hbt", "peak_halfwidth", Dim::Time, cfg.peak_halfwidth);
    ex.take("hbt", "baseline_exclusion", Dim::Time, cfg.baseline_exclusion);

    ex.take("geometry", "z1", Dim::Length, cfg.z1);
    ex.take("geometry", "z2", Dim::Length, cfg.z2);
    ex.take("geometry", "z3", Dim::Length, cfg.z3);
    ex.take("geometry", "f", Dim::Length, cfg.f);

    ex.take_int("mask", "features", cfg.mask_features);
    ex.take("mask", "separation", Dim::Length, cfg.mask_separation);
    ex.take("mask", "hole_diameter", Dim::Length, cfg.mask_hole_diameter);

    ex.take("reference", "aperture", Dim::Length, cfg.reference_aperture);
    ex.take("reference", "efficiency", Dim::Number, cfg.reference_efficiency);

    ex.take("scan", "start", Dim::Length, cfg.scan_start);
    ex.take("scan", "stop", Dim::Length, cfg.scan_stop);
    ex.take("scan", "step", Dim::Length, cfg.scan_step);
    ex.take_int("scan", "frames", cfg.scan_frames);
    if (Entry* e = ex.find("scan", "temporal_modes")) {
        if (e->value != "auto") {
            e->used = false;  // re-extract as a number
            ex.take("scan", "temporal_modes", Dim::Number, cfg.temporal_modes);
        }
    }

    ex.take("ideal", "coherence_width", Dim::Length, cfg.coherence_width);

    ex.reject_unused();

    if (cfg.scenario) {
        switch (*cfg.scenario) {
            case Scenario::Hbt:
                require(cfg.coherence_time, "source.coherence_time");
                require(cfg.mean_rate, "source.mean_rate");
                require(cfg.source_diameter, "source.diameter");
                require(cfg.wavelength, "source.wavelength");
                require(cfg.hbt_duration, "hbt.duration");
                break;
            case Scenario::Ghost:
                require(cfg.source_diameter, "source.diameter");
                require(cfg.wavelength, "source.wavelength");
                require(cfg.coherence_time, "source.coherence_time");
                require(cfg.mean_rate, "source.mean_rate");
                require(cfg.z1, "geometry.z1");
                require(cfg.z2, "geometry.z2");
                require(cfg.z3, "geometry.z3");
                require(cfg.f, "geometry.f");
                require(cfg.mask_separation, "mask.separation");
                require(cfg.mask_hole_diameter, "mask.hole_diameter");
                require(cfg.scan_start, "scan.start");
                require(cfg.scan_stop, "scan.stop");
                require(cfg.scan_step, "scan.step");
                break;
            case Scenario::CheckLens:
                require(cfg.z1, "geometry.z1");
                require(cfg.z2, "geometry.z2");
                require(cfg.z3, "geometry.z3");
                require(cfg.f, "geometry.f");
                break;
            case Scenario::IdealCurve:
                require(cfg.z1, "geometry.z1");
                require(cfg.z2, "geometry.z2");
                require(cfg.z3, "geometry.z3");
                require(cfg.f, "geometry.f");
                require(cfg.mask_separation, "mask.separation");
                require(cfg.mask_hole_diameter, "mask.hole_diameter");
                require(cfg.scan_start, "scan.start");
                require(cfg.scan_stop, "scan.stop");
                require(cfg.scan_step, "scan.step");
                break;
            case Scenario::Selftest:
                break;
        }
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    auto q = [&](const char* key, const std::optional<double>& v, const char* unit) {
        if (v) os << key << " = " << *v << " " << unit << "\n";
    };
    auto qd = [&](const char* key, double v, const char* unit) {
        os << key << " = " << v;
        if (unit[0] != '\0') os << " " << unit;
        os << "\n";
    };

    os << "[run]\n";
    if (cfg.scenario) os << "scenario = " << scenario_name(*cfg.scenario) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "[grid]\n";
    os << "n_points = " << cfg.grid_points << "\n";
    qd("pitch", cfg.grid_pitch, "m");
    os << "[source]\n";
    q("diameter", cfg.source_diameter, "m");
    q("wavelength", cfg.wavelength, "m");
    q("coherence_time", cfg.coherence_time, "s");
    q("mean_rate", cfg.mean_rate, "Hz");
    os << "[detector1]\n";
    qd("center", cfg.det1_center, "m");
    qd("aperture", cfg.det1_aperture, "m");
    qd("efficiency", cfg.det1_efficiency, "");
    qd("jitter_fwhm", cfg.det1_jitter_fwhm, "s");
    os << "[detector2]\n";
    qd("center", cfg.det2_center, "m");
    qd("aperture", cfg.det2_aperture, "m");
    qd("efficiency", cfg.det2_efficiency, "");
    qd("jitter_fwhm", cfg.det2_jitter_fwhm, "s");
    os << "[tac]\n";
    qd("min", cfg.tac_min, "s");
    qd("max", cfg.tac_max, "s");
    qd("bin", cfg.tac_bin, "s");
    os << "[hbt]\n";
    q("duration", cfg.hbt_duration, "s");
    qd("peak_halfwidth", cfg.peak_halfwidth, "s");
    qd("baseline_exclusion", cfg.baseline_exclusion, "s");
    os << "[geometry]\n";
    q("z1", cfg.z1, "m");
    q("z2", cfg.z2, "m");
    q("z3", cfg.z3, "m");
    q("f", cfg.f, "m");
    os << "[mask]\n";
    os << "features = " << cfg.mask_features << "\n";
    q("separation", cfg.mask_separation, "m");
    q("hole_diameter", cfg.mask_hole_diameter, "m");
    os << "[reference]\n";
    qd("aperture", cfg.reference_aperture, "m");
    qd("efficiency", cfg.reference_efficiency, "");
    os << "[scan]\n";
    q("start", cfg.scan_start, "m");
    q("stop", cfg.scan_stop, "m");
    q("step", cfg.scan_step, "m");
    os << "frames = " << cfg.scan_frames << "\n";
    if (cfg.temporal_modes) {
        qd("temporal_modes", *cfg.temporal_modes, "");
    } else {
        os << "temporal_modes = auto\n";
    }
    os << "[ideal]\n";
    q("coherence_width", cfg.coherence_width, "m");
    return os.str();
}

}  // namespace gsim
