#include "gemlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gemlab/csv.hpp"
#include "gemlab/rng.hpp"
#include "gemlab/units.hpp"

namespace gem {

const char* run_kind_name(RunKind kind) {
    switch (kind) {
        case RunKind::simulate: return "simulate";
        case RunKind::simulate_4wm: return "simulate-4wm";
        case RunKind::raman: return "raman";
        case RunKind::decay_fit: return "decay-fit";
        case RunKind::tomography: return "tomography";
        case RunKind::tv: return "tv";
        case RunKind::compare: return "compare";
    }
    return "?";
}

namespace {

RunKind parse_kind(const std::string& s, int line) {
    if (s == "simulate") return RunKind::simulate;
    if (s == "simulate-4wm") return RunKind::simulate_4wm;
    if (s == "raman") return RunKind::raman;
    if (s == "decay-fit") return RunKind::decay_fit;
    if (s == "tomography") return RunKind::tomography;
    if (s == "tv") return RunKind::tv;
    if (s == "compare") return RunKind::compare;
    throw ConfigError("unknown kind '" + s + "'", line);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Consumer {
  public:
    explicit Consumer(std::map<std::string, Entry>& entries) : entries_(entries) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::optional<std::string> take_string(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::optional<double> take_quantity(const std::string& key, units::Kind kind) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        const auto q = units::parse(it->second.value, kind);
        if (!q)
            throw ConfigError("key '" + key + "': expected " + units::kind_name(kind) +
                                  ", got '" + it->second.value + "'",
                              it->second.line);
        return q->value;
    }

    std::optional<bool> take_bool(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        if (it->second.value == "true") return true;
        if (it->second.value == "false") return false;
        throw ConfigError("key '" + key + "': expected true/false", it->second.line);
    }

    std::optional<long long> take_int(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("key '" + key + "': expected an integer", it->second.line);
        }
    }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    void require(const std::string& key) const {
        if (!has(key)) throw ConfigError("missing required key '" + key + "'");
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used)
                throw ConfigError("unknown key '" + key + "' for this kind", entry.line);
        }
    }

  private:
    std::map<std::string, Entry>& entries_;
};

void parse_ensemble(Consumer& c, EnsembleParams& e) {
    if (auto v = c.take_quantity("ensemble.optical_depth", units::Kind::dimensionless))
        e.optical_depth = *v;
    if (auto v = c.take_quantity("ensemble.length", units::Kind::length_m)) e.length = *v;
    if (auto v = c.take_quantity("ensemble.excited_linewidth", units::Kind::frequency))
        e.excited_linewidth = *v;
    if (auto v = c.take_quantity("ensemble.ground_decoherence", units::Kind::frequency))
        e.ground_decoherence = *v;
    if (auto v = c.take_quantity("ensemble.raman_detuning", units::Kind::frequency))
        e.raman_detuning = *v;
    if (auto v = c.take_quantity("ensemble.temperature", units::Kind::temperature_k))
        e.temperature = *v;
    if (auto v = c.take_quantity("ensemble.probe_waist", units::Kind::length_m)) e.probe_waist = *v;
    e.validate();
}

void parse_simulate(Consumer& c, ExperimentConfig& config) {
    parse_ensemble(c, config.ensemble);
    SimulateSection& s = config.simulate;

    c.require("control.rabi_frequency");
    s.control_rabi = *c.take_quantity("control.rabi_frequency", units::Kind::frequency);
    if (auto v = c.take_quantity("control.theta", units::Kind::angle_rad)) s.control_theta = *v;

    c.require("schedule.t_write");
    c.require("schedule.t_read");
    s.t_write = *c.take_quantity("schedule.t_write", units::Kind::time_s);
    s.t_read = *c.take_quantity("schedule.t_read", units::Kind::time_s);
    if (auto v = c.take_quantity("schedule.t_hold", units::Kind::time_s)) s.t_hold = *v;
    if (auto v = c.take_bool("schedule.hold_fields_off")) s.hold_fields_off = *v;

    // Gradients: either broadened widths (divided by the medium length) or
    // explicit eta1 values.
    const bool by_width = c.has("schedule.broadened_width_write");
    if (by_width) {
        const double w_write =
            *c.take_quantity("schedule.broadened_width_write", units::Kind::frequency);
        c.require("schedule.broadened_width_read");
        const double w_read =
            *c.take_quantity("schedule.broadened_width_read", units::Kind::frequency);
        s.eta1_write = w_write / config.ensemble.length;
        s.eta1_read = -w_read / config.ensemble.length;
    } else {
        c.require("schedule.eta1_write");
        c.require("schedule.eta1_read");
        s.eta1_write = *c.take_quantity("schedule.eta1_write", units::Kind::gradient);
        s.eta1_read = *c.take_quantity("schedule.eta1_read", units::Kind::gradient);
    }
    if (auto v = c.take_quantity("schedule.eta2_edge", units::Kind::frequency)) {
        // quadratic term given as the extra detuning at the medium edge
        const double half = 0.5 * config.ensemble.length;
        s.eta2 = *v / (half * half);
    }
    if (auto v = c.take_quantity("schedule.delta0", units::Kind::frequency)) s.delta0 = *v;
    if (auto v = c.take_quantity("schedule.delta0_read", units::Kind::frequency))
        s.delta0_read = *v;

    c.require("pulse.fwhm");
    s.pulse_fwhm = *c.take_quantity("pulse.fwhm", units::Kind::time_s);
    c.require("pulse.center");
    s.pulse_center = *c.take_quantity("pulse.center", units::Kind::time_s);
    if (auto v = c.take_quantity("pulse.amplitude", units::Kind::dimensionless))
        s.pulse_amplitude = *v;
    if (auto v = c.take_int("pulse.count")) s.pulse_count = static_cast<int>(*v);
    if (auto v = c.take_quantity("pulse.spacing", units::Kind::time_s)) s.pulse_spacing = *v;
    if (auto v = c.take_quantity("pulse.carrier_detuning", units::Kind::frequency))
        s.carrier_detuning = *v;
    if (s.pulse_count > 1 && !(s.pulse_spacing > s.pulse_fwhm))
        throw ConfigError("pulse.spacing must exceed pulse.fwhm for a train",
                          c.line_of("pulse.spacing"));

    if (auto v = c.take_int("grid.nz")) s.grid.nz = static_cast<int>(*v);
    if (auto v = c.take_quantity("grid.dt", units::Kind::time_s)) s.grid.dt = *v;
}

void parse_raman(Consumer& c, ExperimentConfig& config) {
    RamanSection& r = config.raman;
    r.delta = config.ensemble.raman_detuning;
    r.gamma = config.ensemble.excited_linewidth;
    parse_ensemble(c, config.ensemble);
    r.delta = config.ensemble.raman_detuning;
    r.gamma = config.ensemble.excited_linewidth;
    r.gamma0 = config.ensemble.ground_decoherence;
    r.length = config.ensemble.length;

    c.require("raman.omega_c");
    r.omega_c = *c.take_quantity("raman.omega_c", units::Kind::frequency);
    if (auto v = c.take_quantity("raman.od_m1", units::Kind::dimensionless))
        r.manifold.od_per_line[0] = *v;
    if (auto v = c.take_quantity("raman.od_0", units::Kind::dimensionless))
        r.manifold.od_per_line[1] = *v;
    if (auto v = c.take_quantity("raman.od_p1", units::Kind::dimensionless))
        r.manifold.od_per_line[2] = *v;
    if (auto v = c.take_quantity("raman.bias_field_gauss", units::Kind::dimensionless))
        r.manifold.bias_field_tesla = *v * 1e-4;
    c.require("raman.grid_min");
    c.require("raman.grid_max");
    r.grid_min = *c.take_quantity("raman.grid_min", units::Kind::frequency);
    r.grid_max = *c.take_quantity("raman.grid_max", units::Kind::frequency);
    if (auto v = c.take_int("raman.grid_points")) r.grid_points = static_cast<int>(*v);
    if (auto v = c.take_quantity("raman.broadening_eta1", units::Kind::gradient)) r.eta1 = *v;
    if (auto v = c.take_quantity("raman.noise_sigma", units::Kind::dimensionless))
        r.noise_sigma = *v;
    if (auto v = c.take_bool("raman.fit")) r.do_fit = *v;
    if (auto v = c.take_string("raman.input_csv")) r.input_csv = *v;
    if (r.grid_points < 2) throw ConfigError("raman.grid_points must be >= 2");
    if (!(r.grid_max > r.grid_min)) throw ConfigError("raman grid: need grid_max > grid_min");
}

void parse_decay(Consumer& c, ExperimentConfig& config) {
    DecayFitSection& d = config.decay;
    if (auto v = c.take_string("decay.model")) d.model = *v;
    if (d.model != "thermal" && d.model != "quadratic" && d.model != "thermal_fixed_tau_l")
        throw ConfigError("decay.model must be thermal, quadratic, or thermal_fixed_tau_l");
    if (auto v = c.take_string("decay.input_csv")) d.input_csv = *v;
    if (auto v = c.take_quantity("decay.e0", units::Kind::dimensionless)) d.e0 = *v;
    if (auto v = c.take_quantity("decay.tau_l", units::Kind::time_s)) d.tau_l = *v;
    if (auto v = c.take_quantity("decay.tau_d", units::Kind::time_s)) d.tau_d = *v;
    if (auto v = c.take_quantity("decay.zeta", units::Kind::frequency)) d.zeta = *v;
    if (auto v = c.take_quantity("decay.sigma", units::Kind::length_m)) d.sigma = *v;
    if (auto v = c.take_quantity("decay.length", units::Kind::length_m)) d.length = *v;
    if (auto v = c.take_quantity("decay.gamma_sc", units::Kind::frequency)) d.gamma_sc = *v;
    if (auto v = c.take_quantity("decay.t0", units::Kind::time_s)) d.t0 = *v;
    if (auto v = c.take_int("decay.synth_points")) d.synth_points = static_cast<int>(*v);
    if (auto v = c.take_quantity("decay.synth_t_max", units::Kind::time_s)) d.synth_t_max = *v;
    if (auto v = c.take_quantity("decay.noise_sigma", units::Kind::dimensionless))
        d.noise_sigma = *v;
}

void parse_tomography(Consumer& c, ExperimentConfig& config) {
    TomographySection& t = config.tomography;
    if (auto v = c.take_quantity("tomography.alpha_re", units::Kind::dimensionless))
        t.alpha_re = *v;
    if (auto v = c.take_quantity("tomography.alpha_im", units::Kind::dimensionless))
        t.alpha_im = *v;
    if (auto v = c.take_int("tomography.pulses")) t.pulses = static_cast<std::size_t>(*v);
    if (auto v = c.take_quantity("tomography.phase_drift", units::Kind::angle_rad))
        t.phase_drift = *v;
    if (auto v = c.take_quantity("tomography.loss_eta", units::Kind::dimensionless))
        t.loss_eta = *v;
    if (auto v = c.take_bool("tomography.surfaces")) t.surfaces = *v;
    if (t.loss_eta < 0.0 || t.loss_eta > 1.0)
        throw ConfigError("tomography.loss_eta must be in [0, 1]");
    if (t.pulses < 2) throw ConfigError("tomography.pulses must be >= 2");
}

void parse_tv(Consumer& c, ExperimentConfig& config) {
    TvSection& t = config.tv;
    if (auto v = c.take_string("tv.channel")) t.channel = *v;
    if (t.channel != "identity" && t.channel != "loss" && t.channel != "classical")
        throw ConfigError("tv.channel must be identity, loss, or classical");
    if (auto v = c.take_quantity("tv.eta", units::Kind::dimensionless)) t.eta = *v;
    if (auto v = c.take_quantity("tv.gain", units::Kind::dimensionless)) t.gain = *v;
    if (auto v = c.take_quantity("tv.alpha_re", units::Kind::dimensionless)) t.alpha_re = *v;
    if (auto v = c.take_quantity("tv.alpha_im", units::Kind::dimensionless)) t.alpha_im = *v;
    if (auto v = c.take_int("tv.samples")) t.samples = static_cast<std::size_t>(*v);
    if (auto v = c.take_int("tv.bootstrap")) t.bootstrap = static_cast<int>(*v);
    if (auto v = c.take_bool("tv.correct")) t.correct = *v;
    if (auto v = c.take_quantity("tv.budget_spatial", units::Kind::dimensionless))
        t.budget_spatial = *v;
    if (auto v = c.take_quantity("tv.budget_visibility", units::Kind::dimensionless))
        t.budget_visibility = *v;
    if (auto v = c.take_quantity("tv.budget_heterodyne", units::Kind::dimensionless))
        t.budget_heterodyne = *v;
    if (auto v = c.take_quantity("tv.budget_qe", units::Kind::dimensionless)) t.budget_qe = *v;
    if (auto v = c.take_quantity("tv.budget_shot_dark", units::Kind::dimensionless))
        t.budget_shot_dark = *v;
}

void parse_compare(Consumer& c, ExperimentConfig& config) {
    CompareSection& m = config.compare;
    if (auto v = c.take_string("compare.records_csv")) m.records_csv = *v;
    if (auto v = c.take_bool("compare.include_builtin")) m.include_builtin = *v;
    if (auto v = c.take_quantity("compare.attenuation", units::Kind::attenuation_db_per_km))
        m.attenuation_db_per_km = *v;
    if (auto v = c.take_quantity("compare.group_index", units::Kind::dimensionless))
        m.group_index = *v;
}

const std::set<std::string>& known_metrics(RunKind kind) {
    static const std::set<std::string> simulate = {
        "efficiency", "idler_fraction", "probe_gain", "overlap", "fractional_delay",
        "transmitted_fraction"};
    static const std::set<std::string> raman = {"od_m1", "od_0", "od_p1", "omega_c_hz",
                                                "residual", "min_transmission"};
    static const std::set<std::string> decay = {"e0", "tau_l", "tau_d", "zeta", "gamma_sc",
                                                "residual", "one_over_e_time"};
    static const std::set<std::string> tomo = {"fidelity", "fidelity_vs_input", "n_bar",
                                               "n_sigma"};
    static const std::set<std::string> tv = {"t", "v", "err_t", "err_v", "t_corrected",
                                             "v_corrected", "fiber_eta_100us"};
    static const std::set<std::string> cmp = {"fifty_ratio", "fiber_fifty_time_s",
                                              "builtin_fifty_time_s"};
    switch (kind) {
        case RunKind::simulate:
        case RunKind::simulate_4wm: return simulate;
        case RunKind::raman: return raman;
        case RunKind::decay_fit: return decay;
        case RunKind::tomography: return tomo;
        case RunKind::tv: return tv;
        case RunKind::compare: return cmp;
    }
    return simulate;
}

void parse_asserts(Consumer& c, std::map<std::string, Entry>& entries, ExperimentConfig& config) {
    const std::set<std::string>& metrics = known_metrics(config.kind);
    std::map<std::string, AssertRule> rules;
    for (auto& [key, entry] : entries) {
        if (key.rfind("assert.", 0) != 0) continue;
        std::string tail = key.substr(7);
        bool is_min = false;
        if (tail.size() > 4 && tail.compare(tail.size() - 4, 4, "_min") == 0) {
            is_min = true;
            tail = tail.substr(0, tail.size() - 4);
        } else if (tail.size() > 4 && tail.compare(tail.size() - 4, 4, "_max") == 0) {
            tail = tail.substr(0, tail.size() - 4);
        } else {
            throw ConfigError("assert key '" + key + "' must end in _min or _max", entry.line);
        }
        if (!metrics.count(tail))
            throw ConfigError("assert key '" + key + "': unknown metric '" + tail + "' for kind " +
                                  run_kind_name(config.kind),
                              entry.line);
        const double value = *c.take_quantity(key, units::Kind::dimensionless);
        if (is_min) rules[tail].min = value;
        else rules[tail].max = value;
        rules[tail].metric = tail;
    }
    for (auto& [name, rule] : rules) config.asserts.push_back(rule);
}

bool kind_is_stochastic(const ExperimentConfig& config) {
    switch (config.kind) {
        case RunKind::tomography:
        case RunKind::tv: return true;
        case RunKind::raman: return config.raman.noise_sigma > 0.0;
        case RunKind::decay_fit: return config.decay.noise_sigma > 0.0;
        default: return false;
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = csv::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(origin + ": malformed section header", line_no);
            section = csv::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": expected 'key = value'", line_no);
        const std::string key = csv::trim(t.substr(0, eq));
        const std::string value = csv::trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ": empty key or value", line_no);
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full)) throw ConfigError("duplicate key '" + full + "'", line_no);
        entries[full] = Entry{value, line_no, false};
    }

    ExperimentConfig config;
    Consumer c(entries);

    c.require("kind");
    config.kind = parse_kind(*c.take_string("kind"), c.line_of("kind"));
    if (auto v = c.take_int("seed")) {
        config.seed = static_cast<std::uint64_t>(*v);
        config.seed_set = true;
    }
    if (auto v = c.take_string("output.dir")) config.output_dir = *v;
    if (auto v = c.take_bool("output.csv")) config.emit_csv = *v;
    if (auto v = c.take_bool("output.json")) config.emit_json = *v;
    if (auto v = c.take_bool("output.plotdata")) config.emit_plotdata = *v;

    switch (config.kind) {
        case RunKind::simulate:
        case RunKind::simulate_4wm: parse_simulate(c, config); break;
        case RunKind::raman: parse_raman(c, config); break;
        case RunKind::decay_fit: parse_decay(c, config); break;
        case RunKind::tomography: parse_tomography(c, config); break;
        case RunKind::tv: parse_tv(c, config); break;
        case RunKind::compare: parse_compare(c, config); break;
    }
    parse_asserts(c, entries, config);
    c.reject_unused();

    if (kind_is_stochastic(config) && !config.seed_set)
        throw ConfigError("seed is mandatory for stochastic kinds (add 'seed = <N>')");

    config.config_hash = fnv1a64(canonical_config(config));
    return config;
}

ExperimentConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string canonical_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out.precision(17);
    out << "kind = " << run_kind_name(config.kind) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "output.csv = " << config.emit_csv << "\n";
    out << "output.json = " << config.emit_json << "\n";
    out << "output.plotdata = " << config.emit_plotdata << "\n";

    const EnsembleParams& e = config.ensemble;
    auto kv = [&out](const std::string& key, double value) {
        out << key << " = " << value << "\n";
    };
    switch (config.kind) {
        case RunKind::simulate:
        case RunKind::simulate_4wm: {
            kv("ensemble.optical_depth", e.optical_depth);
            kv("ensemble.length_m", e.length);
            kv("ensemble.excited_linewidth_rad_s", e.excited_linewidth);
            kv("ensemble.ground_decoherence_rad_s", e.ground_decoherence);
            kv("ensemble.raman_detuning_rad_s", e.raman_detuning);
            kv("ensemble.temperature_k", e.temperature);
            kv("ensemble.probe_waist_m", e.probe_waist);
            const SimulateSection& s = config.simulate;
            kv("control.rabi_rad_s", s.control_rabi);
            kv("control.theta_rad", s.control_theta);
            kv("schedule.t_write_s", s.t_write);
            kv("schedule.t_hold_s", s.t_hold);
            kv("schedule.t_read_s", s.t_read);
            kv("schedule.eta1_write_rad_s_m", s.eta1_write);
            kv("schedule.eta1_read_rad_s_m", s.eta1_read);
            kv("schedule.eta2_rad_s_m2", s.eta2);
            kv("schedule.delta0_rad_s", s.delta0);
            if (!std::isnan(s.delta0_read)) kv("schedule.delta0_read_rad_s", s.delta0_read);
            out << "schedule.hold_fields_off = " << s.hold_fields_off << "\n";
            kv("pulse.fwhm_s", s.pulse_fwhm);
            kv("pulse.center_s", s.pulse_center);
            kv("pulse.amplitude", s.pulse_amplitude);
            out << "pulse.count = " << s.pulse_count << "\n";
            kv("pulse.spacing_s", s.pulse_spacing);
            kv("pulse.carrier_detuning_rad_s", s.carrier_detuning);
            out << "grid.nz = " << s.grid.nz << "\n";
            kv("grid.dt_s", s.grid.dt);
            break;
        }
        case RunKind::raman: {
            const RamanSection& r = config.raman;
            kv("raman.od_m1", r.manifold.od_per_line[0]);
            kv("raman.od_0", r.manifold.od_per_line[1]);
            kv("raman.od_p1", r.manifold.od_per_line[2]);
            kv("raman.bias_field_t", r.manifold.bias_field_tesla);
            kv("raman.omega_c_rad_s", r.omega_c);
            kv("raman.delta_rad_s", r.delta);
            kv("raman.gamma_rad_s", r.gamma);
            kv("raman.gamma0_rad_s", r.gamma0);
            kv("raman.grid_min_rad_s", r.grid_min);
            kv("raman.grid_max_rad_s", r.grid_max);
            out << "raman.grid_points = " << r.grid_points << "\n";
            kv("raman.eta1_rad_s_m", r.eta1);
            kv("raman.noise_sigma", r.noise_sigma);
            out << "raman.fit = " << r.do_fit << "\n";
            out << "raman.input_csv = " << r.input_csv << "\n";
            break;
        }
        case RunKind::decay_fit: {
            const DecayFitSection& d = config.decay;
            out << "decay.model = " << d.model << "\n";
            out << "decay.input_csv = " << d.input_csv << "\n";
            kv("decay.e0", d.e0);
            kv("decay.tau_l_s", d.tau_l);
            kv("decay.tau_d_s", d.tau_d);
            kv("decay.zeta_rad_s", d.zeta);
            kv("decay.sigma_m", d.sigma);
            kv("decay.length_m", d.length);
            kv("decay.gamma_sc_rad_s", d.gamma_sc);
            kv("decay.t0_s", d.t0);
            out << "decay.synth_points = " << d.synth_points << "\n";
            kv("decay.synth_t_max_s", d.synth_t_max);
            kv("decay.noise_sigma", d.noise_sigma);
            break;
        }
        case RunKind::tomography: {
            const TomographySection& t = config.tomography;
            kv("tomography.alpha_re", t.alpha_re);
            kv("tomography.alpha_im", t.alpha_im);
            out << "tomography.pulses = " << t.pulses << "\n";
            kv("tomography.phase_drift_rad", t.phase_drift);
            kv("tomography.loss_eta", t.loss_eta);
            out << "tomography.surfaces = " << t.surfaces << "\n";
            break;
        }
        case RunKind::tv: {
            const TvSection& t = config.tv;
            out << "tv.channel = " << t.channel << "\n";
            kv("tv.eta", t.eta);
            kv("tv.gain", t.gain);
            kv("tv.alpha_re", t.alpha_re);
            kv("tv.alpha_im", t.alpha_im);
            out << "tv.samples = " << t.samples << "\n";
            out << "tv.bootstrap = " << t.bootstrap << "\n";
            out << "tv.correct = " << t.correct << "\n";
            kv("tv.budget_spatial", t.budget_spatial);
            kv("tv.budget_visibility", t.budget_visibility);
            kv("tv.budget_heterodyne", t.budget_heterodyne);
            kv("tv.budget_qe", t.budget_qe);
            kv("tv.budget_shot_dark", t.budget_shot_dark);
            break;
        }
        case RunKind::compare: {
            const CompareSection& m = config.compare;
            out << "compare.records_csv = " << m.records_csv << "\n";
            out << "compare.include_builtin = " << m.include_builtin << "\n";
            kv("compare.attenuation_db_per_km", m.attenuation_db_per_km);
            kv("compare.group_index", m.group_index);
            break;
        }
    }
    for (const AssertRule& rule : config.asserts) {
        if (rule.min) out << "assert." << rule.metric << "_min = " << *rule.min << "\n";
        if (rule.max) out << "assert." << rule.metric << "_max = " << *rule.max << "\n";
    }
    return out.str();
}

}  // namespace gem
