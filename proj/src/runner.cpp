#include "gemlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gemlab/csv.hpp"
#include "gemlab/decay_models.hpp"
#include "gemlab/rng.hpp"
#include "gemlab/tomography.hpp"
#include "gemlab/tv_benchmark.hpp"

namespace gem {

namespace {

using nlohmann::ordered_json;

constexpr const char* version_string = "0.1.0";

class ArtifactWriter {
  public:
    ArtifactWriter(const std::string& dir, RunManifest& manifest)
        : dir_(dir), manifest_(manifest) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        const std::string path = dir_ + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write artifact '" + path + "'");
        out << content;
        ArtifactEntry entry;
        entry.name = name;
        entry.checksum = fnv1a64(content);
        entry.bytes = content.size();
        manifest_.artifacts.push_back(entry);
        manifest_.stage_checksums[name] = entry.checksum;
    }

  private:
    std::string dir_;
    RunManifest& manifest_;
};

std::string trace_csv(const FieldTrace& trace) {
    std::ostringstream out;
    out.precision(12);
    out << "time_s,re,im,abs2\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const cplx a = trace.amplitudes[i];
        out << trace.time_at(i) << ',' << a.real() << ',' << a.imag() << ',' << std::norm(a)
            << '\n';
    }
    return out.str();
}

std::string spinwave_csv(const std::vector<SpinwaveState>& snapshots) {
    std::ostringstream out;
    out.precision(12);
    out << "timestamp_s,z_m,re,im,abs2\n";
    for (const SpinwaveState& snap : snapshots) {
        for (std::size_t i = 0; i < snap.z_grid.size(); ++i) {
            const cplx a = snap.coherence[i];
            out << snap.timestamp << ',' << snap.z_grid[i] << ',' << a.real() << ',' << a.imag()
                << ',' << std::norm(a) << '\n';
        }
    }
    return out.str();
}

std::string quadratures_csv(const QuadratureEnsemble& ensemble) {
    std::ostringstream out;
    out.precision(12);
    out << "shot_index,x,p\n";
    for (std::size_t i = 0; i < ensemble.size(); ++i)
        out << i << ',' << ensemble.x[i] << ',' << ensemble.p[i] << '\n';
    return out.str();
}

std::string surface_csv(const QSurface& surface) {
    std::ostringstream out;
    out.precision(12);
    out << "x,p,value\n";
    const int bins = surface.grid.bins;
    const double cell = surface.cell();
    for (int ip = 0; ip < bins; ++ip) {
        for (int ix = 0; ix < bins; ++ix) {
            const double x = -surface.grid.half_range + cell * (0.5 + ix);
            const double p = -surface.grid.half_range + cell * (0.5 + ip);
            out << x << ',' << p << ','
                << surface.values[static_cast<std::size_t>(ip) * static_cast<std::size_t>(bins) +
                                  static_cast<std::size_t>(ix)]
                << '\n';
        }
    }
    return out.str();
}

ordered_json state_json(const GaussianStateEstimate& state) {
    ordered_json j;
    j["mean"] = {state.mean(0), state.mean(1)};
    j["covariance"] = {{state.covariance(0, 0), state.covariance(0, 1)},
                       {state.covariance(1, 0), state.covariance(1, 1)}};
    j["kind"] = state.kind == StateDomain::q ? "Q" : "Wigner";
    j["m"] = state.sample_count;
    return j;
}

FieldTrace build_input_pulse(const SimulateSection& s, double t_total) {
    const double dt_sample = s.pulse_fwhm / 64.0;
    if (s.pulse_count <= 1) {
        GaussianPulseSpec spec;
        spec.center = s.pulse_center;
        spec.fwhm = s.pulse_fwhm;
        spec.amplitude = s.pulse_amplitude;
        FieldTrace trace = make_gaussian_pulse(spec, 0.0, t_total, dt_sample);
        trace.carrier_detuning = s.carrier_detuning;
        return trace;
    }
    PulseTrain train =
        make_pulse_train(static_cast<std::size_t>(s.pulse_count), s.pulse_center, s.pulse_spacing,
                         s.pulse_fwhm, {}, 0.0, t_total, dt_sample);
    train.trace.carrier_detuning = s.carrier_detuning;
    for (cplx& a : train.trace.amplitudes) a *= s.pulse_amplitude;
    return train.trace;
}

struct PeakInfo {
    double time;
    double height;  // |a|^2
};

std::vector<PeakInfo> find_peaks(const FieldTrace& trace, double min_fraction) {
    std::vector<PeakInfo> peaks;
    double max_h = 0.0;
    for (const cplx& a : trace.amplitudes) max_h = std::max(max_h, std::norm(a));
    const double floor = max_h * min_fraction;
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double h = std::norm(trace.amplitudes[i]);
        if (h > floor && h >= std::norm(trace.amplitudes[i - 1]) &&
            h > std::norm(trace.amplitudes[i + 1]))
            peaks.push_back({trace.time_at(i), h});
    }
    return peaks;
}

void run_simulate(const ExperimentConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const SimulateSection& s = config.simulate;

    ControlField control;
    control.rabi_frequency = s.control_rabi;
    control.angle_theta = s.control_theta;
    ExperimentSchedule schedule = build_storage_schedule(
        s.t_write, s.t_hold, s.t_read, s.eta1_write, s.eta1_read, control, s.hold_fields_off);
    schedule.gradient.eta2 = s.eta2;
    schedule.gradient.delta0 = s.delta0;
    schedule.gradient.delta0_read = s.delta0_read;

    const FieldTrace input = build_input_pulse(s, schedule.t_total);

    const bool with_4wm = config.kind == RunKind::simulate_4wm;
    const SimulationResult result = with_4wm ? solve_gem_4wm(config.ensemble, schedule, input, s.grid)
                                             : solve_gem(config.ensemble, schedule, input, s.grid);

    std::uint64_t traces_checksum = 0;
    if (config.emit_csv) {
        const std::string in_csv = trace_csv(result.input_trace);
        const std::string tr_csv = trace_csv(result.transmitted_trace);
        const std::string out_csv = trace_csv(result.output_trace);
        traces_checksum = fnv1a64(out_csv, fnv1a64(tr_csv, fnv1a64(in_csv)));
        writer.write("input.csv", in_csv);
        writer.write("transmitted.csv", tr_csv);
        writer.write("output.csv", out_csv);
        if (result.idler_trace) writer.write("idler.csv", trace_csv(*result.idler_trace));
        writer.write("spinwave.csv", spinwave_csv(result.spinwave_snapshots));
    }

    manifest.metrics["efficiency"] = result.efficiency;
    manifest.metrics["idler_fraction"] = result.idler_fraction;
    manifest.metrics["probe_gain"] = result.probe_gain;
    manifest.metrics["transmitted_fraction"] = result.transmitted_fraction;

    ordered_json rj;
    rj["efficiency"] = result.efficiency;
    rj["idler_fraction"] = result.idler_fraction;
    rj["probe_gain"] = result.probe_gain;
    rj["transmitted_fraction"] = manifest.metrics["transmitted_fraction"];
    rj["grid_nz"] = result.grid.nz;
    rj["grid_dt_s"] = result.grid.dt;
    rj["recall_window_start_s"] = result.recall_window.first;
    rj["recall_window_end_s"] = result.recall_window.second;
    rj["checksum"] = traces_checksum;

    if (s.pulse_count <= 1 && result.efficiency > 0.0) {
        GaussianPulseSpec reference;
        reference.fwhm = s.pulse_fwhm;
        reference.center = s.pulse_center;
        const OverlapResult overlap = mode_overlap(result.output_trace, reference);
        manifest.metrics["overlap"] = overlap.overlap;
        rj["overlap"] = overlap.overlap;
        rj["overlap_phase_rad"] = overlap.phase;
        const double storage = overlap.center - s.pulse_center;
        manifest.metrics["fractional_delay"] = fractional_delay(storage, s.pulse_fwhm);
        rj["fractional_delay"] = manifest.metrics["fractional_delay"];
    }
    if (s.pulse_count > 1) {
        // multimode bookkeeping: recalled peaks and their ordering
        const std::vector<PeakInfo> in_peaks = find_peaks(result.input_trace, 0.2);
        const std::vector<PeakInfo> out_peaks = find_peaks(result.output_trace, 0.2);
        rj["input_peaks"] = in_peaks.size();
        rj["recalled_peaks"] = out_peaks.size();
        std::ostringstream pulse_csv;
        pulse_csv.precision(12);
        pulse_csv << "peak_index,time_s,height\n";
        for (std::size_t i = 0; i < out_peaks.size(); ++i)
            pulse_csv << i << ',' << out_peaks[i].time << ',' << out_peaks[i].height << '\n';
        if (config.emit_csv) writer.write("recalled_peaks.csv", pulse_csv.str());
        // ordering is only identifiable when the input amplitudes tag the pulses
        if (in_peaks.size() == out_peaks.size() && in_peaks.size() >= 2 &&
            std::abs(in_peaks.front().height - in_peaks.back().height) >
                0.1 * in_peaks.front().height) {
            const bool in_rising = in_peaks.back().height > in_peaks.front().height;
            const bool out_rising = out_peaks.back().height > out_peaks.front().height;
            rj["recall_order"] = (in_rising == out_rising) ? "preserved" : "reversed";
        } else {
            rj["recall_order"] = "indeterminate (uniform train; see recalled_peaks.csv)";
        }
    }
    for (const std::string& w : result.warnings) rj["warnings"].push_back(w);
    if (config.emit_json) writer.write("result.json", rj.dump(2) + "\n");
}

void run_raman(const ExperimentConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const RamanSection& r = config.raman;

    RamanSpectrum spectrum;
    if (!r.input_csv.empty()) {
        const csv::Table table = csv::read_file(r.input_csv);
        for (const auto& row : table.rows) {
            if (row.size() < 2)
                throw std::runtime_error("spectrum CSV: need columns detuning_hz,transmission");
            spectrum.two_photon_detunings.push_back(csv::to_double(row[0]) * two_pi);
            spectrum.transmission.push_back(csv::to_double(row[1]));
            if (row.size() > 2) spectrum.sigma.push_back(csv::to_double(row[2]));
        }
        spectrum.validate();
    } else {
        std::vector<double> grid(static_cast<std::size_t>(r.grid_points));
        for (int i = 0; i < r.grid_points; ++i)
            grid[static_cast<std::size_t>(i)] =
                r.grid_min + (r.grid_max - r.grid_min) * static_cast<double>(i) /
                                 static_cast<double>(r.grid_points - 1);
        spectrum = r.eta1 != 0.0
                       ? simulate_broadened_spectrum(r.manifold, r.omega_c, r.delta, r.gamma,
                                                     r.gamma0, r.eta1, r.length, grid)
                       : simulate_manifold_spectrum(r.manifold, r.omega_c, r.delta, r.gamma,
                                                    r.gamma0, grid);
        if (r.noise_sigma > 0.0) {
            auto rng = make_rng(config.seed, "raman-noise");
            std::normal_distribution<double> normal(0.0, r.noise_sigma);
            for (double& t : spectrum.transmission) t = std::max(0.0, t + normal(rng));
            spectrum.sigma.assign(spectrum.transmission.size(), r.noise_sigma);
        }
    }

    double min_t = 1.0;
    for (double t : spectrum.transmission) min_t = std::min(min_t, t);
    manifest.metrics["min_transmission"] = min_t;

    if (config.emit_csv) {
        std::ostringstream out;
        out.precision(12);
        out << "detuning_hz,transmission";
        if (!spectrum.sigma.empty()) out << ",sigma";
        out << '\n';
        for (std::size_t i = 0; i < spectrum.transmission.size(); ++i) {
            out << spectrum.two_photon_detunings[i] / two_pi << ',' << spectrum.transmission[i];
            if (!spectrum.sigma.empty()) out << ',' << spectrum.sigma[i];
            out << '\n';
        }
        writer.write("spectrum.csv", out.str());
    }

    if (r.do_fit) {
        SpectrumFitSetup setup;
        setup.manifold_guess = r.manifold;
        // fits start displaced from the generating values
        for (double& od : setup.manifold_guess.od_per_line) od = std::max(od * 0.7, 0.5);
        setup.omega_c_guess = r.omega_c * 1.2;
        setup.delta = r.delta;
        setup.gamma = r.gamma;
        setup.gamma0 = r.gamma0;
        const SpectrumFitResult fit = fit_spectrum(spectrum, setup);

        manifest.metrics["od_m1"] = fit.od_per_line[0];
        manifest.metrics["od_0"] = fit.od_per_line[1];
        manifest.metrics["od_p1"] = fit.od_per_line[2];
        manifest.metrics["omega_c_hz"] = fit.omega_c / two_pi;
        manifest.metrics["residual"] = fit.residual_norm;

        ordered_json fj;
        fj["parameters"] = {{"od_m1", fit.od_per_line[0]},
                            {"od_0", fit.od_per_line[1]},
                            {"od_p1", fit.od_per_line[2]},
                            {"omega_c_hz", fit.omega_c / two_pi}};
        fj["uncertainties"] = {{"od_m1", fit.od_uncertainty[0]},
                               {"od_0", fit.od_uncertainty[1]},
                               {"od_p1", fit.od_uncertainty[2]},
                               {"omega_c_hz", fit.omega_c_uncertainty / two_pi}};
        fj["residual"] = fit.residual_norm;
        fj["iterations"] = fit.iterations;
        fj["converged"] = fit.converged;
        if (config.emit_json) writer.write("fit.json", fj.dump(2) + "\n");
    }
}

void run_decay_fit(const ExperimentConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const DecayFitSection& d = config.decay;

    std::vector<DecayPoint> points;
    if (!d.input_csv.empty()) {
        const csv::Table table = csv::read_file(d.input_csv);
        for (const auto& row : table.rows) {
            if (row.size() < 2) throw std::runtime_error("decay CSV: need columns t_s,efficiency");
            DecayPoint pt;
            pt.t = csv::to_double(row[0]);
            pt.efficiency = csv::to_double(row[1]);
            if (row.size() > 2) pt.sigma = csv::to_double(row[2]);
            points.push_back(pt);
        }
    } else {
        QuadraticDecayParams qp;
        qp.e0 = d.e0;
        qp.zeta = d.zeta;
        qp.sigma = d.sigma;
        qp.length = d.length;
        qp.gamma_sc = d.gamma_sc;
        qp.t0 = d.t0;
        auto rng = make_rng(config.seed, "decay-noise");
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < d.synth_points; ++i) {
            DecayPoint pt;
            pt.t = d.synth_t_max * static_cast<double>(i) /
                   static_cast<double>(d.synth_points - 1);
            pt.efficiency = d.model == "quadratic"
                                ? quadratic_decay_model(pt.t, qp)
                                : thermal_decay_model(pt.t, d.e0, d.tau_l, d.tau_d);
            if (d.noise_sigma > 0.0) {
                pt.efficiency += d.noise_sigma * normal(rng);
                pt.sigma = d.noise_sigma;
            }
            points.push_back(pt);
        }
    }

    if (config.emit_csv) {
        std::ostringstream out;
        out.precision(12);
        out << "t_s,efficiency";
        const bool has_sigma = !points.empty() && points.front().sigma > 0.0;
        if (has_sigma) out << ",sigma";
        out << '\n';
        for (const DecayPoint& pt : points) {
            out << pt.t << ',' << pt.efficiency;
            if (has_sigma) out << ',' << pt.sigma;
            out << '\n';
        }
        writer.write("decay.csv", out.str());
    }

    DecayModelKind kind = DecayModelKind::thermal;
    if (d.model == "quadratic") kind = DecayModelKind::quadratic;
    if (d.model == "thermal_fixed_tau_l") kind = DecayModelKind::thermal_fixed_tau_l;

    DecayFitGuess guess;
    guess.e0 = d.e0 * 0.9;
    guess.tau_l = d.tau_l * 1.3;
    guess.tau_d = d.tau_d * 0.8;
    guess.quadratic.e0 = d.e0 * 0.9;
    guess.quadratic.zeta = d.zeta != 0.0 ? d.zeta * 1.3 : 1e3;
    guess.quadratic.sigma = d.sigma;
    guess.quadratic.length = d.length;
    guess.quadratic.gamma_sc = d.gamma_sc != 0.0 ? d.gamma_sc * 0.8 : 1e2;
    guess.quadratic.t0 = d.t0;
    if (kind == DecayModelKind::thermal_fixed_tau_l) guess.tau_l = d.tau_l;

    const DecayFitResult fit = fit_decay(points, kind, guess);

    ordered_json fj;
    for (std::size_t k = 0; k < fit.param_names.size(); ++k) {
        const std::string& name = fit.param_names[k];
        const double value = fit.params(static_cast<Eigen::Index>(k));
        fj["parameters"][name] = value;
        fj["uncertainties"][name] = fit.uncertainties(static_cast<Eigen::Index>(k));
        if (name == "E0") manifest.metrics["e0"] = value;
        if (name == "tau_l") manifest.metrics["tau_l"] = value;
        if (name == "tau_d") manifest.metrics["tau_d"] = value;
        if (name == "zeta") manifest.metrics["zeta"] = value;
        if (name == "Gamma_sc") manifest.metrics["gamma_sc"] = value;
    }
    fj["residual"] = fit.residual_norm;
    fj["iterations"] = fit.iterations;
    fj["converged"] = fit.converged;
    manifest.metrics["residual"] = fit.residual_norm;

    // 1/e time of the fitted curve (thermal models only)
    if (kind != DecayModelKind::quadratic) {
        const double e0 = fit.params(0);
        const double tau_l = kind == DecayModelKind::thermal ? fit.params(1) : guess.tau_l;
        const double tau_d = kind == DecayModelKind::thermal ? fit.params(2) : fit.params(1);
        double lo = 0.0, hi = 20.0 * tau_l;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (thermal_decay_model(mid, e0, tau_l, tau_d) > e0 / std::exp(1.0)) lo = mid;
            else hi = mid;
        }
        manifest.metrics["one_over_e_time"] = 0.5 * (lo + hi);
        fj["one_over_e_time_s"] = manifest.metrics["one_over_e_time"];
    }
    if (config.emit_json) writer.write("fit.json", fj.dump(2) + "\n");
}

void run_tomography(const ExperimentConfig& config, ArtifactWriter& writer,
                    RunManifest& manifest) {
    const TomographySection& t = config.tomography;
    const cplx alpha_in(t.alpha_re, t.alpha_im);
    const cplx alpha_out = std::sqrt(t.loss_eta) * alpha_in;

    const auto records =
        synthesize_heterodyne(alpha_out, t.phase_drift, t.pulses, derive_seed(config.seed, "tomo"));
    const QuadratureEnsemble ensemble =
        demodulate_all(records, records.front().beat_frequency);

    if (config.emit_csv) writer.write("quadratures.csv", quadratures_csv(ensemble));

    std::optional<QGridSpec> grid;
    if (t.surfaces) grid = QGridSpec{};
    const QEstimate q = estimate_q(ensemble, grid);
    const GaussianStateEstimate w = q_to_wigner(q.state);

    if (config.emit_csv && q.surface) {
        writer.write("q_surface.csv", surface_csv(*q.surface));
        writer.write("wigner_surface.csv", surface_csv(render_gaussian_surface(w, *grid)));
    }

    // references for fidelity: the expected output state and the ideal input
    GaussianStateEstimate expected;
    expected.kind = StateDomain::wigner;
    expected.mean << std::sqrt(2.0) * alpha_out.real(), std::sqrt(2.0) * alpha_out.imag();
    expected.covariance = 0.5 * Eigen::Matrix2d::Identity();
    GaussianStateEstimate ideal_input = expected;
    ideal_input.mean << std::sqrt(2.0) * alpha_in.real(), std::sqrt(2.0) * alpha_in.imag();

    const double fidelity = gaussian_fidelity(w, expected);
    const double fidelity_vs_input = gaussian_fidelity(w, ideal_input);
    const PhotonNumberEstimate n = mean_photon_number(ensemble);

    manifest.metrics["fidelity"] = fidelity;
    manifest.metrics["fidelity_vs_input"] = fidelity_vs_input;
    manifest.metrics["n_bar"] = n.n_bar;
    manifest.metrics["n_sigma"] = n.sigma;

    ordered_json rj;
    rj["state"] = state_json(w);
    rj["q_state"] = state_json(q.state);
    rj["fidelity"] = fidelity;
    rj["fidelity_vs_input"] = fidelity_vs_input;
    rj["n_bar"] = n.n_bar;
    rj["n_sigma"] = n.sigma;
    rj["pulses"] = t.pulses;
    rj["loss_eta"] = t.loss_eta;
    if (config.emit_json) writer.write("state.json", rj.dump(2) + "\n");
}

void run_tv(const ExperimentConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const TvSection& t = config.tv;
    const cplx alpha(t.alpha_re, t.alpha_im);

    auto rng_in = make_rng(config.seed, "tv-input");
    auto rng_out = make_rng(config.seed, "tv-output");
    const QuadratureEnsemble input = sample_coherent_ensemble(alpha, t.samples, rng_in);
    QuadratureEnsemble output;
    if (t.channel == "identity") {
        // an ideal channel reproduces the very same samples
        output = input;
    } else if (t.channel == "loss") {
        output = sample_loss_channel_output(alpha, t.eta, t.samples, rng_out);
    } else {
        output = sample_classical_channel_output(alpha, t.gain, t.samples, rng_out);
    }

    DetectionBudget budget;
    budget.spatial_filter_transmission = t.budget_spatial;
    budget.fringe_visibility_squared = t.budget_visibility;
    budget.heterodyne_penalty = t.budget_heterodyne;
    budget.detector_qe = t.budget_qe;
    budget.shotnoise_to_darknoise_factor = t.budget_shot_dark;

    if (t.correct) {
        // the output is measured through the lossy detection chain; the
        // input reference is the known prepared state
        budget.validate();
        const double eta_det = budget.total_eta();
        auto rng_det = make_rng(config.seed, "tv-detection");
        std::normal_distribution<double> vac(0.0, 1.0);
        for (std::size_t i = 0; i < output.size(); ++i) {
            output.x[i] = std::sqrt(eta_det) * output.x[i] + std::sqrt(1.0 - eta_det) * vac(rng_det);
            output.p[i] = std::sqrt(eta_det) * output.p[i] + std::sqrt(1.0 - eta_det) * vac(rng_det);
        }
    }

    TVOptions options;
    options.bootstrap_resamples = t.bootstrap;
    options.seed = derive_seed(config.seed, "tv-bootstrap-master");
    const TVPoint raw = tv_from_ensembles(input, output, options);

    manifest.metrics["t"] = raw.t;
    manifest.metrics["v"] = raw.v;
    manifest.metrics["err_t"] = raw.err_t;
    manifest.metrics["err_v"] = raw.err_v;

    ordered_json rj;
    rj["raw"] = {{"T", raw.t}, {"V", raw.v}, {"err_T", raw.err_t}, {"err_V", raw.err_v}};
    rj["channel"] = t.channel;
    rj["samples"] = t.samples;
    rj["bootstrap"] = t.bootstrap;

    if (t.correct) {
        const TVPoint corrected = correct_detection(raw, budget);
        manifest.metrics["t_corrected"] = corrected.t;
        manifest.metrics["v_corrected"] = corrected.v;
        rj["corrected"] = {{"T", corrected.t},
                           {"V", corrected.v},
                           {"err_T", corrected.err_t},
                           {"err_V", corrected.err_v}};
        rj["detection_budget"] = {{"spatial_filter_transmission", budget.spatial_filter_transmission},
                                  {"fringe_visibility_squared", budget.fringe_visibility_squared},
                                  {"heterodyne_penalty", budget.heterodyne_penalty},
                                  {"detector_qe", budget.detector_qe},
                                  {"shotnoise_to_darknoise_factor",
                                   budget.shotnoise_to_darknoise_factor},
                                  {"total_eta", budget.total_eta()}};
    }

    const FiberReference fiber_100us = fiber_reference(100e-6);
    manifest.metrics["fiber_eta_100us"] = fiber_100us.transmission;
    rj["fiber_reference_100us"] = {{"eta", fiber_100us.transmission},
                                   {"T", fiber_100us.tv.t},
                                   {"V", fiber_100us.tv.v}};
    if (config.emit_json) writer.write("tv.json", rj.dump(2) + "\n");

    if (config.emit_plotdata) {
        const BoundaryCurves curves = boundary_curves();
        std::ostringstream out;
        out.precision(12);
        out << "curve,T,V\n";
        for (const TVPoint& p : curves.classical) out << "classical," << p.t << ',' << p.v << '\n';
        for (const TVPoint& p : curves.linear_loss)
            out << "linear_loss," << p.t << ',' << p.v << '\n';
        writer.write("boundaries.csv", out.str());
    }
}

void run_compare(const ExperimentConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const CompareSection& m = config.compare;
    std::vector<MemoryRecord> records;
    if (m.include_builtin) records.push_back(builtin_memory_record());
    if (!m.records_csv.empty()) {
        std::vector<MemoryRecord> extra = load_memory_records_file(m.records_csv);
        records.insert(records.end(), extra.begin(), extra.end());
    }

    const MemoryComparisonReport report =
        compare_memory_records(records, m.attenuation_db_per_km, m.group_index);

    manifest.metrics["fiber_fifty_time_s"] = report.fiber_fifty_time;
    ordered_json rj;
    rj["fiber_fifty_time_s"] = report.fiber_fifty_time;
    rj["attenuation_db_per_km"] = report.attenuation_db_per_km;
    rj["group_index"] = report.group_index;
    rj["records"] = ordered_json::array();
    for (const MemoryComparisonRow& row : report.rows) {
        ordered_json jr;
        jr["label"] = row.label;
        jr["max_efficiency"] = row.max_efficiency;
        jr["one_over_e_time_s"] = row.one_over_e_time;
        jr["fifty_pct_time_s"] = row.fifty_pct_time;
        jr["fiber_cross_time_s"] = row.fiber_cross_time;
        jr["beats_fiber_fifty"] = row.beats_fiber_fifty;
        jr["fifty_ratio_vs_fiber"] = row.fifty_ratio_vs_fiber;
        rj["records"].push_back(jr);
        if (m.include_builtin && row.label == records.front().label) {
            manifest.metrics["fifty_ratio"] = row.fifty_ratio_vs_fiber;
            manifest.metrics["builtin_fifty_time_s"] = row.fifty_pct_time;
        }
    }
    if (config.emit_json) writer.write("comparison.json", rj.dump(2) + "\n");

    if (config.emit_plotdata) {
        std::ostringstream out;
        out.precision(12);
        out << "label,t_s,efficiency\n";
        for (const MemoryRecord& record : records)
            for (const auto& [ts, eff] : record.decay_curve)
                out << record.label << ',' << ts << ',' << eff << '\n';
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double ts = 1.5e-3 * static_cast<double>(i) / n;
            out << "ideal fiber," << ts << ','
                << fiber_reference(ts, m.attenuation_db_per_km, m.group_index).transmission
                << '\n';
        }
        writer.write("comparison_curves.csv", out.str());
    }
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();

    RunManifest manifest;
    manifest.kind = run_kind_name(config.kind);
    manifest.config_hash = config.config_hash;
    manifest.seed = config.seed;
    manifest.version = version_string;
#if defined(__VERSION__)
    manifest.compiler = __VERSION__;
#endif

    ArtifactWriter writer(config.output_dir, manifest);
    switch (config.kind) {
        case RunKind::simulate:
        case RunKind::simulate_4wm: run_simulate(config, writer, manifest); break;
        case RunKind::raman: run_raman(config, writer, manifest); break;
        case RunKind::decay_fit: run_decay_fit(config, writer, manifest); break;
        case RunKind::tomography: run_tomography(config, writer, manifest); break;
        case RunKind::tv: run_tv(config, writer, manifest); break;
        case RunKind::compare: run_compare(config, writer, manifest); break;
    }

    for (const AssertRule& rule : config.asserts) {
        auto it = manifest.metrics.find(rule.metric);
        if (it == manifest.metrics.end()) {
            manifest.asserts_passed = false;
            manifest.assert_failures.push_back("metric '" + rule.metric + "' was not produced");
            continue;
        }
        if (rule.min && !(it->second >= *rule.min)) {
            manifest.asserts_passed = false;
            manifest.assert_failures.push_back(rule.metric + " = " + std::to_string(it->second) +
                                               " below min " + std::to_string(*rule.min));
        }
        if (rule.max && !(it->second <= *rule.max)) {
            manifest.asserts_passed = false;
            manifest.assert_failures.push_back(rule.metric + " = " + std::to_string(it->second) +
                                               " above max " + std::to_string(*rule.max));
        }
    }

    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream out(config.output_dir + "/manifest.json", std::ios::binary);
    out << manifest_to_json(manifest);
    return manifest;
}

std::string manifest_to_json(const RunManifest& manifest) {
    ordered_json j;
    j["kind"] = manifest.kind;
    j["config_hash"] = manifest.config_hash;
    j["seed"] = manifest.seed;
    j["version"] = manifest.version;
    j["compiler"] = manifest.compiler;
    j["artifacts"] = ordered_json::array();
    for (const ArtifactEntry& a : manifest.artifacts)
        j["artifacts"].push_back({{"name", a.name}, {"checksum", a.checksum}, {"bytes", a.bytes}});
    j["metrics"] = manifest.metrics;
    j["stage_checksums"] = manifest.stage_checksums;
    j["asserts_passed"] = manifest.asserts_passed;
    j["assert_failures"] = manifest.assert_failures;
    j["wall_time_s"] = manifest.wall_time_s;
    return j.dump(2) + "\n";
}

}  // namespace gem
