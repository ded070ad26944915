#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gemlab/runner.hpp"

using namespace gem;

namespace {

std::string scratch_dir(const std::string& name) {
    const std::string dir = std::filesystem::temp_directory_path() / ("gemlab_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string tv_config(const std::string& out_dir, unsigned seed = 7) {
    std::ostringstream text;
    text << "kind = tv\nseed = " << seed << "\noutput.dir = " << out_dir << "\n"
         << "[tv]\nchannel = loss\neta = 0.5\nalpha_re = 3\nsamples = 20000\nbootstrap = 100\n";
    return text.str();
}

}  // namespace

TEST_CASE("tv run on synthetic eta = 0.5 loss lands near (1, 0.5)") {
    const std::string dir = scratch_dir("tv");
    const ExperimentConfig config = parse_config_text(tv_config(dir));
    const RunManifest manifest = run(config);
    CHECK(manifest.metrics.at("t") == doctest::Approx(1.0).epsilon(0.03));
    CHECK(manifest.metrics.at("v") == doctest::Approx(0.5).epsilon(0.06));
    CHECK(std::filesystem::exists(dir + "/tv.json"));
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
}

TEST_CASE("reruns with the same seed give identical checksums") {
    const std::string dir_a = scratch_dir("det_a");
    const std::string dir_b = scratch_dir("det_b");
    const RunManifest a = run(parse_config_text(tv_config(dir_a)));
    const RunManifest b = run(parse_config_text(tv_config(dir_b)));
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
        CHECK(a.artifacts[i].name == b.artifacts[i].name);
        CHECK(a.artifacts[i].checksum == b.artifacts[i].checksum);
    }
    // different seed, different data
    const std::string dir_c = scratch_dir("det_c");
    const RunManifest c = run(parse_config_text(tv_config(dir_c, 8)));
    CHECK(c.artifacts[0].checksum != a.artifacts[0].checksum);
}

TEST_CASE("every artifact on disk is declared in the manifest") {
    const std::string dir = scratch_dir("declared");
    ExperimentConfig config = parse_config_text(tv_config(dir));
    config.emit_plotdata = true;
    const RunManifest manifest = run(config);
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename();
        if (name == "manifest.json") continue;
        ++files;
        bool declared = false;
        for (const ArtifactEntry& a : manifest.artifacts) declared = declared || a.name == name;
        CHECK_MESSAGE(declared, "undeclared artifact ", name);
    }
    CHECK(files == manifest.artifacts.size());
}

TEST_CASE("assert thresholds drive asserts_passed and the failure report") {
    const std::string dir = scratch_dir("asserts");
    std::string text = tv_config(dir);
    text += "[assert]\nt_min = 0.9\nt_max = 1.1\n";
    const RunManifest pass = run(parse_config_text(text));
    CHECK(pass.asserts_passed);

    const std::string dir2 = scratch_dir("asserts2");
    std::string failing = tv_config(dir2);
    failing += "[assert]\nt_min = 1.9\n";
    const RunManifest fail = run(parse_config_text(failing));
    CHECK(!fail.asserts_passed);
    REQUIRE(!fail.assert_failures.empty());
    CHECK(fail.assert_failures[0].find("t = ") != std::string::npos);
    // machine-readable failure report lands in the manifest
    const std::string manifest_json = manifest_to_json(fail);
    CHECK(manifest_json.find("assert_failures") != std::string::npos);
    CHECK(manifest_json.find("below min") != std::string::npos);
}

TEST_CASE("decay-fit run round-trips the thermal model") {
    const std::string dir = scratch_dir("decay");
    std::ostringstream text;
    text << "kind = decay-fit\noutput.dir = " << dir << "\n"
         << "[decay]\nmodel = thermal\ne0 = 0.8\ntau_l = 1.24 ms\ntau_d = 0.4 ms\n"
         << "synth_points = 40\nsynth_t_max = 3 ms\n";
    const RunManifest manifest = run(parse_config_text(text.str()));
    CHECK(manifest.metrics.at("e0") == doctest::Approx(0.8).epsilon(1e-3));
    CHECK(manifest.metrics.at("tau_l") == doctest::Approx(1.24e-3).epsilon(1e-3));
    CHECK(manifest.metrics.at("tau_d") == doctest::Approx(0.4e-3).epsilon(1e-3));
    CHECK(std::filesystem::exists(dir + "/fit.json"));
    CHECK(std::filesystem::exists(dir + "/decay.csv"));
}

TEST_CASE("raman run fits the synthesized manifold") {
    const std::string dir = scratch_dir("raman");
    std::ostringstream text;
    text << "kind = raman\noutput.dir = " << dir << "\n"
         << "[ensemble]\nraman_detuning = 325 MHz\n"
         << "[raman]\nomega_c = 5.19 MHz\nod_m1 = 6.3\nod_0 = 38\nod_p1 = 488\n"
         << "grid_min = -1.2 MHz\ngrid_max = 1.2 MHz\ngrid_points = 801\nfit = true\n";
    const RunManifest manifest = run(parse_config_text(text.str()));
    CHECK(manifest.metrics.at("od_p1") == doctest::Approx(488.0).epsilon(1e-2));
    CHECK(manifest.metrics.at("omega_c_hz") == doctest::Approx(5.19e6).epsilon(1e-2));
    CHECK(std::filesystem::exists(dir + "/spectrum.csv"));
}

TEST_CASE("compare run reports the builtin record beating the fiber by > 5x") {
    const std::string dir = scratch_dir("compare");
    std::ostringstream text;
    text << "kind = compare\noutput.dir = " << dir << "\n";
    const RunManifest manifest = run(parse_config_text(text.str()));
    CHECK(manifest.metrics.at("fifty_ratio") >= 5.0);
    CHECK(manifest.metrics.at("fiber_fifty_time_s") == doctest::Approx(100e-6).epsilon(0.02));
    CHECK(std::filesystem::exists(dir + "/comparison.json"));
}

TEST_CASE("tomography run reconstructs vacuum") {
    const std::string dir = scratch_dir("tomo");
    std::ostringstream text;
    text << "kind = tomography\nseed = 8\noutput.dir = " << dir << "\n"
         << "[tomography]\npulses = 3000\nsurfaces = false\n";
    const RunManifest manifest = run(parse_config_text(text.str()));
    CHECK(manifest.metrics.at("fidelity") >= 0.99);
    CHECK(std::filesystem::exists(dir + "/state.json"));
    CHECK(std::filesystem::exists(dir + "/quadratures.csv"));
}
