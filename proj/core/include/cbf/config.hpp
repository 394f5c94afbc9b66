#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/dynamics.hpp"

namespace cbf {

/// Full description of one experiment run; round-trips losslessly through
/// JSON and hashes to a stable config fingerprint.
struct ExperimentConfig {
    std::string experiment = "noise-convergence";

    TorusGrid grid{64, 2.0 * std::numbers::pi};
    CBFParams cbf{0.5, 1.0, 0.5, 3.0};
    NoiseParams noise{0.1, 1.0, 0.0, 0.0};

    struct DiffusionSpec {
        std::string variant = "ndt1_example";
        double kappa = 0.05;
        double sigma = 0.0;
        double q = 2.0;
        double offset_amplitude = 0.1; ///< scale of the additive offset field h
    } diffusion;

    struct ForcingConfig {
        std::string kind = "constant_field"; ///< zero | constant_field | exp_modulated
        double gamma = 0.0;
        double amplitude = 1.0;
        int mode1 = 1; ///< solenoidal profile wavenumber
        int mode2 = 2;
    } forcing;

    struct ScheduleConfig {
        double s = 0.0;
        double T = 5.0;
        double dt = 1e-3;
        double path_h = 1e-3;
        double path_t_min = -40.0;
        double path_t_max = 10.0;
        std::vector<double> delta_list{0.2, 0.1, 0.05};
        std::vector<double> pullback_depths{2.0, 4.0, 6.0};
        int ic_count = 8;
        double ic_norm_bound = 10.0;
        int sample_count = 100;
        double window = 20.0;
        double tail_k = 1.2;
        int seed_count = 5;
    } schedule;

    std::uint64_t seed = 7;
    std::string output_dir = "out";
    std::string path_kind = "wiener"; ///< wiener | parabola | linear | zero

    void validate() const;
    std::string to_json_string() const;
    static ExperimentConfig from_json_string(const std::string& text);
    static ExperimentConfig load_file(const std::string& path);

    /// FNV-1a of the canonical JSON dump.
    std::string hash() const;

    /// Built-in defaults tuned per experiment (grid size, horizons).
    static ExperimentConfig defaults(const std::string& experiment);

    static const std::vector<std::string>& known_experiments();
};

} // namespace cbf
