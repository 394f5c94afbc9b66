#include "cbf/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cbf {

using nlohmann::json;

const std::vector<std::string>& ExperimentConfig::known_experiments() {
    static const std::vector<std::string> names = {
        "noise-convergence",
        "ou-convergence",
        "operator-audit",
        "energy-audit",
        "decay",
        "wz-solution-convergence-additive",
        "wz-solution-convergence-multiplicative",
        "absorb",
        "usc-additive",
        "usc-multiplicative",
        "validate-assumptions",
        "tail-diagnostic",
    };
    return names;
}

void ExperimentConfig::validate() const {
    const auto& known = known_experiments();
    if (std::find(known.begin(), known.end(), experiment) == known.end())
        throw InvalidArgument("config: unknown experiment '" + experiment + "'");
    grid.validate();
    cbf.validate();
    noise.validate();

    if (path_kind != "wiener" && path_kind != "parabola" && path_kind != "linear" &&
        path_kind != "zero")
        throw InvalidArgument("config: path_kind must be wiener|parabola|linear|zero");

    const auto& sc = schedule;
    if (!(sc.dt > 0.0)) throw InvalidArgument("config: schedule.dt must be positive");
    if (!(sc.T > 0.0)) throw InvalidArgument("config: schedule.T must be positive");
    if (!(sc.path_h > 0.0)) throw InvalidArgument("config: schedule.path_h must be positive");
    if (!(sc.path_t_min < 0.0 && sc.path_t_max > 0.0))
        throw InvalidArgument("config: path window must straddle 0");
    {
        const double m = sc.path_h / sc.dt;
        if (std::abs(m - std::round(m)) > 1e-9 || m < 1.0 - 1e-9)
            throw InvalidArgument("config: path_h must be an integer multiple of dt "
                                  "(keeps noise kinks on step boundaries)");
    }
    for (double d : sc.delta_list) {
        if (!(d > 0.0) || d > 1.0)
            throw InvalidArgument("config: delta_list entries must lie in (0, 1]");
        const double m = d / sc.path_h;
        if (std::abs(m - std::round(m)) > 1e-9)
            throw InvalidArgument("config: delta_list entries must be multiples of path_h");
    }
    if (sc.delta_list.empty()) throw InvalidArgument("config: delta_list must not be empty");
    for (std::size_t i = 0; i + 1 < sc.pullback_depths.size(); ++i)
        if (!(sc.pullback_depths[i] < sc.pullback_depths[i + 1]))
            throw InvalidArgument("config: pullback_depths must increase");
    if (sc.ic_count < 1) throw InvalidArgument("config: ic_count must be >= 1");
    if (sc.sample_count < 2) throw InvalidArgument("config: sample_count must be >= 2");
    if (sc.seed_count < 1) throw InvalidArgument("config: seed_count must be >= 1");
    if (!(sc.window > 0.0)) throw InvalidArgument("config: window must be positive");
    if (!(sc.tail_k > 0.0)) throw InvalidArgument("config: tail_k must be positive");

    if (diffusion.variant != "zero" && diffusion.variant != "constant_g" &&
        diffusion.variant != "linear_u" && diffusion.variant != "ndt1_example" &&
        diffusion.variant != "ndt2_example" && diffusion.variant != "ndt3_example")
        throw InvalidArgument("config: unknown diffusion variant '" + diffusion.variant + "'");
    if (diffusion.kappa < 0.0 || diffusion.sigma < 0.0)
        throw InvalidArgument("config: diffusion kappa/sigma must be nonnegative");

    if (forcing.kind != "zero" && forcing.kind != "constant_field" &&
        forcing.kind != "exp_modulated")
        throw InvalidArgument("config: unknown forcing kind '" + forcing.kind + "'");
    if (forcing.kind == "exp_modulated" && cbf.alpha > 0.0 &&
        !(forcing.gamma >= 0.0 && forcing.gamma < cbf.alpha))
        throw InvalidArgument("config: exp_modulated forcing requires gamma in [0, alpha)");
    if (cbf.nse_preset() && forcing.mode1 == 0 && forcing.mode2 == 0)
        throw InvalidArgument("config: NSE preset requires a mean-zero forcing profile");
}

namespace {

json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["grid"] = {{"n", c.grid.n}, {"box_length", c.grid.box_length}};
    j["cbf"] = {{"mu", c.cbf.mu}, {"alpha", c.cbf.alpha}, {"beta", c.cbf.beta}, {"r", c.cbf.r}};
    j["noise"] = {{"delta", c.noise.delta},
                  {"ell", c.noise.ell},
                  {"sigma", c.noise.sigma},
                  {"kappa", c.noise.kappa}};
    j["diffusion"] = {{"variant", c.diffusion.variant},
                      {"kappa", c.diffusion.kappa},
                      {"sigma", c.diffusion.sigma},
                      {"q", c.diffusion.q},
                      {"offset_amplitude", c.diffusion.offset_amplitude}};
    j["forcing"] = {{"kind", c.forcing.kind},
                    {"gamma", c.forcing.gamma},
                    {"amplitude", c.forcing.amplitude},
                    {"mode", {c.forcing.mode1, c.forcing.mode2}}};
    j["schedule"] = {{"s", c.schedule.s},
                     {"T", c.schedule.T},
                     {"dt", c.schedule.dt},
                     {"path_h", c.schedule.path_h},
                     {"path_t_min", c.schedule.path_t_min},
                     {"path_t_max", c.schedule.path_t_max},
                     {"delta_list", c.schedule.delta_list},
                     {"pullback_depths", c.schedule.pullback_depths},
                     {"ic_count", c.schedule.ic_count},
                     {"ic_norm_bound", c.schedule.ic_norm_bound},
                     {"sample_count", c.schedule.sample_count},
                     {"window", c.schedule.window},
                     {"tail_k", c.schedule.tail_k},
                     {"seed_count", c.schedule.seed_count}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["path_kind"] = c.path_kind;
    return j;
}

ExperimentConfig from_json(const json& j) {
    ExperimentConfig c;
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("grid")) {
        c.grid.n = j["grid"].value("n", c.grid.n);
        c.grid.box_length = j["grid"].value("box_length", c.grid.box_length);
    }
    if (j.contains("cbf")) {
        c.cbf.mu = j["cbf"].value("mu", c.cbf.mu);
        c.cbf.alpha = j["cbf"].value("alpha", c.cbf.alpha);
        c.cbf.beta = j["cbf"].value("beta", c.cbf.beta);
        c.cbf.r = j["cbf"].value("r", c.cbf.r);
    }
    if (j.contains("noise")) {
        c.noise.delta = j["noise"].value("delta", c.noise.delta);
        c.noise.ell = j["noise"].value("ell", c.noise.ell);
        c.noise.sigma = j["noise"].value("sigma", c.noise.sigma);
        c.noise.kappa = j["noise"].value("kappa", c.noise.kappa);
    }
    if (j.contains("diffusion")) {
        const auto& d = j["diffusion"];
        c.diffusion.variant = d.value("variant", c.diffusion.variant);
        c.diffusion.kappa = d.value("kappa", c.diffusion.kappa);
        c.diffusion.sigma = d.value("sigma", c.diffusion.sigma);
        c.diffusion.q = d.value("q", c.diffusion.q);
        c.diffusion.offset_amplitude = d.value("offset_amplitude", c.diffusion.offset_amplitude);
    }
    if (j.contains("forcing")) {
        const auto& f = j["forcing"];
        c.forcing.kind = f.value("kind", c.forcing.kind);
        c.forcing.gamma = f.value("gamma", c.forcing.gamma);
        c.forcing.amplitude = f.value("amplitude", c.forcing.amplitude);
        if (f.contains("mode")) {
            c.forcing.mode1 = f["mode"].at(0).get<int>();
            c.forcing.mode2 = f["mode"].at(1).get<int>();
        }
    }
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        c.schedule.s = s.value("s", c.schedule.s);
        c.schedule.T = s.value("T", c.schedule.T);
        c.schedule.dt = s.value("dt", c.schedule.dt);
        c.schedule.path_h = s.value("path_h", c.schedule.path_h);
        c.schedule.path_t_min = s.value("path_t_min", c.schedule.path_t_min);
        c.schedule.path_t_max = s.value("path_t_max", c.schedule.path_t_max);
        c.schedule.delta_list = s.value("delta_list", c.schedule.delta_list);
        c.schedule.pullback_depths = s.value("pullback_depths", c.schedule.pullback_depths);
        c.schedule.ic_count = s.value("ic_count", c.schedule.ic_count);
        c.schedule.ic_norm_bound = s.value("ic_norm_bound", c.schedule.ic_norm_bound);
        c.schedule.sample_count = s.value("sample_count", c.schedule.sample_count);
        c.schedule.window = s.value("window", c.schedule.window);
        c.schedule.tail_k = s.value("tail_k", c.schedule.tail_k);
        c.schedule.seed_count = s.value("seed_count", c.schedule.seed_count);
    }
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.path_kind = j.value("path_kind", c.path_kind);
    return c;
}

} // namespace

std::string ExperimentConfig::to_json_string() const { return to_json(*this).dump(2) + "\n"; }

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config: JSON parse error: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_string(buf.str());
}

std::string ExperimentConfig::hash() const {
    const std::string dump = to_json(*this).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "noise-convergence" || experiment == "ou-convergence") {
        c.schedule.T = 5.0;
        c.schedule.delta_list = {0.2, 0.1, 0.05, 0.025};
        c.schedule.path_t_min = -30.0;
        c.schedule.path_t_max = 8.0;
    } else if (experiment == "operator-audit" || experiment == "validate-assumptions") {
        c.grid.n = 64;
        c.schedule.sample_count = 100;
    } else if (experiment == "energy-audit") {
        c.grid.n = 32;
        c.schedule.T = 1.0;
        c.schedule.dt = 1e-3;
        c.schedule.path_t_min = -4.0;
        c.schedule.path_t_max = 4.0;
        c.forcing.amplitude = 0.5;
    } else if (experiment == "decay") {
        c.grid.n = 32;
        c.schedule.T = 2.0;
        c.schedule.dt = 2e-3;
        c.schedule.path_h = 2e-3;
        c.forcing.kind = "zero";
        c.diffusion.variant = "zero";
    } else if (experiment == "wz-solution-convergence-additive" ||
               experiment == "wz-solution-convergence-multiplicative") {
        c.grid.n = 32;
        c.schedule.T = 2.0;
        c.schedule.dt = 2e-3;
        c.schedule.path_h = 2e-3;
        c.schedule.seed_count = 3;
        c.schedule.path_t_min = -30.0;
        c.schedule.path_t_max = 4.0;
        c.forcing.amplitude = 0.5;
    } else if (experiment == "absorb") {
        c.grid.n = 32;
        c.schedule.dt = 2e-3;
        c.schedule.path_h = 2e-3;
        c.schedule.pullback_depths = {2.0, 4.0, 6.0, 8.0};
        c.schedule.path_t_min = -40.0;
        c.schedule.path_t_max = 2.0;
        c.schedule.window = 25.0;
        c.forcing.amplitude = 0.5;
    } else if (experiment == "usc-additive" || experiment == "usc-multiplicative") {
        c.grid.n = 32;
        c.schedule.dt = 2e-3;
        c.schedule.path_h = 2e-3;
        c.schedule.pullback_depths = {4.0, 6.0};
        c.schedule.ic_count = 6;
        c.schedule.ic_norm_bound = 4.0;
        c.schedule.path_t_min = -30.0;
        c.schedule.path_t_max = 2.0;
        c.forcing.amplitude = 0.5;
    } else if (experiment == "tail-diagnostic") {
        c.grid.n = 64;
    }
    return c;
}

} // namespace cbf
