#include "ctwindow/run_config.hpp"

#include "ctwindow/csv.hpp"
#include "ctwindow/error.hpp"
#include "ctwindow/random.hpp"
#include "ctwindow/sweep.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ctwindow {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        throw FormatError(where + " must be a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw FormatError("unknown key '" + key + "' in " + where);
        }
    }
}

double get_number(const json& v, const std::string& what) {
    if (!v.is_number()) {
        throw FormatError(what + " must be a number");
    }
    return v.get<double>();
}

std::uint64_t get_unsigned(const json& v, const std::string& what) {
    if (!v.is_number_unsigned()) {
        throw FormatError(what + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

template <std::size_t N>
std::array<double, N> get_doubles(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != N) {
        throw FormatError(what + " must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = get_number(v[i], what);
    }
    return out;
}

template <std::size_t N>
std::array<std::size_t, N> get_extents(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != N) {
        throw FormatError(what + " must be an array of " + std::to_string(N) + " integers");
    }
    std::array<std::size_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = static_cast<std::size_t>(get_unsigned(v[i], what));
    }
    return out;
}

StrategySpec parse_strategy_spec(const json& j, const std::string& where, bool allow_seed) {
    StrategySpec s;
    if (!j.contains("strategy") || !j["strategy"].is_string()) {
        throw FormatError(where + ": \"strategy\" must be a string");
    }
    s.strategy = parse_strategy(j["strategy"].get<std::string>());
    if (j.contains("x")) {
        s.x = get_number(j["x"], where + ".x");
    }
    if (j.contains("y")) {
        s.y = get_number(j["y"], where + ".y");
    }
    if (allow_seed && j.contains("seed")) {
        s.seed = get_unsigned(j["seed"], where + ".seed");
    }
    if (s.strategy != Strategy::Swn && (s.x != 0.0 || s.y != 0.0)) {
        throw InvalidArgument(where + ": x and y only apply to SWN");
    }
    if (!(s.x >= 0.0) || !(s.y >= 0.0)) {
        throw InvalidArgument(where + ": x and y must be non-negative");
    }
    return s;
}

OrganSpec parse_organ(const json& j, const std::string& where) {
    check_keys(j, where, {"label_id", "label_name", "center", "radii", "mean_hu", "noise_std"});
    OrganSpec o;
    if (!j.contains("label_id")) {
        throw FormatError(where + ": label_id is required");
    }
    o.label_id = static_cast<int>(get_unsigned(j["label_id"], where + ".label_id"));
    if (j.contains("label_name")) {
        if (!j["label_name"].is_string()) {
            throw FormatError(where + ".label_name must be a string");
        }
        o.name = j["label_name"].get<std::string>();
    } else {
        o.name = "label_" + std::to_string(o.label_id);
    }
    if (!j.contains("center") || !j.contains("radii")) {
        throw FormatError(where + ": center and radii are required");
    }
    o.center = get_doubles<3>(j["center"], where + ".center");
    o.radii = get_doubles<3>(j["radii"], where + ".radii");
    if (j.contains("mean_hu")) {
        o.mean_hu = get_number(j["mean_hu"], where + ".mean_hu");
    }
    if (j.contains("noise_std")) {
        o.noise_std = get_number(j["noise_std"], where + ".noise_std");
    }
    return o;
}

PhantomConfig parse_phantom(const json& j, PhantomConfig cfg) {
    check_keys(j, "phantom", {"dims", "spacing", "background_hu", "background_noise_std", "dtype", "organs"});
    if (j.contains("dims")) {
        cfg.dims = get_extents<3>(j["dims"], "phantom.dims");
    }
    if (j.contains("spacing")) {
        cfg.spacing = get_doubles<3>(j["spacing"], "phantom.spacing");
    }
    if (j.contains("background_hu")) {
        cfg.background_hu = get_number(j["background_hu"], "phantom.background_hu");
    }
    if (j.contains("background_noise_std")) {
        cfg.background_noise_std = get_number(j["background_noise_std"], "phantom.background_noise_std");
    }
    if (j.contains("dtype")) {
        if (!j["dtype"].is_string()) {
            throw FormatError("phantom.dtype must be a string");
        }
        cfg.dtype = parse_element_kind(j["dtype"].get<std::string>());
    }
    if (j.contains("organs")) {
        if (!j["organs"].is_array()) {
            throw FormatError("phantom.organs must be an array");
        }
        cfg.organs.clear();
        for (std::size_t i = 0; i < j["organs"].size(); ++i) {
            cfg.organs.push_back(parse_organ(j["organs"][i], "phantom.organs[" + std::to_string(i) + "]"));
        }
    }
    validate_phantom_config(cfg);
    return cfg;
}

AugmentConfig parse_augment(const json& j, AugmentConfig cfg) {
    check_keys(j, "augment",
               {"max_rotation_deg", "max_translation", "crop_size", "pad", "pad_value_image", "pad_value_label"});
    if (j.contains("max_rotation_deg")) {
        cfg.max_rotation_deg = get_number(j["max_rotation_deg"], "augment.max_rotation_deg");
    }
    if (j.contains("max_translation")) {
        cfg.max_translation = get_doubles<2>(j["max_translation"], "augment.max_translation");
    }
    if (j.contains("crop_size")) {
        cfg.crop_size = get_extents<2>(j["crop_size"], "augment.crop_size");
    }
    if (j.contains("pad")) {
        cfg.pad = static_cast<std::size_t>(get_unsigned(j["pad"], "augment.pad"));
    }
    if (j.contains("pad_value_image")) {
        cfg.pad_value_image = static_cast<float>(get_number(j["pad_value_image"], "augment.pad_value_image"));
    }
    if (j.contains("pad_value_label")) {
        const auto v = get_unsigned(j["pad_value_label"], "augment.pad_value_label");
        if (v > 255) {
            throw InvalidArgument("augment.pad_value_label must be in 0..255");
        }
        cfg.pad_value_label = static_cast<std::uint8_t>(v);
    }
    if (!(cfg.max_rotation_deg >= 0.0) || !(cfg.max_translation[0] >= 0.0) || !(cfg.max_translation[1] >= 0.0)) {
        throw InvalidArgument("augment magnitudes must be non-negative");
    }
    return cfg;
}

BandFitOptions parse_band(const json& j, BandFitOptions opt) {
    check_keys(j, "band", {"lower_percentile", "upper_percentile", "epsilon", "axis"});
    if (j.contains("lower_percentile")) {
        opt.lower_percentile = get_number(j["lower_percentile"], "band.lower_percentile");
    }
    if (j.contains("upper_percentile")) {
        opt.upper_percentile = get_number(j["upper_percentile"], "band.upper_percentile");
    }
    if (j.contains("epsilon")) {
        opt.epsilon = get_number(j["epsilon"], "band.epsilon");
    }
    if (j.contains("axis")) {
        const auto axis = get_unsigned(j["axis"], "band.axis");
        if (axis > 2) {
            throw InvalidArgument("band.axis must be 0, 1 or 2");
        }
        opt.axis = static_cast<int>(axis);
    }
    if (!(opt.lower_percentile >= 0.0 && opt.lower_percentile < opt.upper_percentile && opt.upper_percentile <= 100.0)) {
        throw InvalidArgument("band percentiles need 0 <= lower < upper <= 100");
    }
    if (!(opt.epsilon > 0.0)) {
        throw InvalidArgument("band.epsilon must be positive");
    }
    return opt;
}

std::vector<double> parse_shifts(const json& j) {
    if (j.is_array()) {
        if (j.empty()) {
            throw InvalidArgument("shifts must not be empty");
        }
        std::vector<double> out;
        for (const auto& v : j) {
            out.push_back(get_number(v, "shifts[]"));
        }
        return out;
    }
    check_keys(j, "shifts", {"from", "to", "step"});
    if (!j.contains("from") || !j.contains("to") || !j.contains("step")) {
        throw FormatError("shifts needs from, to and step");
    }
    return shift_grid(get_number(j["from"], "shifts.from"), get_number(j["to"], "shifts.to"),
                      get_number(j["step"], "shifts.step"));
}

} // namespace

std::string StrategySpec::label() const {
    if (strategy != Strategy::Swn) {
        return strategy_name(strategy);
    }
    return std::string("SWN[") + csv::format_number(x) + "," + csv::format_number(y) + "]";
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.strategies = {{Strategy::Stn, 0.0, 0.0, std::nullopt},
                      {Strategy::Wir, 0.0, 0.0, std::nullopt},
                      {Strategy::Swn, 50.0, 50.0, std::nullopt}};
    cfg.phantom = reference_phantom_config(0);
    cfg.shifts = default_shift_grid();
    cfg.augment.seed = derive_seed(cfg.seed, "augment");
    return cfg;
}

RunConfig parse_run_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("run config is not valid JSON: ") + e.what());
    }
    check_keys(j, "run config",
               {"seed", "strategy", "x", "y", "strategies", "phantom", "train_subjects", "test_subjects", "jitter",
                "epochs", "band", "shifts", "augment", "alpha", "m", "threads", "output"});

    RunConfig cfg = default_run_config();
    if (j.contains("seed")) {
        cfg.seed = get_unsigned(j["seed"], "seed");
    }
    if (j.contains("strategy") && j.contains("strategies")) {
        throw FormatError("give either \"strategy\" or \"strategies\", not both");
    }
    if ((j.contains("x") || j.contains("y")) && !j.contains("strategy")) {
        throw FormatError("top-level x and y need a top-level \"strategy\"");
    }
    if (j.contains("strategy")) {
        cfg.strategies = {parse_strategy_spec(j, "run config", false)};
    }
    if (j.contains("strategies")) {
        if (!j["strategies"].is_array() || j["strategies"].empty()) {
            throw FormatError("strategies must be a nonempty array");
        }
        cfg.strategies.clear();
        for (std::size_t i = 0; i < j["strategies"].size(); ++i) {
            const std::string where = "strategies[" + std::to_string(i) + "]";
            check_keys(j["strategies"][i], where, {"strategy", "x", "y", "seed"});
            cfg.strategies.push_back(parse_strategy_spec(j["strategies"][i], where, true));
        }
    }
    for (std::size_t a = 0; a < cfg.strategies.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            if (cfg.strategies[a].label() == cfg.strategies[b].label()) {
                throw InvalidArgument("strategy " + cfg.strategies[a].label() + " is listed twice");
            }
        }
    }
    if (j.contains("phantom")) {
        cfg.phantom = parse_phantom(j["phantom"], cfg.phantom);
    }
    if (j.contains("train_subjects")) {
        cfg.train_subjects = static_cast<std::size_t>(get_unsigned(j["train_subjects"], "train_subjects"));
    }
    if (j.contains("test_subjects")) {
        cfg.test_subjects = static_cast<std::size_t>(get_unsigned(j["test_subjects"], "test_subjects"));
    }
    if (cfg.train_subjects == 0 || cfg.test_subjects == 0) {
        throw InvalidArgument("train_subjects and test_subjects must be positive");
    }
    if (j.contains("jitter")) {
        cfg.jitter = get_number(j["jitter"], "jitter");
        if (!(cfg.jitter >= 0.0)) {
            throw InvalidArgument("jitter must be non-negative");
        }
    }
    if (j.contains("epochs")) {
        cfg.band.epochs = static_cast<std::size_t>(get_unsigned(j["epochs"], "epochs"));
        if (cfg.band.epochs == 0) {
            throw InvalidArgument("epochs must be positive");
        }
    }
    if (j.contains("band")) {
        cfg.band = parse_band(j["band"], cfg.band);
    }
    if (j.contains("shifts")) {
        cfg.shifts = parse_shifts(j["shifts"]);
    }
    if (j.contains("augment")) {
        cfg.augment = parse_augment(j["augment"], cfg.augment);
    }
    if (j.contains("alpha")) {
        cfg.alpha = get_number(j["alpha"], "alpha");
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
            throw InvalidArgument("alpha must lie in (0, 1)");
        }
    }
    if (j.contains("m")) {
        cfg.m = static_cast<std::size_t>(get_unsigned(j["m"], "m"));
        if (cfg.m == 0) {
            throw InvalidArgument("m must be positive");
        }
    }
    if (j.contains("threads")) {
        cfg.threads = static_cast<std::size_t>(get_unsigned(j["threads"], "threads"));
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) {
            throw FormatError("output must be a string");
        }
        cfg.output = j["output"].get<std::string>();
    }
    cfg.augment.seed = derive_seed(cfg.seed, "augment");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open run config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::uint64_t subject_seed(std::uint64_t run_seed, const std::string& split, std::size_t index) {
    return derive_seed(run_seed, split + "/" + std::to_string(index));
}

std::uint64_t strategy_seed(std::uint64_t run_seed, const StrategySpec& spec) {
    return spec.seed ? *spec.seed : derive_seed(run_seed, "swn/" + spec.label());
}

} // namespace ctwindow
