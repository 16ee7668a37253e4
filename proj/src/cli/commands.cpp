#include "ctwindow/cli.hpp"

#include "ctwindow/augment.hpp"
#include "ctwindow/csv.hpp"
#include "ctwindow/ctv_io.hpp"
#include "ctwindow/error.hpp"
#include "ctwindow/experiment.hpp"
#include "ctwindow/metrics.hpp"
#include "ctwindow/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ctwindow::cli {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    f << text;
    f.close();
    if (!f) {
        throw IoError("failed writing " + path.string());
    }
}

// "-" writes to stdout.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

struct WindowArgs {
    std::string input, output;
    std::string strategy = "STN";
    double x = 0.0, y = 0.0;
    std::uint64_t seed = 0;
    std::string mode = "test";
    int axis = 2;
};

void cmd_window(const WindowArgs& a, std::ostream& out) {
    const Strategy strategy = parse_strategy(a.strategy);
    const bool train = a.mode == "train";
    const CtVolume image = load_volume(a.input);

    std::optional<WindowSampler> sampler;
    if (train && strategy == Strategy::Swn) {
        sampler.emplace(SwnParams{a.x, a.y, a.seed});
    }
    const std::size_t depth = image.dims()[static_cast<std::size_t>(a.axis)];
    std::vector<Slice2D> slices;
    slices.reserve(depth);
    std::ostringstream log;
    for (std::size_t k = 0; k < depth; ++k) {
        const Slice2D raw = extract_slice(image, a.axis, k);
        const WindowSpec w = train ? training_window(strategy, sampler ? &*sampler : nullptr) : testing_window(strategy);
        slices.push_back(apply_window(raw, w));
        if (sampler || k == 0) {
            nlohmann::ordered_json line;
            line["strategy"] = strategy_name(strategy);
            line["mode"] = a.mode;
            if (sampler) {
                line["axis"] = a.axis;
                line["slice"] = k;
            }
            line["level"] = w.level;
            line["half_width"] = w.half_width;
            log << line.dump() << '\n';
        }
    }
    save_volume(stack_slices(slices, a.axis, image.spacing()), a.output);
    out << log.str();
}

std::vector<int> parse_label_list(const std::string& text) {
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const long long v = csv::parse_integer(item, "--labels");
        if (v < 0 || v > 255) {
            throw InvalidArgument("label id out of range: " + item);
        }
        ids.push_back(static_cast<int>(v));
    }
    if (ids.empty()) {
        throw InvalidArgument("--labels is empty");
    }
    return ids;
}

struct DiceArgs {
    std::string pred, truth, labels, subject, output = "-";
};

void cmd_dice(const DiceArgs& a, std::ostream& out) {
    const LabelVolume pred = load_labels(a.pred);
    const LabelVolume truth = load_labels(a.truth);
    std::vector<int> ids;
    if (!a.labels.empty()) {
        ids = parse_label_list(a.labels);
    } else {
        for (const auto& [id, _] : truth.label_names()) {
            if (id != 0) {
                ids.push_back(id);
            }
        }
    }
    const std::string subject = a.subject.empty() ? fs::path(a.truth).filename().string() : a.subject;
    const auto records = multi_label_dice(pred, truth, ids, subject);
    std::ostringstream csv_text;
    write_dice_csv(csv_text, records);
    emit(a.output, csv_text.str(), out);
}

struct CompareArgs {
    std::vector<std::string> tables;
    std::string reference, output = "-", metadata;
    double alpha = 0.05;
    std::size_t m = 12;
};

void cmd_compare(const CompareArgs& a, std::ostream& out) {
    std::vector<MethodTable> tables;
    for (const auto& t : a.tables) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == t.size()) {
            throw InvalidArgument("--table expects METHOD=CSV, got '" + t + "'");
        }
        std::ifstream in(t.substr(eq + 1));
        if (!in) {
            throw IoError("cannot open " + t.substr(eq + 1));
        }
        tables.emplace_back(t.substr(0, eq), read_dice_csv(in));
    }
    const ComparisonOptions options{a.alpha, a.m};
    const auto rows = compare_methods(tables, a.reference, options);
    std::ostringstream csv_text;
    write_comparison_csv(csv_text, rows);
    emit(a.output, csv_text.str(), out);

    std::string meta_path = a.metadata;
    if (meta_path.empty() && a.output != "-") {
        meta_path = fs::path(a.output).replace_extension(".meta.json").string();
    }
    if (!meta_path.empty()) {
        write_text_file(meta_path, comparison_metadata_json(options, rows));
    }
}

struct SweepArgs {
    std::string config, output;
    std::size_t threads = 0;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
    RunConfig cfg = load_run_config(a.config);
    std::string output = a.output.empty() ? cfg.output : a.output;
    if (output.empty()) {
        throw InvalidArgument("no output path: pass -o or set \"output\" in the config");
    }
    if (a.output.empty()) {
        // Relative paths in the config resolve against the config's directory.
        const fs::path p(cfg.output);
        if (p.is_relative()) {
            output = (fs::path(a.config).parent_path() / p).string();
        }
    }
    const SweepResult result = run_experiment(cfg, a.threads);
    std::ostringstream csv_text;
    write_sweep_csv(csv_text, result.rows);
    emit(output, csv_text.str(), out);
}

struct PhantomArgs {
    std::string config, out_image, out_labels;
    std::optional<std::uint64_t> seed;
    std::size_t index = 0;
    std::string split = "train";
};

PhantomConfig phantom_from_args(const PhantomArgs& a) {
    if (a.config.empty()) {
        return reference_phantom_config(a.seed.value_or(0));
    }
    RunConfig rc = load_run_config(a.config);
    if (a.seed) {
        rc.seed = *a.seed;
    }
    return jitter_phantom_config(rc.phantom, subject_seed(rc.seed, a.split, a.index), rc.jitter);
}

void cmd_phantom(const PhantomArgs& a, std::ostream& out) {
    const PhantomConfig cfg = phantom_from_args(a);
    const Phantom p = generate_phantom(cfg);
    save_volume(p.image, a.out_image);
    save_labels(p.labels, a.out_labels, cfg.spacing);
    nlohmann::ordered_json line;
    line["dims"] = cfg.dims;
    line["seed"] = cfg.seed;
    line["organs"] = cfg.organs.size();
    out << line.dump() << '\n';
}

struct AugmentArgs {
    std::string image, labels, out_image, out_labels, config;
    std::optional<std::uint64_t> seed;
    std::optional<double> max_rotation;
    std::vector<double> max_translation;
    std::vector<std::size_t> crop;
    std::optional<std::size_t> pad;
};

void cmd_augment(const AugmentArgs& a, std::ostream& out) {
    const CtVolume image = load_volume(a.image);
    const LabelVolume labels = load_labels(a.labels);
    if (image.dims() != labels.dims()) {
        throw InvalidArgument("image and label volumes have different dims");
    }
    AugmentConfig cfg;
    std::uint64_t seed = 0;
    if (!a.config.empty()) {
        const RunConfig rc = load_run_config(a.config);
        cfg = rc.augment;
        seed = rc.seed;
    }
    if (a.seed) {
        seed = *a.seed;
    }
    cfg.seed = derive_seed(seed, "augment");
    if (a.max_rotation) {
        cfg.max_rotation_deg = *a.max_rotation;
    }
    if (!a.max_translation.empty()) {
        cfg.max_translation = {a.max_translation[0], a.max_translation.back()};
    }
    if (a.pad) {
        cfg.pad = *a.pad;
    }
    const Extent2 in_dims = slice_dims(image.dims(), 2);
    if (!a.crop.empty()) {
        cfg.crop_size = {a.crop[0], a.crop.back()};
    }
    if (cfg.crop_size[0] == 0 && cfg.crop_size[1] == 0) {
        cfg.crop_size = in_dims;
    }
    validate_augment_config(cfg, in_dims);

    RandomStream stream(cfg.seed);
    const std::size_t depth = image.dims()[2];
    std::vector<Slice2D> img_out;
    std::vector<LabelSlice> lab_out;
    std::ostringstream log;
    for (std::size_t k = 0; k < depth; ++k) {
        const AugmentTransform t = draw_transform(cfg, in_dims, stream);
        auto [img, lab] = apply_transform(extract_slice(image, 2, k), extract_label_slice(labels, 2, k), t, cfg);
        img_out.push_back(std::move(img));
        lab_out.push_back(std::move(lab));
        nlohmann::ordered_json line;
        line["slice"] = k;
        line["rotation_deg"] = t.rotation_deg;
        line["shift_x"] = t.shift_x;
        line["shift_y"] = t.shift_y;
        line["crop_x"] = t.crop_x;
        line["crop_y"] = t.crop_y;
        log << line.dump() << '\n';
    }
    save_volume(stack_slices(img_out, 2, image.spacing()), a.out_image);
    save_labels(stack_label_slices(lab_out, 2, labels.label_names()), a.out_labels, image.spacing());
    out << log.str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"CT Hounsfield-unit window normalization and evaluation tools", "ctwindow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ctwindow 1.0.0");

    WindowArgs wa;
    auto* window = app.add_subcommand("window", "Normalize a CT volume slice by slice");
    window->add_option("input", wa.input, "Input CTV header")->required();
    window->add_option("output", wa.output, "Output CTV header (float32)")->required();
    window->add_option("--strategy", wa.strategy, "STN, WIR or SWN")->capture_default_str();
    window->add_option("--x", wa.x, "SWN level sigma")->check(CLI::NonNegativeNumber);
    window->add_option("--y", wa.y, "SWN width sigma")->check(CLI::NonNegativeNumber);
    window->add_option("--seed", wa.seed, "SWN seed");
    window->add_option("--mode", wa.mode, "train or test")->check(CLI::IsMember({"train", "test"}))->capture_default_str();
    window->add_option("--axis", wa.axis, "Slice axis")->check(CLI::Range(0, 2))->capture_default_str();

    DiceArgs da;
    auto* dice_cmd = app.add_subcommand("dice", "Per-label dice between two label volumes");
    dice_cmd->add_option("pred", da.pred, "Predicted label CTV")->required();
    dice_cmd->add_option("truth", da.truth, "Ground-truth label CTV")->required();
    dice_cmd->add_option("--labels", da.labels, "Comma-separated label ids (default: all named labels)");
    dice_cmd->add_option("--subject", da.subject, "Subject id (default: truth file name)");
    dice_cmd->add_option("-o,--output", da.output, "Output CSV, - for stdout")->capture_default_str();

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "Paired Wilcoxon comparison of per-subject dice tables");
    compare->add_option("--table", ca.tables, "METHOD=dice.csv, repeatable")->required();
    compare->add_option("--reference", ca.reference, "Reference method")->required();
    compare->add_option("--alpha", ca.alpha, "Significance level")->capture_default_str();
    compare->add_option("--m", ca.m, "Comparisons per organ for FDR")->capture_default_str();
    compare->add_option("-o,--output", ca.output, "Output CSV, - for stdout")->capture_default_str();
    compare->add_option("--metadata", ca.metadata, "Metadata JSON (default: <output>.meta.json)");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Intensity-shift robustness sweep on synthetic phantoms");
    sweep->add_option("config", sa.config, "Run config JSON")->required();
    sweep->add_option("-o,--output", sa.output, "Output CSV, - for stdout (default: config \"output\")");
    sweep->add_option("--threads", sa.threads, "Worker threads (0: config, then CTWINDOW_THREADS)");

    PhantomArgs pa;
    std::uint64_t phantom_seed = 0;
    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic phantom as CTV");
    phantom->add_option("out_image", pa.out_image, "Image CTV header")->required();
    phantom->add_option("out_labels", pa.out_labels, "Label CTV header")->required();
    phantom->add_option("--config", pa.config, "Run config JSON (default: reference phantom)");
    auto* phantom_seed_opt = phantom->add_option("--seed", phantom_seed, "Seed");
    phantom->add_option("--split", pa.split, "train or test subject of the config")
        ->check(CLI::IsMember({"train", "test"}));
    phantom->add_option("--index", pa.index, "Subject index within the split");

    AugmentArgs aa;
    std::uint64_t augment_seed = 0;
    double max_rotation = 0.0;
    std::size_t pad = 0;
    auto* augment = app.add_subcommand("augment", "Random paired rotation, translation and crop per slice");
    augment->add_option("image", aa.image, "Image CTV header")->required();
    augment->add_option("labels", aa.labels, "Label CTV header")->required();
    augment->add_option("out_image", aa.out_image, "Output image CTV header")->required();
    augment->add_option("out_labels", aa.out_labels, "Output label CTV header")->required();
    augment->add_option("--config", aa.config, "Run config JSON providing \"augment\" and \"seed\"");
    auto* augment_seed_opt = augment->add_option("--seed", augment_seed, "Seed");
    auto* rotation_opt = augment->add_option("--max-rotation", max_rotation, "Degrees")->check(CLI::NonNegativeNumber);
    augment->add_option("--max-translation", aa.max_translation, "Voxels, one value or x y")->expected(1, 2);
    augment->add_option("--crop", aa.crop, "Crop size, one value or x y")->expected(1, 2);
    auto* pad_opt = augment->add_option("--pad", pad, "Padding voxels per side");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (window->parsed()) {
            cmd_window(wa, out);
        } else if (dice_cmd->parsed()) {
            cmd_dice(da, out);
        } else if (compare->parsed()) {
            cmd_compare(ca, out);
        } else if (sweep->parsed()) {
            cmd_sweep(sa, out);
        } else if (phantom->parsed()) {
            if (*phantom_seed_opt) {
                pa.seed = phantom_seed;
            }
            cmd_phantom(pa, out);
        } else if (augment->parsed()) {
            if (*augment_seed_opt) {
                aa.seed = augment_seed;
            }
            if (*rotation_opt) {
                aa.max_rotation = max_rotation;
            }
            if (*pad_opt) {
                aa.pad = pad;
            }
            cmd_augment(aa, out);
        }
    } catch (const std::exception& e) {
        err << "ctwindow: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace ctwindow::cli
