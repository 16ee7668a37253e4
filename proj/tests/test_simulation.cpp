#include "ctwindow/error.hpp"
#include "ctwindow/experiment.hpp"
#include "ctwindow/phantom.hpp"
#include "ctwindow/run_config.hpp"
#include "ctwindow/segmenter.hpp"
#include "ctwindow/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace ctwindow;

namespace {

PhantomConfig single_organ(double noise, std::uint64_t seed) {
    PhantomConfig cfg;
    cfg.dims = {24, 24, 6};
    cfg.organs = {{1, "liver", {12.0, 12.0, 2.5}, {6.0, 5.0, 2.0}, 40.0, noise}};
    cfg.seed = seed;
    return cfg;
}

std::size_t ellipsoid_count(const PhantomConfig& cfg, const OrganSpec& o) {
    std::size_t n = 0;
    for (std::size_t z = 0; z < cfg.dims[2]; ++z) {
        for (std::size_t y = 0; y < cfg.dims[1]; ++y) {
            for (std::size_t x = 0; x < cfg.dims[0]; ++x) {
                const double dx = (static_cast<double>(x) - o.center[0]) / o.radii[0];
                const double dy = (static_cast<double>(y) - o.center[1]) / o.radii[1];
                const double dz = (static_cast<double>(z) - o.center[2]) / o.radii[2];
                n += dx * dx + dy * dy + dz * dz <= 1.0;
            }
        }
    }
    return n;
}

std::vector<Subject> subjects_from(const PhantomConfig& base, int count) {
    std::vector<Subject> out;
    for (int i = 0; i < count; ++i) {
        PhantomConfig cfg = base;
        cfg.seed = base.seed + static_cast<std::uint64_t>(i);
        out.push_back({"s" + std::to_string(i), generate_phantom(cfg)});
    }
    return out;
}

} // namespace

TEST_CASE("noiseless phantom has exactly two intensities") {
    const Phantom p = generate_phantom(single_organ(0.0, 1));
    std::set<float> values;
    for (std::size_t i = 0; i < p.image.size(); ++i) {
        values.insert(p.image.value(i));
    }
    CHECK(values == std::set<float>{-1000.0f, 40.0f});
}

TEST_CASE("organ label count equals ellipsoid membership") {
    const PhantomConfig cfg = reference_phantom_config(3);
    const Phantom p = generate_phantom(cfg);
    for (const auto& o : cfg.organs) {
        const auto vox = p.labels.voxels();
        const auto n = static_cast<std::size_t>(std::count(vox.begin(), vox.end(), o.label_id));
        CHECK(n == ellipsoid_count(cfg, o));
        CHECK(p.labels.label_names().at(static_cast<std::uint8_t>(o.label_id)) == o.name);
    }
}

TEST_CASE("phantom generation is deterministic under a seed") {
    const PhantomConfig cfg = reference_phantom_config(42);
    const Phantom a = generate_phantom(cfg);
    const Phantom b = generate_phantom(cfg);
    CHECK(a.image == b.image);
    CHECK(a.labels == b.labels);
    CHECK_FALSE(generate_phantom(reference_phantom_config(43)).image == a.image);
}

TEST_CASE("phantom noise matches the configured spread") {
    PhantomConfig cfg = single_organ(15.0, 5);
    cfg.dtype = ElementKind::Float32;
    const Phantom p = generate_phantom(cfg);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.image.size(); ++i) {
        if (p.labels.voxels()[i] == 1) {
            const double v = p.image.value(i);
            sum += v;
            sq += v * v;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double sd = std::sqrt(sq / static_cast<double>(n) - mean * mean);
    CHECK(std::fabs(mean - 40.0) < 3.0);
    CHECK(std::fabs(sd - 15.0) < 2.0);
}

TEST_CASE("phantom configuration errors") {
    PhantomConfig cfg = single_organ(0.0, 0);
    cfg.organs.push_back({2, "other", {13.0, 12.0, 2.5}, {3.0, 3.0, 1.0}, 60.0, 0.0});
    CHECK_THROWS_AS(generate_phantom(cfg), InvalidArgument);
    cfg = single_organ(0.0, 0);
    cfg.organs[0].center = {2.0, 12.0, 2.5};
    CHECK_THROWS_AS(validate_phantom_config(cfg), InvalidArgument);
    cfg = single_organ(0.0, 0);
    cfg.organs.push_back(cfg.organs[0]);
    CHECK_THROWS_AS(validate_phantom_config(cfg), InvalidArgument);
    cfg = single_organ(0.0, 0);
    cfg.organs[0].label_id = 0;
    CHECK_THROWS_AS(validate_phantom_config(cfg), InvalidArgument);
}

TEST_CASE("jittered configurations stay valid and reproducible") {
    const PhantomConfig base = reference_phantom_config(0);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const PhantomConfig j = jitter_phantom_config(base, s, 2.0);
        CHECK_NOTHROW(generate_phantom(j));
        CHECK(j.seed == s);
        for (std::size_t k = 0; k < base.organs.size(); ++k) {
            for (std::size_t a = 0; a < 3; ++a) {
                CHECK(std::fabs(j.organs[k].center[a] - base.organs[k].center[a]) <= 2.0);
            }
        }
    }
    const PhantomConfig a = jitter_phantom_config(base, 7, 2.0);
    const PhantomConfig b = jitter_phantom_config(base, 7, 2.0);
    CHECK(a.organs[0].center == b.organs[0].center);
}

TEST_CASE("percentile uses linear interpolation between order statistics") {
    std::vector<float> v{4.0f, 1.0f, 3.0f, 2.0f, 5.0f};
    CHECK(percentile_inplace(v, 0.0) == 1.0);
    CHECK(percentile_inplace(v, 100.0) == 5.0);
    CHECK(percentile_inplace(v, 50.0) == 3.0);
    CHECK(percentile_inplace(v, 10.0) == doctest::Approx(1.4));
    CHECK(percentile_inplace(v, 99.0) == doctest::Approx(4.96));
    std::vector<float> empty;
    CHECK_THROWS_AS(percentile_inplace(empty, 50.0), InvalidArgument);
}

TEST_CASE("band segmenter assigns the lowest matching label") {
    const BandSegmenter seg({{2, 10.0f, 30.0f}, {1, 20.0f, 40.0f}}, Strategy::Stn, {{1, "a"}, {2, "b"}});
    Slice2D s;
    s.dims = {5, 1};
    s.values = {5.0f, 15.0f, 25.0f, 35.0f, 45.0f};
    const LabelSlice out = seg.predict(s);
    CHECK(out.values == std::vector<std::uint8_t>{0, 2, 1, 1, 0});
    CHECK(seg.bands().front().label_id == 1);
    CHECK_THROWS_AS(BandSegmenter({{1, 5.0f, 5.0f}}, Strategy::Stn, {}), InvalidArgument);
    CHECK_THROWS_AS(BandSegmenter({{1, 1.0f, 5.0f}, {1, 2.0f, 3.0f}}, Strategy::Stn, {}), InvalidArgument);
}

TEST_CASE("noiseless STN fit collapses to the epsilon floor") {
    const auto train = subjects_from(single_organ(0.0, 0), 2);
    BandFitOptions opt;
    opt.epochs = 2;
    const BandSegmenter seg = fit_band_segmenter(train, Strategy::Stn, std::nullopt, opt);
    const Band* liver = seg.band_for(1);
    REQUIRE(liver != nullptr);
    CHECK(liver->lo == 127.0f);
    CHECK(liver->hi == 128.0f);
    const Band* bg = seg.band_for(0);
    REQUIRE(bg != nullptr);
    CHECK(bg->lo == -0.5f);
    CHECK(bg->hi == 0.5f);
}

TEST_CASE("SWN with zero sigmas fits the same bands as STN") {
    const auto train = subjects_from(single_organ(15.0, 10), 2);
    BandFitOptions opt;
    opt.epochs = 3;
    const BandSegmenter stn = fit_band_segmenter(train, Strategy::Stn, std::nullopt, opt);
    const BandSegmenter swn = fit_band_segmenter(train, Strategy::Swn, SwnParams{0.0, 0.0, 9}, opt);
    CHECK(stn.bands() == swn.bands());
}

TEST_CASE("SWN[50,50] widens the 40 HU organ band") {
    const auto train = subjects_from(single_organ(15.0, 20), 3);
    const BandSegmenter stn = fit_band_segmenter(train, Strategy::Stn, std::nullopt);
    const BandSegmenter swn = fit_band_segmenter(train, Strategy::Swn, SwnParams{50.0, 50.0, 4});
    const Band* a = stn.band_for(1);
    const Band* b = swn.band_for(1);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(b->hi - b->lo > a->hi - a->lo);
}

TEST_CASE("fit argument checks") {
    const auto train = subjects_from(single_organ(0.0, 0), 1);
    CHECK_THROWS_AS(fit_band_segmenter(std::vector<Subject>{}, Strategy::Stn, std::nullopt), InvalidArgument);
    CHECK_THROWS_AS(fit_band_segmenter(train, Strategy::Swn, std::nullopt), InvalidArgument);
    CHECK_THROWS_AS(fit_band_segmenter(train, Strategy::Stn, SwnParams{}), InvalidArgument);
    Phantom p = generate_phantom(single_organ(0.0, 0));
    const LabelVolume named({24, 24, 6}, std::vector<std::uint8_t>(p.labels.voxels().begin(), p.labels.voxels().end()),
                            {{1, "liver"}, {2, "ghost"}});
    const std::vector<Subject> ghost{{"g", Phantom{p.image, named}}};
    CHECK_THROWS_AS(fit_band_segmenter(ghost, Strategy::Stn, std::nullopt), InvalidArgument);
}

TEST_CASE("shift grid") {
    const auto g = default_shift_grid();
    REQUIRE(g.size() == 25);
    CHECK(g.front() == -300.0);
    CHECK(g.back() == 300.0);
    CHECK(g[12] == 0.0);
    CHECK(shift_grid(0.0, 0.0, 1.0) == std::vector<double>{0.0});
    CHECK(shift_grid(-1.0, 1.0, 0.5).size() == 5);
    CHECK_THROWS_AS(shift_grid(0.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(shift_grid(1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("noiseless self-consistency gives dice 1 at shift 0") {
    const auto subjects = subjects_from(single_organ(0.0, 0), 2);
    BandFitOptions opt;
    opt.epochs = 1;
    for (Strategy s : {Strategy::Stn, Strategy::Wir}) {
        const BandSegmenter seg = fit_band_segmenter(subjects, s, std::nullopt, opt);
        const std::vector<double> shifts{0.0};
        const SweepResult r = run_shift_sweep(seg, subjects, s, shifts);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].mean_dice == 1.0);
        CHECK(r.rows[0].label_name == "liver");
    }
}

TEST_CASE("STN segmentation of the 40 HU organ collapses at +300") {
    const auto subjects = subjects_from(single_organ(15.0, 50), 3);
    const BandSegmenter seg = fit_band_segmenter(subjects, Strategy::Stn, std::nullopt);
    const std::vector<double> shifts{0.0, 300.0};
    const SweepResult r = run_shift_sweep(seg, subjects, Strategy::Stn, shifts, "STN", 1);
    CHECK(r.dice_at("STN", 1, 0.0) > 0.9);
    CHECK(r.dice_at("STN", 1, 300.0) < 0.1);
    CHECK_THROWS_AS(static_cast<void>(r.dice_at("STN", 1, 25.0)), OutOfRange);
}

TEST_CASE("sweep rows cover the grid and do not depend on the worker count") {
    const auto subjects = subjects_from(reference_phantom_config(8), 2);
    BandFitOptions opt;
    opt.epochs = 2;
    const BandSegmenter seg = fit_band_segmenter(subjects, Strategy::Swn, SwnParams{50.0, 50.0, 1}, opt);
    const auto grid = default_shift_grid();
    const SweepResult one = run_shift_sweep(seg, subjects, Strategy::Swn, grid, "SWN[50,50]", 1);
    const SweepResult many = run_shift_sweep(seg, subjects, Strategy::Swn, grid, "SWN[50,50]", 7);
    REQUIRE(one.rows.size() == 25 * 3);
    std::ostringstream a, b;
    write_sweep_csv(a, one.rows);
    write_sweep_csv(b, many.rows);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("shift_hu,strategy,label_id,label_name,mean_dice\n", 0) == 0);
    for (int label : {1, 2, 3}) {
        std::size_t n = 0;
        for (const auto& row : one.rows) {
            n += row.label_id == label;
        }
        CHECK(n == 25);
    }
    CHECK_THROWS_AS(run_shift_sweep(seg, subjects, Strategy::Swn, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("tolerance width counts shifts at or above the threshold") {
    SweepResult r;
    r.rows = {{-25, "X", 1, "a", 0.4}, {0, "X", 1, "a", 0.5}, {25, "X", 1, "a", 0.9}, {0, "Y", 1, "a", 1.0}};
    CHECK(r.tolerance_width("X", 1) == 2);
    CHECK(r.tolerance_width("X", 1, 0.95) == 0);
    CHECK(r.tolerance_width("Y", 1) == 1);
    CHECK(r.tolerance_width("X", 2) == 0);
}

TEST_CASE("run config defaults and parsing") {
    const RunConfig d = parse_run_config("{}");
    REQUIRE(d.strategies.size() == 3);
    CHECK(d.strategies[2].label() == "SWN[50,50]");
    CHECK(d.shifts.size() == 25);
    CHECK(d.train_subjects == 5);
    CHECK(d.m == 12);

    const RunConfig single = parse_run_config(R"({"strategy":"SWN","x":50,"y":50,"seed":1234})");
    REQUIRE(single.strategies.size() == 1);
    CHECK(single.strategies[0].strategy == Strategy::Swn);
    CHECK(single.strategies[0].x == 50.0);
    CHECK(single.seed == 1234);

    const RunConfig full = parse_run_config(R"({
        "seed": 5,
        "strategies": [{"strategy": "STN"}, {"strategy": "SWN", "x": 10, "y": 100, "seed": 3}],
        "phantom": {"dims": [32, 32, 4], "organs": [{"label_id": 4, "label_name": "kidney",
                    "center": [16, 16, 1.5], "radii": [5, 5, 1], "mean_hu": 30, "noise_std": 5}]},
        "shifts": [-50, 0, 50],
        "band": {"epsilon": 1.0},
        "augment": {"crop_size": [28, 28], "pad": 2},
        "alpha": 0.01, "m": 4, "epochs": 3, "output": "x.csv"})");
    CHECK(full.strategies[1].label() == "SWN[10,100]");
    CHECK(full.strategies[1].seed == 3u);
    CHECK(strategy_seed(5, full.strategies[1]) == 3u);
    CHECK(strategy_seed(5, full.strategies[0]) != strategy_seed(6, full.strategies[0]));
    CHECK(full.phantom.organs.at(0).name == "kidney");
    CHECK(full.shifts == std::vector<double>{-50.0, 0.0, 50.0});
    CHECK(full.band.epsilon == 1.0);
    CHECK(full.band.epochs == 3);
    CHECK(full.augment.pad == 2);
    CHECK(full.m == 4);
    CHECK(full.output == "x.csv");
}

TEST_CASE("run config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_run_config(R"({"sead": 1})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"phantom": {"dimz": [1, 1, 1]}})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"strategies": [{"strategy": "STN", "z": 1}]})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"strategy": "STN", "strategies": []})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"strategy": "ABC"})"), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config(R"({"strategy": "STN", "x": 5})"), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config(R"({"seed": -1})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"alpha": 2})"), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config(R"({"shifts": {"from": 0, "to": 10}})"), FormatError);
    CHECK_THROWS_AS(parse_run_config(R"({"train_subjects": 0})"), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config("[1, 2"), FormatError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), IoError);
}

TEST_CASE("experiment subjects follow the documented seed derivation") {
    const RunConfig cfg = default_run_config();
    const auto subjects = make_subjects(cfg.phantom, 11, "test", 2, cfg.jitter);
    REQUIRE(subjects.size() == 2);
    CHECK(subjects[1].id == "test-1");
    const PhantomConfig expect = jitter_phantom_config(cfg.phantom, subject_seed(11, "test", 1), cfg.jitter);
    CHECK(generate_phantom(expect).image == subjects[1].data.image);
}

TEST_CASE("a small experiment is reproducible") {
    RunConfig cfg = parse_run_config(R"({"seed": 3, "train_subjects": 2, "test_subjects": 2, "epochs": 2,
                                         "shifts": {"from": -50, "to": 50, "step": 50}})");
    const SweepResult a = run_experiment(cfg, 1);
    const SweepResult b = run_experiment(cfg, 4);
    REQUIRE(a.rows.size() == 3 * 3 * 3);
    std::ostringstream sa, sb;
    write_sweep_csv(sa, a.rows);
    write_sweep_csv(sb, b.rows);
    CHECK(sa.str() == sb.str());
    CHECK(a.rows.front().strategy == "STN");
    CHECK(a.rows.back().strategy == "SWN[50,50]");
}
