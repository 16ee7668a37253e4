#include "ctwindow/cli.hpp"
#include "ctwindow/ctv_io.hpp"
#include "ctwindow/metrics.hpp"
#include "ctwindow/phantom.hpp"

#include "support/temp_dir.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <iterator>
#include <sstream>

using namespace ctwindow;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string small_sweep_config() {
    return R"({"seed": 9, "train_subjects": 2, "test_subjects": 2, "epochs": 2,
               "shifts": {"from": -100, "to": 100, "step": 100}})";
}

} // namespace

TEST_CASE("cli: no subcommand or unknown flag fails") {
    CHECK(run({}).status != 0);
    CHECK(run({"window", "--bogus"}).status != 0);
    CHECK(run({"frobnicate"}).status != 0);
    CHECK(run({"--help"}).status == 0);
}

TEST_CASE("cli: phantom, window and dice round trip") {
    testing::TempDir dir;
    const std::string img = (dir / "img.ctv.json").string();
    const std::string lab = (dir / "lab.ctv.json").string();
    Result r = run({"phantom", img, lab, "--seed", "4"});
    REQUIRE(r.status == 0);
    CHECK(load_volume(img) == generate_phantom(reference_phantom_config(4)).image);

    const std::string stn = (dir / "stn.ctv.json").string();
    r = run({"window", img, stn, "--strategy", "STN"});
    REQUIRE(r.status == 0);
    const auto line = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
    CHECK(line["level"] == 40.0);
    CHECK(line["half_width"] == 200.0);
    const CtVolume out = load_volume(stn);
    CHECK(out.kind() == ElementKind::Float32);
    for (float v : out.float_voxels()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 255.0f);
    }

    const std::string swn0 = (dir / "swn0.ctv.json").string();
    r = run({"window", img, swn0, "--strategy", "SWN", "--x", "0", "--y", "0", "--seed", "77", "--mode", "train"});
    REQUIRE(r.status == 0);
    CHECK(slurp(dir / "swn0.raw") == slurp(dir / "stn.raw"));
    std::size_t lines = 0;
    for (char c : r.out) {
        lines += c == '\n';
    }
    CHECK(lines == 16);

    const std::string swn_test = (dir / "swnt.ctv.json").string();
    r = run({"window", img, swn_test, "--strategy", "SWN", "--x", "50", "--y", "50", "--seed", "1"});
    REQUIRE(r.status == 0);
    CHECK(slurp(dir / "swnt.raw") == slurp(dir / "stn.raw"));

    const std::string swn_train = (dir / "swnr.ctv.json").string();
    r = run({"window", img, swn_train, "--strategy", "SWN", "--x", "50", "--y", "50", "--mode", "train"});
    REQUIRE(r.status == 0);
    CHECK(slurp(dir / "swnr.raw") != slurp(dir / "stn.raw"));

    r = run({"dice", lab, lab, "--labels", "1,2,3", "-o", (dir / "d.csv").string()});
    REQUIRE(r.status == 0);
    std::ifstream d(dir / "d.csv");
    const auto records = read_dice_csv(d);
    REQUIRE(records.size() == 3);
    for (const auto& rec : records) {
        CHECK(rec.dice == 1.0);
    }
    r = run({"dice", lab, lab});
    REQUIRE(r.status == 0);
    CHECK(r.out.find("vessel") != std::string::npos);
}

TEST_CASE("cli: window reports failures with a nonzero status") {
    testing::TempDir dir;
    Result r = run({"window", (dir / "missing.ctv.json").string(), (dir / "o.ctv.json").string()});
    CHECK(r.status != 0);
    CHECK(r.err.find("cannot") != std::string::npos);
    r = run({"window", "a", "b", "--mode", "sometimes"});
    CHECK(r.status != 0);
}

TEST_CASE("cli: compare writes CSV and metadata sidecar") {
    testing::TempDir dir;
    std::vector<DiceRecord> a, b;
    for (int i = 0; i < 20; ++i) {
        a.push_back({"s" + std::to_string(i), 1, "liver", 0.80 + 0.001 * i});
        b.push_back({"s" + std::to_string(i), 1, "liver", 0.82 + 0.001 * i});
    }
    {
        std::ofstream fa(dir / "a.csv"), fb(dir / "b.csv");
        write_dice_csv(fa, a);
        write_dice_csv(fb, b);
    }
    const auto out = dir / "cmp.csv";
    Result r = run({"compare", "--table", "STN=" + (dir / "a.csv").string(), "--table",
                    "SWN=" + (dir / "b.csv").string(), "--reference", "STN", "-o", out.string()});
    REQUIRE(r.status == 0);
    const std::string text = slurp(out);
    CHECK(text.find("liver,SWN,STN,20,") != std::string::npos);
    CHECK(text.find("↑") != std::string::npos);
    const auto meta = nlohmann::json::parse(slurp(dir / "cmp.meta.json"));
    CHECK(meta["m"] == 12);

    r = run({"compare", "--table", "STN", "--reference", "STN"});
    CHECK(r.status != 0);
    r = run({"compare", "--table", "STN=" + (dir / "nope.csv").string(), "--reference", "STN"});
    CHECK(r.status != 0);
}

TEST_CASE("cli: sweep is byte-reproducible") {
    testing::TempDir dir;
    write(dir / "run.json", small_sweep_config());
    Result r1 = run({"sweep", (dir / "run.json").string(), "-o", (dir / "a.csv").string()});
    Result r2 = run({"sweep", (dir / "run.json").string(), "-o", (dir / "b.csv").string(), "--threads", "3"});
    REQUIRE(r1.status == 0);
    REQUIRE(r2.status == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").rfind("shift_hu,strategy,label_id,label_name,mean_dice\n", 0) == 0);

    write(dir / "named.json", R"({"train_subjects": 1, "test_subjects": 1, "epochs": 1, "shifts": [0],
                                  "output": "named.csv"})");
    REQUIRE(run({"sweep", (dir / "named.json").string()}).status == 0);
    CHECK(std::filesystem::exists(dir / "named.csv"));

    write(dir / "bad.json", R"({"unknown": true})");
    CHECK(run({"sweep", (dir / "bad.json").string(), "-o", "-"}).status != 0);
    write(dir / "noout.json", "{}");
    CHECK(run({"sweep", (dir / "noout.json").string()}).status != 0);
}

TEST_CASE("cli: phantom from a run config and augment") {
    testing::TempDir dir;
    write(dir / "run.json", R"({"seed": 2, "augment": {"crop_size": [48, 48], "pad": 4}})");
    const std::string img = (dir / "img.ctv.json").string();
    const std::string lab = (dir / "lab.ctv.json").string();
    REQUIRE(run({"phantom", img, lab, "--config", (dir / "run.json").string(), "--split", "test", "--index", "1"})
                .status == 0);

    const std::string aimg = (dir / "aimg.ctv.json").string();
    const std::string alab = (dir / "alab.ctv.json").string();
    Result r = run({"augment", img, lab, aimg, alab, "--config", (dir / "run.json").string()});
    REQUIRE(r.status == 0);
    const CtVolume out = load_volume(aimg);
    CHECK(out.dims() == Extent3{48, 48, 16});
    CHECK(load_labels(alab).dims() == Extent3{48, 48, 16});
    const std::string first = slurp(dir / "aimg.raw");
    REQUIRE(run({"augment", img, lab, aimg, alab, "--config", (dir / "run.json").string()}).status == 0);
    CHECK(slurp(dir / "aimg.raw") == first);

    r = run({"augment", img, lab, aimg, alab, "--max-rotation", "0", "--max-translation", "0"});
    REQUIRE(r.status == 0);
    CHECK(load_labels(alab) == load_labels(lab));

    r = run({"augment", img, lab, aimg, alab, "--crop", "100"});
    CHECK(r.status != 0);
}
