#include "ctwindow/experiment.hpp"

#include "ctwindow/parallel.hpp"

namespace ctwindow {

std::vector<Subject> make_subjects(const PhantomConfig& base, std::uint64_t run_seed, const std::string& split,
                                   std::size_t count, double jitter) {
    std::vector<Subject> subjects;
    subjects.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const PhantomConfig cfg = jitter_phantom_config(base, subject_seed(run_seed, split, i), jitter);
        subjects.push_back(Subject{split + "-" + std::to_string(i), generate_phantom(cfg)});
    }
    return subjects;
}

BandSegmenter fit_for_strategy(const RunConfig& cfg, const StrategySpec& spec, std::span<const Subject> training) {
    std::optional<SwnParams> swn;
    if (spec.strategy == Strategy::Swn) {
        swn = SwnParams{spec.x, spec.y, strategy_seed(cfg.seed, spec)};
    }
    return fit_band_segmenter(training, spec.strategy, swn, cfg.band);
}

SweepResult run_experiment(const RunConfig& cfg, std::size_t workers) {
    if (workers == 0) {
        workers = cfg.threads != 0 ? cfg.threads : worker_count();
    }
    const auto train = make_subjects(cfg.phantom, cfg.seed, "train", cfg.train_subjects, cfg.jitter);
    const auto test = make_subjects(cfg.phantom, cfg.seed, "test", cfg.test_subjects, cfg.jitter);

    SweepResult all;
    for (const auto& spec : cfg.strategies) {
        const BandSegmenter seg = fit_for_strategy(cfg, spec, train);
        SweepResult r = run_shift_sweep(seg, test, spec.strategy, cfg.shifts, spec.label(), workers);
        all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    }
    return all;
}

} // namespace ctwindow
