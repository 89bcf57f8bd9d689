// Copyright 2026 The symmocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "symmocc/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symmocc/datakit/checkpoint.hpp"
#include "symmocc/datakit/image_io.hpp"
#include "symmocc/datakit/manifest.hpp"
#include "symmocc/datakit/pfm.hpp"
#include "symmocc/datakit/synth.hpp"
#include "symmocc/gtgen.hpp"
#include "symmocc/metrics.hpp"
#include "symmocc/trainer.hpp"

namespace fs = std::filesystem;

namespace symmocc {

namespace {

fs::path resolve(const std::string& p) {
    fs::path path(p);
    const char* root = std::getenv(kDataRootEnv);
    if (path.is_relative() && root && *root) return fs::path(root) / path;
    return path;
}

Grid<float> to_float(const ProbabilityMap& p) {
    Grid<float> g(p.width, p.height);
    for (std::size_t i = 0; i < p.size(); ++i) g.values[i] = static_cast<float>(p.values[i]);
    return g;
}

ProbabilityMap to_double(const Grid<float>& p) {
    ProbabilityMap g(p.width, p.height);
    for (std::size_t i = 0; i < p.size(); ++i) g.values[i] = p.values[i];
    return g;
}

// ---- synth ----

struct SynthArgs {
    std::string out;
    std::size_t count = 8;
    std::size_t width = 192;
    std::size_t height = 128;
    std::uint64_t seed = 0;
    double delta = 1.0;
    float max_disparity = 24.0f;
    std::size_t max_shapes = 3;
    bool integer_disparities = false;
    bool flat = false;
};

void run_synth(const SynthArgs& a, std::ostream& out) {
    const fs::path dir = resolve(a.out);
    fs::create_directories(dir);
    RandomSceneOptions opt;
    opt.max_disparity = a.max_disparity;
    opt.max_shapes = a.max_shapes;
    opt.integer_disparities = a.integer_disparities;
    opt.textured = !a.flat;
    GtConfig gt;
    gt.delta = a.delta;
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 0; i < a.count; ++i) {
        SynthResult r = synth_scene(random_scene_spec(a.seed + i, a.width, a.height, opt));
        attach_gt(r.sample, gt);
        std::ostringstream id;
        id << "scene" << std::setw(4) << std::setfill('0') << i;
        entries.push_back(save_sample(r.sample, dir, id.str()));
        write_mask(r.oracle_left, dir / (id.str() + "_left_oracle.pgm"));
        write_mask(r.oracle_right, dir / (id.str() + "_right_oracle.pgm"));
    }
    write_manifest(dir, entries);
    out << "wrote " << entries.size() << " samples to " << dir.string() << '\n';
}

// ---- gen-gt ----

struct GenGtArgs {
    std::string left, right;
    std::string out_left, out_right;
    double delta = 1.0;
    bool oob_visible = false;
};

void run_gen_gt(const GenGtArgs& a, std::ostream& out) {
    GtConfig cfg;
    cfg.delta = a.delta;
    cfg.oob_is_occluded = !a.oob_visible;
    const fs::path lp = resolve(a.left), rp = resolve(a.right);
    const DisparityMap dl = read_pfm(lp, View::Left);
    const DisparityMap dr = read_pfm(rp, View::Right);
    const auto [ol, orr] = binocular_occlusion(dl, dr, cfg);
    auto default_out = [](const fs::path& p) { return p.parent_path() / (p.stem().string() + "_occ.pgm"); };
    const fs::path ol_path = a.out_left.empty() ? default_out(lp) : resolve(a.out_left);
    const fs::path or_path = a.out_right.empty() ? default_out(rp) : resolve(a.out_right);
    write_mask(ol, ol_path);
    write_mask(orr, or_path);
    out << "left: " << ol.count_occluded() << " occluded pixels -> " << ol_path.string() << '\n'
        << "right: " << orr.count_occluded() << " occluded pixels -> " << or_path.string() << '\n';
}

// ---- train ----

struct TrainArgs {
    std::string data, heldout, ckpt = "model.ckpt", log;
    std::string variant = "SymmNet";
    TrainConfig cfg;
    std::size_t max_steps = 0;
};

void run_train(TrainArgs a, std::ostream& out) {
    a.cfg.variant = parse_variant(a.variant);
    if (a.max_steps > 0) a.cfg.max_steps = a.max_steps;
    const std::vector<StereoSample> train_set = load_dataset(resolve(a.data));
    std::vector<StereoSample> heldout;
    if (!a.heldout.empty()) heldout = load_dataset(resolve(a.heldout));
    out << "training " << to_string(a.cfg.variant) << " on " << train_set.size() << " samples\n";
    const TrainResult r = train(train_set, heldout, a.cfg, [&](const EpochRecord& e) {
        out << "epoch " << e.epoch << " steps " << e.steps << " loss " << e.mean_loss;
        if (e.heldout) out << " heldout_f " << e.heldout->micro.fscore;
        out << '\n';
    });
    const fs::path ckpt = resolve(a.ckpt);
    save_checkpoint(r.network, &r.optimizer, ckpt);
    out << "checkpoint -> " << ckpt.string() << '\n';
    if (!a.log.empty()) {
        std::ofstream log(resolve(a.log));
        if (!log) throw std::runtime_error("cannot create " + a.log);
        write_train_log(log, r.epochs);
    }
}

// ---- infer ----

struct InferArgs {
    std::string ckpt, left, right, data, out_dir = "predictions";
    double tau = 0.5;
    double delta = 1.0;
};

void infer_one(const Network& net, const Image& l, const Image& r, const InferArgs& a, const fs::path& dir,
               const std::string& id, std::ostream& out) {
    const NetworkOutput o = net.forward(images_to_tensor({&l}), images_to_tensor({&r}));
    Prediction pred;
    if (net.regresses_disparity()) {
        GtConfig gt;
        gt.delta = a.delta;
        auto [pl, pr] = lrc_occlusion(o, 0, gt);
        pred.left = pl;
        pred.right = pr;
        write_pfm_grid(to_float(plane_to_grid(*o.disp_left, 0, 0)), dir / (id + "_left_disp.pfm"));
        write_pfm_grid(to_float(plane_to_grid(*o.disp_right, 0, 0)), dir / (id + "_right_disp.pfm"));
    } else {
        const OcclusionProbs probs = probabilities(o, 0);
        pred = predict(probs, a.tau);
        write_pfm_grid(to_float(probs.left), dir / (id + "_left_prob.pfm"));
        if (probs.right) write_pfm_grid(to_float(*probs.right), dir / (id + "_right_prob.pfm"));
    }
    write_mask(pred.left, dir / (id + "_left_pred.pgm"));
    if (pred.right) write_mask(*pred.right, dir / (id + "_right_pred.pgm"));
    out << id << ": left " << pred.left.count_occluded() << " occluded";
    if (pred.right) out << ", right " << pred.right->count_occluded() << " occluded";
    out << '\n';
}

void run_infer(const InferArgs& a, std::ostream& out) {
    if (!(a.tau >= 0.0 && a.tau <= 1.0)) throw std::invalid_argument("--tau must lie in [0, 1]");
    const Checkpoint ck = load_checkpoint(resolve(a.ckpt));
    const fs::path dir = resolve(a.out_dir);
    fs::create_directories(dir);
    if (!a.data.empty()) {
        for (const ManifestEntry& e : manifest(resolve(a.data))) {
            infer_one(ck.network, read_ppm(e.left_image), read_ppm(e.right_image), a, dir, e.id, out);
        }
    } else {
        if (a.left.empty() || a.right.empty()) throw std::invalid_argument("infer needs --data or both --left and --right");
        infer_one(ck.network, read_ppm(resolve(a.left)), read_ppm(resolve(a.right)), a, dir, "pair", out);
    }
}

// ---- eval ----

struct EvalArgs {
    std::vector<std::string> pred, gt, base;
    std::string overlay_dir, kv;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
    if (a.pred.size() != a.gt.size()) throw std::invalid_argument("--pred and --gt must be given the same number of times");
    if (!a.base.empty() && a.base.size() != a.pred.size()) {
        throw std::invalid_argument("--base must be given once per --pred or not at all");
    }
    std::vector<std::pair<std::string, Metrics>> rows;
    std::vector<Metrics> per_image;
    if (!a.overlay_dir.empty()) fs::create_directories(resolve(a.overlay_dir));
    for (std::size_t i = 0; i < a.pred.size(); ++i) {
        const OcclusionMap p = read_mask(resolve(a.pred[i]), View::Left);
        const OcclusionMap g = read_mask(resolve(a.gt[i]), View::Left);
        const Metrics m = prf(p, g);
        rows.emplace_back(fs::path(a.pred[i]).filename().string(), m);
        per_image.push_back(m);
        if (!a.overlay_dir.empty()) {
            std::optional<Image> base;
            if (!a.base.empty()) base = read_ppm(resolve(a.base[i]));
            const Image ov = error_overlay(p, g, base ? &*base : nullptr);
            write_ppm(ov, resolve(a.overlay_dir) / ("overlay_" + std::to_string(i) + ".ppm"));
        }
    }
    const Aggregate agg = aggregate(per_image);
    rows.emplace_back("micro", agg.micro);
    Metrics macro;
    macro.precision = agg.macro_precision;
    macro.recall = agg.macro_recall;
    macro.fscore = agg.macro_fscore;
    write_metrics_table(out, rows);
    out << "macro over " << agg.images << " images: precision " << macro.precision << " recall " << macro.recall
        << " fscore " << macro.fscore << '\n';
    if (!a.kv.empty()) {
        std::ofstream kv(resolve(a.kv));
        if (!kv) throw std::runtime_error("cannot create " + a.kv);
        write_metrics_kv(kv, "micro.", agg.micro);
        write_metrics_kv(kv, "macro.", macro);
        kv << "images=" << agg.images << '\n';
    }
}

// ---- pr-curve ----

struct PrArgs {
    std::vector<std::string> prob, gt;
    std::string out = "pr_curve.csv";
    std::size_t steps = 100;
};

void run_pr(const PrArgs& a, std::ostream& out) {
    if (a.prob.size() != a.gt.size()) throw std::invalid_argument("--prob and --gt must be given the same number of times");
    if (a.steps == 0) throw std::invalid_argument("--steps must be positive");
    std::vector<ProbabilityMap> probs;
    std::vector<OcclusionMap> gts;
    for (std::size_t i = 0; i < a.prob.size(); ++i) {
        probs.push_back(to_double(read_pfm_grid(resolve(a.prob[i]))));
        gts.push_back(read_mask(resolve(a.gt[i]), View::Left));
    }
    const std::vector<double> grid = threshold_grid(a.steps);
    const PRCurve curve = pr_curve(probs, gts, grid);
    std::ofstream csv(resolve(a.out));
    if (!csv) throw std::runtime_error("cannot create " + a.out);
    write_pr_csv(csv, curve);
    const PRPoint& best = curve.best();
    out << "max F " << best.fscore << " at tau " << best.tau << " (P " << best.precision << ", R " << best.recall
        << ") -> " << resolve(a.out).string() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stereo occlusion detection toolkit"};
    app.require_subcommand(1, 1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic stereo dataset with ground truth");
    synth->add_option("--out", sa.out, "Output dataset directory")->required();
    synth->add_option("--count", sa.count, "Number of scenes")->capture_default_str();
    synth->add_option("--width", sa.width, "Image width")->capture_default_str();
    synth->add_option("--height", sa.height, "Image height")->capture_default_str();
    synth->add_option("--seed", sa.seed, "Seed of the first scene")->capture_default_str();
    synth->add_option("--delta", sa.delta, "Consistency threshold for ground truth")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth->add_option("--max-disparity", sa.max_disparity, "Largest shape disparity")->capture_default_str();
    synth->add_option("--max-shapes", sa.max_shapes, "Most foreground shapes per scene")->capture_default_str();
    synth->add_flag("--integer-disparities", sa.integer_disparities, "Round disparities to whole pixels");
    synth->add_flag("--flat", sa.flat, "Flat-coloured surfaces without texture");

    GenGtArgs ga;
    auto* gen = app.add_subcommand("gen-gt", "Occlusion masks from a pair of disparity maps");
    gen->add_option("--left", ga.left, "Left disparity (PFM)")->required();
    gen->add_option("--right", ga.right, "Right disparity (PFM)")->required();
    gen->add_option("--delta", ga.delta, "Consistency threshold in pixels")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_option("--out-left", ga.out_left, "Left mask path (default <left>_occ.pgm)");
    gen->add_option("--out-right", ga.out_right, "Right mask path (default <right>_occ.pgm)");
    gen->add_flag("--oob-visible", ga.oob_visible, "Do not mark out-of-image correspondences as occluded");

    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "Train a network variant");
    tr->add_option("--data", ta.data, "Training dataset directory")->required();
    tr->add_option("--heldout", ta.heldout, "Held-out dataset evaluated every epoch");
    tr->add_option("--ckpt", ta.ckpt, "Checkpoint output path")->capture_default_str();
    tr->add_option("--log", ta.log, "Per-epoch CSV log path");
    tr->add_option("--variant", ta.variant, "SymmNet, MonoNetL, MonoNetR, SiameseNet, AlterNet, HalfNet or LRCNet")
        ->capture_default_str();
    tr->add_option("--channel-scale", ta.cfg.channel_scale, "Channel width multiplier")->capture_default_str();
    tr->add_option("--seed", ta.cfg.seed, "Initialization and sampling seed")->capture_default_str();
    tr->add_option("--lr", ta.cfg.adam.lr, "Adam learning rate")->capture_default_str();
    tr->add_option("--beta1", ta.cfg.adam.beta1, "Adam beta1")->capture_default_str();
    tr->add_option("--beta2", ta.cfg.adam.beta2, "Adam beta2")->capture_default_str();
    tr->add_option("--adam-eps", ta.cfg.adam.eps, "Adam epsilon")->capture_default_str();
    tr->add_option("--batch-size", ta.cfg.batch_size, "Samples per step")->capture_default_str();
    tr->add_option("--epochs", ta.cfg.epochs, "Passes over the training set")->capture_default_str();
    tr->add_option("--max-steps", ta.max_steps, "Stop after this many steps (0 = no limit)")->capture_default_str();
    tr->add_option("--crop-h", ta.cfg.crop_h, "Crop height (multiple of 64)")->capture_default_str();
    tr->add_option("--crop-w", ta.cfg.crop_w, "Crop width (multiple of 64)")->capture_default_str();
    tr->add_option("--class-eps", ta.cfg.class_eps, "Class-weight bound eps (> 1)")->capture_default_str();
    tr->add_flag("--normalize-loss", ta.cfg.normalize_loss, "Divide the loss by the pixel count");
    tr->add_flag("--alter-mirror", ta.cfg.alter_mirror, "AlterNet right pass on mirrored inputs");
    tr->add_option("--delta", ta.cfg.gt.delta, "Ground-truth consistency threshold")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    tr->add_option("--tau", ta.cfg.tau, "Threshold for held-out metrics")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    InferArgs ia;
    auto* inf = app.add_subcommand("infer", "Predict occlusion with a trained checkpoint");
    inf->add_option("--ckpt", ia.ckpt, "Checkpoint path")->required();
    inf->add_option("--left", ia.left, "Left image (PPM)");
    inf->add_option("--right", ia.right, "Right image (PPM)");
    inf->add_option("--data", ia.data, "Dataset directory instead of a single pair");
    inf->add_option("--out-dir", ia.out_dir, "Output directory")->capture_default_str();
    inf->add_option("--tau", ia.tau, "Decision threshold (strict P > tau)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    inf->add_option("--delta", ia.delta, "Consistency threshold for LRCNet")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "Precision, recall and F-score of predicted masks");
    ev->add_option("--pred", ea.pred, "Predicted mask (repeatable)")->required();
    ev->add_option("--gt", ea.gt, "Ground-truth mask (repeatable, paired with --pred)")->required();
    ev->add_option("--base", ea.base, "Image shown under true negatives in overlays (repeatable)");
    ev->add_option("--overlay-dir", ea.overlay_dir, "Write colour-coded error overlays here");
    ev->add_option("--kv", ea.kv, "Write key=value metrics here");

    PrArgs pa;
    auto* pr = app.add_subcommand("pr-curve", "Precision-recall sweep over thresholds");
    pr->add_option("--prob", pa.prob, "Probability map (PFM, repeatable)")->required();
    pr->add_option("--gt", pa.gt, "Ground-truth mask (repeatable, paired with --prob)")->required();
    pr->add_option("--out", pa.out, "CSV output path")->capture_default_str();
    pr->add_option("--steps", pa.steps, "Threshold grid intervals over [0, 1]")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    for (const CLI::App* sub : app.get_subcommands()) {
        out << "# resolved config: " << sub->get_name() << '\n' << sub->config_to_str(true, false);
    }
    if (const char* root = std::getenv(kDataRootEnv)) out << "# " << kDataRootEnv << "=" << root << '\n';
    try {
        if (synth->parsed()) run_synth(sa, out);
        else if (gen->parsed()) run_gen_gt(ga, out);
        else if (tr->parsed()) run_train(ta, out);
        else if (inf->parsed()) run_infer(ia, out);
        else if (ev->parsed()) run_eval(ea, out);
        else if (pr->parsed()) run_pr(pa, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace symmocc
