#include "seatrack/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "seatrack/annotate.hpp"
#include "seatrack/embednet.hpp"
#include "seatrack/evaluation.hpp"
#include "seatrack/io.hpp"
#include "seatrack/sweep.hpp"
#include "seatrack/synth.hpp"
#include "seatrack/tracker.hpp"
#include "seatrack/triplets.hpp"

namespace seatrack::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSubcommands = {"gen", "sample", "train", "track", "eval", "sweep", "report", "serve"};

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), size_t{0});
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Input file that must exist; the message names the path.
fs::path require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw ValidationError(what + " not found: " + p.string());
    return p;
}

SequenceManifest load_manifest(const fs::path& path) {
    require_file(path, "manifest");
    return read_manifest(path);
}

// Flags added from --config for options not given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    auto it = std::find_if(args.begin(), args.end(),
                           [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (it == args.end()) return args;
    std::string path;
    if (*it == "--config") {
        if (it + 1 == args.end()) throw ValidationError("--config needs a file path");
        path = *(it + 1);
        args.erase(it, it + 2);
    } else {
        path = it->substr(9);
        args.erase(it);
    }
    require_file(path, "config file");
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(path + ": config must be a JSON object");
    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    auto scalar = [&](const json& v, const std::string& key) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
        if (v.is_number()) return format_real(v.get<double>());
        throw ValidationError(path + ": value of '" + key + "' must be a string or number");
    };
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (given(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                args.push_back(flag);
                args.push_back(scalar(v, key));
            }
        } else {
            args.push_back(flag);
            args.push_back(scalar(value, key));
        }
    }
    return args;
}

struct TrackerFlags {
    TrackerConfig cfg;
    std::string metric = "SQ_EUCLIDEAN";

    void add(CLI::App* app) {
        app->add_option("--lambda", cfg.lambda, "Motion weight in [0,1]")->capture_default_str();
        app->add_option("--cost-threshold", cfg.cost_threshold, "Gate on matching cost")->capture_default_str();
        app->add_option("--init-distance", cfg.init_distance_threshold, "Tentative centroid gate, px")
            ->capture_default_str();
        app->add_option("--n-init", cfg.n_init, "Consecutive hits to confirm")->capture_default_str();
        app->add_option("--max-age", cfg.max_age, "Frames a lost track is kept")->capture_default_str();
        app->add_option("--budget", cfg.budget, "Gallery size per track")->capture_default_str();
        app->add_option("--metric", metric, "SQ_EUCLIDEAN or COSINE")->capture_default_str();
        app->add_option("--min-confidence", cfg.min_confidence, "Detection confidence floor")->capture_default_str();
    }
    TrackerConfig resolve() {
        cfg.appearance_metric = parse_appearance_metric(metric);
        cfg.validate();
        return cfg;
    }
};

struct NetFlags {
    NetConfig cfg = desk_conv_config();
    std::string arch = "CONV";

    void add(CLI::App* app) {
        app->add_option("--arch", arch, "CONV or FC_ONLY")->capture_default_str();
        app->add_option("--conv1", cfg.conv1_channels, "First conv channels")->capture_default_str();
        app->add_option("--conv2", cfg.conv2_channels, "Second conv channels")->capture_default_str();
        app->add_option("--hidden", cfg.hidden_units, "FC_ONLY hidden units")->capture_default_str();
        app->add_option("--embedding", cfg.embedding_dim, "Embedding dimension")->capture_default_str();
        app->add_option("--margin", cfg.margin, "Triplet margin")->capture_default_str();
    }
};

void print_sequence_timings(const SequenceRun& run, std::ostream& out) {
    double sum = 0.0;
    for (size_t i = 0; i < run.step_ms.size(); ++i) {
        out << "frame " << run.tracks.frames[i].frame_id << ": " << std::fixed << std::setprecision(3)
            << run.step_ms[i] << " ms\n";
        sum += run.step_ms[i];
    }
    const double mean = run.step_ms.empty() ? 0.0 : sum / static_cast<double>(run.step_ms.size());
    out << "mean step: " << std::fixed << std::setprecision(3) << mean << " ms over " << run.step_ms.size()
        << " frames\n";
    out.unsetf(std::ios::floatfield);
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file_atomic(path, text);
}

}  // namespace

std::string suggest_subcommand(const std::string& word) {
    std::string best;
    size_t best_d = 3;
    for (const auto& s : kSubcommands) {
        const size_t d = edit_distance(word, s);
        if (d < best_d) {
            best_d = d;
            best = s;
        }
    }
    return best;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    if (!raw_args.empty() && !raw_args[0].empty() && raw_args[0][0] != '-' &&
        std::find(kSubcommands.begin(), kSubcommands.end(), raw_args[0]) == kSubcommands.end()) {
        err << "error: unknown subcommand '" << raw_args[0] << "'";
        const std::string s = suggest_subcommand(raw_args[0]);
        if (!s.empty()) err << "; did you mean '" << s << "'?";
        err << "\nsubcommands:";
        for (const auto& c : kSubcommands) err << ' ' << c;
        err << '\n';
        return kValidationError;
    }

    CLI::App app{"Multi-object tracking for thermal sea imagery: synthetic data, embedding training, tracking, "
                 "evaluation and annotation."};
    app.name("seatrack");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    uint64_t seed = 7;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of flag values; command-line flags win");

    auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Random seed")->capture_default_str(); };

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic sequence");
    std::string preset_name, out_dir, overlap = "blend";
    std::optional<int64_t> frames;
    std::optional<double> miss, fp_rate, noise, jitter, min_visible;
    gen->add_option("--preset", preset_name, "STATIC, DRIFT, CROSSING, REENTRY or CLUTTER")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--frames", frames, "Override frame count");
    gen->add_option("--miss-probability", miss, "Override detection miss probability");
    gen->add_option("--fp-rate", fp_rate, "Override false-positive rate per frame");
    gen->add_option("--noise", noise, "Override background noise sigma");
    gen->add_option("--jitter", jitter, "Override detection jitter, px");
    gen->add_option("--min-visible", min_visible, "Override visible fraction below which detections are missed");
    gen->add_option("--overlap", overlap, "occlude or blend")->capture_default_str();
    seed_opt(gen);

    // sample
    auto* sample = app.add_subcommand("sample", "Build a triplet dataset from an annotated sequence");
    std::string manifest_path, annotations_path, water_path;
    JitterConfig jit;
    AugmentConfig aug;
    double max_rotation_deg = 15.0;
    int resolution = 24;
    sample->add_option("--manifest", manifest_path, "Sequence manifest")->required();
    sample->add_option("--annotations", annotations_path, "Annotations (default: from manifest)");
    sample->add_option("--water", water_path, "Water regions (default: from manifest)");
    sample->add_option("--out", out_dir, "Output directory")->required();
    sample->add_option("--samples", jit.samples_per_anchor, "Positives per anchor")->capture_default_str();
    sample->add_option("--max-translation", jit.max_translation_frac, "Max shift, fraction of box size")
        ->capture_default_str();
    sample->add_option("--scale-low", jit.scale_low, "Lower scale bound")->capture_default_str();
    sample->add_option("--scale-high", jit.scale_high, "Upper scale bound")->capture_default_str();
    sample->add_flag("--augment", aug.enabled, "Shear/rotate positives");
    sample->add_option("--max-shear", aug.max_shear, "Max shear")->capture_default_str();
    sample->add_option("--max-rotation-deg", max_rotation_deg, "Max rotation, degrees")->capture_default_str();
    sample->add_option("--augment-probability", aug.probability, "Per-sample augmentation probability")
        ->capture_default_str();
    sample->add_option("--resolution", resolution, "Patch side length")->capture_default_str();
    seed_opt(sample);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the embedding network on triplet files");
    std::vector<std::string> triplet_paths;
    std::string checkpoint_out, log_path, optimizer = "ADAM";
    TrainConfig tc;
    NetFlags net;
    train_cmd->add_option("--triplets", triplet_paths, "Triplet file(s) from 'sample'")->required();
    train_cmd->add_option("--out", checkpoint_out, "Checkpoint path")->required();
    train_cmd->add_option("--epochs", tc.epochs, "Epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", tc.batch_size, "Batch size")->capture_default_str();
    train_cmd->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
    train_cmd->add_option("--optimizer", optimizer, "ADAM or SGD")->capture_default_str();
    train_cmd->add_option("--log", log_path, "Training log CSV");
    net.add(train_cmd);
    seed_opt(train_cmd);

    // track
    auto* track = app.add_subcommand("track", "Run the tracker over a sequence");
    std::string checkpoint_path, detections_path, tracks_out, timings_out;
    TrackerFlags tflags;
    track->add_option("--manifest", manifest_path, "Sequence manifest")->required();
    track->add_option("--checkpoint", checkpoint_path, "Trained weights")->required();
    track->add_option("--detections", detections_path, "Detections (default: from manifest)");
    track->add_option("--out", tracks_out, "Track output (annotations schema)")->required();
    track->add_option("--timings", timings_out, "Per-frame timing CSV");
    tflags.add(track);
    seed_opt(track);

    // eval
    auto* eval = app.add_subcommand("eval", "Score track output against ground truth");
    std::string gt_path, report_out;
    MatchOptions match;
    eval->add_option("--gt", gt_path, "Ground-truth annotations")->required();
    eval->add_option("--tracks", tracks_out, "Track output")->required();
    eval->add_option("--out", report_out, "MOTA report JSON");
    eval->add_option("--iou-threshold", match.iou_threshold, "Minimum IoU for a match")->capture_default_str();
    eval->add_flag("--centroid", match.centroid, "Match on centroid distance instead of IoU");
    eval->add_option("--centroid-gate", match.centroid_gate, "Centroid gate, px")->capture_default_str();
    seed_opt(eval);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Three-stage parameter sweep");
    std::vector<std::string> sequence_paths, checkpoint_paths;
    std::string params_path;
    sweep_cmd->add_option("--sequence", sequence_paths, "Validation manifest(s) with annotations and detections")
        ->required();
    sweep_cmd->add_option("--checkpoint", checkpoint_paths, "Candidate checkpoint(s)")->required();
    sweep_cmd->add_option("--params", params_path, "JSON array of tracker-parameter candidates");
    sweep_cmd->add_option("--out", out_dir, "Output directory for tables")->required();
    sweep_cmd->add_flag("--centroid", match.centroid, "Match on centroid distance instead of IoU");
    tflags.add(sweep_cmd);
    seed_opt(sweep_cmd);

    // report
    auto* report = app.add_subcommand("report", "Pairwise embedding distance matrix per object");
    size_t max_samples = 0;
    report->add_option("--manifest", manifest_path, "Sequence manifest")->required();
    report->add_option("--checkpoint", checkpoint_path, "Trained weights")->required();
    report->add_option("--annotations", annotations_path, "Annotations (default: from manifest)");
    report->add_option("--out", report_out, "Report JSON");
    report->add_option("--max-samples", max_samples, "Instances per object, 0 = all")->capture_default_str();
    seed_opt(report);

    // serve
    auto* serve = app.add_subcommand("serve", "Annotation HTTP service");
    std::string host = "127.0.0.1", static_dir;
    int port = 8080;
    double gate = 50.0;
    serve->add_option("--manifest", manifest_path, "Sequence manifest")->required();
    serve->add_option("--annotations", annotations_path, "Annotations file (created on save)");
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--port", port, "Port")->capture_default_str();
    serve->add_option("--gate", gate, "Pre-assignment centroid gate, px")->capture_default_str();
    serve->add_option("--static", static_dir, "Directory of UI assets served at /");
    seed_opt(serve);

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }

    try {
        if (gen->parsed()) {
            SceneConfig cfg = preset(preset_name);
            cfg.seed = seed;
            if (frames) cfg.frame_count = *frames;
            if (miss) cfg.miss_probability = *miss;
            if (fp_rate) cfg.false_positive_rate = *fp_rate;
            if (noise) cfg.noise_sigma = *noise;
            if (jitter) cfg.detection_jitter = *jitter;
            if (min_visible) cfg.min_visible_fraction = *min_visible;
            if (overlap == "occlude") cfg.overlap = OverlapRendering::Occlude;
            else if (overlap == "blend") cfg.overlap = OverlapRendering::Blend;
            else throw ValidationError("--overlap must be occlude or blend");
            try {
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
            write_sequence(cfg, out_dir);
            out << "wrote " << cfg.frame_count << " frames to " << (fs::path(out_dir) / "manifest.json").string()
                << "\n";
        } else if (sample->parsed()) {
            const SequenceManifest m = load_manifest(manifest_path);
            const fs::path ann = annotations_path.empty() ? m.resolve(m.annotations) : fs::path(annotations_path);
            if (annotations_path.empty() && m.annotations.empty())
                throw ValidationError("manifest names no annotations; pass --annotations");
            require_file(ann, "annotations");
            std::vector<BoundingBox> water;
            if (!water_path.empty()) water = read_water_regions(require_file(water_path, "water regions"));
            else if (!m.water.empty()) water = read_water_regions(require_file(m.resolve(m.water), "water regions"));
            jit.seed = seed;
            aug.max_rotation = max_rotation_deg * 3.14159265358979323846 / 180.0;
            try {
                jit.validate();
                aug.validate();
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
            const AnnotationFile annotations = read_annotations(ann);
            validate_annotations(annotations);
            const TripletDataset ds =
                build_triplet_dataset(ManifestFrames(m), annotations, water, jit, aug, resolution);
            fs::create_directories(out_dir);
            write_triplets(fs::path(out_dir) / "triplets.bin", ds.triplets, resolution);
            write_file_atomic(fs::path(out_dir) / "triplets.json", format_dataset_manifest(ds, jit, aug, resolution));
            out << "wrote " << ds.triplets.size() << " triplets to " << (fs::path(out_dir) / "triplets.bin").string()
                << "\n";
            if (ds.report.skipped_positive_boxes > 0)
                out << "skipped " << ds.report.skipped_positive_boxes << " degenerate positive boxes\n";
            for (int64_t id : ds.report.objects_without_negatives)
                out << "object " << id << " has no negatives and was excluded\n";
        } else if (train_cmd->parsed()) {
            std::vector<Triplet> data;
            int res = 0;
            for (const auto& p : triplet_paths) {
                auto part = read_triplets(require_file(p, "triplet file"));
                if (!part.empty()) {
                    if (res != 0 && part.front().anchor.resolution != res)
                        throw ValidationError("triplet files disagree on patch resolution");
                    res = part.front().anchor.resolution;
                }
                std::move(part.begin(), part.end(), std::back_inserter(data));
            }
            if (data.empty()) throw ValidationError("no triplets to train on");
            net.cfg.architecture = parse_architecture(net.arch);
            net.cfg.patch_resolution = res;
            if (optimizer == "ADAM" || optimizer == "adam") tc.optimizer = OptimizerKind::Adam;
            else if (optimizer == "SGD" || optimizer == "sgd") tc.optimizer = OptimizerKind::Sgd;
            else throw ValidationError("--optimizer must be ADAM or SGD");
            tc.seed = seed;
            tc.log_path = log_path;
            try {
                net.cfg.validate();
                tc.validate();
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
            try {
                const TrainResult r = train(net.cfg, tc, data);
                save_weights(checkpoint_out, net.cfg, r.weights);
                for (int e = 1; e <= tc.epochs; ++e)
                    out << "epoch " << e << ": mean loss " << format_real(r.epoch_mean_loss(e)) << "\n";
            } catch (const TrainingDiverged& e) {
                save_weights(checkpoint_out, net.cfg, e.last_good());
                err << "error: " << e.what() << " (last good weights saved to " << checkpoint_out << ")\n";
                return kRuntimeError;
            }
            out << "saved " << checkpoint_out << "\n";
        } else if (track->parsed()) {
            const SequenceManifest m = load_manifest(manifest_path);
            const TrackerConfig cfg = tflags.resolve();
            const Checkpoint ck = load_weights(require_file(checkpoint_path, "checkpoint"));
            std::vector<Detection> dets;
            if (!detections_path.empty()) dets = read_detections(require_file(detections_path, "detections"));
            else if (!m.detections.empty()) dets = read_detections(require_file(m.resolve(m.detections), "detections"));
            else throw ValidationError("manifest names no detections; pass --detections");
            const SequenceRun r = run_sequence(cfg, m, dets, ManifestFrames(m), ck);
            write_text(tracks_out, format_annotations(r.tracks));
            const fs::path tpath = timings_out.empty() ? fs::path(tracks_out + ".timing.csv") : fs::path(timings_out);
            write_text(tpath, format_timings(r));
            print_sequence_timings(r, out);
        } else if (eval->parsed()) {
            const AnnotationFile gt = read_annotations(require_file(gt_path, "ground truth"));
            const AnnotationFile tr = read_annotations(require_file(tracks_out, "track output"));
            const MotaReport rep = evaluate_sequence(gt, tr, match);
            if (!report_out.empty()) write_text(report_out, format_mota_report(rep));
            int64_t switches = 0;
            for (const auto& f : rep.frames) switches += f.num_switches;
            out << "MOTA " << format_real(rep.mota) << " over " << rep.frames_scored << " frames, " << switches
                << " identity switches\n";
        } else if (sweep_cmd->parsed()) {
            SweepPlan plan;
            for (const auto& p : checkpoint_paths)
                plan.checkpoints.push_back({fs::path(p).filename().string(), load_weights(require_file(p, "checkpoint"))});
            if (!params_path.empty()) {
                const json j = json::parse(read_text_file(require_file(params_path, "sweep parameters")));
                if (!j.is_array() || j.empty()) throw ValidationError(params_path + ": expected a non-empty JSON array");
                plan.tracker_params.clear();
                for (const auto& c : j) plan.tracker_params.push_back(parse_tracker_overrides(c.dump()));
            }
            std::vector<SweepSequence> seqs;
            for (const auto& p : sequence_paths) {
                SweepSequence s;
                s.manifest = load_manifest(p);
                if (s.manifest.annotations.empty() || s.manifest.detections.empty())
                    throw ValidationError(p + ": sweep sequences need annotations and detections");
                s.ground_truth = read_annotations(require_file(s.manifest.resolve(s.manifest.annotations), "annotations"));
                s.detections = read_detections(require_file(s.manifest.resolve(s.manifest.detections), "detections"));
                s.frames = std::make_shared<ManifestFrames>(s.manifest);
                seqs.push_back(std::move(s));
            }
            const SweepResult r = sweep(plan, tflags.resolve(), seqs, match);
            fs::create_directories(out_dir);
            const char* files[] = {"sweep_checkpoints.csv", "sweep_cost_metrics.csv", "sweep_tracker_params.csv"};
            for (size_t i = 0; i < r.tables.size(); ++i) {
                write_file_atomic(fs::path(out_dir) / files[i], format_sweep_table(r.tables[i]));
                const auto& t = r.tables[i];
                out << to_string(t.stage) << ": best " << t.rows[t.best].label << " score "
                    << (t.rows[t.best].score ? format_real(*t.rows[t.best].score) : "null") << "\n";
            }
            json best = json::parse(format_tracker_config(r.best_config));
            best["checkpoint"] = plan.checkpoints[r.best_checkpoint].label;
            best["score"] = r.best_score ? json(*r.best_score) : json(nullptr);
            write_file_atomic(fs::path(out_dir) / "best_config.json", best.dump(2) + "\n");
        } else if (report->parsed()) {
            const SequenceManifest m = load_manifest(manifest_path);
            if (annotations_path.empty() && m.annotations.empty())
                throw ValidationError("manifest names no annotations; pass --annotations");
            const fs::path ann = annotations_path.empty() ? m.resolve(m.annotations) : fs::path(annotations_path);
            const AnnotationFile annotations = read_annotations(require_file(ann, "annotations"));
            const Checkpoint ck = load_weights(require_file(checkpoint_path, "checkpoint"));
            const DistanceMatrixReport rep = distance_matrix_report(annotations, ManifestFrames(m), ck, {max_samples});
            const std::string text = format_distance_matrix(rep);
            if (!report_out.empty()) write_text(report_out, text);
            out << "object";
            for (int64_t id : rep.object_ids) out << '\t' << id;
            out << '\n';
            for (size_t i = 0; i < rep.object_ids.size(); ++i) {
                out << rep.object_ids[i];
                for (size_t j = 0; j < rep.object_ids.size(); ++j)
                    out << '\t' << std::fixed << std::setprecision(4) << rep.distances(i, j);
                out << '\n';
            }
            out.unsetf(std::ios::floatfield);
            for (int64_t id : rep.excluded) out << "object " << id << " excluded (fewer than 2 samples)\n";
        } else if (serve->parsed()) {
            const SequenceManifest m = load_manifest(manifest_path);
            fs::path ann = annotations_path;
            if (ann.empty()) ann = m.annotations.empty() ? m.base_dir / "annotations.json" : m.resolve(m.annotations);
            AnnotationSession session(m, ann, gate);
            AnnotationServer server(session, static_dir);
            const int bound = server.bind(host, port);
            out << "serving " << m.name << " on http://" << host << ":" << bound << "\n" << std::flush;
            server.listen();
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace seatrack::cli
