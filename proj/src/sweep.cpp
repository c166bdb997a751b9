#include "seatrack/sweep.hpp"

#include <sstream>

#include "json.hpp"

namespace seatrack {

using nlohmann::json;

std::string to_string(SweepStage s) {
    switch (s) {
        case SweepStage::Checkpoints: return "CHECKPOINTS";
        case SweepStage::CostMetrics: return "COST_METRICS";
        case SweepStage::TrackerParams: return "TRACKER_PARAMS";
    }
    return "?";
}

std::vector<CostMetricCandidate> default_cost_metrics() {
    return {{"appearance", 0.0}, {"distance", 1.0}, {"combined", 0.5}};
}

void TrackerOverrides::apply(TrackerConfig& cfg) const {
    if (cost_threshold) cfg.cost_threshold = *cost_threshold;
    if (init_distance_threshold) cfg.init_distance_threshold = *init_distance_threshold;
    if (n_init) cfg.n_init = *n_init;
    if (max_age) cfg.max_age = *max_age;
    if (budget) cfg.budget = *budget;
    if (appearance_metric) cfg.appearance_metric = *appearance_metric;
    if (min_confidence) cfg.min_confidence = *min_confidence;
}

std::string TrackerOverrides::label() const {
    std::ostringstream out;
    auto field = [&](const char* name, const std::string& v) {
        if (out.tellp() > 0) out << ' ';
        out << name << '=' << v;
    };
    if (cost_threshold) field("cost_threshold", format_real(*cost_threshold));
    if (init_distance_threshold) field("init_distance_threshold", format_real(*init_distance_threshold));
    if (n_init) field("n_init", std::to_string(*n_init));
    if (max_age) field("max_age", std::to_string(*max_age));
    if (budget) field("budget", std::to_string(*budget));
    if (appearance_metric) field("appearance_metric", to_string(*appearance_metric));
    if (min_confidence) field("min_confidence", format_real(*min_confidence));
    const std::string s = out.str();
    return s.empty() ? "inherited" : s;
}

namespace {

json parse_object(const std::string& text, const char* what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
    return j;
}

template <typename T>
T field_as(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("tracker config: field '" + key + "' has the wrong type");
    }
}

}  // namespace

TrackerOverrides parse_tracker_overrides(const std::string& text) {
    const json j = parse_object(text, "tracker config");
    TrackerOverrides o;
    std::optional<double> lambda;
    for (const auto& [key, value] : j.items()) {
        if (key == "cost_threshold") o.cost_threshold = field_as<double>(j, key);
        else if (key == "init_distance_threshold") o.init_distance_threshold = field_as<double>(j, key);
        else if (key == "n_init") o.n_init = field_as<int>(j, key);
        else if (key == "max_age") o.max_age = field_as<int>(j, key);
        else if (key == "budget") o.budget = field_as<int>(j, key);
        else if (key == "appearance_metric") o.appearance_metric = parse_appearance_metric(field_as<std::string>(j, key));
        else if (key == "min_confidence") o.min_confidence = field_as<double>(j, key);
        else if (key == "lambda")
            throw ValidationError("tracker overrides: 'lambda' belongs to the cost-metric stage");
        else throw ValidationError("tracker config: unknown field '" + key + "'");
    }
    return o;
}

TrackerConfig parse_tracker_config(const std::string& text, TrackerConfig base) {
    json j = parse_object(text, "tracker config");
    if (j.contains("lambda")) {
        base.lambda = field_as<double>(j, "lambda");
        j.erase("lambda");
    }
    parse_tracker_overrides(j.dump()).apply(base);
    base.validate();
    return base;
}

std::string format_tracker_config(const TrackerConfig& cfg) {
    json j = {{"lambda", cfg.lambda},
              {"cost_threshold", cfg.cost_threshold},
              {"init_distance_threshold", cfg.init_distance_threshold},
              {"n_init", cfg.n_init},
              {"max_age", cfg.max_age},
              {"budget", cfg.budget},
              {"appearance_metric", to_string(cfg.appearance_metric)},
              {"min_confidence", cfg.min_confidence}};
    return j.dump(2) + "\n";
}

namespace {

struct Evaluated {
    std::optional<double> mean;
    std::vector<std::optional<double>> per_sequence;
    std::string error;
};

Evaluated evaluate(const TrackerConfig& cfg, const std::vector<SweepSequence>& seqs,
                   const std::vector<std::vector<Embedding>>& embeddings, const MatchOptions& match) {
    Evaluated ev;
    double sum = 0.0;
    bool ok = true;
    for (size_t s = 0; s < seqs.size(); ++s) {
        try {
            cfg.validate();
            const AnnotationFile out = track_embedded(cfg, seqs[s].manifest, seqs[s].detections, embeddings[s]);
            const double m = evaluate_sequence(seqs[s].ground_truth, out, match).mota;
            ev.per_sequence.push_back(m);
            sum += m;
        } catch (const std::exception& e) {
            ev.per_sequence.push_back(std::nullopt);
            if (ev.error.empty()) ev.error = seqs[s].manifest.name + ": " + e.what();
            ok = false;
        }
    }
    if (ok) ev.mean = sum / static_cast<double>(seqs.size());
    return ev;
}

size_t argmax(const std::vector<SweepRow>& rows) {
    size_t best = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].score) continue;
        if (!rows[best].score || *rows[i].score > *rows[best].score) best = i;
    }
    return best;
}

}  // namespace

SweepResult sweep(const SweepPlan& plan, const TrackerConfig& base, const std::vector<SweepSequence>& seqs,
                  const MatchOptions& match) {
    if (plan.checkpoints.empty()) throw ValidationError("sweep: no checkpoint candidates");
    if (plan.cost_metrics.empty()) throw ValidationError("sweep: no cost-metric candidates");
    if (plan.tracker_params.empty()) throw ValidationError("sweep: no tracker-parameter candidates");
    if (seqs.empty()) throw ValidationError("sweep: no validation sequences");

    std::vector<std::string> names;
    for (const auto& s : seqs) names.push_back(s.manifest.name);

    // Embeddings depend only on the checkpoint, so each is computed once.
    std::vector<std::vector<std::vector<Embedding>>> embeddings(plan.checkpoints.size());
    std::vector<std::string> embed_errors(plan.checkpoints.size());
    for (size_t c = 0; c < plan.checkpoints.size(); ++c) {
        try {
            for (const auto& s : seqs)
                embeddings[c].push_back(embed_detections(s.manifest, s.detections, *s.frames, plan.checkpoints[c].checkpoint));
        } catch (const std::exception& e) {
            embed_errors[c] = e.what();
        }
    }

    SweepResult result;
    TrackerConfig current = base;

    SweepTable t1{SweepStage::Checkpoints, names, {}, 0};
    for (size_t c = 0; c < plan.checkpoints.size(); ++c) {
        SweepRow row{c, plan.checkpoints[c].label, std::nullopt, {}, embed_errors[c]};
        if (embed_errors[c].empty()) {
            Evaluated ev = evaluate(current, seqs, embeddings[c], match);
            row.score = ev.mean;
            row.per_sequence = std::move(ev.per_sequence);
            row.error = ev.error;
        } else {
            row.per_sequence.assign(seqs.size(), std::nullopt);
        }
        t1.rows.push_back(std::move(row));
    }
    t1.best = argmax(t1.rows);
    result.best_checkpoint = t1.best;
    const auto& embs = embeddings[t1.best];
    const bool usable = embed_errors[t1.best].empty();
    result.tables.push_back(std::move(t1));

    auto run_stage = [&](SweepStage stage, size_t n, auto&& configure, auto&& label) {
        SweepTable t{stage, names, {}, 0};
        for (size_t i = 0; i < n; ++i) {
            TrackerConfig cfg = current;
            configure(cfg, i);
            SweepRow row{i, label(i), std::nullopt, {}, {}};
            if (usable) {
                Evaluated ev = evaluate(cfg, seqs, embs, match);
                row.score = ev.mean;
                row.per_sequence = std::move(ev.per_sequence);
                row.error = ev.error;
            } else {
                row.per_sequence.assign(seqs.size(), std::nullopt);
                row.error = "checkpoint unusable";
            }
            t.rows.push_back(std::move(row));
        }
        t.best = argmax(t.rows);
        configure(current, t.best);
        result.best_score = t.rows[t.best].score;
        result.tables.push_back(std::move(t));
    };

    run_stage(
        SweepStage::CostMetrics, plan.cost_metrics.size(),
        [&](TrackerConfig& cfg, size_t i) { cfg.lambda = plan.cost_metrics[i].lambda; },
        [&](size_t i) { return plan.cost_metrics[i].label + " (lambda=" + format_real(plan.cost_metrics[i].lambda) + ")"; });
    run_stage(
        SweepStage::TrackerParams, plan.tracker_params.size(),
        [&](TrackerConfig& cfg, size_t i) { plan.tracker_params[i].apply(cfg); },
        [&](size_t i) { return plan.tracker_params[i].label(); });

    result.best_config = current;
    return result;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string score_text(const std::optional<double>& v) { return v ? format_real(*v) : "null"; }

}  // namespace

std::string format_sweep_table(const SweepTable& table) {
    std::ostringstream out;
    out << "stage,index,label,score";
    for (const auto& s : table.sequences) out << ',' << csv_field("mota:" + s);
    out << ",best,error\n";
    for (const auto& r : table.rows) {
        out << to_string(table.stage) << ',' << r.index << ',' << csv_field(r.label) << ',' << score_text(r.score);
        for (const auto& v : r.per_sequence) out << ',' << score_text(v);
        out << ',' << (r.index == table.best ? 1 : 0) << ',' << csv_field(r.error) << '\n';
    }
    return out.str();
}

}  // namespace seatrack
