// neurotac: simulate -> transduce -> classify -> optimize -> report.
//
// Exit codes: 0 success, 2 usage, 3 invalid input, 4 I/O, 1 internal.

#include "neurotac/neurotac.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace neurotac;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kInvalid = 3, kIo = 4 };

// Flags shared by several subcommands. Only flags that were actually given
// override the config file.
struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string encoder, metric;
    int delta_t = 0;
    double tau = 0.0, cos_theta = 0.0;
    int k = 0;
    std::string out;

    CLI::Option *seed_opt = nullptr, *delta_t_opt = nullptr, *tau_opt = nullptr, *cos_opt = nullptr,
                *k_opt = nullptr, *out_opt = nullptr;

    void add_config(CLI::App* app) { app->add_option("--config", config, "Run configuration (JSON)"); }
    void add_seed(CLI::App* app) { seed_opt = app->add_option("--seed", seed, "Master seed"); }
    void add_out(CLI::App* app) { out_opt = app->add_option("--out", out, "Output directory"); }
    void add_model(CLI::App* app) {
        app->add_option("--encoder", encoder, "intensive|spatial|temporal|spatiotemporal");
        app->add_option("--metric", metric, "euclidean|van-rossum");
        delta_t_opt = app->add_option("--delta-t", delta_t, "Temporal window (ms)");
        tau_opt = app->add_option("--tau", tau, "Kernel time constant (ms)");
        cos_opt = app->add_option("--cos-theta", cos_theta, "Inter-taxel cosine, 0..1");
        k_opt = app->add_option("--k", k, "Neighbours");
    }

    RunConfig resolve() const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        if (seed_opt && seed_opt->count()) cfg.seed = seed;
        if (!encoder.empty()) cfg.encoder = parse_encoder_kind(encoder);
        if (!metric.empty()) cfg.metric = parse_metric_kind(metric);
        if (delta_t_opt && delta_t_opt->count()) cfg.delta_t_ms = delta_t;
        if (tau_opt && tau_opt->count()) cfg.tau_ms = tau;
        if (cos_opt && cos_opt->count()) cfg.cos_theta = cos_theta;
        if (k_opt && k_opt->count()) cfg.k = k;
        if (out_opt && out_opt->count()) cfg.out = out;
        cfg.validate();
        return cfg;
    }
};

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string file_stem_for(const std::string& name) {
    std::string s;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '-' || c == '_';
        s += ok ? c : '_';
    }
    return s;
}

std::vector<PixelEvent> load_events(const fs::path& path) {
    return path.extension() == ".csv" ? read_events_csv(path) : read_events(path);
}

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

// ---- simulate ------------------------------------------------------------

int cmd_simulate(const Common& common, std::optional<int> runs) {
    RunConfig cfg = common.resolve();
    if (runs) cfg.runs = *runs;
    cfg.validate();
    const fs::path out = cfg.out;
    make_dir(out / "events");

    const auto fields = initial_fields(cfg.sensor, cfg.transducer);
    const TimeUs duration = cfg.kinematics.duration();
    Dataset dataset;
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t ti = 0; ti < cfg.textures.size(); ++ti) {
        const auto& texture = cfg.textures[ti];
        if (dataset.class_index(texture.name) >= 0) throw ValidationError("duplicate texture name '" + texture.name + "'");
        dataset.classes.push_back(texture.name);
        for (int run = 0; run < cfg.runs; ++run) {
            const auto seed = child_seed(cfg.seed, ti, static_cast<std::uint64_t>(run));
            const auto events = simulate_slide(texture, cfg.kinematics, cfg.sensor, seed);
            char name[256];
            std::snprintf(name, sizeof name, "%s_run%03d.ntev", file_stem_for(texture.name).c_str(), run);
            write_events(events, out / "events" / name);
            files.push_back({{"file", std::string("events/") + name}, {"label", texture.name}, {"run", run},
                             {"events", events.size()}});
            dataset.samples.push_back(transduce(events, fields, cfg.transducer, duration, texture.name));
        }
    }

    nlohmann::json textures = nlohmann::json::array();
    for (const auto& t : cfg.textures) textures.push_back(texture_to_json(t));
    const nlohmann::json manifest = {{"seed", cfg.seed},
                                     {"duration_us", duration},
                                     {"textures", textures},
                                     {"files", files}};
    detail::write_file_text(out / "manifest.json", manifest.dump(2) + "\n");

    auto dj = dataset_to_json(dataset);
    dj["seed"] = cfg.seed;
    detail::write_file_text(out / "dataset.json", dj.dump() + "\n");
    std::cout << "wrote " << files.size() << " event files, manifest.json and dataset.json to " << out.string()
              << " (seed " << cfg.seed << ")\n";
    return kOk;
}

// ---- transduce -------------------------------------------------------------

int cmd_transduce(const Common& common, const std::vector<std::string>& inputs, const std::string& manifest_path,
                  const std::string& label) {
    const RunConfig cfg = common.resolve();
    if (inputs.empty() == manifest_path.empty()) throw ParameterError("give either event files or --manifest");
    const auto fields = initial_fields(cfg.sensor, cfg.transducer);
    const fs::path out = cfg.out;
    make_dir(out);

    if (!manifest_path.empty()) {
        const auto manifest = parse_json_file(manifest_path);
        const fs::path base = fs::path(manifest_path).parent_path();
        Dataset dataset;
        try {
            const auto duration = manifest.at("duration_us").get<TimeUs>();
            for (const auto& t : manifest.at("textures")) dataset.classes.push_back(t.at("name").get<std::string>());
            for (const auto& f : manifest.at("files")) {
                const auto events = load_events(base / f.at("file").get<std::string>());
                dataset.samples.push_back(transduce(events, fields, cfg.transducer, duration, f.at("label").get<std::string>()));
            }
            auto dj = dataset_to_json(dataset);
            if (manifest.contains("seed")) dj["seed"] = manifest.at("seed");
            detail::write_file_text(out / "dataset.json", dj.dump() + "\n");
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("malformed manifest: ") + e.what());
        }
        validate(dataset, cfg.transducer.pooling_window);
        std::cout << "wrote " << dataset.samples.size() << " samples to " << (out / "dataset.json").string() << '\n';
        return kOk;
    }

    for (const auto& in : inputs) {
        const auto events = load_events(in);
        const auto sample = transduce(events, fields, cfg.transducer, cfg.kinematics.duration(), label);
        const auto dest = out / (fs::path(in).stem().string() + ".json");
        write_sample(sample, dest);
        std::cout << dest.string() << ": " << sample.spike_count() << " spikes\n";
    }
    return kOk;
}

// ---- classify --------------------------------------------------------------

int cmd_classify(const Common& common, const std::string& dataset_path, const std::string& protocol,
                 std::optional<double> ratio) {
    RunConfig cfg = common.resolve();
    if (ratio) cfg.split_ratio = *ratio;
    cfg.validate();
    const auto encoder = cfg.encoder_spec();
    const auto metric = cfg.metric_spec();
    const auto dataset = read_dataset(dataset_path);
    if (dataset.samples.empty()) throw ValidationError("dataset is empty");
    const auto k = static_cast<std::size_t>(cfg.k);

    ClassificationReport report;
    if (protocol == "loocv") {
        report = leave_one_out(dataset, encoder, metric, k);
    } else if (protocol == "split") {
        const auto [train, test] = train_test_split(dataset, cfg.split_ratio, cfg.seed);
        report = evaluate_split(train, test, encoder, metric, k);
    } else {
        throw ParameterError("unknown protocol '" + protocol + "'");
    }

    const fs::path out = cfg.out;
    make_dir(out);
    detail::write_file_text(out / "confusion.csv", confusion_csv(report));
    detail::write_file_text(out / "summary.csv", summary_csv(report));
    if (report.k_clamped) std::cerr << "warning: k exceeds the training set size; clamped\n";
    std::cout << to_string(encoder.kind) << " / " << to_string(metric.kind) << " (" << protocol << ", k=" << cfg.k
              << "): accuracy " << pct(report.accuracy) << "% +/- " << report.dispersion << '\n';
    return kOk;
}

// ---- optimize --------------------------------------------------------------

struct OptimizeArgs {
    std::string dataset, target = "spatiotemporal";
    int budget = 100;
    int dt_min = 1, dt_max = 200, stride = 1;
    SurrogateBounds bounds;
    std::size_t per_class = 0;
    bool planted = false;
};

int cmd_optimize(const Common& common, const OptimizeArgs& a) {
    const RunConfig cfg = common.resolve();
    const fs::path out = cfg.out;
    const auto k = static_cast<std::size_t>(cfg.k);

    if (a.target == "delta_t") {
        if (a.planted) throw ParameterError("the planted objective applies to the spatiotemporal target");
        if (a.dataset.empty()) throw ParameterError("--dataset is required");
        const auto dataset = subsample(read_dataset(a.dataset), a.per_class, cfg.seed);
        const auto r = sweep_delta_t(dataset, a.dt_min, a.dt_max, a.stride, k);
        make_dir(out);
        detail::write_file_text(out / "sweep.csv", sweep_log_csv(r));
        const nlohmann::json best = {{"target", "delta_t"}, {"delta_t_ms", r.best.value}, {"accuracy", r.best.accuracy}};
        detail::write_file_text(out / "best.json", best.dump(2) + "\n");
        std::cout << "best delta_t " << r.best.value << " ms: accuracy " << pct(r.best.accuracy) << "% ("
                  << r.evaluated.size() << " evaluations)\n";
        return kOk;
    }
    if (a.target != "spatiotemporal") throw ParameterError("unknown target '" + a.target + "'");

    SurrogateResult r;
    if (a.planted) {
        r = optimize_surrogate(
            [](double c, double tau) { return std::exp(-20.0 * (c - 0.4) * (c - 0.4) - 0.002 * (tau - 76.0) * (tau - 76.0)); },
            a.bounds, a.budget, cfg.seed);
    } else {
        if (a.dataset.empty()) throw ParameterError("--dataset is required");
        r = optimize_spatiotemporal(read_dataset(a.dataset), a.bounds, a.budget, cfg.seed, k, a.per_class);
    }
    make_dir(out);
    detail::write_file_text(out / "trials.csv", trial_log_csv(r));
    const nlohmann::json best = {{"target", "spatiotemporal"},
                                 {"cos_theta", r.best.cos_theta},
                                 {"tau_ms", r.best.tau_ms},
                                 {"accuracy", r.best.accuracy},
                                 {"epochs", r.epochs},
                                 {"seed", cfg.seed}};
    detail::write_file_text(out / "best.json", best.dump(2) + "\n");
    std::cout << "best cos_theta " << r.best.cos_theta << ", tau " << r.best.tau_ms << " ms: accuracy "
              << pct(r.best.accuracy) << "% after " << r.epochs << " epochs\n";
    return kOk;
}

// ---- report ----------------------------------------------------------------

int cmd_report(const std::string& path, const std::string& out_dir) {
    const auto table = parse_confusion_csv(detail::read_file_text(path));
    const fs::path out = out_dir.empty() ? fs::path(path).parent_path() : fs::path(out_dir);
    if (!out.empty()) make_dir(out);
    const auto stem = fs::path(path).stem().string();
    const auto text = confusion_text(table);
    detail::write_file_text(out / (stem + ".txt"), text);
    detail::write_file_text(out / (stem + ".svg"), confusion_svg(table));
    std::cout << text;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neuromorphic tactile texture pipeline"};
    app.require_subcommand(1);

    Common sim_c, trn_c, cls_c, opt_c;

    auto* sim = app.add_subcommand("simulate", "Simulate slides and write event files, manifest and dataset");
    sim_c.add_config(sim);
    sim_c.add_seed(sim);
    sim_c.add_out(sim);
    int runs = 0;
    auto* runs_opt = sim->add_option("--runs", runs, "Runs per texture");

    auto* trn = app.add_subcommand("transduce", "Turn event files into spike-train samples");
    trn_c.add_config(trn);
    trn_c.add_out(trn);
    std::vector<std::string> trn_inputs;
    std::string manifest, label;
    trn->add_option("events", trn_inputs, "Event files (.ntev or .csv)");
    trn->add_option("--manifest", manifest, "Manifest from simulate; writes dataset.json");
    trn->add_option("--label", label, "Class label for single files");

    auto* cls = app.add_subcommand("classify", "KNN classification with confusion and summary reports");
    cls_c.add_config(cls);
    cls_c.add_seed(cls);
    cls_c.add_out(cls);
    cls_c.add_model(cls);
    std::string dataset, protocol = "loocv";
    double ratio = 0.8;
    cls->add_option("--dataset", dataset, "Dataset JSON")->required();
    cls->add_option("--protocol", protocol, "split|loocv")->check(CLI::IsMember({"split", "loocv"}));
    auto* ratio_opt = cls->add_option("--split-ratio", ratio, "Train fraction for the split protocol");

    auto* opt = app.add_subcommand("optimize", "Parameter search by sweep or surrogate model");
    opt_c.add_config(opt);
    opt_c.add_seed(opt);
    opt_c.add_out(opt);
    opt_c.k_opt = opt->add_option("--k", opt_c.k, "Neighbours");
    OptimizeArgs oa;
    opt->add_option("--dataset", oa.dataset, "Dataset JSON");
    opt->add_option("--target", oa.target, "delta_t|spatiotemporal")->check(CLI::IsMember({"delta_t", "spatiotemporal"}));
    opt->add_option("--budget", oa.budget, "Surrogate epochs");
    opt->add_option("--dt-min", oa.dt_min, "Sweep start (ms)");
    opt->add_option("--dt-max", oa.dt_max, "Sweep end (ms)");
    opt->add_option("--stride", oa.stride, "Sweep stride (ms)");
    opt->add_option("--cos-min", oa.bounds.cos_lo);
    opt->add_option("--cos-max", oa.bounds.cos_hi);
    opt->add_option("--tau-min", oa.bounds.tau_lo_ms, "ms");
    opt->add_option("--tau-max", oa.bounds.tau_hi_ms, "ms");
    opt->add_option("--per-class", oa.per_class, "Leave-one-out on at most this many samples per class");
    opt->add_flag("--planted", oa.planted, "Use the analytic test objective peaked at (0.4, 76 ms)");

    auto* rep = app.add_subcommand("report", "Render a confusion CSV as a text table and SVG heatmap");
    std::string report_path, report_out;
    rep->add_option("report", report_path, "Confusion CSV")->required();
    rep->add_option("--out", report_out, "Output directory (default: next to the report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return cmd_simulate(sim_c, runs_opt->count() ? std::optional<int>(runs) : std::nullopt);
        if (*trn) return cmd_transduce(trn_c, trn_inputs, manifest, label);
        if (*cls) {
            return cmd_classify(cls_c, dataset, protocol, ratio_opt->count() ? std::optional<double>(ratio) : std::nullopt);
        }
        if (*opt) return cmd_optimize(opt_c, oa);
        if (*rep) return cmd_report(report_path, report_out);
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kUsage;
}
