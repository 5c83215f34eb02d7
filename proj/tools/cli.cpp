#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condnet/condnet.hpp"

namespace condnet::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string data;
    std::string model;
    std::string out;
    std::string outdir;
    std::uint64_t seed = 0;
    int hidden = 100;
    int epochs = 2000;
    double lr = 0.001;
    int batch = 32;
    double split = 0.8;
    std::vector<double> norm_range{0.0, 1.0};
    std::vector<int> widths;
    int bins = 30;
    bool renormalize = false;
    bool full = false;
};

class Command {
public:
    Command(std::string name, const Flags& flags, std::ostream& out)
        : name_(std::move(name)), flags_(flags), out_(out), start_(std::chrono::steady_clock::now()) {}

    const Flags& flags() const { return flags_; }
    std::ostream& out() { return out_; }

    void input(const fs::path& p) { inputs_.emplace_back(p.string(), file_digest(p)); }
    void artifact(const fs::path& p) { artifacts_.push_back(p.string()); }

    TrainConfig train_config() const {
        if (flags_.norm_range.size() != 2) throw ConfigError("--norm-range expects lo,hi");
        TrainConfig cfg;
        cfg.epochs = flags_.epochs;
        cfg.batch_size = flags_.batch;
        cfg.learning_rate = flags_.lr;
        cfg.seed = flags_.seed;
        cfg.hidden_width = flags_.hidden;
        cfg.target_lo = flags_.norm_range[0];
        cfg.target_hi = flags_.norm_range[1];
        cfg.train_fraction = flags_.split;
        return cfg;
    }

    Dataset load_data(bool require_conductivity = true) {
        if (flags_.data.empty()) throw ConfigError(name_ + " requires --data");
        const auto d = load_csv(flags_.data, {flags_.renormalize, require_conductivity});
        input(flags_.data);
        return d;
    }

    Model load_model_file() {
        if (flags_.model.empty()) throw ConfigError(name_ + " requires --model");
        auto m = load_model(fs::path(flags_.model));
        input(flags_.model);
        return m;
    }

    /// Writes <dir>/<command>.manifest.json listing every input and artifact.
    void write_manifest(const fs::path& dir) {
        const auto path = dir / (name_ + ".manifest.json");
        nlohmann::ordered_json j;
        j["tool"] = "condnet";
        j["version"] = kVersion;
        j["command"] = name_;
        j["flags"] = {{"data", flags_.data},
                      {"model", flags_.model},
                      {"out", flags_.out},
                      {"outdir", flags_.outdir},
                      {"seed", flags_.seed},
                      {"hidden", flags_.hidden},
                      {"epochs", flags_.epochs},
                      {"lr", flags_.lr},
                      {"batch", flags_.batch},
                      {"split", flags_.split},
                      {"norm-range", flags_.norm_range},
                      {"widths", flags_.widths},
                      {"bins", flags_.bins},
                      {"renormalize-fractions", flags_.renormalize},
                      {"full", flags_.full}};
        j["seed"] = flags_.seed;
        auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
        for (const auto& [p, digest] : inputs_) inputs.push_back({{"path", p}, {"fnv1a64", digest}});
        j["artifacts"] = artifacts_;
        j["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw SchemaError("cannot write " + path.string());
        f << j.dump(2) << '\n';
    }

private:
    std::string name_;
    const Flags& flags_;
    std::ostream& out_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> artifacts_;
};

fs::path ensure_dir(const std::string& dir) {
    const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::create_directories(p);
    return p;
}

/// Directory for auxiliary outputs: --outdir, else the directory of `primary`.
fs::path aux_dir(const Flags& f, const fs::path& primary) {
    if (!f.outdir.empty()) return ensure_dir(f.outdir);
    const auto parent = primary.parent_path();
    return ensure_dir(parent.empty() ? "." : parent.string());
}

fs::path report_path_for(const fs::path& model_path) { return fs::path(model_path.string() + ".report.json"); }

void check_width(int hidden) {
    if (const auto c = check_min_width(static_cast<int>(kNumInputs), hidden); !c.ok) {
        throw ConfigError("hidden width " + std::to_string(hidden) + " is below the minimum width " +
                          std::to_string(c.minimum) + " for " + std::to_string(kNumInputs) + " inputs");
    }
}

void print_metrics(std::ostream& out, const EvalReport& r) {
    out << std::setprecision(6) << "n        " << r.n << '\n'
        << "AAE      " << r.aae << " S/m\n"
        << "StDev    " << r.stdev_of_deviation << " S/m\n"
        << "RMSE     " << r.rmse << " S/m\n";
}

void print_importance(std::ostream& out, const SensitivityReport& r) {
    out << std::left << std::setw(16) << "input" << std::setw(16) << "contribution" << "importance_pct\n";
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << std::setw(16) << r.labels[i] << std::setw(16) << std::setprecision(6) << r.contribution[k];
        if (r.degenerate) {
            out << "nan\n";
        } else {
            out << std::fixed << std::setprecision(2) << r.importance_pct[k] << std::defaultfloat << '\n';
        }
    }
    out << std::right;
    if (r.degenerate) out << "degenerate: every contribution is zero, importances undefined\n";
}

/// Samples a model is scored on: the held-out partition recreated from the
/// model's seed and split fraction, or every retained sample with --full.
std::vector<Sample> evaluation_samples(const Dataset& d, const Model& m, bool full) {
    auto retained = remove_outliers(d).retained;
    if (full) return retained.samples;
    const auto s = split(retained, m.train_fraction, m.seed);
    return subset(retained, s.test).samples;
}

void save_training_outputs(Command& cmd, const TrainResult& r, const fs::path& model_path, const fs::path& dir) {
    save_model(Model{r.net, r.scaler, r.report.config.seed, r.report.config.train_fraction}, model_path);
    cmd.artifact(model_path);
    const auto report = report_path_for(model_path);
    save_train_report(r.report, report);
    cmd.artifact(report);
    const auto curve = dir / "loss_curve.csv";
    write_loss_curve_csv(r.report.loss_per_epoch, curve);
    cmd.artifact(curve);
}

int cmd_train(Command& cmd) {
    const auto& f = cmd.flags();
    check_width(f.hidden);
    const auto cfg = cmd.train_config();
    cfg.validate();
    const auto data = cmd.load_data();
    const fs::path model_path = f.out.empty() ? fs::path("model.txt") : fs::path(f.out);
    const auto dir = aux_dir(f, model_path);
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());

    const auto r = train(data, cfg);
    save_training_outputs(cmd, r, model_path, dir);
    cmd.write_manifest(dir);

    auto& out = cmd.out();
    out << "network   " << r.net.input_dim() << '-' << r.net.hidden_width() << '-' << r.net.output_dim() << '\n'
        << "samples   " << data.size() << " read, " << r.report.removed_outliers << " outliers removed, "
        << r.report.n_train << " train, " << r.report.n_test << " test\n"
        << "loss      epoch 1 " << r.report.loss_per_epoch.front().rmse << ", epoch " << cfg.epochs << ' '
        << r.report.loss_per_epoch.back().rmse << " (normalized RMSE)\n"
        << "test set\n";
    print_metrics(out, r.report.test);
    out << "model     " << model_path.string() << '\n';
    return kOk;
}

int cmd_evaluate(Command& cmd) {
    const auto& f = cmd.flags();
    const auto model = cmd.load_model_file();
    const auto data = cmd.load_data();
    const auto dir = ensure_dir(f.outdir);
    const auto samples = evaluation_samples(data, model, f.full);
    const auto r = evaluate(model.net, model.scaler, samples);
    const auto parity = dir / "parity.csv";
    write_parity_csv(r.parity, parity);
    cmd.artifact(parity);
    cmd.write_manifest(dir);
    cmd.out() << (f.full ? "all retained samples\n" : "held-out test partition\n");
    print_metrics(cmd.out(), r);
    return kOk;
}

int cmd_predict(Command& cmd) {
    const auto& f = cmd.flags();
    const auto model = cmd.load_model_file();
    const auto data = cmd.load_data(false);
    const fs::path out_path = f.out.empty() ? fs::path("predictions.csv") : fs::path(f.out);
    const auto dir = aux_dir(f, out_path);
    const auto predicted = predict(model.net, model.scaler, data.samples);
    write_predictions_csv(data.samples, predicted, out_path);
    cmd.artifact(out_path);
    cmd.write_manifest(dir);
    cmd.out() << predicted.size() << " predictions written to " << out_path.string() << '\n';
    return kOk;
}

int cmd_sensitivity(Command& cmd) {
    const auto model = cmd.load_model_file();
    const auto dir = ensure_dir(cmd.flags().outdir);
    const auto r = connection_weights(model.net);
    const auto path = dir / "importance.csv";
    write_importance_csv(r, path);
    cmd.artifact(path);
    cmd.write_manifest(dir);
    print_importance(cmd.out(), r);
    return kOk;
}

int cmd_sweep(Command& cmd) {
    const auto& f = cmd.flags();
    if (f.widths.empty()) throw ConfigError("sweep requires --widths");
    for (const int w : f.widths) check_width(w);
    auto cfg = cmd.train_config();
    cfg.hidden_width = *std::max_element(f.widths.begin(), f.widths.end());
    cfg.validate();
    const auto data = cmd.load_data();
    const auto dir = ensure_dir(f.outdir);
    const fs::path model_path = f.out.empty() ? dir / "best_model.txt" : fs::path(f.out);
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());

    const auto r = sweep(data, f.widths, cfg, std::max(1u, std::thread::hardware_concurrency()));
    for (const auto& w : r.warnings) cmd.out() << "warning: " << w << '\n';
    const auto table = dir / "sweep.csv";
    write_sweep_csv(r.table, table);
    cmd.artifact(table);
    save_training_outputs(cmd, r.best, model_path, dir);
    cmd.write_manifest(dir);

    cmd.out() << "width,test_aae\n";
    for (const auto& row : r.table) cmd.out() << row.width << ',' << format_double(row.test_aae) << '\n';
    cmd.out() << "best width " << r.best.net.hidden_width() << " -> " << model_path.string() << '\n';
    return kOk;
}

int cmd_report(Command& cmd) {
    const auto& f = cmd.flags();
    const auto model = cmd.load_model_file();
    const auto data = cmd.load_data();
    const auto dir = ensure_dir(f.outdir);

    const auto retained = remove_outliers(data).retained;
    std::vector<double> conductivity;
    for (const auto& s : retained.samples) conductivity.push_back(s.conductivity);
    const auto hist_path = dir / "histogram.csv";
    write_histogram_csv(histogram(conductivity, f.bins), hist_path);
    cmd.artifact(hist_path);

    const auto report = report_path_for(f.model);
    const auto curve = load_loss_curve(report);
    cmd.input(report);
    const auto curve_path = dir / "loss_curve.csv";
    write_loss_curve_csv(curve, curve_path);
    cmd.artifact(curve_path);

    const auto eval = evaluate(model.net, model.scaler, evaluation_samples(data, model, f.full));
    const auto parity_path = dir / "parity.csv";
    write_parity_csv(eval.parity, parity_path);
    cmd.artifact(parity_path);

    const auto importance_path = dir / "importance.csv";
    write_importance_csv(connection_weights(model.net), importance_path);
    cmd.artifact(importance_path);

    cmd.write_manifest(dir);
    cmd.out() << "wrote histogram.csv, loss_curve.csv, parity.csv, importance.csv to " << dir.string() << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neural-network regression of slag electrical conductivity", "condnet"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key = value file setting any flag; command-line values take precedence");
    app.require_subcommand(1);

    Flags f;
    app.add_option("--data", f.data, "measurement CSV");
    app.add_option("--model", f.model, "model file");
    app.add_option("--out", f.out, "output file (model for train/sweep, predictions for predict)");
    app.add_option("--outdir", f.outdir, "directory for CSV outputs and the run manifest");
    app.add_option("--seed", f.seed, "seed for split, initialization and batch order")->capture_default_str();
    app.add_option("--hidden", f.hidden, "hidden-layer width")->capture_default_str();
    app.add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
    app.add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
    app.add_option("--batch", f.batch, "mini-batch size")->capture_default_str();
    app.add_option("--split", f.split, "training fraction")->capture_default_str();
    app.add_option("--norm-range", f.norm_range, "normalization range lo,hi")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    app.add_option("--widths", f.widths, "hidden widths to sweep, e.g. 7,16,100")->delimiter(',');
    app.add_option("--bins", f.bins, "histogram bins")->capture_default_str();
    app.add_flag("--renormalize-fractions", f.renormalize, "divide molar fractions by their sum on load");
    app.add_flag("--full", f.full, "evaluate on every retained sample instead of the test partition");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"train", "train one network and write model, report and loss curve"},
        {"evaluate", "print AAE, StDev and RMSE in S/m and write parity.csv"},
        {"predict", "predict conductivity for each input row"},
        {"sensitivity", "connection-weights importances, importance.csv"},
        {"sweep", "train one network per width and keep the best"},
        {"report", "write histogram, loss curve, parity and importance CSVs"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Command cmd(name, f, out);
    try {
        if (name == "train") return cmd_train(cmd);
        if (name == "evaluate") return cmd_evaluate(cmd);
        if (name == "predict") return cmd_predict(cmd);
        if (name == "sensitivity") return cmd_sensitivity(cmd);
        if (name == "sweep") return cmd_sweep(cmd);
        return cmd_report(cmd);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
}

}  // namespace condnet::cli
