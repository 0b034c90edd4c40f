// infogeo: divergence matrices, manifold embeddings, and learned projections
// for collections of datasets, as reproducible file-based runs.
//
// Exit codes: 0 success, 2 I/O failure, 3 invalid input or configuration,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infogeo/common.hpp"
#include "infogeo/dataset.hpp"
#include "infogeo/distances.hpp"
#include "infogeo/embedding.hpp"
#include "infogeo/geodesic.hpp"
#include "infogeo/io.hpp"
#include "infogeo/ipca.hpp"
#include "infogeo/threading.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string manifest;
    std::string metric = "skl";
    bool fisher_scale = false;
    long long k = 2;
    long long m = 2;
    std::string cost = "j1";
    double mu = 0.5;
    double eps = 1e-6;
    std::string c = "auto";
    long long max_iter = 500;
    long long seed = 0;
    std::string out = ".";
    long long threads = -1;  // -1 = not set; falls back to INFOGEO_THREADS, then auto
    long long knn = 0;
    long long reorth_every = 1;
    bool backtracking = true;
    std::string init = "random";
    std::string projection_path;
    long long sets = 10;
    long long n = 200;
    long long d = 1;
    std::string config_path;
};

std::string eigen_version() {
    return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
           std::to_string(EIGEN_MINOR_VERSION);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw infogeo::io_error("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw infogeo::io_error("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void note_artifact(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

/// "auto" -> unset; otherwise a positive finite number.
std::optional<double> parse_kernel_constant(const std::string& text) {
    if (text == "auto") return std::nullopt;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(value) || value <= 0.0)
        throw infogeo::validation_error("kernel constant must be \"auto\" or a positive number, got \"" +
                                        text + "\"");
    return value;
}

infogeo::IpcaInit parse_init(const std::string& name) {
    if (name == "random") return infogeo::IpcaInit::RandomOrthonormal;
    if (name == "identity") return infogeo::IpcaInit::IdentityBlock;
    throw infogeo::validation_error("unknown init \"" + name + "\" (expected random or identity)");
}

long long threads_from_env() {
    const char* env = std::getenv("INFOGEO_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long long value = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || value < 0)
        throw infogeo::validation_error("INFOGEO_THREADS must be a nonnegative integer, got \"" +
                                        std::string(env) + "\"");
    return value;
}

/// Resolve the worker-thread cap (flag > config file > env > auto) and apply
/// it; returns the resolved value for the run manifest.
long long apply_threads(Options& o) {
    if (o.threads < 0) o.threads = threads_from_env();
    if (o.threads < 0 || o.threads > 4096)
        throw infogeo::validation_error("threads must be between 0 and 4096");
    infogeo::threading::set_cap(static_cast<int>(o.threads));
    return o.threads;
}

infogeo::Collection load_input(const Options& o) {
    if (o.manifest.empty()) throw infogeo::io_error("manifest not found");
    return infogeo::load_collection(o.manifest);
}

fs::path ensure_out_dir(const Options& o) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

json ranking_json(const std::vector<std::pair<Eigen::Index, double>>& ranking) {
    json arr = json::array();
    for (const auto& [variable, weight] : ranking)
        arr.push_back({{"variable", static_cast<long long>(variable)}, {"weight", weight}});
    return arr;
}

json run_manifest(const std::string& command, json config) {
    return {{"command", command},
            {"config", std::move(config)},
            {"versions", {{"infogeo", kVersion}, {"eigen", eigen_version()}}}};
}

void write_embedding_csv(const fs::path& path, const infogeo::Embedding& embedding,
                         const std::vector<std::string>& labels) {
    bool labeled = false;
    for (const auto& l : labels)
        if (!l.empty()) labeled = true;
    if (!labeled) {
        infogeo::io::write_csv_matrix(path, embedding.coords);
        return;
    }
    std::string text = "label";
    for (Eigen::Index k = 0; k < embedding.coords.cols(); ++k)
        text += ",e" + std::to_string(k + 1);
    text += "\n";
    for (Eigen::Index i = 0; i < embedding.coords.rows(); ++i) {
        text += labels[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < embedding.coords.cols(); ++k)
            text += "," + infogeo::io::format_double(embedding.coords(i, k));
        text += "\n";
    }
    write_text(path, text);
}

int run_distances(Options& o) {
    const long long threads = apply_threads(o);
    const auto collection = load_input(o);
    const auto metric = infogeo::metric_from_name(o.metric);
    const auto direct = infogeo::pairwise_distances(collection, metric, std::nullopt, o.fisher_scale);
    const auto geodesic = infogeo::geodesic_distances(direct, {o.knn});

    const fs::path out = ensure_out_dir(o);
    infogeo::io::write_csv_matrix(out / "direct.csv", direct.values);
    note_artifact(out / "direct.csv");
    infogeo::io::write_csv_matrix(out / "geodesic.csv", geodesic.values);
    note_artifact(out / "geodesic.csv");

    write_json_file(out / "run_manifest.json",
                    run_manifest("distances", {{"manifest", o.manifest},
                                               {"metric", o.metric},
                                               {"fisher_scale", o.fisher_scale},
                                               {"knn", o.knn},
                                               {"threads", threads},
                                               {"out", o.out}}));
    note_artifact(out / "run_manifest.json");
    return 0;
}

int run_fine(Options& o) {
    const long long threads = apply_threads(o);
    const auto collection = load_input(o);
    const auto metric = infogeo::metric_from_name(o.metric);
    const auto embedding =
        infogeo::fine_embed(collection, o.k, metric, o.fisher_scale, {o.knn});

    std::vector<std::string> labels;
    labels.reserve(collection.size());
    for (const auto& set : collection.sets) labels.push_back(set.label);

    const fs::path out = ensure_out_dir(o);
    write_embedding_csv(out / "embedding.csv", embedding, labels);
    note_artifact(out / "embedding.csv");

    json eigen_report = {{"eigenvalues", json::array()},
                         {"clamped_negative_mass", embedding.clamped_negative_mass}};
    for (Eigen::Index i = 0; i < embedding.eigenvalues.size(); ++i)
        eigen_report["eigenvalues"].push_back(embedding.eigenvalues(i));
    write_json_file(out / "eigenvalues.json", eigen_report);
    note_artifact(out / "eigenvalues.json");

    write_json_file(out / "run_manifest.json",
                    run_manifest("fine", {{"manifest", o.manifest},
                                          {"metric", o.metric},
                                          {"fisher_scale", o.fisher_scale},
                                          {"k", o.k},
                                          {"knn", o.knn},
                                          {"threads", threads},
                                          {"out", o.out}}));
    note_artifact(out / "run_manifest.json");
    return 0;
}

int run_ipca(Options& o) {
    const long long threads = apply_threads(o);
    const auto collection = load_input(o);

    infogeo::IpcaConfig config;
    config.cost = infogeo::cost_from_name(o.cost);
    config.metric = infogeo::metric_from_name(o.metric);
    config.step = o.mu;
    config.threshold = o.eps;
    config.max_iterations = static_cast<int>(o.max_iter);
    config.reorthonormalize_every = static_cast<int>(o.reorth_every);
    config.backtracking = o.backtracking;
    config.seed = static_cast<std::uint64_t>(o.seed);
    config.init = parse_init(o.init);
    config.kernel_constant = parse_kernel_constant(o.c);

    const auto result = infogeo::ipca_fit(collection, o.m, config);

    const fs::path out = ensure_out_dir(o);
    infogeo::io::write_csv_matrix(out / "projection.csv", result.projection);
    note_artifact(out / "projection.csv");

    Eigen::MatrixXd trace(static_cast<Eigen::Index>(result.cost_trace.size()), 1);
    for (std::size_t i = 0; i < result.cost_trace.size(); ++i)
        trace(static_cast<Eigen::Index>(i), 0) = result.cost_trace[i];
    infogeo::io::write_csv_matrix(out / "cost_trace.csv", trace);
    note_artifact(out / "cost_trace.csv");

    write_json_file(out / "ranking.json", ranking_json(infogeo::variable_ranking(result.projection)));
    note_artifact(out / "ranking.json");

    write_json_file(out / "run_manifest.json",
                    run_manifest("ipca", {{"manifest", o.manifest},
                                          {"metric", o.metric},
                                          {"m", o.m},
                                          {"cost", o.cost},
                                          {"mu", o.mu},
                                          {"eps", o.eps},
                                          {"c", o.c},
                                          {"max_iter", o.max_iter},
                                          {"seed", o.seed},
                                          {"init", o.init},
                                          {"reorth_every", o.reorth_every},
                                          {"backtracking", o.backtracking},
                                          {"threads", threads},
                                          {"out", o.out}}));
    note_artifact(out / "run_manifest.json");

    std::cout << "iterations " << result.iterations << ", converged "
              << (result.converged ? "yes" : "no") << ", final cost "
              << infogeo::io::format_double(result.cost_trace.back()) << ", kernel constant "
              << infogeo::io::format_double(result.kernel_constant) << "\n";
    return 0;
}

int run_rank(Options& o) {
    if (o.projection_path.empty())
        throw infogeo::io_error("projection not found (pass --projection)");
    const Eigen::MatrixXd a = infogeo::io::read_csv_matrix(o.projection_path);
    if (a.rows() > a.cols())
        throw infogeo::validation_error("projection has more rows than columns");
    const double residual =
        (a * a.transpose() - Eigen::MatrixXd::Identity(a.rows(), a.rows())).norm();
    if (residual > 1e-8)
        throw infogeo::validation_error(
            "projection rows are not orthonormal (residual " +
            infogeo::io::format_double(residual) + ")");

    const fs::path out = ensure_out_dir(o);
    write_json_file(out / "ranking.json", ranking_json(infogeo::variable_ranking(a)));
    note_artifact(out / "ranking.json");

    write_json_file(out / "run_manifest.json",
                    run_manifest("rank", {{"projection", o.projection_path}, {"out", o.out}}));
    note_artifact(out / "run_manifest.json");
    return 0;
}

int run_synth(Options& o) {
    if (o.d < 1) throw infogeo::validation_error("d must be at least 1");
    if (o.sets < 2) throw infogeo::validation_error("sets must be at least 2");

    // Unit-covariance Gaussians with means marching along the diagonal in
    // steps of 0.5: a graded fixture whose true ordering any embedding
    // should recover.
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    for (long long i = 0; i < o.sets; ++i) {
        means.push_back(Eigen::VectorXd::Constant(o.d, 0.5 * static_cast<double>(i)));
        covariances.push_back(Eigen::MatrixXd::Identity(o.d, o.d));
    }
    auto collection =
        infogeo::synth_gaussian_collection(means, covariances, o.n, static_cast<std::uint64_t>(o.seed));
    for (std::size_t i = 0; i < collection.sets.size(); ++i)
        collection.sets[i].label = "set" + std::to_string(i);

    const fs::path out = ensure_out_dir(o);
    infogeo::save_collection(collection, out / "manifest.json");
    for (std::size_t i = 0; i < collection.sets.size(); ++i)
        note_artifact(out / ("manifest_set" + std::to_string(i) + ".csv"));
    note_artifact(out / "manifest.json");

    write_json_file(out / "run_manifest.json",
                    run_manifest("synth", {{"sets", o.sets},
                                           {"n", o.n},
                                           {"d", o.d},
                                           {"seed", o.seed},
                                           {"out", o.out}}));
    note_artifact(out / "run_manifest.json");
    return 0;
}

struct ConfigBinding {
    CLI::Option* opt;
    std::function<void(const json&)> apply;
};
using BindingMap = std::map<std::string, ConfigBinding>;

/// Apply config-file values as defaults: a key takes effect only when the
/// matching flag was absent from the command line.
void apply_config_file(const std::string& config_path, const CLI::App* sub,
                       const BindingMap& bindings) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw infogeo::io_error("config not found: " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw infogeo::validation_error(std::string("malformed config JSON: ") + e.what());
    }
    if (!j.is_object()) throw infogeo::validation_error("config JSON must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto found = bindings.find(it.key());
        if (found == bindings.end())
            throw infogeo::validation_error("unknown config key \"" + it.key() +
                                            "\" for command \"" + sub->get_name() + "\"");
        if (found->second.opt->count() == 0) found->second.apply(it.value());
    }
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"information-geometric distances, embeddings, and projections"};
    app.require_subcommand(1);

    std::map<const CLI::App*, BindingMap> bindings;

    const auto expect = [](bool ok, const std::string& key, const char* type) {
        if (!ok)
            throw infogeo::validation_error("config key \"" + key + "\" must be " + type);
    };
    const auto bind_str = [&](CLI::App* sub, CLI::Option* opt, const std::string& key,
                              std::string* target) {
        bindings[sub][key] = {opt, [=](const json& v) {
                                  expect(v.is_string(), key, "a string");
                                  *target = v.get<std::string>();
                              }};
    };
    const auto bind_int = [&](CLI::App* sub, CLI::Option* opt, const std::string& key,
                              long long* target) {
        bindings[sub][key] = {opt, [=](const json& v) {
                                  expect(v.is_number_integer(), key, "an integer");
                                  *target = v.get<long long>();
                              }};
    };
    const auto bind_double = [&](CLI::App* sub, CLI::Option* opt, const std::string& key,
                                 double* target) {
        bindings[sub][key] = {opt, [=](const json& v) {
                                  expect(v.is_number(), key, "a number");
                                  *target = v.get<double>();
                              }};
    };
    const auto bind_bool = [&](CLI::App* sub, CLI::Option* opt, const std::string& key,
                               bool* target) {
        bindings[sub][key] = {opt, [=](const json& v) {
                                  expect(v.is_boolean(), key, "a boolean");
                                  *target = v.get<bool>();
                              }};
    };

    const auto add_io = [&](CLI::App* sub) {
        bind_str(sub, sub->add_option("--manifest", o.manifest, "collection manifest JSON"),
                 "manifest", &o.manifest);
        bind_str(sub, sub->add_option("--out", o.out, "output directory (default .)"), "out",
                 &o.out);
        sub->add_option("--config", o.config_path,
                        "JSON file of defaults; command-line flags win");
    };
    const auto add_metric = [&](CLI::App* sub, bool with_fisher, const char* choices) {
        bind_str(sub, sub->add_option("--metric", o.metric, choices), "metric", &o.metric);
        if (with_fisher)
            bind_bool(sub,
                      sub->add_flag("--fisher-scale", o.fisher_scale,
                                    "map divergences to Fisher-distance scale"),
                      "fisher_scale", &o.fisher_scale);
    };
    const auto add_graph = [&](CLI::App* sub) {
        bind_int(sub,
                 sub->add_option("--knn", o.knn,
                                 "sparsify the divergence graph to k nearest neighbors (0 = complete)"),
                 "knn", &o.knn);
    };
    const auto add_threads = [&](CLI::App* sub) {
        bind_int(sub,
                 sub->add_option("--threads", o.threads,
                                 "worker thread cap (0 = auto; INFOGEO_THREADS as fallback)"),
                 "threads", &o.threads);
    };

    CLI::App* cmd_distances =
        app.add_subcommand("distances", "pairwise divergence matrix and its geodesic closure");
    add_io(cmd_distances);
    add_metric(cmd_distances, true, "skl | hellinger | bhattacharya (default skl)");
    add_graph(cmd_distances);
    add_threads(cmd_distances);

    CLI::App* cmd_fine =
        app.add_subcommand("fine", "embed the collection by divergences, geodesics, and MDS");
    add_io(cmd_fine);
    add_metric(cmd_fine, true, "skl | hellinger | bhattacharya (default skl)");
    bind_int(cmd_fine, cmd_fine->add_option("--k", o.k, "embedding dimension (default 2)"), "k",
             &o.k);
    add_graph(cmd_fine);
    add_threads(cmd_fine);

    CLI::App* cmd_ipca =
        app.add_subcommand("ipca", "learn a row-orthonormal projection preserving divergences");
    add_io(cmd_ipca);
    add_metric(cmd_ipca, false, "skl | hellinger (default skl)");
    bind_int(cmd_ipca, cmd_ipca->add_option("--m", o.m, "projection dimension (default 2)"), "m",
             &o.m);
    bind_str(cmd_ipca, cmd_ipca->add_option("--cost", o.cost, "j1 | j2 | j3 | j4 (default j1)"),
             "cost", &o.cost);
    bind_double(cmd_ipca, cmd_ipca->add_option("--mu", o.mu, "gradient step (default 0.5)"), "mu",
                &o.mu);
    bind_double(cmd_ipca,
                cmd_ipca->add_option("--eps", o.eps, "stop when |dJ| <= eps (default 1e-6)"),
                "eps", &o.eps);
    {
        CLI::Option* opt = cmd_ipca->add_option(
            "--c", o.c, "kernel constant for j2/j4: auto or a positive number (default auto)");
        bindings[cmd_ipca]["c"] = {opt, [&o, expect](const json& v) {
                                       if (v.is_string())
                                           o.c = v.get<std::string>();
                                       else if (v.is_number())
                                           o.c = v.dump();
                                       else
                                           expect(false, "c", "a string or number");
                                   }};
    }
    bind_int(cmd_ipca,
             cmd_ipca->add_option("--max-iter", o.max_iter, "iteration cap (default 500)"),
             "max_iter", &o.max_iter);
    bind_int(cmd_ipca, cmd_ipca->add_option("--seed", o.seed, "seed for the random init"),
             "seed", &o.seed);
    bind_str(cmd_ipca,
             cmd_ipca->add_option("--init", o.init, "random | identity (default random)"),
             "init", &o.init);
    bind_int(cmd_ipca,
             cmd_ipca->add_option("--reorth-every", o.reorth_every,
                                  "retraction cadence in steps (default 1)"),
             "reorth_every", &o.reorth_every);
    {
        CLI::Option* opt = cmd_ipca->add_flag(
            "--no-backtracking",
            [&o](std::int64_t) { o.backtracking = false; },
            "plain fixed-step updates; the cost may oscillate");
        bindings[cmd_ipca]["backtracking"] = {opt, [&o, expect](const json& v) {
                                                  expect(v.is_boolean(), "backtracking",
                                                         "a boolean");
                                                  o.backtracking = v.get<bool>();
                                              }};
    }
    add_threads(cmd_ipca);

    CLI::App* cmd_rank =
        app.add_subcommand("rank", "rank ambient variables by an existing projection's loadings");
    bind_str(cmd_rank,
             cmd_rank->add_option("--projection", o.projection_path, "projection CSV (m x d)"),
             "projection", &o.projection_path);
    bind_str(cmd_rank, cmd_rank->add_option("--out", o.out, "output directory (default .)"),
             "out", &o.out);
    cmd_rank->add_option("--config", o.config_path, "JSON file of defaults; command-line flags win");

    CLI::App* cmd_synth =
        app.add_subcommand("synth", "write a seeded Gaussian fixture collection");
    bind_int(cmd_synth, cmd_synth->add_option("--sets", o.sets, "number of datasets (default 10)"),
             "sets", &o.sets);
    bind_int(cmd_synth, cmd_synth->add_option("--n", o.n, "samples per dataset (default 200)"),
             "n", &o.n);
    bind_int(cmd_synth, cmd_synth->add_option("--d", o.d, "ambient dimension (default 1)"), "d",
             &o.d);
    bind_int(cmd_synth, cmd_synth->add_option("--seed", o.seed, "seed for the Gaussian draws"),
             "seed", &o.seed);
    bind_str(cmd_synth, cmd_synth->add_option("--out", o.out, "output directory (default .)"),
             "out", &o.out);
    cmd_synth->add_option("--config", o.config_path, "JSON file of defaults; command-line flags win");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        apply_config_file(o.config_path, sub, bindings[sub]);
        if (sub == cmd_distances) return run_distances(o);
        if (sub == cmd_fine) return run_fine(o);
        if (sub == cmd_ipca) return run_ipca(o);
        if (sub == cmd_rank) return run_rank(o);
        return run_synth(o);
    } catch (const infogeo::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const infogeo::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const infogeo::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
