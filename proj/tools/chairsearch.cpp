// chairsearch command line: service, dataset generation, index audit,
// simulated experiments and log replay.
#include "chairsearch/engine.hpp"
#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"
#include "chairsearch/service.hpp"
#include "chairsearch/session_log.hpp"
#include "chairsearch/sim.hpp"
#include "chairsearch/stats.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace chairsearch;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Dictionary load_dictionary(const std::string& path) {
    return path.empty() ? Dictionary::builtin() : Dictionary::parse(read_file(path));
}

std::shared_ptr<const Engine> load_engine(const std::string& manifest_path, const std::string& dictionary_path,
                                          std::size_t shapes) {
    Dictionary dict = load_dictionary(dictionary_path);
    DatasetManifest manifest = manifest_path.empty() ? build_dataset(reference_shapes(shapes), dict.checksum())
                                                     : load_manifest(manifest_path, dict.checksum());
    return std::make_shared<const Engine>(std::move(manifest), std::move(dict));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Service* g_service = nullptr;

extern "C" void on_signal(int) {
    if (g_service) g_service->stop();
}

int build_index_check(const std::shared_ptr<const Engine>& engine, bool serial) {
    const auto& manifest = engine->manifest();
    const auto& index = engine->index();
    int failures = 0;
    auto report = [&](const std::string& what, bool ok, const std::string& detail = {}) {
        std::cout << (ok ? "ok    " : "FAIL  ") << what << (detail.empty() ? "" : ": " + detail) << '\n';
        if (!ok) ++failures;
    };

    std::size_t non_injective = 0;
    for (const auto& inst : manifest.instances())
        if (!inst.assignment.injective()) ++non_injective;
    report("instances", true, std::to_string(manifest.instance_count()) + " chairs over " +
                                  std::to_string(manifest.shape_count()) + " shapes");
    report("injective colorings", non_injective == 0, std::to_string(non_injective) + " violations");

    std::set<std::vector<float>> sem, vis;
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto s = index.semantic().row(i);
        const auto v = index.visual().row(i);
        sem.emplace(s.begin(), s.end());
        vis.emplace(v.begin(), v.end());
    }
    report("unique semantic vectors", sem.size() == index.size(), std::to_string(sem.size()));
    report("unique visual descriptors", vis.size() == index.size(), std::to_string(vis.size()));

    auto t0 = std::chrono::steady_clock::now();
    std::size_t sem_fail = 0, vis_fail = 0;
    for (const auto& inst : manifest.instances()) {
        const auto rs = engine->knn_semantic(engine->semantic(inst.chair_id));
        if (rs.empty() || rs[0].chair_id != inst.chair_id || rs[0].distance != 0) ++sem_fail;
        const auto rv = engine->knn_visual(engine->sketch_descriptor(Sketch{}, inst.chair_id));
        if (rv.empty() || rv[0].chair_id != inst.chair_id || rv[0].distance != 0) ++vis_fail;
    }
    report("semantic self-retrieval", sem_fail == 0, std::to_string(sem_fail) + " misses");
    report("visual self-retrieval", vis_fail == 0,
           std::to_string(vis_fail) + " misses, " + std::to_string(seconds_since(t0)) + " s");

    std::cout << "semantic digest " << index.semantic().digest() << '\n';
    std::cout << "visual digest   " << index.visual().digest() << '\n';

    if (serial) {
        t0 = std::chrono::steady_clock::now();
        const auto reference = RetrievalIndex::build_serial(manifest);
        report("serial build matches", reference.semantic().digest() == index.semantic().digest() &&
                                           reference.visual().digest() == index.visual().digest(),
               std::to_string(seconds_since(t0)) + " s");
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive multimodal chair retrieval"};
    app.require_subcommand(1);

    std::string manifest_path, dictionary_path;
    std::size_t shapes = 45;
    auto add_engine_opts = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest_path, "Dataset manifest (default: generate the reference set)");
        sub->add_option("--dictionary", dictionary_path, "Dictionary file (default: builtin)");
        sub->add_option("--shapes", shapes, "Reference shape count when no manifest is given")->check(CLI::Range(0, 100000));
    };

    auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
    add_engine_opts(serve);
    ServiceConfig scfg;
    double budget = 0;
    std::string log_dir, static_dir;
    serve->add_option("--host", scfg.host, "Listen address");
    serve->add_option("--port", scfg.port, "Listen port");
    serve->add_option("--budget", budget, "Session budget override in seconds");
    serve->add_option("--log-dir", log_dir, "Directory for per-session logs")->check(CLI::ExistingDirectory);
    serve->add_option("--static-dir", static_dir, "UI asset directory")->check(CLI::ExistingDirectory);
    serve->add_option("--seed", scfg.seed, "Random target seed");

    auto* gen = app.add_subcommand("generate-dataset", "Write the reference manifest");
    std::string out_path;
    gen->add_option("--dictionary", dictionary_path, "Dictionary file (default: builtin)");
    gen->add_option("--shapes", shapes, "Shape count")->check(CLI::Range(0, 100000));
    gen->add_option("-o,--out", out_path, "Output path")->required();

    auto* check = app.add_subcommand("build-index-check", "Build the index and audit it");
    add_engine_opts(check);
    bool serial = false;
    check->add_flag("--serial", serial, "Also build with the serial reference kernels and compare");

    auto* sim = app.add_subcommand("run-sim", "Run a simulated experiment");
    add_engine_opts(sim);
    std::string config_path, table_path, sim_log_dir;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> strategies;
    std::vector<int> n_grams;
    sim->add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    sim->add_option("--trials", trials, "Trials per condition (overrides the config)");
    sim->add_option("--seed", seed, "Seed (overrides the config)");
    sim->add_option("--strategies", strategies, "voice, sketch, hybrid-a, hybrid-b, hybrid-c")->delimiter(',');
    sim->add_option("--n-grams", n_grams, "N-gram sizes for voice strategies")->delimiter(',');
    sim->add_option("--table", table_path, "Write the metrics table (TSV)");
    sim->add_option("--log-dir", sim_log_dir, "Write one session log per trial")->check(CLI::ExistingDirectory);

    auto* replay = app.add_subcommand("replay-log", "Replay a session log and compare outcomes");
    add_engine_opts(replay);
    std::string log_path;
    replay->add_option("log", log_path, "Session log (JSON lines)")->required()->check(CLI::ExistingFile);

    auto* dict_cmd = app.add_subcommand("dictionary", "Print the dictionary in its text form");
    dict_cmd->add_option("--dictionary", dictionary_path, "Dictionary file (default: builtin)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            scfg.manifest_path = manifest_path;
            scfg.dictionary_path = dictionary_path;
            if (budget > 0) scfg.budget_seconds = budget;
            scfg.log_dir = log_dir;
            scfg.static_dir = static_dir;
            scfg.validate();
            auto engine = load_engine(manifest_path, dictionary_path, shapes);
            Service service(engine, scfg);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving " << engine->manifest().instance_count() << " chairs on " << scfg.host << ':'
                      << scfg.port << '\n';
            service.listen();
            g_service = nullptr;
            return 0;
        }
        if (*gen) {
            const Dictionary dict = load_dictionary(dictionary_path);
            const auto manifest = build_dataset(reference_shapes(shapes), dict.checksum());
            save_manifest(manifest, out_path);
            std::cout << "wrote " << manifest.instance_count() << " chairs (" << manifest.shape_count() << " shapes) to "
                      << out_path << '\n';
            return 0;
        }
        if (*check) {
            const auto t0 = std::chrono::steady_clock::now();
            auto engine = load_engine(manifest_path, dictionary_path, shapes);
            std::cout << "index built in " << seconds_since(t0) << " s\n";
            return build_index_check(engine, serial);
        }
        if (*sim) {
            ExperimentConfig cfg;
            if (!config_path.empty()) cfg = experiment_config_from_json(nlohmann::json::parse(read_file(config_path)));
            if (sim->count("--trials")) cfg.trials = trials;
            if (sim->count("--seed")) cfg.seed = seed;
            if (!strategies.empty()) {
                cfg.strategies.clear();
                for (const auto& s : strategies) {
                    auto st = strategy_from_string(s);
                    if (!st) throw Error(ErrorCode::InvalidInput, "unknown strategy " + s);
                    cfg.strategies.push_back(*st);
                }
            }
            if (!n_grams.empty()) cfg.n_grams = n_grams;
            cfg.keep_logs = !sim_log_dir.empty();
            auto engine = load_engine(manifest_path, dictionary_path, shapes);
            const auto t0 = std::chrono::steady_clock::now();
            const auto result = run_experiment(engine, cfg);
            std::cout << result.table.to_tsv();
            std::cerr << "simulated in " << seconds_since(t0) << " s\n";
            if (!table_path.empty()) {
                std::ofstream out(table_path);
                out << result.table.to_tsv();
                if (!out) throw Error(ErrorCode::Io, "cannot write " + table_path);
            }
            if (!sim_log_dir.empty())
                for (std::size_t i = 0; i < result.trials.size(); ++i) {
                    const auto& tr = result.trials[i];
                    std::ofstream out(std::filesystem::path(sim_log_dir) /
                                      (std::string(to_string(tr.strategy)) + "-n" + std::to_string(tr.n_gram) + "-" +
                                       std::to_string(tr.trial) + ".jsonl"));
                    for (const auto& line : tr.log) out << line << '\n';
                }
            std::size_t rows = 0, cols = 0;
            const auto matrix = success_matrix(result, rows, cols);
            if (rows >= 2 && cols >= 2) {
                const auto f = stats::friedman_test(matrix, rows, cols);
                std::cout << "friedman chi2=" << f.statistic << " df=" << f.df << " p=" << f.p_value << '\n';
                for (const auto& pc : f.pairwise) {
                    const auto& a = result.table.rows[pc.a];
                    const auto& b = result.table.rows[pc.b];
                    std::cout << "  " << to_string(a.strategy) << "/n" << a.n_gram << " vs " << to_string(b.strategy)
                              << "/n" << b.n_gram << ": p_adj=" << pc.p_adjusted
                              << (pc.significant ? " significant" : "") << '\n';
                }
            }
            return 0;
        }
        if (*replay) {
            auto engine = load_engine(manifest_path, dictionary_path, shapes);
            std::ifstream in(log_path);
            const auto report = replay_log(in, engine);
            std::cout << "queries " << report.queries << ", result mismatches " << report.result_mismatches << '\n';
            if (report.recorded) {
                const auto& o = report.replayed;
                std::cout << "outcome exact=" << o.exact_success << " shape=" << o.shape_success << " elapsed=" << o.elapsed
                          << " queries=" << o.query_count << '\n';
            } else {
                std::cout << "log has no terminal state\n";
            }
            std::cout << (report.consistent() ? "consistent" : "INCONSISTENT") << '\n';
            return report.consistent() ? 0 : 1;
        }
        if (*dict_cmd) {
            std::cout << load_dictionary(dictionary_path).to_text();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
