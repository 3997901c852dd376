#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "mvs/errors.hpp"
#include "mvs/experiment.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw mvs::ConfigError("cannot write " + p.string());
    os << text;
}

int fail(const fs::path& out, int status, const std::string& kind, const std::string& msg) {
    const json rec = mvs::error_record(status, kind, msg);
    std::cerr << rec.dump() << "\n";
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) {
        std::ofstream os(out / "error.json", std::ios::binary);
        os << rec.dump(2) << "\n";
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monotone mean-value scheme laboratory"};
    std::string command, config_path, out_dir = ".";
    bool strict = false;
    int threads = 0;
    app.add_option("command", command, "consistency | solve | converge | barrier-check | mvp-check | calibrate-C")
        ->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_flag("--strict", strict, "exit 4 when the solver does not converge");
    app.add_option("--threads", threads, "worker threads (fallback: MVSCHEME_THREADS)");
    app.add_option("--out", out_dir, "output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mvs::kExitConfig;
    }

    if (threads <= 0)
        if (const char* env = std::getenv("MVSCHEME_THREADS")) threads = std::atoi(env);
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    const fs::path out(out_dir);
    try {
        std::ifstream is(config_path);
        if (!is) throw mvs::ConfigError("cannot read config " + config_path);
        json raw = json::parse(is);
        if (!raw.is_object()) throw mvs::ConfigError("config must be a JSON object");
        if (!raw.contains("command")) raw["command"] = command;
        if (raw.at("command") != command) throw mvs::ConfigError("config command does not match the command line");
        const json resolved = mvs::resolve_config(raw);
        const mvs::RunOutput r = mvs::run_experiment(resolved, strict);
        fs::create_directories(out);
        write_file(out / r.csv_name, r.csv);
        write_file(out / "report.json", r.report.dump(2) + "\n");
        if (r.status != mvs::kExitOk)
            return fail(out, r.status, "no_convergence", "solver did not reach the tolerance");
        return 0;
    } catch (const json::exception& e) {
        return fail(out, mvs::kExitConfig, "config", e.what());
    } catch (const mvs::ConfigError& e) {
        return fail(out, mvs::kExitConfig, "config", e.what());
    } catch (const mvs::GeometryError& e) {
        return fail(out, mvs::kExitConfig, "geometry", e.what());
    } catch (const mvs::InvariantError& e) {
        return fail(out, mvs::kExitInvariant, "invariant", e.what());
    } catch (const std::exception& e) {
        return fail(out, 1, "internal", e.what());
    }
}
