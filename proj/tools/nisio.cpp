#include <CLI11.hpp>

#include "nisio/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Semigroup envelopes of linear transition families"};
    app.require_subcommand(1, 1);
    nisio::cli::Options o;
    std::uint64_t seed = 0;
    int threads = 0;
    for (const char* name : {"solve", "properties", "dpp", "control", "mc", "report"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", o.config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", o.out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "random seed, overrides the config");
        sub->add_option("--threads", threads, "worker threads, overrides NISIO_THREADS");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nisio::cli::kSchemaError;
    }
    auto* sub = app.get_subcommands().front();
    o.subcommand = sub->get_name();
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--threads")) o.threads = threads;
    return nisio::cli::run(o);
}
