#include "CLI11.hpp"

#include "bitrans/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver for -u'''' + b u' + a u + G * F(u) = 0"};
    app.require_subcommand(1, 1);

    bitrans::cli::RunOptions opt;
    std::string config;
    std::string out;
    unsigned parallel = 1;
    std::uint64_t seed = 0;

    for (const char* name : {"analyze", "solve", "sequence", "oracle"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides output_dir)");
        sub->add_option("--parallel", parallel, "concurrent per-m solves")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "seed for the Lipschitz audit sampler");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bitrans::cli::exit_config;
    }

    opt.command = app.get_subcommands().front()->get_name();
    opt.config_path = config;
    if (!out.empty()) opt.out_dir = out;
    opt.parallel = parallel;
    opt.seed = seed;
    return bitrans::cli::run(opt);
}
