// picklab: run one spec-file job per invocation.
//
//   picklab <command> --spec job.json [--out dir] [--seed u64] [--max-n N] [--tol x]
//
// Exit status: 0 all checks passed, 2 checks ran and some failed, 1 error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <picklab/cli.hpp>

int main(int argc, char** argv)
{
    namespace cli = picklab::cli;

    CLI::App app{"Complete Pick kernels, Pick problems and Smirnov certificates"};
    app.require_subcommand(1);

    std::string spec;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_n;
    std::optional<double> tol;

    const cli::command all[] = {cli::command::kernel_check, cli::command::pick_solve,
                                cli::command::multnorm,     cli::command::gleason,
                                cli::command::smirnov,      cli::command::verify,
                                cli::command::probe};
    for (cli::command c : all)
    {
        CLI::App* sub = app.add_subcommand(cli::command_name(c));
        sub->add_option("--spec", spec, "JSON job specification")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory for artifacts");
        sub->add_option("--seed", seed, "seed for randomized grids");
        sub->add_option("--max-n", max_n, "stored degree N_max of series kernels");
        sub->add_option("--tol", tol, "command-specific tolerance override");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? cli::exit_ok : cli::exit_error;
    }

    cli::job_spec job;
    job.cmd       = *cli::parse_command(app.get_subcommands().front()->get_name());
    job.spec_path = spec;
    job.out_dir   = out;
    job.seed      = seed;
    job.max_n     = max_n;
    job.tol       = tol;
    return cli::run(job, std::cerr);
}
