///
/// \file cli.hpp
///
/// Spec-file driven jobs behind the picklab command line tool. A job reads
/// one JSON spec, writes JSON (and CSV) artifacts into an output directory
/// and returns an exit code: 0 when every check passed, 2 when checks ran and
/// some failed, 1 on errors.
///

#ifndef PICKLAB_CLI_HPP
#define PICKLAB_CLI_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <picklab/decimal.hpp>
#include <picklab/experiments.hpp>
#include <picklab/pick.hpp>
#include <picklab/realization.hpp>
#include <picklab/serialization.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab::cli
{

enum class command
{
    kernel_check,
    pick_solve,
    multnorm,
    gleason,
    smirnov,
    verify,
    probe,
};

inline constexpr int exit_ok            = 0;
inline constexpr int exit_error         = 1;
inline constexpr int exit_checks_failed = 2;

inline const char* command_name(command c)
{
    switch (c)
    {
    case command::kernel_check:
        return "kernel-check";
    case command::pick_solve:
        return "pick-solve";
    case command::multnorm:
        return "multnorm";
    case command::gleason:
        return "gleason";
    case command::smirnov:
        return "smirnov";
    case command::verify:
        return "verify";
    case command::probe:
        return "probe";
    }
    return "unknown";
}

inline std::optional<command> parse_command(std::string_view name)
{
    for (command c : {command::kernel_check, command::pick_solve, command::multnorm,
                      command::gleason, command::smirnov, command::verify, command::probe})
    {
        if (name == command_name(c))
        {
            return c;
        }
    }
    return std::nullopt;
}

struct job_spec
{
    command cmd = command::kernel_check;
    std::filesystem::path spec_path;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_n;
    std::optional<double> tol;
};

/// Writes through a temporary sibling file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw error("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.close();
        if (!out)
        {
            throw error("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string render(const json& j)
{
    return j.dump(2) + "\n";
}

inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw error("cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try
    {
        return json::parse(buf.str());
    }
    catch (const json::parse_error& e)
    {
        throw schema_error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

namespace detail
{

struct outcome
{
    json report;
    bool passed = true;
    std::vector<std::pair<std::string, std::string>> extra; // file name, content
};

inline json header(command c)
{
    json j;
    j["schema"]  = schema_version;
    j["command"] = command_name(c);
    return j;
}

inline std::uint64_t require_seed(const job_spec& job, const json& spec)
{
    if (job.seed)
    {
        return *job.seed;
    }
    if (spec.contains("seed"))
    {
        return parse_seed(spec.at("seed"), "seed");
    }
    throw schema_error("a seed is required for randomized grids (use --seed or \"seed\")");
}

/// Explicit "nodes", or seeded {"random_nodes": {"count", "radius"}}.
inline std::vector<complex> nodes_from(const job_spec& job, const json& spec,
                                       std::size_t default_count, double default_radius,
                                       std::uint64_t salt)
{
    if (spec.contains("nodes"))
    {
        return io::get_complex_list(spec.at("nodes"), "nodes");
    }
    std::size_t count = default_count;
    double radius     = default_radius;
    if (spec.contains("random_nodes"))
    {
        const json& r = spec.at("random_nodes");
        if (r.contains("count"))
        {
            count = io::get_size(r.at("count"), "random_nodes.count");
        }
        if (r.contains("radius"))
        {
            radius = io::get_double(r.at("radius"), "random_nodes.radius");
        }
    }
    return random_disc_points(count, radius, require_seed(job, spec) ^ salt);
}

inline function_coefficients function_entry(const json& f, const std::string& where)
{
    if (f.contains("monomial"))
    {
        const std::size_t n = io::get_size(f.at("monomial"), where + ".monomial");
        const complex c     = f.contains("scale") ? io::get_complex(f.at("scale"), where + ".scale")
                                                  : complex(1.0);
        return function_coefficients::monomial(n, c);
    }
    return function_from_json(f, where);
}

inline outcome kernel_check(const job_spec& job, const json& spec)
{
    const diagonal_kernel k = kernel_from_json(io::require(spec, "kernel", "spec"), job.max_n);
    const std::size_t n = spec.contains("N") ? io::get_size(spec.at("N"), "N") : k.max_degree();
    const auto res      = is_complete_pick(k, n);
    const bool kaluza   = kaluza_test(k.weights(), n);

    auto c       = k.embedding_coefficients();
    double min_c = n >= 1 ? c[1] : 0.0;
    for (std::size_t m = 1; m <= n; ++m)
    {
        min_c = std::min(min_c, c[m]);
    }
    outcome out;
    out.report               = header(command::kernel_check);
    out.report["kernel"]     = to_json(k.weights().origin());
    out.report["N"]          = n;
    out.report["verdict"]    = res.passed() ? "pass_to_" + std::to_string(n) : std::string("fail");
    out.report["checked_to"] = res.checked_to;
    out.report["witness"]    = res.witness ? json(*res.witness) : json(nullptr);
    out.report["min_c"]      = io::number(min_c);
    out.report["kaluza"]     = kaluza;
    out.report["eps_cp"]     = io::number(k.eps_cp());
    out.passed               = res.passed();
    return out;
}

inline outcome pick_solve(const job_spec& job, const json& spec)
{
    const pick_problem p = pick_problem_from_json(spec, job.max_n);
    const double tol     = job.tol.value_or(eps_psd);
    const hermitian_matrix m = pick_matrix(p);
    const double lambda      = min_eigenvalue(m);
    const bool ok            = lambda >= -tol * std::max(1.0, m.max_abs());
    outcome out;
    out.report                    = header(command::pick_solve);
    out.report["problem"]         = to_json(p);
    out.report["solvable"]        = ok;
    out.report["min_eigenvalue"]  = io::number(lambda);
    out.report["tolerance"]       = io::number(tol);
    out.report["multiplier_norm"] = io::number(multiplier_norm(p.kernel(), p.nodes(), p.targets()));
    out.passed                    = ok;
    return out;
}

inline outcome multnorm(const job_spec& job, const json& spec)
{
    const diagonal_kernel k = kernel_from_json(io::require(spec, "kernel", "spec"), job.max_n);
    const auto nodes   = io::get_complex_list(io::require(spec, "nodes", "spec"), "nodes");
    const auto targets = io::get_complex_list(io::require(spec, "targets", "spec"), "targets");
    multiplier_norm_options opts;
    if (job.tol)
    {
        opts.abs_tol = *job.tol;
    }
    const auto res = multiplier_norm_detailed(k, nodes, targets, opts);
    outcome out;
    out.report                    = header(command::multnorm);
    out.report["kernel"]          = to_json(k.weights().origin());
    out.report["n_nodes"]         = nodes.size();
    out.report["multiplier_norm"] = io::number(res.value);
    out.report["lower"]           = io::number(res.lower);
    out.report["rank"]            = res.rank;
    out.report["iterations"]      = res.iterations;
    if (spec.contains("bound"))
    {
        const double bound          = io::get_double(spec.at("bound"), "bound");
        out.passed                  = res.value <= bound;
        out.report["bound"]         = io::number(bound);
        out.report["within_bound"]  = out.passed;
    }
    return out;
}

inline outcome gleason(const job_spec& job, const json& spec)
{
    const diagonal_kernel k = kernel_from_json(io::require(spec, "kernel", "spec"), job.max_n);
    const double tol        = job.tol.value_or(1e-8);
    const json& pairs       = io::require(spec, "pairs", "spec");
    outcome out;
    out.report           = header(command::gleason);
    out.report["kernel"] = to_json(k.weights().origin());
    json rows            = json::array();
    double worst         = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
    {
        const auto zw = io::get_complex_list(pairs[i], "pairs[" + std::to_string(i) + "]");
        if (zw.size() != 2)
        {
            throw schema_error("pairs[" + std::to_string(i) + "]: expected [z, w]");
        }
        const auto g = make_gleason_pair(k, zw[0], zw[1]);
        const double gap = std::abs(g.d - g.d_extremal);
        worst            = std::max(worst, gap);
        json row;
        row["z"]          = io::complex_value(g.z);
        row["w"]          = io::complex_value(g.w);
        row["d"]          = io::number(g.d);
        row["d_extremal"] = io::number(g.d_extremal);
        row["char_dist"]  = io::number(g.char_dist);
        row["same_part"]  = g.char_dist < 2.0 - eps_part;
        rows.push_back(std::move(row));
    }
    out.report["pairs"]     = std::move(rows);
    out.report["max_gap"]   = io::number(worst);
    out.report["tolerance"] = io::number(tol);
    out.passed              = worst <= tol;
    return out;
}

inline smirnov_options smirnov_opts(const job_spec& job, const json& spec, std::uint64_t seed)
{
    smirnov_options o;
    o.seed = seed;
    if (job.tol)
    {
        o.lmi_tol = *job.tol;
    }
    if (spec.contains("grid_points"))
    {
        o.grid_points = io::get_size(spec.at("grid_points"), "grid_points");
    }
    if (spec.contains("ring_points"))
    {
        o.ring_points = io::get_size(spec.at("ring_points"), "ring_points");
    }
    if (spec.contains("truncation"))
    {
        o.colligation.truncation = io::get_size(spec.at("truncation"), "truncation");
    }
    return o;
}

inline outcome smirnov(const job_spec& job, const json& spec)
{
    const diagonal_kernel k = kernel_from_json(io::require(spec, "kernel", "spec"), job.max_n);
    const std::uint64_t seed = require_seed(job, spec);
    const auto nodes         = nodes_from(job, spec, 8, 0.8, 0);
    const json& f            = io::require(spec, "function", "spec");
    function_samples samples = f.contains("values")
                                   ? function_samples(io::get_complex_list(f.at("values"), "function.values"))
                                   : function_samples(function_entry(f, "function"));
    const auto cert = smirnov_factorize(k, samples, nodes, smirnov_opts(job, spec, seed));

    outcome out;
    out.report                    = header(command::smirnov);
    out.report["kernel"]          = to_json(k.weights().origin());
    out.report["certificate"]     = "certificate.json";
    out.report["truncation"]      = cert.realization().truncation;
    out.report["rank"]            = cert.realization().rank;
    out.report["sample_residual"] = io::number(cert.sample_residual);
    out.report["scale"]           = io::number(cert.scale);
    out.report["checks"]          = checks_json(cert.checks);
    out.report["off_sample_residual"] =
        cert.off_sample_residual ? json(io::number(*cert.off_sample_residual)) : json(nullptr);
    out.report["off_sample_warning"] = cert.off_sample_warning;
    out.report["passed"]             = cert.passed();
    out.passed                       = cert.passed();
    out.extra.emplace_back("certificate.json", render(to_json(cert)));
    return out;
}

inline std::filesystem::path locate(const job_spec& job, const std::string& name)
{
    const std::filesystem::path p(name);
    if (p.is_absolute())
    {
        return p;
    }
    const auto in_out = job.out_dir / p;
    if (std::filesystem::exists(in_out))
    {
        return in_out;
    }
    return job.spec_path.parent_path() / p;
}

inline outcome verify(const job_spec& job, const json& spec)
{
    const auto path =
        locate(job, io::require(spec, "certificate", "spec").get<std::string>());
    const smirnov_certificate cert = certificate_from_json(read_json_file(path));
    const std::uint64_t seed       = require_seed(job, spec);
    // salt keeps fresh nodes distinct from the grid stored in the certificate
    const auto test = nodes_from(job, spec, 12, 0.9, 0x9e3779b97f4a7c15ULL);
    smirnov_options o = smirnov_opts(job, spec, seed);
    auto checks       = verify_certificate(cert, test, o);
    double max_psi    = 0;
    for (const auto& z : ring_points(o.ring_points, o.ring_radius))
    {
        max_psi = std::max(max_psi, std::abs(cert.psi(z)));
    }
    checks.push_back({"psi_modulus_ring", max_psi, 1.0 - o.modulus_margin,
                      max_psi <= 1.0 - o.modulus_margin});

    outcome out;
    out.report                = header(command::verify);
    out.report["certificate"] = path.filename().string();
    out.report["seed"]        = std::to_string(seed);
    out.report["nodes"]       = io::complex_list(test);
    out.report["checks"]      = checks_json(checks);
    out.passed = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    out.report["passed"] = out.passed;
    return out;
}

inline outcome probe(const job_spec& job, const json& spec)
{
    const json& kspec = io::require(spec, "kernel", "spec");
    const weight_spec ws = weight_spec_from_json(kspec, job.max_n);
    const std::size_t rings = spec.contains("rings") ? io::get_size(spec.at("rings"), "rings") : 4;
    const auto grids        = nested_ring_grids(rings);

    std::vector<labeled_function> fns;
    const json& list = io::require(spec, "functions", "spec");
    for (std::size_t i = 0; i < list.size(); ++i)
    {
        const std::string where = "functions[" + std::to_string(i) + "]";
        fns.push_back({list[i].value("label", "f" + std::to_string(i)), function_entry(list[i], where)});
    }
    probe_options opts;
    const double mono_tol = job.tol.value_or(1e-9);

    outcome out;
    out.report           = header(command::probe);
    out.report["kernel"] = to_json(ws);
    out.report["rings"]  = rings;
    out.report["heuristic_thresholds"] = {{"growth_factor", io::number(opts.growth_factor)},
                                          {"bound_cap", io::number(opts.bound_cap)},
                                          {"note", "reporting heuristics, not theorems"}};
    std::vector<probe_report> reports;
    if (ws.family == weight_family::shift_weights)
    {
        salas_options so;
        so.probe            = opts;
        so.require_summable = spec.value("require_summable", false);
        const auto res      = salas_probe(ws.values, fns, grids, so);
        out.report["shift_weights"] = {{"nonincreasing", res.diagnostics.nonincreasing},
                                       {"limit_one", res.diagnostics.limit_one},
                                       {"kaluza", res.diagnostics.kaluza},
                                       {"tail_fraction", io::number(res.diagnostics.tail_fraction)},
                                       {"summable", res.diagnostics.summable},
                                       {"any_growing", res.any_growing}};
        reports = res.reports;
    }
    else if (ws.family == weight_family::hs && ws.s < -1.0)
    {
        const auto eq = hs_equivalence_ratio(ws.s, fns, grids, opts, ws.max_degree);
        json pg       = json::array();
        for (double r : eq.per_grid)
        {
            pg.push_back(io::number(r));
        }
        out.report["equivalence_ratio"] = {{"value", io::number(eq.value)}, {"per_grid", pg}};
        reports                         = eq.reports;
    }
    else
    {
        const diagonal_kernel k(make_weights(ws));
        for (const auto& fn : fns)
        {
            reports.push_back(mult_norm_lower_bounds(k, fn.f, grids, opts, fn.label));
        }
    }
    json reps = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i)
    {
        json r = to_json(reports[i]);
        r["csv"] = "probe_" + std::to_string(i) + ".csv";
        reps.push_back(std::move(r));
        out.extra.emplace_back("probe_" + std::to_string(i) + ".csv", to_csv(reports[i]));
        out.passed = out.passed && reports[i].max_decrease <= mono_tol;
    }
    out.report["reports"]             = std::move(reps);
    out.report["monotonicity_tolerance"] = io::number(mono_tol);
    return out;
}

inline outcome dispatch(const job_spec& job, const json& spec)
{
    switch (job.cmd)
    {
    case command::kernel_check:
        return kernel_check(job, spec);
    case command::pick_solve:
        return pick_solve(job, spec);
    case command::multnorm:
        return multnorm(job, spec);
    case command::gleason:
        return gleason(job, spec);
    case command::smirnov:
        return smirnov(job, spec);
    case command::verify:
        return verify(job, spec);
    case command::probe:
        return probe(job, spec);
    }
    throw error("unknown command");
}

} // namespace detail

//
// Runs one job. Artifacts go to <out>/<command>.json plus command-specific
// files; diagnostics go to \p diag only.
//
inline int run(const job_spec& job, std::ostream& diag = std::cerr)
{
    try
    {
        const json spec = read_json_file(job.spec_path);
        io::check_schema(spec, job.spec_path.string());
        if (spec.contains("command") && spec.at("command") != command_name(job.cmd))
        {
            throw schema_error("spec is for '" + spec.at("command").get<std::string>() +
                               "', not '" + command_name(job.cmd) + "'");
        }
        std::filesystem::create_directories(job.out_dir);
        auto result = detail::dispatch(job, spec);
        for (const auto& [name, content] : result.extra)
        {
            write_atomic(job.out_dir / name, content);
        }
        write_atomic(job.out_dir / (std::string(command_name(job.cmd)) + ".json"),
                     render(result.report));
        if (!result.passed)
        {
            diag << "picklab " << command_name(job.cmd) << ": checks failed\n";
            return exit_checks_failed;
        }
        return exit_ok;
    }
    catch (const std::exception& e)
    {
        diag << "picklab " << command_name(job.cmd) << ": error: " << e.what() << '\n';
        return exit_error;
    }
}

} // namespace picklab::cli

#endif /* PICKLAB_CLI_HPP */
