///
/// \file serialization.hpp
///
/// JSON documents for weight specs, Pick problems, Smirnov certificates and
/// probe reports. Doubles are written as shortest round-trip decimal strings,
/// so every document reloads bit-exactly.
///

#ifndef PICKLAB_SERIALIZATION_HPP
#define PICKLAB_SERIALIZATION_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <picklab/decimal.hpp>
#include <picklab/errors.hpp>
#include <picklab/experiments.hpp>
#include <picklab/pick.hpp>
#include <picklab/realization.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab
{

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "picklab/1";

/// Schema failures of the JSON readers.
class schema_error : public domain_error
{
public:
    using domain_error::domain_error;
};

namespace io
{

inline std::string number(double x)
{
    return format_exact(x);
}

/// Accepts a JSON number or a decimal string.
inline double get_double(const json& j, const std::string& where)
{
    if (j.is_number())
    {
        return j.get<double>();
    }
    if (j.is_string())
    {
        try
        {
            return parse_double(j.get<std::string>());
        }
        catch (const domain_error&)
        {
            throw schema_error(where + ": '" + j.get<std::string>() + "' is not a number");
        }
    }
    throw schema_error(where + ": expected a number or decimal string");
}

inline std::size_t get_size(const json& j, const std::string& where)
{
    if (j.is_number_unsigned())
    {
        return j.get<std::size_t>();
    }
    if (j.is_number_integer() && j.get<long long>() >= 0)
    {
        return static_cast<std::size_t>(j.get<long long>());
    }
    if (j.is_string())
    {
        const double v = get_double(j, where);
        if (v >= 0 && v == static_cast<double>(static_cast<std::size_t>(v)))
        {
            return static_cast<std::size_t>(v);
        }
    }
    throw schema_error(where + ": expected a nonnegative integer");
}

inline const json& require(const json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw schema_error(where + ": missing field '" + key + "'");
    }
    return j.at(key);
}

inline json complex_value(complex z)
{
    return json::array({number(z.real()), number(z.imag())});
}

/// [re, im] pair, or a bare real number.
inline complex get_complex(const json& j, const std::string& where)
{
    if (j.is_array())
    {
        if (j.size() != 2)
        {
            throw schema_error(where + ": complex numbers are [re, im] pairs");
        }
        return {get_double(j[0], where), get_double(j[1], where)};
    }
    return {get_double(j, where), 0.0};
}

inline json complex_list(const std::vector<complex>& v)
{
    json out = json::array();
    for (const auto& z : v)
    {
        out.push_back(complex_value(z));
    }
    return out;
}

inline std::vector<complex> get_complex_list(const json& j, const std::string& where)
{
    if (!j.is_array())
    {
        throw schema_error(where + ": expected an array");
    }
    std::vector<complex> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        out.push_back(get_complex(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<double> get_double_list(const json& j, const std::string& where)
{
    if (!j.is_array())
    {
        throw schema_error(where + ": expected an array");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        out.push_back(get_double(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline json matrix_value(const cmatrix& m)
{
    json rows = json::array();
    for (index_t i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (index_t j = 0; j < m.cols(); ++j)
        {
            row.push_back(complex_value(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline cmatrix get_matrix(const json& j, index_t rows, index_t cols, const std::string& where)
{
    if (!j.is_array() || static_cast<index_t>(j.size()) != rows)
    {
        throw schema_error(where + ": expected " + std::to_string(rows) + " rows");
    }
    cmatrix m(rows, cols);
    for (index_t i = 0; i < rows; ++i)
    {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<index_t>(row.size()) != cols)
        {
            throw schema_error(where + ": expected " + std::to_string(cols) + " columns");
        }
        for (index_t c = 0; c < cols; ++c)
        {
            m(i, c) = get_complex(row[static_cast<std::size_t>(c)], where);
        }
    }
    return m;
}

inline void check_schema(const json& doc, const std::string& where)
{
    if (!doc.is_object())
    {
        throw schema_error(where + ": document must be a JSON object");
    }
    if (!doc.contains("schema") || doc.at("schema") != schema_version)
    {
        throw schema_error(where + ": expected \"schema\": \"" + std::string(schema_version) + "\"");
    }
}

} // namespace io

inline const char* family_name(weight_family f)
{
    switch (f)
    {
    case weight_family::szego:
        return "szego";
    case weight_family::hs:
        return "hs";
    case weight_family::explicit_values:
        return "explicit";
    case weight_family::shift_weights:
        return "shift_weights";
    }
    return "unknown";
}

inline json to_json(const weight_spec& spec)
{
    json j;
    j["family"] = family_name(spec.family);
    switch (spec.family)
    {
    case weight_family::hs:
        j["s"] = io::number(spec.s);
        [[fallthrough]];
    case weight_family::szego:
        j["n_max"] = spec.max_degree;
        break;
    case weight_family::explicit_values:
    case weight_family::shift_weights:
    {
        json v = json::array();
        for (double x : spec.values)
        {
            v.push_back(io::number(x));
        }
        j[spec.family == weight_family::explicit_values ? "a" : "w"] = std::move(v);
        break;
    }
    }
    return j;
}

/// \p max_n overrides "n_max" for the szego and hs families.
inline weight_spec weight_spec_from_json(const json& j, std::optional<std::size_t> max_n = {})
{
    const std::string where = "kernel";
    const std::string family = io::require(j, "family", where).get<std::string>();
    weight_spec spec;
    if (j.contains("n_max"))
    {
        spec.max_degree = io::get_size(j.at("n_max"), where + ".n_max");
    }
    if (max_n)
    {
        spec.max_degree = *max_n;
    }
    if (family == "szego")
    {
        spec.family = weight_family::szego;
    }
    else if (family == "hs")
    {
        spec.family = weight_family::hs;
        spec.s      = io::get_double(io::require(j, "s", where), where + ".s");
    }
    else if (family == "explicit")
    {
        spec.family = weight_family::explicit_values;
        spec.values = io::get_double_list(io::require(j, "a", where), where + ".a");
        spec.max_degree = spec.values.empty() ? 0 : spec.values.size() - 1;
    }
    else if (family == "shift_weights")
    {
        spec.family = weight_family::shift_weights;
        spec.values = io::get_double_list(io::require(j, "w", where), where + ".w");
        spec.max_degree = spec.values.size();
    }
    else
    {
        throw schema_error(where + ": unknown family '" + family + "'");
    }
    return spec;
}

inline diagonal_kernel kernel_from_json(const json& j, std::optional<std::size_t> max_n = {})
{
    return diagonal_kernel(make_weights(weight_spec_from_json(j, max_n)));
}

inline json to_json(const pick_problem& p)
{
    json j;
    j["schema"]  = schema_version;
    j["kernel"]  = to_json(p.kernel().weights().origin());
    j["nodes"]   = io::complex_list(p.nodes());
    j["targets"] = io::complex_list(p.targets());
    j["bound"]   = io::number(p.bound());
    return j;
}

inline pick_problem pick_problem_from_json(const json& j, std::optional<std::size_t> max_n = {})
{
    const auto kernel = kernel_from_json(io::require(j, "kernel", "pick problem"), max_n);
    auto nodes   = io::get_complex_list(io::require(j, "nodes", "pick problem"), "nodes");
    auto targets = io::get_complex_list(io::require(j, "targets", "pick problem"), "targets");
    const double bound = j.contains("bound") ? io::get_double(j.at("bound"), "bound") : 1.0;
    return pick_problem(kernel, std::move(nodes), std::move(targets), bound);
}

inline json to_json(const certificate_check& c)
{
    json j;
    j["name"]      = c.name;
    j["value"]     = io::number(c.value);
    j["tolerance"] = io::number(c.tolerance);
    j["passed"]    = c.passed;
    return j;
}

inline json checks_json(const std::vector<certificate_check>& checks)
{
    json out = json::array();
    for (const auto& c : checks)
    {
        out.push_back(to_json(c));
    }
    return out;
}

inline json to_json(const smirnov_certificate& cert)
{
    const colligation& col = cert.realization();
    json j;
    j["schema"]     = schema_version;
    j["kind"]       = "smirnov_certificate";
    j["kernel"]     = to_json(cert.kernel().weights().origin());
    j["eps_cp"]     = io::number(cert.kernel().eps_cp());
    j["truncation"] = col.truncation;
    j["rank"]       = col.rank;
    j["nodes"]      = io::complex_list(col.nodes);
    j["values"]     = io::complex_list(col.values);
    j["scale"]      = io::number(cert.scale);
    j["blocks"]     = {{"A", io::matrix_value(col.a)},
                       {"B", io::matrix_value(col.b)},
                       {"C", io::matrix_value(col.c)},
                       {"D", io::matrix_value(col.d)}};
    j["factor"]          = io::matrix_value(col.g);
    j["gram_defect"]     = io::number(col.gram_defect);
    j["factor_residual"] = io::number(col.factor_residual);
    j["sample_residual"] = io::number(cert.sample_residual);
    j["seed"]            = std::to_string(cert.seed);
    j["grid"]            = io::complex_list(cert.grid);
    j["checks"]          = checks_json(cert.checks);
    j["off_sample_residual"] =
        cert.off_sample_residual ? json(io::number(*cert.off_sample_residual)) : json(nullptr);
    j["off_sample_warning"] = cert.off_sample_warning;
    j["passed"]             = cert.passed();
    return j;
}

inline std::uint64_t parse_seed(const json& j, const std::string& where)
{
    try
    {
        if (j.is_number_unsigned())
        {
            return j.get<std::uint64_t>();
        }
        if (j.is_string())
        {
            std::size_t used = 0;
            const std::string s = j.get<std::string>();
            const auto v        = std::stoull(s, &used, 0);
            if (used == s.size())
            {
                return v;
            }
        }
    }
    catch (const std::exception&)
    {
    }
    throw schema_error(where + ": seed must be an unsigned 64-bit integer");
}

inline smirnov_certificate certificate_from_json(const json& j)
{
    io::check_schema(j, "certificate");
    if (j.value("kind", "") != "smirnov_certificate")
    {
        throw schema_error("certificate: kind must be \"smirnov_certificate\"");
    }
    const double eps = io::get_double(io::require(j, "eps_cp", "certificate"), "eps_cp");
    diagonal_kernel k(make_weights(weight_spec_from_json(io::require(j, "kernel", "certificate"))),
                      eps);
    colligation col;
    col.truncation = io::get_size(io::require(j, "truncation", "certificate"), "truncation");
    col.rank       = static_cast<index_t>(io::get_size(io::require(j, "rank", "certificate"), "rank"));
    col.nodes      = io::get_complex_list(io::require(j, "nodes", "certificate"), "nodes");
    col.values     = io::get_complex_list(io::require(j, "values", "certificate"), "values");
    if (col.nodes.size() != col.values.size())
    {
        throw schema_error("certificate: nodes and values differ in length");
    }
    const index_t nn   = static_cast<index_t>(col.truncation);
    const index_t r    = col.rank;
    const json& blocks = io::require(j, "blocks", "certificate");
    col.a = io::get_matrix(io::require(blocks, "A", "blocks"), 1, 1 + nn, "blocks.A");
    col.b = io::get_matrix(io::require(blocks, "B", "blocks"), 1, r * nn, "blocks.B");
    col.c = io::get_matrix(io::require(blocks, "C", "blocks"), r, 1 + nn, "blocks.C");
    col.d = io::get_matrix(io::require(blocks, "D", "blocks"), r, r * nn, "blocks.D");
    col.g = io::get_matrix(io::require(j, "factor", "certificate"),
                           static_cast<index_t>(col.nodes.size()), r, "factor");
    col.gram_defect     = io::get_double(io::require(j, "gram_defect", "certificate"), "gram_defect");
    col.factor_residual = io::get_double(io::require(j, "factor_residual", "certificate"),
                                         "factor_residual");

    smirnov_certificate cert(std::move(k), std::move(col));
    cert.scale           = io::get_double(io::require(j, "scale", "certificate"), "scale");
    cert.sample_residual = io::get_double(io::require(j, "sample_residual", "certificate"),
                                          "sample_residual");
    cert.seed = parse_seed(io::require(j, "seed", "certificate"), "seed");
    cert.grid = io::get_complex_list(io::require(j, "grid", "certificate"), "grid");
    for (const auto& c : io::require(j, "checks", "certificate"))
    {
        cert.checks.push_back({io::require(c, "name", "check").get<std::string>(),
                               io::get_double(io::require(c, "value", "check"), "check.value"),
                               io::get_double(io::require(c, "tolerance", "check"), "check.tolerance"),
                               io::require(c, "passed", "check").get<bool>()});
    }
    if (j.contains("off_sample_residual") && !j.at("off_sample_residual").is_null())
    {
        cert.off_sample_residual = io::get_double(j.at("off_sample_residual"), "off_sample_residual");
    }
    cert.off_sample_warning = j.value("off_sample_warning", false);
    return cert;
}

/// Function given by Taylor coefficients: {"coefficients": [[re, im], ...]}.
inline function_coefficients function_from_json(const json& j, const std::string& where)
{
    return function_coefficients(
        io::get_complex_list(io::require(j, "coefficients", where), where + ".coefficients"));
}

inline json to_json(const function_coefficients& f)
{
    return json{{"coefficients", io::complex_list({f.coefficients().begin(), f.coefficients().end()})}};
}

inline json to_json(const probe_report& rep)
{
    json j;
    j["function"]   = rep.function_label;
    j["space_norm"] = io::number(rep.space_norm);
    j["verdict"]    = to_string(rep.verdict);
    j["max_decrease"] = io::number(rep.max_decrease);
    json rows = json::array();
    for (const auto& b : rep.bounds)
    {
        json row;
        row["grid_id"]     = b.grid_id;
        row["n_nodes"]     = b.n_nodes;
        row["lower_bound"] = b.lower_bound ? json(io::number(*b.lower_bound)) : json(nullptr);
        row["ratio"]       = b.lower_bound && rep.space_norm > 0
                                 ? json(io::number(*b.lower_bound / rep.space_norm))
                                 : json(nullptr);
        row["sup_modulus"] = io::number(b.sup_modulus);
        row["kept_nodes"]  = b.kept_nodes;
        if (!b.error.empty())
        {
            row["error"] = b.error;
        }
        rows.push_back(std::move(row));
    }
    j["grids"] = std::move(rows);
    return j;
}

/// CSV table with columns grid_id, n_nodes, lower_bound, space_norm, ratio.
inline std::string to_csv(const probe_report& rep)
{
    std::ostringstream out;
    out << "grid_id,n_nodes,lower_bound,space_norm,ratio\n";
    const std::string norm = format_significant(rep.space_norm);
    for (const auto& b : rep.bounds)
    {
        out << b.grid_id << ',' << b.n_nodes << ',';
        if (b.lower_bound)
        {
            out << format_significant(*b.lower_bound);
        }
        out << ',' << norm << ',';
        if (b.lower_bound && rep.space_norm > 0)
        {
            out << format_significant(*b.lower_bound / rep.space_norm);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace picklab

#endif /* PICKLAB_SERIALIZATION_HPP */
