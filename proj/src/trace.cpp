#include "stlsbb/trace.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace stlsbb {

std::string_view to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::gradient_tolerance: return "GradientTolerance";
    case Termination::distance_tolerance: return "DistanceTolerance";
    case Termination::iteration_cap: return "IterationCap";
    }
    return "Unknown";
}

Termination termination_from_string(std::string_view name)
{
    for (auto t : {Termination::gradient_tolerance, Termination::distance_tolerance,
                   Termination::iteration_cap})
        if (to_string(t) == name)
            return t;
    throw Error(Errc::parse_error, "unknown termination '" + std::string(name) + "'");
}

std::string format_g17(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace)
{
    os << "# stlsbb-trace v1\n";
    os << "# policy=" << trace.policy << '\n';
    os << "# alpha0=" << format_g17(trace.alpha0) << '\n';
    os << "# alpha0_rule=" << trace.alpha0_rule << '\n';
    os << "# stop_rule=" << trace.stop_rule << '\n';
    os << "k,f,grad_norm,alpha,safeguarded_alpha,backtracks,fevals\n";
    for (const auto& r : trace.rows) {
        os << r.k << ',' << format_g17(r.f) << ',' << format_g17(r.grad_norm) << ','
           << format_g17(r.alpha) << ',' << format_g17(r.safeguarded_alpha) << ',' << r.backtracks
           << ',' << r.fevals << '\n';
    }
    os << "# termination=" << to_string(trace.termination) << '\n';
    os << "# final_x=";
    for (Eigen::Index i = 0; i < trace.final_x.size(); ++i)
        os << (i ? "," : "") << format_g17(trace.final_x[i]);
    os << '\n';
}

void write_trace_json(std::ostream& os, const RunTrace& trace)
{
    nlohmann::json j;
    j["format"] = "stlsbb-trace v1";
    j["policy"] = trace.policy;
    j["alpha0"] = trace.alpha0;
    j["alpha0_rule"] = trace.alpha0_rule;
    j["stop_rule"] = trace.stop_rule;
    j["termination"] = std::string(to_string(trace.termination));
    j["iterations"] = trace.iterations();
    j["final_x"] = std::vector<double>(trace.final_x.data(), trace.final_x.data() + trace.final_x.size());
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& r : trace.rows) {
        rows.push_back({{"k", r.k},
                        {"f", r.f},
                        {"grad_norm", r.grad_norm},
                        {"alpha", r.alpha},
                        {"safeguarded_alpha", r.safeguarded_alpha},
                        {"backtracks", r.backtracks},
                        {"fevals", r.fevals}});
    }
    os << j.dump(1) << '\n';
}

namespace {

double to_real(const std::string& field)
{
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw Error(Errc::parse_error, "trace: bad number '" + field + "'");
    return v;
}

std::size_t to_count(const std::string& field)
{
    char* end = nullptr;
    const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
    if (end == field.c_str() || *end != '\0')
        throw Error(Errc::parse_error, "trace: bad count '" + field + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

} // namespace

RunTrace read_trace_csv(std::istream& is)
{
    RunTrace trace;
    std::string line;
    bool saw_header = false;
    bool saw_termination = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "policy")
                trace.policy = value;
            else if (key == "alpha0")
                trace.alpha0 = to_real(value);
            else if (key == "alpha0_rule")
                trace.alpha0_rule = value;
            else if (key == "stop_rule")
                trace.stop_rule = value;
            else if (key == "termination") {
                trace.termination = termination_from_string(value);
                saw_termination = true;
            } else if (key == "final_x") {
                const auto parts = value.empty() ? std::vector<std::string>{} : split(value, ',');
                trace.final_x.resize(static_cast<Eigen::Index>(parts.size()));
                for (std::size_t i = 0; i < parts.size(); ++i)
                    trace.final_x[static_cast<Eigen::Index>(i)] = to_real(parts[i]);
            }
            continue;
        }
        if (!saw_header) {
            if (line != "k,f,grad_norm,alpha,safeguarded_alpha,backtracks,fevals")
                throw Error(Errc::parse_error, "trace: unexpected column header");
            saw_header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7)
            throw Error(Errc::parse_error, "trace: expected 7 fields per row");
        trace.rows.push_back({to_count(f[0]), to_real(f[1]), to_real(f[2]), to_real(f[3]),
                              to_real(f[4]), to_count(f[5]), to_count(f[6])});
    }
    if (!saw_header || trace.rows.empty() || !saw_termination)
        throw Error(Errc::parse_error, "trace: incomplete file");
    return trace;
}

} // namespace stlsbb
