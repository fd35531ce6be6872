#ifndef NESTLOC_CLI_HPP
#define NESTLOC_CLI_HPP

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <nestloc/harness.hpp>

namespace nestloc
{

enum exit_code : int { exit_pass = 0, exit_math_failure = 1, exit_config_error = 2, exit_internal_error = 3 };

namespace detail
{

inline int parse_int(const std::string &tok, const std::string &what)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used == tok.size()) {
            return v;
        }
    } catch (const std::exception &) {
    }
    throw config_error("malformed " + what + " '" + tok + "'");
}

// "2,1" -> {2,1}
inline std::vector<int> parse_int_list(const std::string &text, const std::string &what)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(parse_int(tok, what));
    }
    if (out.empty()) {
        throw config_error("empty " + what);
    }
    return out;
}

// "2", "1,2" or "1..3"
inline std::vector<int> parse_int_range(const std::string &text, const std::string &what)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        return parse_int_list(text, what);
    }
    const int lo = parse_int(text.substr(0, dots), what);
    const int hi = parse_int(text.substr(dots + 2), what);
    if (hi < lo) {
        throw config_error("empty range " + what + " '" + text + "'");
    }
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) {
        out.push_back(v);
    }
    return out;
}

inline std::vector<std::string> split_labels(const std::string &text)
{
    // Bundle labels contain commas inside parentheses: "O(1,0),O(0,1)".
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        depth += (c == '(') - (c == ')');
        cur += c;
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

struct cli_flags {
    std::string surface;
    std::string n;
    std::string i;
    std::string battery;
    std::string twists;
    int samples = 0;
    std::uint64_t seed = 0;
    int truncation = 0;
    unsigned jobs = 0;
    std::string out;
    std::string format = "json";
    std::string config;
    std::string insertions;
    std::string inject;
    bool no_timing = false;
    // Which of the above were given on the command line.
    std::vector<std::string> given;

    bool has(const std::string &name) const
    {
        return std::find(given.begin(), given.end(), name) != given.end();
    }
};

inline void apply_flags(scenario &s, const cli_flags &f)
{
    if (f.has("surface")) {
        s.surface = f.surface;
    }
    if (f.has("n")) {
        s.sizes = parse_int_list(f.n, "--n");
    }
    if (f.has("i")) {
        s.i_values = parse_int_range(f.i, "--i");
    }
    if (f.has("battery")) {
        s.battery = split_labels(f.battery);
    }
    if (f.has("twists")) {
        s.twists = split_labels(f.twists);
    }
    if (f.has("samples")) {
        s.samples = f.samples;
    }
    if (f.has("seed")) {
        s.seed = f.seed;
    }
    if (f.has("truncation")) {
        s.truncation = f.truncation;
    }
    if (f.has("jobs")) {
        s.jobs = f.jobs;
    }
    if (f.has("insertions")) {
        s.insertions = f.insertions;
    }
    if (f.has("inject")) {
        s.inject = parse_fault(f.inject);
    }
    if (f.no_timing) {
        s.timing = false;
    }
}

// Scenarios run by `all` without a config file: a quick sweep of every kind.
inline std::vector<scenario> default_suite()
{
    std::vector<scenario> out;
    const auto add = [&](scenario_kind k, const std::string &surface, std::vector<int> sizes) {
        scenario s;
        s.kind = k;
        s.surface = surface;
        s.sizes = std::move(sizes);
        out.push_back(s);
    };
    for (const std::string surface : {"p2", "p1xp1"}) {
        add(scenario_kind::euler_count, surface, {1, 2, 3});
        add(scenario_kind::hrr_check, surface, {});
        add(scenario_kind::vanish, surface, {2, 1});
        add(scenario_kind::twisted_vanish, surface, {2, 1});
        add(scenario_kind::pushforward, surface, {2, 1});
    }
    add(scenario_kind::kstep, "p2", {2, 1, 1});
    add(scenario_kind::symbolic_tp, "p2", {});
    add(scenario_kind::serre_duality, "p2", {4});
    return out;
}

} // namespace detail

// Entry point of the `nestloc` tool. Exit codes: 0 every case passed,
// 1 a mathematical check failed, 2 configuration error, 3 internal error.
inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Exact localization checks for nested Hilbert schemes of points on toric surfaces", "nestloc"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);
    detail::cli_flags flags;

    std::vector<std::pair<CLI::App *, std::string>> commands;
    for (const auto &[kind, name] : scenario_kind_names()) {
        commands.emplace_back(app.add_subcommand(name), name);
    }
    commands.emplace_back(app.add_subcommand("all", "Run the default suite, or every scenario of --config"), "all");

    std::vector<std::pair<std::string, CLI::Option *>> options;
    for (auto &[sub, name] : commands) {
        const auto opt = [&](const std::string &flag, auto &target, const std::string &help) {
            options.emplace_back(flag, sub->add_option("--" + flag, target, help));
        };
        opt("surface", flags.surface, "p2 or p1xp1");
        opt("n", flags.n, "comma-separated sizes n1,n2,...");
        opt("i", flags.i, "vanishing index: int, list or a..b");
        opt("battery", flags.battery, "line bundles for insertions, e.g. O,O(1)");
        opt("twists", flags.twists, "twisting line bundles for twisted-vanish");
        opt("samples", flags.samples, "weight specializations per integral");
        opt("seed", flags.seed, "sampler seed");
        opt("truncation", flags.truncation, "degree bound for symbolic checks");
        opt("jobs", flags.jobs, "worker threads");
        opt("out", flags.out, "write the report here instead of stdout");
        opt("insertions", flags.insertions, "auto or file:<path>");
        opt("inject", flags.inject, "deliberate fault (euler-count only)");
        opt("config", flags.config, "JSON scenario file");
        sub->add_option("--format", flags.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_flag("--no-timing", flags.no_timing, "report zero timings (byte-stable output)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return exit_pass;
    } catch (const CLI::CallForVersion &e) {
        app.exit(e, out, err);
        return exit_pass;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return exit_config_error;
    }
    for (const auto &[name, option] : options) {
        if (option->count() > 0) {
            flags.given.push_back(name);
        }
    }
    std::string command;
    for (const auto &[sub, name] : commands) {
        if (sub->parsed()) {
            command = name;
        }
    }

    std::vector<scenario> scenarios;
    try {
        if (!flags.config.empty()) {
            for (auto &s : parse_config(flags.config)) {
                if (command == "all" || to_string(s.kind) == command) {
                    scenarios.push_back(std::move(s));
                }
            }
            if (scenarios.empty()) {
                throw config_error(flags.config + ": no scenarios of kind " + command);
            }
        } else if (command == "all") {
            scenarios = detail::default_suite();
        } else {
            scenario s;
            s.kind = parse_scenario_kind(command);
            scenarios.push_back(s);
        }
        for (auto &s : scenarios) {
            detail::apply_flags(s, flags);
            s = with_defaults(s);
            validate(s);
        }
    } catch (const error &e) {
        err << "nestloc: " << e.what() << "\n";
        return exit_config_error;
    }

    std::vector<report> reports;
    try {
        for (const auto &s : scenarios) {
            reports.push_back(run_scenario(s));
        }
        emit_report(reports, flags.format == "text" ? report_format::text : report_format::json, flags.out, out);
    } catch (const config_error &e) {
        err << "nestloc: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception &e) {
        err << "nestloc: internal error: " << e.what() << "\n";
        return exit_internal_error;
    }
    bool pass = true;
    for (const auto &r : reports) {
        if (!r.pass) {
            pass = false;
            for (const auto &c : r.cases) {
                if (!c.pass) {
                    err << r.scenario << ": " << c.inputs.dump() << ": " << c.diagnostic << "\n";
                }
            }
        }
    }
    return pass ? exit_pass : exit_math_failure;
}

} // namespace nestloc

#endif
