#ifndef NESTLOC_HARNESS_HPP
#define NESTLOC_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <nestloc/chern_calculus.hpp>
#include <nestloc/combinatorics.hpp>
#include <nestloc/errors.hpp>
#include <nestloc/integrals.hpp>
#include <nestloc/toric.hpp>
#include <nestloc/vertex.hpp>

namespace nestloc
{

inline constexpr const char *version = "nestloc 1.0.0";
inline constexpr std::uint64_t default_seed = 20190311;

using json = nlohmann::json;

enum class scenario_kind { vanish, twisted_vanish, pushforward, kstep, symbolic_tp, euler_count, hrr_check, serre_duality };

inline const std::vector<std::pair<scenario_kind, std::string>> &scenario_kind_names()
{
    static const std::vector<std::pair<scenario_kind, std::string>> names = {
        {scenario_kind::vanish, "vanish"},
        {scenario_kind::twisted_vanish, "twisted-vanish"},
        {scenario_kind::pushforward, "pushforward"},
        {scenario_kind::kstep, "kstep"},
        {scenario_kind::symbolic_tp, "symbolic-tp"},
        {scenario_kind::euler_count, "euler-count"},
        {scenario_kind::hrr_check, "hrr-check"},
        {scenario_kind::serre_duality, "serre-duality"},
    };
    return names;
}

inline std::string to_string(scenario_kind k)
{
    for (const auto &[kind, name] : scenario_kind_names()) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

inline scenario_kind parse_scenario_kind(const std::string &s)
{
    for (const auto &[kind, name] : scenario_kind_names()) {
        if (name == s) {
            return kind;
        }
    }
    throw config_error("unknown scenario kind '" + s + "'");
}

// Deliberate faults for exercising the failure paths end to end.
enum class fault { none, zero_weight, degree_mismatch, spec_dependence, non_generic };

inline const std::vector<std::pair<fault, std::string>> &fault_names()
{
    static const std::vector<std::pair<fault, std::string>> names = {
        {fault::none, "none"},
        {fault::zero_weight, "zero-weight"},
        {fault::degree_mismatch, "degree-mismatch"},
        {fault::spec_dependence, "spec-dependence"},
        {fault::non_generic, "non-generic"},
    };
    return names;
}

inline std::string to_string(fault f)
{
    for (const auto &[kind, name] : fault_names()) {
        if (kind == f) {
            return name;
        }
    }
    return "?";
}

inline fault parse_fault(const std::string &s)
{
    for (const auto &[kind, name] : fault_names()) {
        if (name == s) {
            return kind;
        }
    }
    throw config_error("unknown fault '" + s + "'");
}

struct scenario {
    scenario_kind kind = scenario_kind::vanish;
    std::string surface = "p2";
    // Hilbert scheme sizes; for serre-duality the maximal partition size.
    std::vector<int> sizes;
    std::vector<int> i_values;
    // Line bundle labels for tautological insertions (hrr-check: bundles to
    // check). Empty means the surface default.
    std::vector<std::string> battery;
    std::vector<std::string> twists;
    int truncation = 8;
    int samples = 3;
    std::uint64_t seed = default_seed;
    unsigned jobs = 1;
    // "auto" or "file:<path>".
    std::string insertions = "auto";
    bool timing = true;
    fault inject = fault::none;
};

// Fills in per-kind defaults for unset parameters.
inline scenario with_defaults(scenario s)
{
    if (s.sizes.empty()) {
        switch (s.kind) {
        case scenario_kind::vanish:
        case scenario_kind::twisted_vanish:
        case scenario_kind::pushforward:
            s.sizes = {2, 1};
            break;
        case scenario_kind::kstep:
            s.sizes = {2, 1, 1};
            break;
        case scenario_kind::euler_count:
            s.sizes = {2};
            break;
        case scenario_kind::serre_duality:
            s.sizes = {4};
            break;
        case scenario_kind::symbolic_tp:
        case scenario_kind::hrr_check:
            break;
        }
    }
    if (s.i_values.empty() &&
        (s.kind == scenario_kind::vanish || s.kind == scenario_kind::twisted_vanish)) {
        s.i_values = {1, 2};
    }
    return s;
}

// Throws config_error for anything that would make the scenario meaningless.
inline void validate(const scenario &s)
{
    const auto fail = [&](const std::string &msg) { throw config_error(to_string(s.kind) + ": " + msg); };
    toric_surface surf = p2();
    try {
        surf = surface_by_name(s.surface);
    } catch (const error &e) {
        fail(e.what());
    }
    if (s.samples < 2) {
        fail("--samples must be at least 2");
    }
    if (s.jobs < 1) {
        fail("--jobs must be at least 1");
    }
    if (s.truncation < 1) {
        fail("--truncation must be at least 1");
    }
    for (int n : s.sizes) {
        if (n < 0) {
            fail("sizes must be nonnegative");
        }
    }
    const auto monotone = [&] {
        try {
            validate_nested_sizes(s.sizes);
        } catch (const error &e) {
            fail(e.what());
        }
    };
    for (const auto &label : s.battery) {
        try {
            parse_line_bundle(surf, label);
        } catch (const error &e) {
            fail(e.what());
        }
    }
    for (const auto &label : s.twists) {
        try {
            parse_line_bundle(surf, label);
        } catch (const error &e) {
            fail(e.what());
        }
    }
    if (s.insertions != "auto" && s.insertions.rfind("file:", 0) != 0) {
        fail("--insertions must be 'auto' or 'file:<path>'");
    }
    switch (s.kind) {
    case scenario_kind::vanish:
    case scenario_kind::twisted_vanish:
        if (s.sizes.size() != 2) {
            fail("needs exactly two sizes n1,n2");
        }
        monotone();
        if (s.i_values.empty()) {
            fail("needs at least one i");
        }
        for (int i : s.i_values) {
            if (i < 1) {
                fail("i must be positive");
            }
            if (i > s.sizes[0] + s.sizes[1]) {
                fail("i = " + std::to_string(i) + " leaves negative insertion degree n1+n2-i");
            }
        }
        break;
    case scenario_kind::pushforward:
        if (s.sizes.size() != 2) {
            fail("needs exactly two sizes n1,n2");
        }
        monotone();
        break;
    case scenario_kind::kstep:
        if (s.sizes.size() < 2) {
            fail("needs at least two sizes");
        }
        monotone();
        break;
    case scenario_kind::euler_count:
        if (s.sizes.empty()) {
            fail("needs at least one n");
        }
        break;
    case scenario_kind::serre_duality:
        if (s.sizes.size() != 1) {
            fail("needs one maximal partition size");
        }
        break;
    case scenario_kind::symbolic_tp:
    case scenario_kind::hrr_check:
        break;
    }
    if (s.inject != fault::none && s.kind != scenario_kind::euler_count) {
        fail("--inject is only supported for euler-count");
    }
}

struct sample_record {
    // Specialization (or cocharacter) the value was computed at.
    std::vector<std::string> s;
    std::string value;
    // Additional named values (e.g. the virtual side of an identity).
    json extra = json::object();

    friend bool operator==(const sample_record &, const sample_record &) = default;
};

struct case_record {
    json inputs = json::object();
    std::vector<sample_record> samples;
    bool pass = false;
    std::string diagnostic;
    long elapsed_ms = 0;

    friend bool operator==(const case_record &, const case_record &) = default;
};

struct report {
    std::string scenario;
    json params = json::object();
    std::vector<case_record> cases;
    bool pass = false;
    long elapsed_ms = 0;
    std::uint64_t seed = 0;
    std::string version;

    friend bool operator==(const report &, const report &) = default;
};

inline json params_json(const scenario &s)
{
    json p;
    p["surface"] = s.surface;
    if (!s.sizes.empty()) {
        p["n"] = s.sizes;
    }
    if (!s.i_values.empty()) {
        p["i"] = s.i_values;
    }
    if (!s.battery.empty()) {
        p["battery"] = s.battery;
    }
    if (!s.twists.empty()) {
        p["twists"] = s.twists;
    }
    p["truncation"] = s.truncation;
    p["samples"] = s.samples;
    p["insertions"] = s.insertions;
    if (s.inject != fault::none) {
        p["inject"] = to_string(s.inject);
    }
    return p;
}

inline json to_json(const report &r)
{
    json j;
    j["scenario"] = r.scenario;
    j["params"] = r.params;
    json cases = json::array();
    for (const auto &c : r.cases) {
        json cj;
        cj["inputs"] = c.inputs;
        json samples = json::array();
        for (const auto &smp : c.samples) {
            json sj = smp.extra;
            sj["s"] = smp.s;
            sj["value"] = smp.value;
            samples.push_back(std::move(sj));
        }
        cj["samples"] = std::move(samples);
        cj["verdict"] = c.pass ? "pass" : "fail";
        if (!c.diagnostic.empty()) {
            cj["diagnostic"] = c.diagnostic;
        }
        cj["elapsed_ms"] = c.elapsed_ms;
        cases.push_back(std::move(cj));
    }
    j["cases"] = std::move(cases);
    j["verdict"] = r.pass ? "pass" : "fail";
    j["elapsed_ms"] = r.elapsed_ms;
    j["seed"] = r.seed;
    j["version"] = r.version;
    return j;
}

inline report report_from_json(const json &j)
{
    report r;
    r.scenario = j.at("scenario").get<std::string>();
    r.params = j.at("params");
    for (const auto &cj : j.at("cases")) {
        case_record c;
        c.inputs = cj.at("inputs");
        for (const auto &sj : cj.at("samples")) {
            sample_record smp;
            smp.s = sj.at("s").get<std::vector<std::string>>();
            smp.value = sj.at("value").get<std::string>();
            for (const auto &[key, val] : sj.items()) {
                if (key != "s" && key != "value") {
                    smp.extra[key] = val;
                }
            }
            c.samples.push_back(std::move(smp));
        }
        c.pass = cj.at("verdict").get<std::string>() == "pass";
        if (cj.contains("diagnostic")) {
            c.diagnostic = cj.at("diagnostic").get<std::string>();
        }
        c.elapsed_ms = cj.at("elapsed_ms").get<long>();
        r.cases.push_back(std::move(c));
    }
    r.pass = j.at("verdict").get<std::string>() == "pass";
    r.elapsed_ms = j.at("elapsed_ms").get<long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();
    return r;
}

// Parses one tautological monomial, e.g. `c1(taut(O(1))@1)*c2(taut(O)@2)`,
// or `1` for the empty insertion. Factor indices are 1-based.
inline insertion parse_insertion(const toric_surface &s, const std::string &text)
{
    insertion ins;
    if (text == "1") {
        return ins;
    }
    const auto fail = [&] { throw config_error("malformed insertion '" + text + "'"); };
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] != 'c') {
            fail();
        }
        const auto open = text.find("(taut(", pos);
        if (open == std::string::npos) {
            fail();
        }
        int degree = 0;
        try {
            degree = std::stoi(text.substr(pos + 1, open - pos - 1));
        } catch (const std::exception &) {
            fail();
        }
        const auto at = text.find(")@", open);
        if (at == std::string::npos) {
            fail();
        }
        const auto label = text.substr(open + 6, at - open - 6);
        const auto close = text.find(')', at + 2);
        if (close == std::string::npos) {
            fail();
        }
        int factor = 0;
        try {
            factor = std::stoi(text.substr(at + 2, close - at - 2));
        } catch (const std::exception &) {
            fail();
        }
        if (factor < 1 || degree < 0) {
            fail();
        }
        eq_line_bundle L;
        try {
            L = parse_line_bundle(s, label);
        } catch (const error &) {
            fail();
        }
        ins.factors.push_back({{class_kind::taut, factor - 1, 0, L}, degree});
        pos = close + 1;
        if (pos < text.size()) {
            if (text[pos] != '*') {
                fail();
            }
            ++pos;
        }
    }
    return ins;
}

// One insertion per non-blank line; '#' starts a comment.
inline std::vector<insertion> read_insertions(const toric_surface &s, const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open insertion file '" + path + "'");
    }
    std::vector<insertion> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::string compact;
        for (char c : line) {
            if (c != ' ' && c != '\t' && c != '\r') {
                compact += c;
            }
        }
        if (compact.empty()) {
            continue;
        }
        try {
            out.push_back(parse_insertion(s, compact));
        } catch (const config_error &e) {
            throw config_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

namespace detail
{

using clock = std::chrono::steady_clock;

inline long elapsed_since(clock::time_point start, bool timing)
{
    if (!timing) {
        return 0;
    }
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count());
}

inline std::string diagnostic_of(const error &e)
{
    return std::string(e.name()) + ": " + e.what();
}

inline std::vector<eq_line_bundle> resolve_bundles(const toric_surface &surf, const std::vector<std::string> &labels,
                                                   std::vector<eq_line_bundle> fallback)
{
    if (labels.empty()) {
        return fallback;
    }
    std::vector<eq_line_bundle> out;
    for (const auto &l : labels) {
        out.push_back(parse_line_bundle(surf, l));
    }
    return out;
}

inline std::vector<insertion> resolve_insertions(const scenario &sc, const toric_surface &surf,
                                                 const std::vector<int> &sizes, int degree)
{
    if (sc.insertions == "auto") {
        return insertion_basis(sizes, degree, resolve_bundles(surf, sc.battery, default_battery(surf)));
    }
    std::vector<insertion> out;
    for (auto &ins : read_insertions(surf, sc.insertions.substr(5))) {
        if (ins.total_degree() == degree) {
            out.push_back(std::move(ins));
        }
    }
    return out;
}

inline sample_record make_sample(const weight_spec &spec, const rational &value)
{
    return {{to_string(spec.s1), to_string(spec.s2)}, to_string(value), json::object()};
}

// Evaluates a batch of integrals at `samples` specs and turns every entry
// into a case, judged by `judge(values across samples)`.
struct batch_plan {
    std::vector<json> inputs;
    // Returns one value vector per case; may carry a second (paired) vector.
    std::function<std::vector<std::vector<rational>>(const weight_spec &)> compute;
    std::vector<std::string> value_names; // names of the paired values; first is "value"
    std::function<std::string(const std::vector<std::vector<rational>> &)> judge; // per case: [sample][value]
};

inline void run_batch(const scenario &sc, spec_sampler &sampler, const batch_plan &plan, std::vector<case_record> &out)
{
    const auto start = clock::now();
    const std::size_t ncases = plan.inputs.size();
    const std::size_t width = plan.value_names.size();
    std::vector<case_record> cases(ncases);
    for (std::size_t c = 0; c < ncases; ++c) {
        cases[c].inputs = plan.inputs[c];
    }
    try {
        // Flatten the paired values so sample_batch can retry as a unit.
        const auto flat = sample_batch(
            [&](const weight_spec &spec) {
                const auto values = plan.compute(spec);
                std::vector<rational> f;
                f.reserve(ncases * width);
                for (std::size_t v = 0; v < width; ++v) {
                    f.insert(f.end(), values[v].begin(), values[v].end());
                }
                return f;
            },
            sampler, sc.samples);
        for (std::size_t c = 0; c < ncases; ++c) {
            std::vector<std::vector<rational>> per_sample;
            for (std::size_t k = 0; k < flat.specs.size(); ++k) {
                auto rec = make_sample(flat.specs[k], flat.values[k][c]);
                std::vector<rational> vals{flat.values[k][c]};
                for (std::size_t v = 1; v < width; ++v) {
                    const auto &x = flat.values[k][v * ncases + c];
                    rec.extra[plan.value_names[v]] = to_string(x);
                    vals.push_back(x);
                }
                cases[c].samples.push_back(std::move(rec));
                per_sample.push_back(std::move(vals));
            }
            cases[c].diagnostic = plan.judge(per_sample);
            cases[c].pass = cases[c].diagnostic.empty();
        }
    } catch (const error &e) {
        if (!e.is_mathematical()) {
            throw;
        }
        for (auto &c : cases) {
            c.pass = false;
            c.diagnostic = diagnostic_of(e);
        }
    }
    const long ms = elapsed_since(start, sc.timing);
    for (auto &c : cases) {
        // Batched cases share one timing: the batch total.
        c.elapsed_ms = ms;
        out.push_back(std::move(c));
    }
}

// Every sample of value 0 equal to `expected` (and to each other).
inline std::function<std::string(const std::vector<std::vector<rational>> &)> expect_constant(
    std::optional<rational> expected)
{
    return [expected](const std::vector<std::vector<rational>> &samples) -> std::string {
        for (std::size_t k = 1; k < samples.size(); ++k) {
            if (samples[k][0] != samples[0][0]) {
                return "SpecDependence: value " + to_string(samples[k][0]) + " differs from " +
                       to_string(samples[0][0]);
            }
        }
        if (expected && samples[0][0] != *expected) {
            return "IdentityViolated: value " + to_string(samples[0][0]) + " != expected " + to_string(*expected);
        }
        return {};
    };
}

// Paired identity: value == second value at every sample, spec independent.
inline std::string judge_pair(const std::vector<std::vector<rational>> &samples)
{
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k][0] != samples[k][1]) {
            return "IdentityViolated: ambient " + to_string(samples[k][0]) + " != virtual " +
                   to_string(samples[k][1]);
        }
        if (samples[k][0] != samples[0][0]) {
            return "SpecDependence: value " + to_string(samples[k][0]) + " differs from " + to_string(samples[0][0]);
        }
    }
    return {};
}

inline json sizes_json(const std::vector<int> &sizes)
{
    return json(sizes);
}

inline void run_vanish(const scenario &sc, const toric_surface &surf, spec_sampler &sampler, bool twisted,
                       std::vector<case_record> &out)
{
    const int n1 = sc.sizes[0];
    const int n2 = sc.sizes[1];
    std::vector<eq_line_bundle> twists = {trivial_bundle(surf)};
    if (twisted) {
        twists = resolve_bundles(surf, sc.twists, default_twists(surf));
    }
    const integration_options opt{true, sc.jobs};
    const auto points = multipartitions(surf, n1).size() * multipartitions(surf, n2).size();
    for (const auto &L : twists) {
        for (int i : sc.i_values) {
            const auto phis = resolve_insertions(sc, surf, sc.sizes, n1 + n2 - i);
            const insertion prefix = co_chern_class(L, 0, 1, n1 + n2 + i);
            batch_plan plan;
            for (const auto &phi : phis) {
                plan.inputs.push_back({{"n", sizes_json(sc.sizes)},
                                       {"i", i},
                                       {"twist", L.label},
                                       {"integrand", to_string(prefix.times(phi))},
                                       {"fixed_points", points}});
            }
            plan.value_names = {"value"};
            plan.compute = [&, prefix](const weight_spec &spec) {
                return std::vector<std::vector<rational>>{
                    integrate_ambient_batch(surf, sc.sizes, prefix, phis, spec, opt)};
            };
            plan.judge = expect_constant(rational(0));
            run_batch(sc, sampler, plan, out);
        }
    }
}

// Ambient integral of prod_i c_{n_i+n_{i+1}}(E_{i,i+1}) * phi against the
// virtual integral of phi over the nested Hilbert scheme.
inline void run_pushforward(const scenario &sc, const toric_surface &surf, spec_sampler &sampler,
                            std::vector<case_record> &out)
{
    insertion prefix;
    for (std::size_t i = 0; i + 1 < sc.sizes.size(); ++i) {
        prefix = prefix.times(co_chern_class(trivial_bundle(surf), static_cast<int>(i), static_cast<int>(i) + 1,
                                             sc.sizes[i] + sc.sizes[i + 1]));
    }
    const auto phis = resolve_insertions(sc, surf, sc.sizes, virtual_dimension(sc.sizes));
    const integration_options opt{true, sc.jobs};
    std::size_t points = 1;
    for (int n : sc.sizes) {
        points *= multipartitions(surf, n).size();
    }
    const auto chains = nested_chains(surf, sc.sizes).size();
    batch_plan plan;
    for (const auto &phi : phis) {
        plan.inputs.push_back({{"n", sizes_json(sc.sizes)},
                               {"insertion", to_string(phi)},
                               {"ambient_integrand", to_string(prefix.times(phi))},
                               {"fixed_points", points},
                               {"nested_chains", chains}});
    }
    plan.value_names = {"value", "virtual"};
    plan.compute = [&](const weight_spec &spec) {
        return std::vector<std::vector<rational>>{integrate_ambient_batch(surf, sc.sizes, prefix, phis, spec, opt),
                                                  integrate_virtual_batch(surf, sc.sizes, {}, phis, spec, opt)};
    };
    plan.judge = judge_pair;
    run_batch(sc, sampler, plan, out);
}

inline void run_euler_count(const scenario &sc, const toric_surface &surf, spec_sampler &sampler,
                            std::vector<case_record> &out)
{
    for (int n : sc.sizes) {
        const auto count = multipartitions(surf, n).size();
        const integration_options opt{sc.inject != fault::spec_dependence, sc.jobs};
        insertion integrand = tangent_class(0, 2 * n);
        if (sc.inject == fault::degree_mismatch || sc.inject == fault::spec_dependence) {
            integrand = integrand.times(taut_class(line_bundle(surf, surf.family() == surface_family::p2
                                                                         ? std::vector<long>{1}
                                                                         : std::vector<long>{1, 1}),
                                                   0, 1));
        }
        batch_plan plan;
        plan.inputs.push_back({{"n", n}, {"integrand", to_string(integrand)}, {"fixed_points", count}});
        plan.value_names = {"value"};
        plan.compute = [&, n, integrand](const weight_spec &spec) -> std::vector<std::vector<rational>> {
            if (sc.inject == fault::zero_weight) {
                // Tangent character with a spurious trivial summand.
                const auto mp = multipartitions(surf, n).front();
                auto bad = tangent_char(surf, mp).value() + laurent_poly::constant(1);
                return {{euler_class(bad, spec, "synthetic character at " + to_string(mp))}};
            }
            return {{integrate_ambient(surf, {n}, integrand, spec, opt)}};
        };
        plan.judge = expect_constant(rational(static_cast<long>(count)));
        if (sc.inject == fault::non_generic) {
            // Specs on the diagonal s1 = s2 kill the weight t1 t2^{-1}.
            spec_sampler degenerate(sc.seed);
            const auto base = plan.compute;
            plan.compute = [base](const weight_spec &spec) { return base({spec.s1, spec.s1}); };
            run_batch(sc, degenerate, plan, out);
            continue;
        }
        run_batch(sc, sampler, plan, out);
    }
}

inline void run_hrr_check(const scenario &sc, const toric_surface &surf, spec_sampler &sampler,
                          std::vector<case_record> &out)
{
    std::vector<std::pair<eq_line_bundle, integer>> battery;
    const auto expected = [&](const eq_line_bundle &L) -> integer {
        // chi from the polytope: (d+1)(d+2)/2 on P^2, (a+1)(b+1) on P^1 x P^1,
        // read back from the fibre weight over the far corner.
        if (surf.family() == surface_family::p2) {
            const long d = L.weights[1].a;
            return integer((d + 1) * (d + 2) / 2);
        }
        const auto &far = L.weights[3];
        return integer((far.a + 1) * (far.b + 1));
    };
    if (sc.battery.empty()) {
        if (surf.family() == surface_family::p2) {
            for (long d = 0; d <= 3; ++d) {
                battery.emplace_back(line_bundle(surf, {d}), 0);
            }
        } else {
            for (long a = 0; a <= 2; ++a) {
                for (long b = 0; b <= 2; ++b) {
                    battery.emplace_back(line_bundle(surf, {a, b}), 0);
                }
            }
        }
    } else {
        for (const auto &label : sc.battery) {
            battery.emplace_back(parse_line_bundle(surf, label), 0);
        }
    }
    for (auto &[L, chi] : battery) {
        chi = expected(L);
    }
    // Cohomological route at sampled specs.
    batch_plan plan;
    for (const auto &[L, chi] : battery) {
        plan.inputs.push_back({{"bundle", L.label}, {"expected", to_string(chi)}, {"route", "cohomological"}});
    }
    plan.value_names = {"value"};
    plan.compute = [&](const weight_spec &spec) {
        std::vector<rational> v;
        for (const auto &[L, chi] : battery) {
            v.push_back(hrr_check(surf, L, spec));
        }
        return std::vector<std::vector<rational>>{v};
    };
    const std::size_t first = out.size();
    plan.judge = [](const std::vector<std::vector<rational>> &) { return std::string(); };
    run_batch(sc, sampler, plan, out);
    for (std::size_t c = 0; c < battery.size(); ++c) {
        auto &rec = out[first + c];
        if (!rec.pass && !rec.diagnostic.empty()) {
            continue;
        }
        rec.diagnostic = expect_constant(rational(battery[c].second))([&] {
            std::vector<std::vector<rational>> s;
            for (const auto &smp : rec.samples) {
                s.push_back({parse_rational(smp.value)});
            }
            return s;
        }());
        rec.pass = rec.diagnostic.empty();
    }
    // K-theoretic route along generic one-parameter subgroups.
    std::mt19937_64 rng(sc.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<exponent> sigmas;
    while (static_cast<int>(sigmas.size()) < sc.samples) {
        exponent sig{static_cast<long>(rng() % 97) + 1, static_cast<long>(rng() % 97) + 1};
        if (rng() & 1ULL) {
            sig.b = -sig.b;
        }
        bool generic = true;
        for (const auto &c : surf.charts()) {
            for (const auto &w : {c.w1, c.w2}) {
                generic = generic && (w.a * sig.a + w.b * sig.b != 0);
            }
        }
        if (generic && std::find(sigmas.begin(), sigmas.end(), sig) == sigmas.end()) {
            sigmas.push_back(sig);
        }
    }
    for (const auto &[L, chi] : battery) {
        const auto start = clock::now();
        case_record rec;
        rec.inputs = {{"bundle", L.label}, {"expected", to_string(chi)}, {"route", "k-theoretic"}};
        rec.pass = true;
        try {
            for (const auto &sig : sigmas) {
                const integer v = hrr_k_theoretic(surf, L, sig);
                rec.samples.push_back({{std::to_string(sig.a), std::to_string(sig.b)}, to_string(v), json::object()});
                if (v != chi) {
                    rec.pass = false;
                    rec.diagnostic = "IdentityViolated: chi = " + to_string(v) + " != expected " + to_string(chi);
                }
            }
        } catch (const error &e) {
            rec.pass = false;
            rec.diagnostic = diagnostic_of(e);
        }
        rec.elapsed_ms = elapsed_since(start, sc.timing);
        out.push_back(std::move(rec));
    }
}

inline void symbolic_case(const scenario &sc, json inputs, const std::function<std::string()> &check,
                          std::vector<case_record> &out)
{
    const auto start = clock::now();
    case_record rec;
    rec.inputs = std::move(inputs);
    try {
        rec.diagnostic = check();
    } catch (const error &e) {
        rec.diagnostic = diagnostic_of(e);
    }
    rec.pass = rec.diagnostic.empty();
    rec.samples.push_back({{}, rec.pass ? "true" : "false", json::object()});
    rec.elapsed_ms = elapsed_since(start, sc.timing);
    out.push_back(std::move(rec));
}

inline std::string mismatch(const graded_element &lhs, const graded_element &rhs)
{
    if (lhs == rhs) {
        return {};
    }
    return "IdentityViolated: " + to_string(lhs) + " != " + to_string(rhs);
}

inline void run_symbolic_tp(const scenario &sc, std::vector<case_record> &out)
{
    const int N = sc.truncation;
    // Delta^1_b = c_b and Delta^a_0 = 1 for a virtual class with free Chern classes.
    symbolic_case(sc, {{"identity", "Delta^1_b = c_b"}, {"b", "0.." + std::to_string(N)}}, [&] {
        formal_ring ring(N);
        const auto f = generic_bundle(ring, "F", -1);
        for (int b = 0; b <= N; ++b) {
            if (auto m = mismatch(thom_porteous(1, b, f.total()), f.c(b)); !m.empty()) {
                return "b = " + std::to_string(b) + ": " + m;
            }
        }
        return std::string();
    }, out);
    symbolic_case(sc, {{"identity", "Delta^a_0 = 1"}, {"a", "1.." + std::to_string(N)}}, [&] {
        formal_ring ring(N);
        const auto f = generic_bundle(ring, "F", -1);
        for (int a = 1; a <= N; ++a) {
            if (auto m = mismatch(thom_porteous(a, 0, f.total()), ring.one()); !m.empty()) {
                return "a = " + std::to_string(a) + ": " + m;
            }
        }
        return std::string();
    }, out);
    for (long r0 = 1; r0 <= 3; ++r0) {
        for (long r1 = 0; r1 <= 5; ++r1) {
            for (int i = 0; i <= 3; ++i) {
                if (r1 - r0 + 1 + i > N) {
                    continue;
                }
                symbolic_case(sc, {{"identity", "higher Thom-Porteous"}, {"r0", r0}, {"r1", r1}, {"i", i}}, [&] {
                    const auto sides = higher_tp(r0, r1, i, N);
                    return mismatch(sides.pushforward, sides.chern);
                }, out);
            }
        }
    }
    for (int r = 1; r <= 4; ++r) {
        symbolic_case(sc, {{"identity", "twist by line bundle vs splitting principle"}, {"rank", r}, {"k", "0..4"}}, [&] {
            formal_ring ring(std::max(N, 4));
            std::vector<graded_element> roots;
            for (int j = 1; j <= r; ++j) {
                roots.push_back(ring.generator(ring.add_generator("x" + std::to_string(j), 1)));
            }
            const auto m = ring.generator(ring.add_generator("m", 1));
            graded_element total = ring.one();
            graded_element shifted = ring.one();
            for (const auto &x : roots) {
                total *= ring.one() + x;
                shifted *= ring.one() + x + m;
            }
            const formal_bundle f(r, total);
            for (int k = 0; k <= 4; ++k) {
                if (auto mm = mismatch(twist_by_line(f, m, k), shifted.component(k)); !mm.empty()) {
                    return "k = " + std::to_string(k) + ": " + mm;
                }
            }
            return std::string();
        }, out);
    }
    symbolic_case(sc, {{"identity", "Segre inversion"}, {"degree", "1.." + std::to_string(N)}}, [&] {
        for (long r : {1L, 2L, 3L, -1L}) {
            formal_ring ring(N);
            const auto e = generic_bundle(ring, "E", r);
            const auto s = segre(e);
            for (int k = 1; k <= N; ++k) {
                graded_element acc = ring.zero();
                for (int i = 0; i <= k; ++i) {
                    acc += s.component(i) * e.c(k - i);
                }
                if (!acc.is_zero()) {
                    return "rank " + std::to_string(r) + ", k = " + std::to_string(k) + ": " + to_string(acc);
                }
            }
        }
        return std::string();
    }, out);
}

inline void run_serre_duality(const scenario &sc, std::vector<case_record> &out)
{
    const int maxn = sc.sizes[0];
    const auto u1u2 = laurent_poly::monomial({1, 1});
    for (int a = 0; a <= maxn; ++a) {
        for (int b = 0; b <= maxn; ++b) {
            const auto start = clock::now();
            case_record rec;
            rec.inputs = {{"size1", a}, {"size2", b}};
            long pairs = 0;
            for (const auto &l : partitions_of(a)) {
                for (const auto &m : partitions_of(b)) {
                    ++pairs;
                    const auto q1 = box_character(l);
                    const auto q2 = box_character(m);
                    const auto v = vertex_V(q1, q2);
                    if (rec.diagnostic.empty() && bar(v) != u1u2 * vertex_V(q2, q1)) {
                        rec.diagnostic = "IdentityViolated: Serre duality fails for " + to_string(l) + ", " +
                                         to_string(m);
                    }
                    if (rec.diagnostic.empty() && rank_eval(v) != a + b) {
                        rec.diagnostic = "IdentityViolated: rank law fails for " + to_string(l) + ", " + to_string(m);
                    }
                }
            }
            rec.pass = rec.diagnostic.empty();
            rec.samples.push_back({{}, std::to_string(pairs), json::object()});
            rec.elapsed_ms = elapsed_since(start, sc.timing);
            out.push_back(std::move(rec));
        }
    }
}

} // namespace detail

// Runs every case of a scenario. Mathematical errors become failed cases;
// configuration errors are thrown before any computation starts.
inline report run_scenario(const scenario &input)
{
    const scenario sc = with_defaults(input);
    validate(sc);
    const auto surf = surface_by_name(sc.surface);
    const auto start = detail::clock::now();
    report r;
    r.scenario = to_string(sc.kind);
    r.params = params_json(sc);
    r.seed = sc.seed;
    r.version = version;
    if (sc.insertions != "auto") {
        // Surface file problems as configuration errors up front.
        read_insertions(surf, sc.insertions.substr(5));
    }
    spec_sampler sampler(sc.seed);
    switch (sc.kind) {
    case scenario_kind::vanish:
        detail::run_vanish(sc, surf, sampler, false, r.cases);
        break;
    case scenario_kind::twisted_vanish:
        detail::run_vanish(sc, surf, sampler, true, r.cases);
        break;
    case scenario_kind::pushforward:
    case scenario_kind::kstep:
        detail::run_pushforward(sc, surf, sampler, r.cases);
        break;
    case scenario_kind::euler_count:
        detail::run_euler_count(sc, surf, sampler, r.cases);
        break;
    case scenario_kind::hrr_check:
        detail::run_hrr_check(sc, surf, sampler, r.cases);
        break;
    case scenario_kind::symbolic_tp:
        detail::run_symbolic_tp(sc, r.cases);
        break;
    case scenario_kind::serre_duality:
        detail::run_serre_duality(sc, r.cases);
        break;
    }
    r.pass = !r.cases.empty();
    for (const auto &c : r.cases) {
        r.pass = r.pass && c.pass;
    }
    r.elapsed_ms = detail::elapsed_since(start, sc.timing);
    return r;
}

namespace detail
{

inline std::size_t line_of_offset(const std::string &text, std::size_t offset)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
        }
    }
    return line;
}

inline std::vector<int> int_list(const json &j, const std::string &key)
{
    if (j.is_number_integer()) {
        return {j.get<int>()};
    }
    if (!j.is_array()) {
        throw config_error("'" + key + "' must be an integer or a list of integers");
    }
    std::vector<int> out;
    for (const auto &v : j) {
        if (!v.is_number_integer()) {
            throw config_error("'" + key + "' must contain integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

inline std::vector<std::string> string_list(const json &j, const std::string &key)
{
    if (!j.is_array()) {
        throw config_error("'" + key + "' must be a list of strings");
    }
    std::vector<std::string> out;
    for (const auto &v : j) {
        if (!v.is_string()) {
            throw config_error("'" + key + "' must contain strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline scenario scenario_from_json(const json &j)
{
    if (!j.is_object()) {
        throw config_error("scenario must be an object");
    }
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        throw config_error("scenario needs a string 'kind'");
    }
    scenario s;
    s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
    for (const auto &[key, val] : j.items()) {
        if (key == "kind") {
            continue;
        } else if (key == "surface") {
            s.surface = val.get<std::string>();
        } else if (key == "n") {
            s.sizes = int_list(val, key);
        } else if (key == "i") {
            s.i_values = int_list(val, key);
        } else if (key == "battery") {
            s.battery = string_list(val, key);
        } else if (key == "twists") {
            s.twists = string_list(val, key);
        } else if (key == "truncation") {
            s.truncation = val.get<int>();
        } else if (key == "samples") {
            s.samples = val.get<int>();
        } else if (key == "seed") {
            s.seed = val.get<std::uint64_t>();
        } else if (key == "jobs") {
            s.jobs = val.get<unsigned>();
        } else if (key == "insertions") {
            s.insertions = val.get<std::string>();
        } else if (key == "timing") {
            s.timing = val.get<bool>();
        } else if (key == "inject") {
            s.inject = parse_fault(val.get<std::string>());
        } else {
            throw config_error("unknown key '" + key + "'");
        }
    }
    return s;
}

} // namespace detail

// Scenario file: {"scenarios": [{"kind": "vanish", "surface": "p2", "n": [2,1], ...}, ...]}.
inline std::vector<scenario> parse_config_text(const std::string &text, const std::string &origin = "<config>")
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw config_error(origin + ":" + std::to_string(detail::line_of_offset(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
        throw config_error(origin + ": expected an object with a 'scenarios' array");
    }
    const auto &list = doc.at("scenarios");
    if (list.empty()) {
        throw config_error(origin + ": no scenarios");
    }
    std::vector<scenario> out;
    for (std::size_t k = 0; k < list.size(); ++k) {
        try {
            auto s = with_defaults(detail::scenario_from_json(list[k]));
            validate(s);
            out.push_back(std::move(s));
        } catch (const json::exception &e) {
            throw config_error(origin + ": scenario #" + std::to_string(k + 1) + ": " + e.what());
        } catch (const config_error &e) {
            throw config_error(origin + ": scenario #" + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<scenario> parse_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

enum class report_format { json, text };

inline void write_text(const report &r, std::ostream &os)
{
    os << r.scenario << "  " << r.params.dump() << "  seed " << r.seed << "  " << r.version << "\n";
    std::size_t passed = 0;
    for (const auto &c : r.cases) {
        passed += c.pass ? 1 : 0;
        os << (c.pass ? "PASS  " : "FAIL  ") << c.inputs.dump();
        if (!c.samples.empty()) {
            os << "  [";
            for (std::size_t k = 0; k < c.samples.size(); ++k) {
                os << (k ? ", " : "") << c.samples[k].value;
                for (const auto &[key, val] : c.samples[k].extra.items()) {
                    os << " " << key << "=" << val.get<std::string>();
                }
            }
            os << "]";
        }
        if (!c.diagnostic.empty()) {
            os << "  " << c.diagnostic;
        }
        os << "\n";
    }
    os << (r.pass ? "PASS" : "FAIL") << "  " << passed << "/" << r.cases.size() << " cases  " << r.elapsed_ms
       << " ms\n";
}

inline void emit_report(const std::vector<report> &reports, report_format format, std::ostream &os)
{
    if (format == report_format::text) {
        for (const auto &r : reports) {
            write_text(r, os);
        }
        return;
    }
    if (reports.size() == 1) {
        os << to_json(reports.front()).dump(2) << "\n";
        return;
    }
    json all;
    all["reports"] = json::array();
    bool pass = !reports.empty();
    for (const auto &r : reports) {
        all["reports"].push_back(to_json(r));
        pass = pass && r.pass;
    }
    all["verdict"] = pass ? "pass" : "fail";
    os << all.dump(2) << "\n";
}

inline void emit_report(const report &r, report_format format, std::ostream &os)
{
    emit_report(std::vector<report>{r}, format, os);
}

// Writes to `path`, or to `os` when the path is empty.
inline void emit_report(const std::vector<report> &reports, report_format format, const std::string &path,
                        std::ostream &os)
{
    if (path.empty()) {
        emit_report(reports, format, os);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write report to '" + path + "'");
    }
    emit_report(reports, format, out);
    if (!out) {
        throw std::runtime_error("I/O error writing '" + path + "'");
    }
}

} // namespace nestloc

#endif
