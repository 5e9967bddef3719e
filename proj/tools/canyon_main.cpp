// Command-line front end. Every subcommand dispatches to one library
// operation, echoes its inputs, and writes either CSV (with a '#' comment
// preamble) or a single JSON object. Outputs never contain timing or thread
// counts, so identical (subcommand, flags, seed) gives byte-identical files.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "canyon/common.hpp"
#include "canyon/config.hpp"
#include "canyon/coupling.hpp"
#include "canyon/criticality.hpp"
#include "canyon/delta.hpp"
#include "canyon/excursions.hpp"
#include "canyon/oracle.hpp"
#include "canyon/runner.hpp"
#include "canyon/step.hpp"
#include "canyon/version.hpp"

namespace {

using ojson = nlohmann::ordered_json;

// 9 significant digits everywhere a float is printed.
std::string fmt9(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
}

// Same rounding for JSON numbers, so the two formats agree.
double sig9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

std::string join9(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += fmt9(v[i]);
    }
    return s;
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s;
}

std::uint64_t parse_seed(const std::string& text) {
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    if (text.empty() || text[0] == '-' || text[0] == '+')
        throw std::invalid_argument("--seed takes an unsigned integer or 'random'");
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos, 10);
    } catch (...) {
        throw std::invalid_argument("--seed takes an unsigned integer or 'random'");
    }
    if (pos != text.size())
        throw std::invalid_argument("--seed takes an unsigned integer or 'random'");
    return v;
}

unsigned resolve_threads(unsigned cli_value) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("CANYON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument("CANYON_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

struct Global {
    std::string seed_text = "42";
    unsigned threads_flag = 0;  // 0: CANYON_THREADS, else hardware
    std::string format;         // empty: subcommand default
    std::string out_path;

    std::uint64_t seed = 42;
    unsigned threads = 1;

    void resolve() {
        seed = parse_seed(seed_text);
        threads = resolve_threads(threads_flag);
    }

    std::string pick_format(const char* def) const { return format.empty() ? def : format; }
};

// Output goes to stdout or to --out, opened in binary mode so the bytes are
// exactly what the handlers wrote.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary);
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& out() { return *os; }
};

using InputEcho = std::vector<std::pair<std::string, std::string>>;

void csv_preamble(std::ostream& os, const std::string& schema, std::uint64_t seed,
                  const InputEcho& inputs) {
    os << "# schema: " << schema << "\n";
    os << "# version: " << canyon::kVersion << "\n";
    os << "# seed: " << seed << "\n";
    for (const auto& [key, value] : inputs) os << "# " << key << ": " << value << "\n";
}

ojson json_base(const std::string& schema, std::uint64_t seed) {
    ojson j;
    j["schema"] = schema;
    j["version"] = canyon::kVersion;
    j["seed"] = seed;
    return j;
}

void emit_json(std::ostream& os, const ojson& j) { os << j.dump(2) << "\n"; }

const char* outcome_name(canyon::StepOutcome o) {
    switch (o) {
        case canyon::StepOutcome::Added: return "added";
        case canyon::StepOutcome::Displaced: return "displaced";
        case canyon::StepOutcome::RemovedMin: return "removed-min";
        case canyon::StepOutcome::Noop: return "noop";
    }
    return "noop";
}

bool outcome_removes(canyon::StepOutcome o) {
    return o == canyon::StepOutcome::Displaced || o == canyon::StepOutcome::RemovedMin;
}

// ---- simulate ----

struct SimulateParams {
    std::uint64_t steps = 0;
    std::optional<double> q;
    std::vector<double> thresholds;
    std::uint64_t stride = 1;
    std::uint64_t replica = 0;
    bool min_only = false;
    std::uint64_t window_start = 1;
};

int run_simulate(const Global& g, const SimulateParams& p) {
    const std::string fmt = g.pick_format("csv");
    Sink sink(g.out_path);

    if (p.min_only) {
        const auto t0 = std::chrono::steady_clock::now();
        const canyon::MinOnlyResult r =
            canyon::run_full_min_only(g.seed, p.replica, p.steps, p.window_start);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
        // Throughput is run-dependent, so it goes to stderr, not the payload.
        if (secs > 0)
            std::fprintf(stderr, "min-only: %.3g steps/s\n",
                         static_cast<double>(p.steps) / secs);

        if (fmt == "json") {
            ojson j = json_base("canyon.min-only.v1", g.seed);
            j["inputs"] = {{"steps", p.steps},
                           {"replica", p.replica},
                           {"window_start", p.window_start}};
            j["max_min_in_window"] = sig9(r.max_min_in_window);
            j["final_min"] = sig9(r.final_min);
            j["final_size"] = r.final_size;
            emit_json(sink.out(), j);
        } else {
            csv_preamble(sink.out(), "canyon.min-only.v1", g.seed,
                         {{"steps", std::to_string(p.steps)},
                          {"replica", std::to_string(p.replica)},
                          {"window_start", std::to_string(p.window_start)}});
            sink.out() << "steps,window_start,max_min_in_window,final_min,final_size\n";
            sink.out() << p.steps << ',' << p.window_start << ',' << fmt9(r.max_min_in_window)
                       << ',' << fmt9(r.final_min) << ',' << r.final_size << "\n";
        }
        return 0;
    }

    canyon::RunOptions opt;
    opt.seed = g.seed;
    opt.replica = p.replica;
    opt.steps = p.steps;
    opt.restricted = p.q.has_value();
    opt.cutoff = p.q.value_or(0.0);
    opt.thresholds = p.thresholds;
    opt.stride = p.stride;

    InputEcho echo = {{"steps", std::to_string(p.steps)},
                      {"replica", std::to_string(p.replica)},
                      {"stride", std::to_string(p.stride)},
                      {"mode", opt.restricted ? "restricted" : "full"}};
    if (opt.restricted) echo.emplace_back("q", fmt9(opt.cutoff));
    if (!p.thresholds.empty()) echo.emplace_back("threshold_q", join9(p.thresholds));

    if (fmt == "json") {
        ojson j = json_base("canyon.simulate.v1", g.seed);
        ojson inputs;
        for (const auto& [key, value] : echo) inputs[key] = value;
        j["inputs"] = inputs;
        ojson records = ojson::array();
        canyon::run(opt, [&](const canyon::StepRecord& r) {
            ojson rec;
            rec["k"] = r.k;
            rec["outcome"] = outcome_name(r.outcome);
            rec["removed"] = outcome_removes(r.outcome) ? ojson(sig9(r.removed)) : ojson(nullptr);
            rec["minimum"] = sig9(r.minimum);
            rec["size"] = r.size;
            if (!opt.thresholds.empty()) rec["counts"] = r.threshold_counts;
            records.push_back(std::move(rec));
        });
        j["records"] = std::move(records);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.simulate.v1", g.seed, echo);
        sink.out() << "k,outcome,removed,minimum,size";
        for (double t : opt.thresholds) sink.out() << ",count_le_" << fmt9(t);
        sink.out() << "\n";
        canyon::run(opt, [&](const canyon::StepRecord& r) {
            sink.out() << r.k << ',' << outcome_name(r.outcome) << ',';
            if (outcome_removes(r.outcome)) sink.out() << fmt9(r.removed);
            sink.out() << ',' << fmt9(r.minimum) << ',' << r.size;
            for (std::int64_t c : r.threshold_counts) sink.out() << ',' << c;
            sink.out() << "\n";
        });
    }
    return 0;
}

// ---- return-times ----

struct ReturnTimesParams {
    double q = 0.0;
    std::uint64_t n = 1000000;
    std::uint64_t horizon = 100000000;
};

int run_return_times(const Global& g, const ReturnTimesParams& p) {
    const std::string fmt = g.pick_format("json");
    const canyon::MeanReturnEstimate e =
        canyon::estimate_mean_return(p.q, p.n, g.seed, p.horizon, g.threads);
    const double deviation = e.estimate.mean - e.closed_form;

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.return-times.v1", g.seed);
        j["inputs"] = {{"q", sig9(p.q)}, {"n", p.n}, {"horizon", p.horizon}};
        j["estimate"] = {{"mean", sig9(e.estimate.mean)},
                         {"std_error", sig9(e.estimate.std_error)},
                         {"n", e.estimate.n},
                         {"method", e.estimate.method}};
        j["censored"] = e.censored;
        j["closed_form"] = sig9(e.closed_form);
        j["deviation"] = sig9(deviation);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.return-times.v1", g.seed,
                     {{"q", fmt9(p.q)},
                      {"n", std::to_string(p.n)},
                      {"horizon", std::to_string(p.horizon)}});
        sink.out() << "q,n,horizon,mean,std_error,method,censored,closed_form,deviation\n";
        sink.out() << fmt9(p.q) << ',' << p.n << ',' << p.horizon << ',' << fmt9(e.estimate.mean)
                   << ',' << fmt9(e.estimate.std_error) << ',' << e.estimate.method << ','
                   << e.censored << ',' << fmt9(e.closed_form) << ',' << fmt9(deviation) << "\n";
    }
    return 0;
}

// ---- delta-density ----

struct DeltaParams {
    std::vector<double> t_grid;
    std::uint64_t steps = 10000000;
    std::uint64_t burnin = 1000000;
};

int run_delta_density(const Global& g, const DeltaParams& p) {
    const std::string fmt = g.pick_format("json");
    const std::vector<canyon::DeltaDensityEstimate> est =
        canyon::estimate_delta_densities(p.t_grid, p.steps, p.burnin, g.seed);

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.delta-density.v1", g.seed);
        ojson tg = ojson::array();
        for (double t : p.t_grid) tg.push_back(sig9(t));
        j["inputs"] = {{"t_grid", tg}, {"steps", p.steps}, {"burnin", p.burnin}};
        ojson results = ojson::array();
        for (const auto& e : est) {
            const canyon::DeltaDensities cf = canyon::closed_form_delta_densities(e.t);
            const double dev = std::max(
                std::max(std::abs(e.freq.p_under0 - cf.p_under0),
                         std::abs(e.freq.p_over0 - cf.p_over0)),
                std::max(std::abs(e.freq.p_minus1 - cf.p_minus1),
                         std::abs(e.freq.p_plus1 - cf.p_plus1)));
            ojson r;
            r["t"] = sig9(e.t);
            r["freq"] = {{"under0", sig9(e.freq.p_under0)},
                         {"over0", sig9(e.freq.p_over0)},
                         {"minus1", sig9(e.freq.p_minus1)},
                         {"plus1", sig9(e.freq.p_plus1)}};
            r["std_error"] = {{"under0", sig9(e.std_error.p_under0)},
                              {"over0", sig9(e.std_error.p_over0)},
                              {"minus1", sig9(e.std_error.p_minus1)},
                              {"plus1", sig9(e.std_error.p_plus1)}};
            r["closed_form"] = {{"under0", sig9(cf.p_under0)},
                                {"over0", sig9(cf.p_over0)},
                                {"minus1", sig9(cf.p_minus1)},
                                {"plus1", sig9(cf.p_plus1)}};
            r["max_abs_deviation"] = sig9(dev);
            results.push_back(std::move(r));
        }
        j["results"] = std::move(results);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.delta-density.v1", g.seed,
                     {{"t_grid", join9(p.t_grid)},
                      {"steps", std::to_string(p.steps)},
                      {"burnin", std::to_string(p.burnin)}});
        sink.out() << "t,p_under0,p_over0,p_minus1,p_plus1,se_under0,se_over0,se_minus1,se_plus1,"
                      "cf_under0,cf_over0,cf_minus1,cf_plus1,max_abs_deviation\n";
        for (const auto& e : est) {
            const canyon::DeltaDensities cf = canyon::closed_form_delta_densities(e.t);
            const double dev = std::max(
                std::max(std::abs(e.freq.p_under0 - cf.p_under0),
                         std::abs(e.freq.p_over0 - cf.p_over0)),
                std::max(std::abs(e.freq.p_minus1 - cf.p_minus1),
                         std::abs(e.freq.p_plus1 - cf.p_plus1)));
            sink.out() << fmt9(e.t) << ',' << fmt9(e.freq.p_under0) << ',' << fmt9(e.freq.p_over0)
                       << ',' << fmt9(e.freq.p_minus1) << ',' << fmt9(e.freq.p_plus1) << ','
                       << fmt9(e.std_error.p_under0) << ',' << fmt9(e.std_error.p_over0) << ','
                       << fmt9(e.std_error.p_minus1) << ',' << fmt9(e.std_error.p_plus1) << ','
                       << fmt9(cf.p_under0) << ',' << fmt9(cf.p_over0) << ',' << fmt9(cf.p_minus1)
                       << ',' << fmt9(cf.p_plus1) << ',' << fmt9(dev) << "\n";
        }
    }
    return 0;
}

// ---- stationary ----

struct StationaryParams {
    double q = 0.0;
    std::uint64_t states = 1000000;
    std::uint64_t horizon = 100000000;
};

int run_stationary(const Global& g, const StationaryParams& p) {
    const std::string fmt = g.pick_format("json");
    const canyon::StationarySummary s =
        canyon::stationary_pass(p.q, p.states, g.seed, p.horizon);
    const double t = canyon::to_exp(p.q);
    const double cf_empty = 1.0 - t;
    const double cf_mean = canyon::closed_form_mean_return(p.q);

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.stationary.v1", g.seed);
        j["inputs"] = {{"q", sig9(p.q)}, {"states", p.states}, {"horizon", p.horizon}};
        j["t"] = sig9(t);
        j["cycles"] = s.cycles;
        j["states"] = s.states;
        j["empty_states"] = s.empty_states;
        j["empty_fraction"] = sig9(s.empty_fraction);
        j["closed_form_empty_fraction"] = sig9(cf_empty);
        j["empty_deviation"] = sig9(s.empty_fraction - cf_empty);
        j["mean_states_per_cycle"] = sig9(s.mean_states_per_cycle);
        j["closed_form_mean_return"] = sig9(cf_mean);
        j["max_cdf_deviation"] = sig9(s.max_cdf_deviation);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.stationary.v1", g.seed,
                     {{"q", fmt9(p.q)},
                      {"states", std::to_string(p.states)},
                      {"horizon", std::to_string(p.horizon)}});
        sink.out() << "q,t,cycles,states,empty_states,empty_fraction,closed_form_empty_fraction,"
                      "empty_deviation,mean_states_per_cycle,closed_form_mean_return,"
                      "max_cdf_deviation\n";
        sink.out() << fmt9(p.q) << ',' << fmt9(t) << ',' << s.cycles << ',' << s.states << ','
                   << s.empty_states << ',' << fmt9(s.empty_fraction) << ',' << fmt9(cf_empty)
                   << ',' << fmt9(s.empty_fraction - cf_empty) << ','
                   << fmt9(s.mean_states_per_cycle) << ',' << fmt9(cf_mean) << ','
                   << fmt9(s.max_cdf_deviation) << "\n";
    }
    return 0;
}

// ---- min-law ----

struct MinLawParams {
    double q = 0.0;
    std::uint64_t states = 1000000;
    std::uint64_t horizon = 100000000;
};

int run_min_law(const Global& g, const MinLawParams& p) {
    const std::string fmt = g.pick_format("json");
    canyon::MinLawGrid grid;
    const canyon::StationarySummary s =
        canyon::stationary_pass(p.q, p.states, g.seed, p.horizon, &grid);

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.min-law.v1", g.seed);
        j["inputs"] = {{"q", sig9(p.q)}, {"states", p.states}, {"horizon", p.horizon}};
        j["t_plus"] = sig9(grid.t_plus);
        j["cycles"] = s.cycles;
        j["states"] = s.states;
        j["max_cdf_deviation"] = sig9(s.max_cdf_deviation);
        ojson rows = ojson::array();
        for (std::size_t i = 0; i < grid.s.size(); ++i)
            rows.push_back({{"s", sig9(grid.s[i])},
                            {"empirical", sig9(grid.empirical[i])},
                            {"target", sig9(grid.target[i])}});
        j["grid"] = std::move(rows);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.min-law.v1", g.seed,
                     {{"q", fmt9(p.q)},
                      {"states", std::to_string(p.states)},
                      {"horizon", std::to_string(p.horizon)},
                      {"t_plus", fmt9(grid.t_plus)},
                      {"cycles", std::to_string(s.cycles)},
                      {"emitted_states", std::to_string(s.states)},
                      {"max_cdf_deviation", fmt9(s.max_cdf_deviation)}});
        sink.out() << "s,empirical,target,abs_deviation\n";
        for (std::size_t i = 0; i < grid.s.size(); ++i)
            sink.out() << fmt9(grid.s[i]) << ',' << fmt9(grid.empirical[i]) << ','
                       << fmt9(grid.target[i]) << ','
                       << fmt9(std::abs(grid.empirical[i] - grid.target[i])) << "\n";
    }
    return 0;
}

// ---- oracle ----

struct OracleParams {
    int kmax = 4;
    std::vector<double> eval_q;
    std::optional<double> mean_check_q;
};

int run_oracle(const Global& g, const OracleParams& p) {
    const std::string fmt = g.pick_format("json");
    if (fmt == "csv" && (!p.eval_q.empty() || p.mean_check_q.has_value()))
        throw std::invalid_argument("oracle evaluations are json-only; drop --format csv");

    const std::vector<canyon::ProbPoly> pmf = canyon::exact_return_pmf(p.kmax);
    const canyon::ProbPoly tail = canyon::exact_return_tail(p.kmax);

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.oracle.v1", g.seed);
        j["inputs"] = {{"kmax", p.kmax}};
        j["pmf"] = ojson::parse(canyon::pmf_list_to_json(pmf));
        j["tail"] = {{"coeffs", ojson::parse(canyon::poly_to_json(tail, 0))["coeffs"]}};
        if (!p.eval_q.empty()) {
            ojson evals = ojson::array();
            for (double q : p.eval_q) {
                ojson e;
                e["q"] = sig9(q);
                ojson probs = ojson::array();
                double sum = 0.0;
                for (const auto& poly : pmf) {
                    const double v = poly.eval(q);
                    sum += v;
                    probs.push_back(sig9(v));
                }
                e["pmf"] = std::move(probs);
                e["tail"] = sig9(tail.eval(q));
                e["pmf_sum"] = sig9(sum);
                evals.push_back(std::move(e));
            }
            j["evals"] = std::move(evals);
        }
        if (p.mean_check_q.has_value()) {
            const canyon::TruncatedMeanCheck c =
                canyon::truncated_mean_check(p.kmax, *p.mean_check_q);
            j["mean_check"] = {{"q", sig9(*p.mean_check_q)},
                               {"lower", sig9(c.lower)},
                               {"tail_mass", sig9(c.tail_mass)},
                               {"diagnostic", sig9(c.diagnostic)},
                               {"closed_form", sig9(c.closed_form)}};
        }
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.oracle.v1", g.seed,
                     {{"kmax", std::to_string(p.kmax)}});
        sink.out() << "k,power,numerator,denominator\n";
        auto emit_poly = [&](const std::string& label, const canyon::ProbPoly& poly) {
            for (std::size_t i = 0; i < poly.coeffs.size(); ++i)
                sink.out() << label << ',' << i << ','
                           << boost::multiprecision::numerator(poly.coeffs[i]).str() << ','
                           << boost::multiprecision::denominator(poly.coeffs[i]).str() << "\n";
        };
        for (std::size_t k = 0; k < pmf.size(); ++k)
            emit_poly(std::to_string(k + 1), pmf[k]);
        emit_poly("tail", tail);
    }
    return 0;
}

// ---- critical ----

struct CriticalParams {
    double lo = 0.5;
    double hi = 0.75;
    std::uint64_t probes = 20;
    std::uint64_t horizon = 100000;
    std::uint64_t replicas = 10000;
    double tol = 0.01;
};

int run_critical(const Global& g, const CriticalParams& p) {
    const std::string fmt = g.pick_format("json");
    std::vector<canyon::ProbeRecord> log;
    const canyon::CriticalPointEstimate e = canyon::estimate_critical_point(
        p.lo, p.hi, p.probes, p.horizon, p.replicas, g.seed, p.tol, g.threads, &log);
    const double deviation = e.estimate - canyon::kCriticalQ;

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.critical.v1", g.seed);
        j["inputs"] = {{"lo", sig9(p.lo)},         {"hi", sig9(p.hi)},
                       {"max_probes", p.probes},   {"horizon", p.horizon},
                       {"replicas", p.replicas},   {"tol", sig9(p.tol)}};
        j["estimate"] = sig9(e.estimate);
        j["bracket"] = {sig9(e.lo), sig9(e.hi)};
        j["probes_used"] = e.probes_used;
        j["closed_form"] = sig9(canyon::kCriticalQ);
        j["deviation"] = sig9(deviation);
        ojson probes = ojson::array();
        for (const auto& r : log)
            probes.push_back({{"q", sig9(r.q)},
                              {"fraction", sig9(r.fraction)},
                              {"ci", {sig9(r.ci.lo), sig9(r.ci.hi)}},
                              {"verdict", r.verdict},
                              {"replicas", r.replicas}});
        j["probes"] = std::move(probes);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.critical.v1", g.seed,
                     {{"lo", fmt9(p.lo)},
                      {"hi", fmt9(p.hi)},
                      {"max_probes", std::to_string(p.probes)},
                      {"horizon", std::to_string(p.horizon)},
                      {"replicas", std::to_string(p.replicas)},
                      {"tol", fmt9(p.tol)},
                      {"estimate", fmt9(e.estimate)},
                      {"bracket", fmt9(e.lo) + " " + fmt9(e.hi)},
                      {"probes_used", std::to_string(e.probes_used)},
                      {"closed_form", fmt9(canyon::kCriticalQ)},
                      {"deviation", fmt9(deviation)}});
        sink.out() << "probe,q,fraction,ci_lo,ci_hi,verdict,replicas\n";
        for (std::size_t i = 0; i < log.size(); ++i)
            sink.out() << i << ',' << fmt9(log[i].q) << ',' << fmt9(log[i].fraction) << ','
                       << fmt9(log[i].ci.lo) << ',' << fmt9(log[i].ci.hi) << ','
                       << log[i].verdict << ',' << log[i].replicas << "\n";
    }
    return 0;
}

// ---- tail ----

struct TailParams {
    double q = canyon::kCriticalQ;
    std::vector<std::uint64_t> grid = {256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536};
    std::uint64_t replicas = 100000;
};

int run_tail(const Global& g, const TailParams& p) {
    const std::string fmt = g.pick_format("json");
    const canyon::TailFit f =
        canyon::estimate_tail_exponent(p.q, p.grid, p.replicas, g.seed, g.threads);
    const bool at_critical = std::abs(p.q - canyon::kCriticalQ) < 1e-12;
    const std::string note =
        at_critical ? "conjecture check: the 1/2 tail exponent at the critical cutoff is "
                      "conjectured, not proved"
                    : "empirical tail fit";

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.tail.v1", g.seed);
        ojson grid = ojson::array();
        for (std::uint64_t k : p.grid) grid.push_back(k);
        j["inputs"] = {{"q", sig9(p.q)}, {"k_grid", grid}, {"replicas", p.replicas}};
        j["note"] = note;
        if (at_critical) j["conjectured_exponent"] = 0.5;
        j["exponent"] = sig9(f.exponent);
        j["std_error"] = sig9(f.std_error);
        j["fit_quality"] = sig9(f.fit_quality);
        j["k_lo"] = f.k_lo;
        j["k_hi"] = f.k_hi;
        j["flag"] = canyon::tail_fit_flag_name(f.flag);
        ojson points = ojson::array();
        for (std::size_t i = 0; i < f.k_used.size(); ++i)
            points.push_back({{"k", f.k_used[i]}, {"survival", sig9(f.survival_used[i])}});
        j["points"] = std::move(points);
        emit_json(sink.out(), j);
    } else {
        InputEcho echo = {{"q", fmt9(p.q)},
                          {"k_grid", join_u64(p.grid)},
                          {"replicas", std::to_string(p.replicas)},
                          {"note", note}};
        if (at_critical) echo.emplace_back("conjectured_exponent", "0.5");
        echo.emplace_back("exponent", fmt9(f.exponent));
        echo.emplace_back("std_error", fmt9(f.std_error));
        echo.emplace_back("fit_quality", fmt9(f.fit_quality));
        echo.emplace_back("k_lo", std::to_string(f.k_lo));
        echo.emplace_back("k_hi", std::to_string(f.k_hi));
        echo.emplace_back("flag", canyon::tail_fit_flag_name(f.flag));
        csv_preamble(sink.out(), "canyon.tail.v1", g.seed, echo);
        sink.out() << "k,survival\n";
        for (std::size_t i = 0; i < f.k_used.size(); ++i)
            sink.out() << f.k_used[i] << ',' << fmt9(f.survival_used[i]) << "\n";
    }
    return 0;
}

// ---- growth ----

struct GrowthParams {
    double t = 0.0;
    std::uint64_t steps = 1000000;
};

int run_growth(const Global& g, const GrowthParams& p) {
    const std::string fmt = g.pick_format("json");
    const double bound = canyon::growth_bound(p.t);
    const double empirical = canyon::empirical_growth_rate(p.t, p.steps, g.seed);
    const double q = canyon::from_exp(p.t);

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.growth.v1", g.seed);
        j["inputs"] = {{"t", sig9(p.t)}, {"steps", p.steps}};
        j["q"] = sig9(q);
        j["bound"] = sig9(bound);
        j["empirical"] = sig9(empirical);
        j["margin"] = sig9(empirical - bound);
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.growth.v1", g.seed,
                     {{"t", fmt9(p.t)}, {"steps", std::to_string(p.steps)}});
        sink.out() << "t,q,steps,bound,empirical,margin\n";
        sink.out() << fmt9(p.t) << ',' << fmt9(q) << ',' << p.steps << ',' << fmt9(bound) << ','
                   << fmt9(empirical) << ',' << fmt9(empirical - bound) << "\n";
    }
    return 0;
}

// ---- couple-test ----

struct CoupleParams {
    std::uint64_t trials = 10000;
    std::uint64_t steps = 1000;
};

int run_couple_test(const Global& g, const CoupleParams& p) {
    const std::string fmt = g.pick_format("json");
    const std::uint64_t mono = canyon::run_monotone_coupling_trials(p.trials, p.steps, g.seed);
    const std::uint64_t dom = canyon::run_domination_trials(p.trials, p.steps, g.seed);
    const bool pass = mono == 0 && dom == 0;

    Sink sink(g.out_path);
    if (fmt == "json") {
        ojson j = json_base("canyon.couple-test.v1", g.seed);
        j["inputs"] = {{"trials", p.trials}, {"steps", p.steps}};
        j["monotone_violations"] = mono;
        j["domination_violations"] = dom;
        j["pass"] = pass;
        emit_json(sink.out(), j);
    } else {
        csv_preamble(sink.out(), "canyon.couple-test.v1", g.seed,
                     {{"trials", std::to_string(p.trials)},
                      {"steps", std::to_string(p.steps)}});
        sink.out() << "trials,steps,monotone_violations,domination_violations,pass\n";
        sink.out() << p.trials << ',' << p.steps << ',' << mono << ',' << dom << ','
                   << (pass ? "true" : "false") << "\n";
    }
    if (!pass) {
        std::fprintf(stderr, "coupling violations: monotone=%llu domination=%llu\n",
                     static_cast<unsigned long long>(mono),
                     static_cast<unsigned long long>(dom));
        return 3;
    }
    return 0;
}

int run_app(int argc, char** argv) {
    CLI::App app{"canyon: rank-driven particle chain toolkit"};
    app.set_version_flag("--version", canyon::kVersion);
    app.require_subcommand(0, 1);

    Global g;
    app.add_option("--seed", g.seed_text, "master seed (unsigned integer, or 'random')")
        ->capture_default_str();
    app.add_option("--threads", g.threads_flag,
                   "worker threads (default: CANYON_THREADS, else hardware)");
    app.add_option("--format", g.format, "csv or json (default: csv for simulate, else json)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out_path, "output file (default: stdout)");

    int exit_code = 0;
    bool ran = false;
    auto hook = [&](auto fn) {
        return [&, fn]() {
            g.resolve();
            exit_code = fn();
            ran = true;
        };
    };

    SimulateParams sim;
    auto* s_sim = app.add_subcommand("simulate", "drive one chain and record observer rows");
    s_sim->fallthrough();
    s_sim->add_option("--steps", sim.steps, "number of steps")->required();
    s_sim->add_option("--q", sim.q, "restrict the chain to [0,q)");
    auto* o_thr = s_sim->add_option("--threshold-q", sim.thresholds,
                                    "thresholds for streaming counts (full mode)")
                      ->delimiter(',');
    auto* o_stride = s_sim->add_option("--stride", sim.stride, "record every stride-th step")
                         ->capture_default_str();
    s_sim->add_option("--replica", sim.replica, "replica index of the stream")
        ->capture_default_str();
    auto* f_min = s_sim->add_flag("--min-only", sim.min_only,
                                  "fast full-chain mode tracking only the minimum");
    s_sim->add_option("--window-start", sim.window_start,
                      "first step of the reported max-of-minimum window (min-only)")
        ->needs(f_min)
        ->capture_default_str();
    f_min->excludes(o_thr);
    f_min->excludes(o_stride);
    s_sim->callback(hook([&] { return run_simulate(g, sim); }));

    ReturnTimesParams rt;
    auto* s_rt = app.add_subcommand("return-times",
                                    "mean return time to empty vs its closed form");
    s_rt->fallthrough();
    s_rt->add_option("--q", rt.q, "window cutoff in [0,1)")->required();
    s_rt->add_option("--n", rt.n, "number of excursions")->capture_default_str();
    s_rt->add_option("--horizon", rt.horizon, "censoring horizon per excursion")
        ->capture_default_str();
    s_rt->callback(hook([&] { return run_return_times(g, rt); }));

    DeltaParams dd;
    auto* s_dd = app.add_subcommand("delta-density",
                                    "one-step count-change symbol frequencies at thresholds");
    s_dd->fallthrough();
    s_dd->add_option("--t", dd.t_grid, "thresholds in exponential coordinates, each < 1")
        ->required()
        ->delimiter(',');
    s_dd->add_option("--steps", dd.steps, "measured steps after burn-in")->capture_default_str();
    s_dd->add_option("--burnin", dd.burnin, "discarded steps")->capture_default_str();
    s_dd->callback(hook([&] { return run_delta_density(g, dd); }));

    StationaryParams st;
    auto* s_st = app.add_subcommand("stationary",
                                    "regeneration summary of the restricted chain");
    s_st->fallthrough();
    s_st->add_option("--q", st.q, "window cutoff, below the critical point")->required();
    s_st->add_option("--states", st.states, "minimum emitted states")->capture_default_str();
    s_st->add_option("--horizon", st.horizon, "per-cycle censoring horizon")
        ->capture_default_str();
    s_st->callback(hook([&] { return run_stationary(g, st); }));

    MinLawParams ml;
    auto* s_ml = app.add_subcommand("min-law",
                                    "stationary minimum vs its uniform law on a grid");
    s_ml->fallthrough();
    s_ml->add_option("--q", ml.q, "window cutoff, below the critical point")->required();
    s_ml->add_option("--states", ml.states, "minimum emitted states")->capture_default_str();
    s_ml->add_option("--horizon", ml.horizon, "per-cycle censoring horizon")
        ->capture_default_str();
    s_ml->callback(hook([&] { return run_min_law(g, ml); }));

    OracleParams orc;
    auto* s_orc = app.add_subcommand("oracle",
                                     "exact return-time distribution as rational polynomials");
    s_orc->fallthrough();
    s_orc->add_option("--kmax", orc.kmax, "distribution computed for k = 1..kmax")
        ->capture_default_str()
        ->check(CLI::Range(1, 11));
    s_orc->add_option("--q", orc.eval_q, "evaluate the polynomials at these cutoffs (json)")
        ->delimiter(',');
    s_orc->add_option("--mean-check-q", orc.mean_check_q,
                      "truncated-mean bound check at this cutoff (json)");
    s_orc->callback(hook([&] { return run_oracle(g, orc); }));

    CriticalParams cr;
    auto* s_cr = app.add_subcommand("critical", "bisect the recurrent/transient boundary");
    s_cr->fallthrough();
    s_cr->add_option("--lo", cr.lo, "left bracket endpoint")->capture_default_str();
    s_cr->add_option("--hi", cr.hi, "right bracket endpoint")->capture_default_str();
    s_cr->add_option("--probes", cr.probes, "midpoint probe budget")->capture_default_str();
    s_cr->add_option("--horizon", cr.horizon, "survival horizon per probe")
        ->capture_default_str();
    s_cr->add_option("--replicas", cr.replicas, "replicas per probe")->capture_default_str();
    s_cr->add_option("--tol", cr.tol, "stop when the bracket is this tight")
        ->capture_default_str();
    s_cr->callback(hook([&] { return run_critical(g, cr); }));

    TailParams tl;
    auto* s_tl = app.add_subcommand("tail", "log-log tail exponent of the return time");
    s_tl->fallthrough();
    s_tl->add_option("--q", tl.q, "window cutoff (default: the critical cutoff)")
        ->capture_default_str();
    s_tl->add_option("--k", tl.grid, "survival grid points, increasing")->delimiter(',');
    s_tl->add_option("--replicas", tl.replicas, "excursions sampled")->capture_default_str();
    s_tl->callback(hook([&] { return run_tail(g, tl); }));

    GrowthParams gr;
    auto* s_gr = app.add_subcommand("growth", "linear growth of the count below a threshold");
    s_gr->fallthrough();
    s_gr->add_option("--t", gr.t, "threshold in exponential coordinates, > 1")->required();
    s_gr->add_option("--steps", gr.steps, "full-chain steps")->capture_default_str();
    s_gr->callback(hook([&] { return run_growth(g, gr); }));

    CoupleParams cp;
    auto* s_cp = app.add_subcommand("couple-test",
                                    "randomized containment and domination property trials");
    s_cp->fallthrough();
    s_cp->add_option("--trials", cp.trials, "trials per property")->capture_default_str();
    s_cp->add_option("--steps", cp.steps, "steps per trial")->capture_default_str();
    s_cp->callback(hook([&] { return run_couple_test(g, cp); }));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (!ran) {
        std::cout << app.help();
        return 0;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const canyon::StatGuardError& e) {
        std::fprintf(stderr, "statistical guard: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
