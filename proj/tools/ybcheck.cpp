#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "yb/bracket.hpp"
#include "yb/classifier.hpp"
#include "yb/harness.hpp"
#include "yb/theta.hpp"

using namespace yb;

namespace {

struct Options {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples, workers;
    std::optional<double> tolerance;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("--config", "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void summarize(const RunReport& r) {
    for (const auto& x : r.results) {
        std::cerr << (x.pass ? "PASS " : "FAIL ") << x.identity << "  rel=" << x.relative_residual
                  << "  abs=" << x.max_abs_residual << "  tol=" << x.tolerance << "\n";
        if (!x.pass && !x.argmax.empty()) {
            std::cerr << "     argmax:";
            for (const auto& [t, v] : x.argmax) std::cerr << " " << t << "=[" << v.real() << "," << v.imag() << "]";
            std::cerr << "\n";
        }
    }
    if (!r.error.empty()) std::cerr << "rejected: " << r.error << "\n";
    std::cerr << (r.pass ? "overall: PASS" : "overall: FAIL") << "\n";
}

int run(const Options& o, const std::string& forced_suite) {
    json j;
    try {
        j = json::parse(slurp(o.config));
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    if (!forced_suite.empty()) {
        if (!j.contains("suite")) j["suite"] = forced_suite;
        if (j["suite"] != forced_suite)
            throw ConfigError("suite", "subcommand " + forced_suite + " cannot run suite " + j["suite"].dump());
    }
    if (o.seed) j["seed"] = *o.seed;
    if (o.samples) j["samples"] = *o.samples;
    if (o.tolerance) j["tolerance"] = *o.tolerance;
    if (o.workers) j["workers"] = *o.workers;
    RunConfig cfg = parse_config(j);
    RunReport rep = run_suite(cfg);
    emit_report(rep, o.out.empty() ? cfg.out : o.out);
    summarize(rep);
    return rep.pass ? kPass : kIdentityFailure;
}

int reread(const Options& o) {
    json j;
    try {
        j = json::parse(slurp(o.config));
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    RunReport rep = report_from_json(j);
    if (!o.out.empty()) emit_report(rep, o.out);
    summarize(rep);
    return rep.pass ? kPass : kIdentityFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ybcheck: seeded residual checks for Yang-Baxter type identities and double brackets"};
    app.require_subcommand(1);
    Options o;
    auto add = [&](CLI::App* s, bool report) {
        s->add_option("--config", o.config, report ? "report JSON to read" : "run configuration (JSON)")->required();
        s->add_option("--out", o.out, "where to write the report (default stdout)");
        if (report) return;
        s->add_option("--seed", o.seed, "override the seed");
        s->add_option("--samples", o.samples, "override the sample count");
        s->add_option("--tolerance", o.tolerance, "override the tolerance");
        s->add_option("--workers", o.workers, "worker threads");
    };
    auto* verify = app.add_subcommand("verify", "run the suite named in the config");
    auto* classify = app.add_subcommand("classify", "classify separable data P, Q");
    auto* expand = app.add_subcommand("expand", "expand a one-parameter rule into a constant rule");
    auto* report = app.add_subcommand("report", "re-read a report and print its summary");
    add(verify, false);
    add(classify, false);
    add(expand, false);
    add(report, true);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    try {
        if (*verify) return run(o, "");
        if (*classify) return run(o, "classify");
        if (*expand) return run(o, "expand");
        return reread(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericHazard& e) {
        std::cerr << "numeric hazard: " << e.what() << "\n";
        return kNumericHazard;
    } catch (const PoleMarginError& e) {
        std::cerr << "numeric hazard: " << e.what() << "\n";
        return kNumericHazard;
    } catch (const ThetaError& e) {
        std::cerr << "numeric hazard: " << e.what() << "\n";
        return kNumericHazard;
    } catch (const ExpansionError& e) {
        std::cerr << "identity failure: " << e.what() << "\n";
        return kIdentityFailure;
    } catch (const std::exception& e) {
        std::cerr << "numeric hazard: " << e.what() << "\n";
        return kNumericHazard;
    }
}
