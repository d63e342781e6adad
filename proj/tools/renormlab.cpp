#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "renormlab/finegrid.hpp"
#include "renormlab/mapio.hpp"
#include "renormlab/parabolic.hpp"
#include "renormlab/partitions.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/surgery.hpp"
#include "suite.hpp"

using namespace renormlab;

namespace {

struct MapOptions {
    std::string map = "sine";
    std::string rho, cf, omega;
};

void add_map_options(CLI::App* cmd, MapOptions& m) {
    cmd->add_option("--map", m.map, "rotation, sine or file:<path>");
    cmd->add_option("--rho", m.rho, "rotation number as a real");
    cmd->add_option("--cf", m.cf, "partial quotients, e.g. \"1,1,50,1,*\"");
    cmd->add_option("--omega", m.omega, "sine family parameter");
}

std::string named_target(const std::string& s) {
    if (s == "golden") return "1,*";
    if (s == "silver") return "2,*";
    return s;
}

CircleMap tuned_sine(const std::string& quotients, const PrecisionPolicy& policy) {
    RotationTarget t = RotationTarget::parse(named_target(quotients));
    (void)policy;  // tuning to 1e-12 does not need the extended backend
    return critical_sine_map(tune_parameter(sine_family_critical(), t, 1e-12));
}

CircleMap rotation_by_target(const std::string& quotients) {
    return rotation_map(RotationTarget::parse(named_target(quotients)).expand(40).value());
}

CircleMap resolve(const MapOptions& m, const PrecisionPolicy& policy) {
    if (m.map.rfind("file:", 0) == 0) return load_map_file(m.map.substr(5));
    if (m.map == "rotation") {
        if (!m.rho.empty()) return rotation_map(std::stod(m.rho));
        return rotation_by_target(m.cf.empty() ? "1,*" : m.cf);
    }
    if (m.map == "sine") {
        if (!m.omega.empty()) return critical_sine_map(std::stod(m.omega));
        return tuned_sine(m.cf.empty() ? "1,*" : m.cf, policy);
    }
    throw std::invalid_argument("unknown map source: " + m.map);
}

// family:target, e.g. sine:golden, rotation:0.618, sine:1,1,50,1,* or file:<path>
CircleMap resolve_spec(const std::string& spec, const PrecisionPolicy& policy) {
    if (spec.rfind("file:", 0) == 0) return load_map_file(spec.substr(5));
    auto colon = spec.find(':');
    MapOptions m;
    m.map = spec.substr(0, colon);
    if (colon != std::string::npos) {
        std::string t = spec.substr(colon + 1);
        bool real = t.find('.') != std::string::npos;
        if (real)
            (m.map == "rotation" ? m.rho : m.omega) = t;
        else
            m.cf = t;
    }
    return resolve(m, policy);
}

ContinuedFraction combinatorics(const CircleMap& f, int depth, const PrecisionPolicy& policy) {
    return rotation_number(f, depth + 2, policy).cf;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::vector<DynamicalPartition> partitions(const CircleMap& f, const ContinuedFraction& cf, int depth,
                                           const PrecisionPolicy& policy) {
    std::vector<DynamicalPartition> P;
    for (int n = 1; n <= depth; ++n) P.push_back(build_partition(f, cf, n, policy));
    return P;
}

int run(int argc, char** argv) {
    CLI::App app{"renormlab: renormalization experiments for critical circle maps"};
    app.require_subcommand(1);

    MapOptions mo;
    int depth = 8;
    std::string precision;  // f64, or dd for surgery
    int threshold = 1000;
    std::string sigma = "auto";
    std::string out, csv, only;
    std::uint64_t seed = 1;
    int level = 2;
    std::string fspec = "sine:golden", gspec = "rotation:golden";
    std::vector<int> levels;
    bool inject = false;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--depth", depth, "number of levels");
        cmd->add_option("--precision", precision, "f64 or dd (surgery defaults to dd)");
        cmd->add_option("--out", out, "output path for the JSON report");
        cmd->add_option("--seed", seed, "random seed");
    };

    auto* rotnum = app.add_subcommand("rotnum", "partial quotients of a map");
    add_map_options(rotnum, mo);
    common(rotnum);

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    common(verify);
    verify->add_option("--only", only, "restrict to one module");
    verify->add_flag("--inject-schwarzian-flip", inject, "fault injection: flip the Schwarzian sign of the parabolic fixture");

    auto* partition = app.add_subcommand("partition", "dynamical partitions as CSV");
    add_map_options(partition, mo);
    common(partition);
    partition->add_option("--csv", csv, "CSV path");

    auto* renorm = app.add_subcommand("renorm", "commuting pairs of the first return maps");
    add_map_options(renorm, mo);
    common(renorm);

    auto* profile = app.add_subcommand("profile", "fundamental domain profile of an almost parabolic level");
    add_map_options(profile, mo);
    common(profile);
    profile->add_option("--level", level, "level with a large partial quotient");
    profile->add_option("--csv", csv, "CSV path");

    auto* grid = app.add_subcommand("grid", "fine grid as CSV");
    add_map_options(grid, mo);
    common(grid);
    grid->add_option("--threshold", threshold, "saddle-node threshold");
    grid->add_option("--csv", csv, "CSV path");

    auto* smooth = app.add_subcommand("smoothness", "ratio deviations of the vertex conjugacy");
    common(smooth);
    smooth->add_option("--f", fspec, "first map, family:target");
    smooth->add_option("--g", gspec, "second map, family:target");
    smooth->add_option("--threshold", threshold, "saddle-node threshold");

    auto* surg = app.add_subcommand("surgery", "saddle-node surgery bundle");
    add_map_options(surg, mo);
    common(surg);
    surg->add_option("--level", level, "surgery level");
    surg->add_option("--levels", levels, "several surgery levels, increasing");
    surg->add_option("--sigma", sigma, "exponent: auto or a real");

    CLI11_PARSE(app, argc, argv);

    if (precision.empty()) precision = *surg ? "dd" : "f64";
    PrecisionPolicy policy = policy_from_env(parse_backend(precision));

    if (*rotnum) {
        CircleMap f = resolve(mo, policy);
        RotationMeasurement m = rotation_number(f, depth, policy);
        json j;
        j["schema"] = "rotnum/1";
        j["precision"] = backend_name(policy.backend);
        j["quotients"] = m.cf.quotients;
        j["p"] = m.cf.p;
        j["q"] = m.cf.q;
        std::vector<std::string> d;
        for (double x : m.displacements) d.push_back(format_real(x));
        j["displacements"] = d;
        j["average_estimate"] = format_real(m.average_estimate);
        emit(j.dump(2), out);
        return 0;
    }
    if (*verify) {
        cli::SuiteOptions opt;
        opt.only = only;
        opt.seed = seed;
        opt.flip_schwarzian = inject;
        auto results = cli::run_suite(opt);
        json j = cli::suite_to_json(results);
        emit(j.dump(2), out);
        return j["failed"].get<int>() == 0 ? 0 : 1;
    }
    if (*partition) {
        CircleMap f = resolve(mo, policy);
        ContinuedFraction cf = combinatorics(f, depth, policy);
        std::ostringstream s;
        write_partition_csv(s, partitions(f, cf, depth, policy));
        emit(s.str(), csv.empty() ? out : csv);
        return 0;
    }
    if (*renorm) {
        CircleMap f = resolve(mo, policy);
        ContinuedFraction cf = combinatorics(f, depth, policy);
        json j;
        j["schema"] = "renorm/1";
        j["quotients"] = std::vector<std::int64_t>(cf.quotients.begin(), cf.quotients.begin() + depth + 1);
        json pairs = json::array();
        for (int n = 1; n <= depth; ++n) pairs.push_back(pair_to_json(extract_pair(f, cf, n, policy)));
        j["pairs"] = pairs;
        emit(j.dump(2), out);
        return 0;
    }
    if (*profile) {
        CircleMap f = resolve(mo, policy);
        ContinuedFraction cf = combinatorics(f, std::max(depth, level + 1), policy);
        AlmostParabolicMap ap = make_almost_parabolic(f, cf, level, policy);
        YoccozProfile p = yoccoz_profile(ap);
        std::ostringstream s;
        write_profile_csv(s, p);
        emit(s.str(), csv);
        if (!out.empty()) {
            json j{{"schema", "profile/1"}, {"level", level}, {"a", ap.a}, {"sigma", p.sigma},
                   {"band", p.band}, {"asymmetry", p.asymmetry}};
            emit(j.dump(2), out);
        }
        return 0;
    }
    if (*grid) {
        CircleMap f = resolve(mo, policy);
        ContinuedFraction cf = combinatorics(f, depth, policy);
        FineGrid g = build_fine_grid(partitions(f, cf, depth, policy), threshold);
        std::ostringstream s;
        write_grid_csv(s, g);
        emit(s.str(), csv);
        if (!out.empty()) {
            FineConstants fc = fine_constants(g);
            json j{{"schema", "grid/1"},       {"threshold", threshold},     {"levels", g.levels.size()},
                   {"a", fc.a},                {"c", fc.c},                  {"C0", fc.C0},
                   {"lambda0", fc.lambda0},    {"lambda1", fc.lambda1},      {"sandwich", fc.sandwich},
                   {"strict_refinement", fc.strict_refinement}, {"saddle_nodes", g.saddle_nodes.size()}};
            emit(j.dump(2), out);
        }
        return 0;
    }
    if (*smooth) {
        CircleMap f = resolve_spec(fspec, policy), g = resolve_spec(gspec, policy);
        GridConjugacy h = grid_conjugacy(f, g, depth, policy);
        FineGrid gf = build_fine_grid(partitions(f, h.cf, depth, policy), threshold);
        FineGrid gg = build_fine_grid(partitions(g, h.cf, depth, policy), threshold);
        emit(smoothness_to_json(smoothness_report(h, gf, gg)), out);
        return 0;
    }
    if (*surg) {
        CircleMap f = resolve(mo, policy);
        if (levels.empty()) levels = {level};
        const int deep = std::max(depth, levels.back() + 4);
        ContinuedFraction cf = combinatorics(f, deep, policy);
        SigmaRule rule = sigma == "auto" ? auto_sigma() : fixed_sigma(std::stod(sigma));
        Counterexample c = build_counterexample(f, cf, levels, rule, policy);
        std::vector<SurgeryCheck> checks;
        CircleMap prev = f;
        for (const auto& s : c.stages) {
            checks.push_back(verify_surgery(prev, s, cf, deep, policy));
            prev = s.map;
        }
        emit(surgery_bundle_json(c, checks), out);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const RationalLock& e) {
        std::cerr << "rational lock: " << e.what() << '\n';
        return 2;
    } catch (const CombinatorialMismatch& e) {
        std::cerr << "combinatorial mismatch: " << e.what() << '\n';
        return 2;
    } catch (const NonRenormalizable& e) {
        std::cerr << "not renormalizable: " << e.what() << '\n';
        return 2;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
